#include <doctest.h>

#include <cstdio>

#include "causalvid/core/binio.hpp"
#include "causalvid/core/kernels.hpp"
#include "causalvid/core/mat.hpp"
#include "causalvid/core/rng.hpp"
#include "testutil.hpp"

using namespace cvid;

namespace {

Mat random_mat(Rng& rng, int r, int c) {
  Mat m(r, c);
  for (double& v : m.a) v = rng.uniform(-2.0, 2.0);
  return m;
}

}  // namespace

TEST_CASE("rng is reproducible and uniform-ish") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(7);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("counter-based rng derivation is stateless") {
  Rng a = rng_at(1, 2, 3);
  Rng b = rng_at(1, 2, 3);
  CHECK(a.next_u64() == b.next_u64());
  Rng c = rng_at(1, 2, 4);
  CHECK(Rng(rng_at(1, 2, 3).next_u64()).next_u64() != c.next_u64());
}

TEST_CASE("serial and omp kernels agree bit-for-bit") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    int m = rng.uniform_int(1, 70);
    int k = rng.uniform_int(1, 70);
    int n = rng.uniform_int(1, 70);
    Mat A = random_mat(rng, m, k);
    Mat B = random_mat(rng, k, n);
    Mat Cs(m, n), Cp(m, n);
    kernels::serial::matmul(A.data(), B.data(), Cs.data(), m, k, n);
    kernels::omp::matmul(A.data(), B.data(), Cp.data(), m, k, n);
    CHECK(Cs == Cp);

    Mat At = A.transposed();
    Mat C2s(m, n), C2p(m, n);
    kernels::serial::matmul_tn(At.data(), B.data(), C2s.data(), m, k, n);
    kernels::omp::matmul_tn(At.data(), B.data(), C2p.data(), m, k, n);
    CHECK(C2s == C2p);
    CHECK(C2s == Cs);  // (A^T)^T B == AB

    Mat Bt = B.transposed();
    Mat C3s(m, n), C3p(m, n);
    kernels::serial::matmul_nt(A.data(), Bt.data(), C3s.data(), m, k, n);
    kernels::omp::matmul_nt(A.data(), Bt.data(), C3p.data(), m, k, n);
    CHECK(C3s == C3p);
    CHECK(C3s == Cs);

    Mat X = random_mat(rng, m, n);
    Mat Y = random_mat(rng, m, n);
    Mat Zs(m, n), Zp(m, n);
    kernels::serial::ew_mul(X.data(), Y.data(), Zs.data(), X.size());
    kernels::omp::ew_mul(X.data(), Y.data(), Zp.data(), X.size());
    CHECK(Zs == Zp);

    Mat Ss(m, n), Sp(m, n);
    kernels::serial::row_softmax(X.data(), Ss.data(), m, n);
    kernels::omp::row_softmax(X.data(), Sp.data(), m, n);
    CHECK(Ss == Sp);
  }
}

TEST_CASE("dispatch obeys the parallel switch and stays bit-identical") {
  Rng rng(5);
  Mat A = random_mat(rng, 96, 64);
  Mat B = random_mat(rng, 64, 80);
  kernels::set_parallel(false);
  Mat C1 = kernels::matmul(A, B);
  kernels::set_parallel(true);
  Mat C2 = kernels::matmul(A, B);
  CHECK(C1 == C2);
}

TEST_CASE("row_softmax rows are normalized and stable under shift") {
  Rng rng(3);
  Mat X = random_mat(rng, 8, 13);
  for (double& v : X.a) v *= 300.0;  // exercise the max-shift path
  Mat Y = kernels::row_softmax(X);
  for (int r = 0; r < Y.rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < Y.cols; ++c) {
      CHECK(Y.at(r, c) >= 0.0);
      s += Y.at(r, c);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("feature file round trip (float32 payload)") {
  cvid::test::TempDir tmp("feat");
  Rng rng(9);
  Mat m = random_mat(rng, 7, 5);
  const std::string path = tmp.str() + "/x.bin";
  binio::save_feature_matrix(path, m);
  Mat back = binio::load_feature_matrix(path);
  REQUIRE(back.rows == m.rows);
  REQUIRE(back.cols == m.cols);
  for (size_t i = 0; i < m.a.size(); ++i)
    CHECK(back.a[i] == doctest::Approx(m.a[i]).epsilon(1e-6));
  // float32 quantization is exact when re-saved
  binio::save_feature_matrix(path, back);
  Mat back2 = binio::load_feature_matrix(path);
  CHECK(back2 == back);
}

TEST_CASE("feature file rejects bad magic") {
  cvid::test::TempDir tmp("featbad");
  const std::string path = tmp.str() + "/bad.bin";
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTMAGIC--------";
  }
  CHECK_THROWS_AS((void)binio::load_feature_matrix(path), Error);
}
