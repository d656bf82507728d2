#include <doctest.h>

#include <algorithm>
#include <map>

#include "causalvid/confounder/dictionary.hpp"
#include "causalvid/core/rng.hpp"
#include "testutil.hpp"

using namespace cvid;

using Samples = std::vector<std::pair<int, std::vector<double>>>;

TEST_CASE("mean of two features") {
  Samples s = {{2, {1, 3}}, {2, {3, 5}}};
  auto d = build_dictionary(s, 4, 2);
  CHECK(d.entries.at(2, 0) == doctest::Approx(2.0));
  CHECK(d.entries.at(2, 1) == doctest::Approx(4.0));
  CHECK(d.counts[2] == 2);
  CHECK(d.counts[0] == 0);
  CHECK(d.entries.at(0, 0) == 0.0);
}

TEST_CASE("one sample per class: entries equal samples, prior uniform") {
  Samples s = {{0, {1, 0}}, {1, {0, 2}}, {2, {3, 3}}};
  auto d = build_dictionary(s, 3, 2);
  CHECK(d.entries.at(0, 0) == 1.0);
  CHECK(d.entries.at(1, 1) == 2.0);
  CHECK(d.entries.at(2, 0) == 3.0);
  for (double p : d.prior) CHECK(p == doctest::Approx(1.0 / 3));
}

TEST_CASE("200 random samples match a brute-force per-class accumulation oracle") {
  Rng rng(77);
  const int N = 5, D = 3;
  Samples s;
  for (int i = 0; i < 200; ++i) {
    int cls = rng.uniform_int(0, N);
    std::vector<double> f(D);
    for (double& v : f) v = rng.uniform(-4.0, 4.0);
    s.push_back({cls, f});
  }
  auto d = build_dictionary(s, N, D);

  // independent grouping oracle
  std::map<int, std::vector<std::vector<double>>> groups;
  for (auto& [cls, f] : s) groups[cls].push_back(f);
  for (int cls = 0; cls < N; ++cls) {
    if (!groups.count(cls)) {
      CHECK(d.counts[cls] == 0);
      continue;
    }
    const auto& g = groups[cls];
    CHECK(d.counts[cls] == static_cast<int64_t>(g.size()));
    for (int c = 0; c < D; ++c) {
      double acc = 0.0;
      for (const auto& f : g) acc += f[c];
      CHECK(std::fabs(d.entries.at(cls, c) - acc / g.size()) < 1e-9);
    }
  }
  // prior = empirical frequency (direct counting oracle)
  for (int cls = 0; cls < N; ++cls) {
    double freq = groups.count(cls) ? groups[cls].size() / 200.0 : 0.0;
    CHECK(d.prior[cls] == doctest::Approx(freq).epsilon(1e-12));
  }
}

TEST_CASE("class_prior trivia") {
  {
    Samples s = {{0, {1}}, {1, {1}}, {2, {1}}, {3, {1}}};
    auto d = build_dictionary(s, 4, 1);
    for (double p : class_prior(d)) CHECK(p == doctest::Approx(0.25));
  }
  {
    Samples s = {{0, {1}}, {0, {1}}, {0, {1}}, {1, {1}}};
    auto d = build_dictionary(s, 2, 1);
    CHECK(class_prior(d)[0] == doctest::Approx(0.75));
    CHECK(class_prior(d)[1] == doctest::Approx(0.25));
  }
}

TEST_CASE("empty sample list: all-zero entries, uniform prior, flagged") {
  auto d = build_dictionary({}, 3, 2);
  CHECK(d.empty_corpus);
  for (double v : d.entries.a) CHECK(v == 0.0);
  for (double p : d.prior) CHECK(p == doctest::Approx(1.0 / 3));
}

TEST_CASE("dimension mismatch and bad class are rejected") {
  CHECK_THROWS_AS(build_dictionary({{0, {1, 2, 3}}}, 2, 2), Error);
  CHECK_THROWS_AS(build_dictionary({{5, {1, 2}}}, 2, 2), Error);
  CHECK_THROWS_AS(build_dictionary({{-1, {1, 2}}}, 2, 2), Error);
}

TEST_CASE("permutation invariance of the sample list") {
  Rng rng(13);
  Samples s;
  for (int i = 0; i < 40; ++i)
    s.push_back({rng.uniform_int(0, 3), {rng.uniform(), rng.uniform()}});
  auto d1 = build_dictionary(s, 3, 2);
  // deterministic shuffle
  for (int i = static_cast<int>(s.size()) - 1; i > 0; --i)
    std::swap(s[i], s[rng.uniform_int(0, i + 1)]);
  auto d2 = build_dictionary(s, 3, 2);
  CHECK(d1.counts == d2.counts);
  CHECK(max_abs_diff(d1.entries, d2.entries) < 1e-12);
}

TEST_CASE("concat-then-build equals merge of parts (to 1e-9)") {
  Rng rng(29);
  Samples a, b;
  for (int i = 0; i < 30; ++i) a.push_back({rng.uniform_int(0, 4), {rng.uniform(), rng.uniform()}});
  for (int i = 0; i < 50; ++i) b.push_back({rng.uniform_int(0, 4), {rng.uniform(), rng.uniform()}});
  Samples both = a;
  both.insert(both.end(), b.begin(), b.end());
  auto whole = build_dictionary(both, 4, 2);
  auto merged = merge_dictionaries(build_dictionary(a, 4, 2), build_dictionary(b, 4, 2));
  CHECK(whole.counts == merged.counts);
  CHECK(max_abs_diff(whole.entries, merged.entries) < 1e-9);
  for (size_t i = 0; i < whole.prior.size(); ++i)
    CHECK(whole.prior[i] == doctest::Approx(merged.prior[i]).epsilon(1e-12));
}

TEST_CASE("prior is a valid distribution for random inputs") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    int n = rng.uniform_int(1, 6);
    Samples s;
    int count = rng.uniform_int(0, 10);
    for (int i = 0; i < count; ++i) s.push_back({rng.uniform_int(0, n), {rng.uniform()}});
    auto d = build_dictionary(s, n, 1);
    double total = 0.0;
    for (double p : d.prior) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("dictionary file round trip") {
  cvid::test::TempDir tmp("dict");
  Rng rng(41);
  Samples s;
  for (int i = 0; i < 25; ++i)
    s.push_back({rng.uniform_int(0, 3), {rng.uniform(), rng.uniform(), rng.uniform()}});
  auto d = build_dictionary(s, 3, 3);
  const std::string path = tmp.str() + "/dict.bin";
  save_dictionary(path, d);
  auto back = load_dictionary(path);
  CHECK(back.counts == d.counts);
  REQUIRE(back.entries.same_shape(d.entries));
  for (size_t i = 0; i < d.entries.a.size(); ++i)
    CHECK(back.entries.a[i] == doctest::Approx(d.entries.a[i]).epsilon(1e-6));
  for (size_t i = 0; i < d.prior.size(); ++i)
    CHECK(back.prior[i] == doctest::Approx(d.prior[i]).epsilon(1e-9));
}

TEST_CASE("roi validation") {
  RoI ok{1, 0.1, 0.1, 0.5, 0.6, {0.0, 0.0}};
  CHECK_NOTHROW(validate_roi(ok, 4, 2));
  RoI bad_box = ok;
  bad_box.x1 = 0.05;
  CHECK_THROWS_AS(validate_roi(bad_box, 4, 2), Error);
  RoI bad_cls = ok;
  bad_cls.class_id = 9;
  CHECK_THROWS_AS(validate_roi(bad_cls, 4, 2), Error);
  RoI bad_dim = ok;
  bad_dim.feature = {1.0};
  CHECK_THROWS_AS(validate_roi(bad_dim, 4, 2), Error);
}
