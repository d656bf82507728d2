#include "causalvid/nn/layers.hpp"

#include <cmath>

namespace cvid::nn {

using namespace ad;

Linear::Linear(ParamStore& ps, const std::string& prefix, int in, int out, Rng& rng)
    : W(&ps.get(prefix + ".W", in, out, init_glorot(rng))),
      b(&ps.get(prefix + ".b", 1, out, init_zero())) {}

Value Linear::fwd(Tape& t, Value x) const {
  return add_rowvec(matmul(x, t.leaf(*W)), t.leaf(*b));
}

FeedForward::FeedForward(ParamStore& ps, const std::string& prefix, int in, int hidden, int out,
                         Rng& rng)
    : l1(ps, prefix + ".l1", in, hidden, rng), l2(ps, prefix + ".l2", hidden, out, rng) {}

Value FeedForward::fwd(Tape& t, Value x) const { return l2.fwd(t, vtanh(l1.fwd(t, x))); }

LayerNorm::LayerNorm(ParamStore& ps, const std::string& prefix, int dim)
    : gain(&ps.get(prefix + ".gain", 1, dim, [](Mat& m) { std::fill(m.a.begin(), m.a.end(), 1.0); })),
      bias(&ps.get(prefix + ".bias", 1, dim, init_zero())) {}

Value LayerNorm::fwd(Tape& t, Value x) const {
  Value mu = row_mean(x);
  Value centered = sub_colvec(x, mu);
  Value var = row_mean(mul(centered, centered));
  Value inv = vinv(vsqrt(sadd(var, kEps)));
  Value normed = scale_rows(centered, inv);
  return add_rowvec(mul_rowvec(normed, t.leaf(*gain)), t.leaf(*bias));
}

GruCell::GruCell(ParamStore& ps, const std::string& prefix, int in, int hid, Rng& rng)
    : hidden(hid),
      Wz(&ps.get(prefix + ".Wz", in, hid, init_glorot(rng))),
      Uz(&ps.get(prefix + ".Uz", hid, hid, init_glorot(rng))),
      bz(&ps.get(prefix + ".bz", 1, hid, init_zero())),
      Wr(&ps.get(prefix + ".Wr", in, hid, init_glorot(rng))),
      Ur(&ps.get(prefix + ".Ur", hid, hid, init_glorot(rng))),
      br(&ps.get(prefix + ".br", 1, hid, init_zero())),
      Wn(&ps.get(prefix + ".Wn", in, hid, init_glorot(rng))),
      Un(&ps.get(prefix + ".Un", hid, hid, init_glorot(rng))),
      bn(&ps.get(prefix + ".bn", 1, hid, init_zero())) {}

Value GruCell::step(Tape& t, Value x, Value h) const {
  Value z = vsigmoid(add_rowvec(add(matmul(x, t.leaf(*Wz)), matmul(h, t.leaf(*Uz))), t.leaf(*bz)));
  Value r = vsigmoid(add_rowvec(add(matmul(x, t.leaf(*Wr)), matmul(h, t.leaf(*Ur))), t.leaf(*br)));
  Value n =
      vtanh(add_rowvec(add(matmul(x, t.leaf(*Wn)), matmul(mul(r, h), t.leaf(*Un))), t.leaf(*bn)));
  // h' = (1-z)*n + z*h
  Value one_minus_z = sadd(neg(z), 1.0);
  return add(mul(one_minus_z, n), mul(z, h));
}

Attention::Attention(ParamStore& ps, const std::string& prefix, int q_dim, int kv_dim, int out,
                     Rng& rng)
    : out_dim(out),
      Wq(&ps.get(prefix + ".Wq", q_dim, out, init_glorot(rng))),
      Wk(&ps.get(prefix + ".Wk", kv_dim, out, init_glorot(rng))),
      Wv(&ps.get(prefix + ".Wv", kv_dim, out, init_glorot(rng))),
      Wo(&ps.get(prefix + ".Wo", out, out, init_glorot(rng))) {}

Value Attention::fwd(Tape& t, Value q_seq, Value kv_seq, const Mat* mask) const {
  Value Q = matmul(q_seq, t.leaf(*Wq));
  Value K = matmul(kv_seq, t.leaf(*Wk));
  Value V = matmul(kv_seq, t.leaf(*Wv));
  Value scores = smul(matmul(Q, transpose(K)), 1.0 / std::sqrt(static_cast<double>(out_dim)));
  if (mask != nullptr) {
    CVID_CHECK(mask->rows == t.val(scores).rows && mask->cols == t.val(scores).cols,
               "attention mask shape mismatch");
    scores = add(scores, t.constant(*mask));
  }
  Value attn = row_softmax(scores);
  return matmul(matmul(attn, V), t.leaf(*Wo));
}

Conv1d::Conv1d(ParamStore& ps, const std::string& prefix, int in, int out, int k, Rng& rng)
    : ksize(k), b(&ps.get(prefix + ".b", 1, out, init_zero())) {
  CVID_CHECK(k >= 1 && k % 2 == 1, "Conv1d: kernel size must be odd, got " << k);
  for (int o = 0; o < k; ++o)
    taps.push_back(&ps.get(prefix + ".w" + std::to_string(o), in, out, init_glorot(rng)));
}

Value Conv1d::fwd(Tape& t, Value x) const {
  const int T = x.rows();
  const int in = x.cols();
  const int half = ksize / 2;
  Value padded = x;
  if (half > 0) {
    Value pad = t.constant(Mat::zeros(half, in));
    padded = concat_rows(concat_rows(pad, x), pad);
  }
  Value acc;  // sum over taps of shifted slice * tap weight
  for (int o = 0; o < ksize; ++o) {
    Value shifted = slice_rows(padded, o, o + T);
    Value term = matmul(shifted, t.leaf(*taps[o]));
    acc = (o == 0) ? term : add(acc, term);
  }
  return add_rowvec(acc, t.leaf(*b));
}

Embedding::Embedding(ParamStore& ps, const std::string& prefix, int vocab, int dim, Rng& rng)
    : E(&ps.get(prefix + ".E", vocab, dim, init_normal(rng, 0.1))) {}

Value Embedding::fwd(Tape& t, const std::vector<int>& ids) const {
  CVID_CHECK(!ids.empty(), "Embedding: empty id list");
  return gather_rows(t.leaf(*E), ids);
}

Mat positional_encoding(int T, int dim) {
  Mat pe(T, dim);
  for (int pos = 0; pos < T; ++pos)
    for (int i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -2.0 * (i / 2) / dim);
      pe.at(pos, i) = (i % 2 == 0) ? std::sin(pos * freq) : std::cos(pos * freq);
    }
  return pe;
}

Mat scalar_encoding(double t, int dim) {
  Mat e(1, dim);
  for (int i = 0; i < dim; ++i) {
    const double freq = std::pow(10000.0, -2.0 * (i / 2) / dim);
    e.at(0, i) = (i % 2 == 0) ? std::sin(t * freq) : std::cos(t * freq);
  }
  return e;
}

Mat causal_mask(int T) {
  Mat m(T, T);
  for (int r = 0; r < T; ++r)
    for (int c = r + 1; c < T; ++c) m.at(r, c) = -1e9;
  return m;
}

}  // namespace cvid::nn
