#pragma once

#include <string>
#include <vector>

#include "causalvid/nn/params.hpp"

namespace cvid::nn {

using ad::Tape;
using ad::Value;

// Layers are thin wrappers that register named params in a ParamStore at
// construction and build tape graphs on demand. They hold references into the
// store, so the store must outlive them.

struct Linear {
  Linear(ParamStore& ps, const std::string& prefix, int in, int out, Rng& rng);
  Value fwd(Tape& t, Value x) const;  // x: TxIn -> TxOut
  Param* W;
  Param* b;
};

// Two-layer position-wise feed-forward with tanh hidden activation.
struct FeedForward {
  FeedForward(ParamStore& ps, const std::string& prefix, int in, int hidden, int out, Rng& rng);
  Value fwd(Tape& t, Value x) const;
  Linear l1, l2;
};

struct LayerNorm {
  LayerNorm(ParamStore& ps, const std::string& prefix, int dim);
  Value fwd(Tape& t, Value x) const;  // per-row normalization
  Param* gain;
  Param* bias;
  static constexpr double kEps = 1e-5;
};

// Standard gated recurrent unit. step() advances one frame.
struct GruCell {
  GruCell(ParamStore& ps, const std::string& prefix, int in, int hidden, Rng& rng);
  Value step(Tape& t, Value x, Value h) const;  // x: 1xIn, h: 1xH -> 1xH
  int hidden;
  Param *Wz, *Uz, *bz, *Wr, *Ur, *br, *Wn, *Un, *bn;
};

// Single-head scaled dot-product attention block with projections.
struct Attention {
  Attention(ParamStore& ps, const std::string& prefix, int q_dim, int kv_dim, int out, Rng& rng);
  // mask: optional additive score mask (TqxTk constant), e.g. causal -1e9.
  Value fwd(Tape& t, Value q_seq, Value kv_seq, const Mat* mask = nullptr) const;
  int out_dim;
  Param *Wq, *Wk, *Wv, *Wo;
};

// 1-D convolution over time (rows = time). Zero padding keeps the length.
struct Conv1d {
  Conv1d(ParamStore& ps, const std::string& prefix, int in, int out, int ksize, Rng& rng);
  Value fwd(Tape& t, Value x) const;  // TxIn -> TxOut
  int ksize;
  std::vector<Param*> taps;  // one InxOut weight per kernel offset
  Param* b;
};

struct Embedding {
  Embedding(ParamStore& ps, const std::string& prefix, int vocab, int dim, Rng& rng);
  Value fwd(Tape& t, const std::vector<int>& ids) const;  // len x dim
  Param* E;
};

// Sinusoidal positional encoding for integer positions 0..T-1.
Mat positional_encoding(int T, int dim);
// Sinusoidal encoding of one continuous scalar (e.g. a timestamp in seconds).
Mat scalar_encoding(double t, int dim);

// Causal (strictly-upper-triangular -1e9) additive mask.
Mat causal_mask(int T);

}  // namespace cvid::nn
