#pragma once

#include <functional>
#include <string>
#include <vector>

#include "causalvid/core/mat.hpp"

namespace cvid::ad {

class Tape;

// Handle to a tape node. Cheap to copy; valid as long as the tape lives.
struct Value {
  Tape* tape = nullptr;
  int id = -1;
  bool ok() const { return tape != nullptr && id >= 0; }
  int rows() const;
  int cols() const;
};

// Trainable tensor. Gradients accumulate into `grad` on Tape::backward;
// `m`/`v` are the optimizer moments.
struct Param {
  std::string name;
  Mat value;
  Mat grad;
  Mat m;
  Mat v;
};

// Reverse-mode tape over Mat. One tape per forward pass; backward() walks the
// nodes in reverse creation order.
class Tape {
 public:
  Value constant(Mat m);
  Value leaf(Param& p);

  const Mat& val(Value v) const;
  Mat& grad(Value v);

  // Seeds d(loss)/d(loss)=1 (loss must be 1x1) and propagates. Leaf node
  // grads are added into their Param::grad.
  void backward(Value loss);

  size_t num_nodes() const { return nodes_.size(); }

 private:
  friend Value raw_op(Tape& t, Mat out, std::vector<int> parents,
                      std::function<void(Tape&, int)> back);

  struct Node {
    Mat val;
    Mat grad;  // allocated lazily in backward
    std::vector<int> parents;
    std::function<void(Tape&, int)> back;  // empty for constants/leaves
  };

  int add(Mat val, std::vector<int> parents, std::function<void(Tape&, int)> back);

  std::vector<Node> nodes_;
  std::vector<std::pair<int, Param*>> leaves_;
};

// --- op surface -------------------------------------------------------------

Value raw_op(Tape& t, Mat out, std::vector<int> parents, std::function<void(Tape&, int)> back);

Value add(Value a, Value b);
Value sub(Value a, Value b);
Value mul(Value a, Value b);  // elementwise
Value matmul(Value a, Value b);
Value transpose(Value a);

Value add_rowvec(Value x, Value v);  // x: RxC, v: 1xC
Value mul_rowvec(Value x, Value v);  // x: RxC, v: 1xC
Value sub_colvec(Value x, Value v);  // x: RxC, v: Rx1
Value scale_rows(Value x, Value s);  // x: RxC, s: Rx1, y[r][c] = x[r][c]*s[r]
Value scale_dyn(Value x, Value s);   // s: 1x1 dynamic scalar

Value smul(Value x, double c);
Value sadd(Value x, double c);
Value neg(Value x);

Value vtanh(Value x);
Value vsigmoid(Value x);
Value vexp(Value x);
Value vlog(Value x);
Value vsqrt(Value x);
Value vinv(Value x);
Value vrelu(Value x);
Value clamp_min(Value x, double c);

Value row_softmax(Value x);
Value row_sum(Value x);   // RxC -> Rx1
Value row_mean(Value x);  // RxC -> Rx1
Value col_sum(Value x);   // RxC -> 1xC
Value sum_all(Value x);   // -> 1x1
Value mean_all(Value x);  // -> 1x1

Value slice_rows(Value x, int r0, int r1);
Value slice_cols(Value x, int c0, int c1);
Value concat_rows(Value a, Value b);
Value concat_cols(Value a, Value b);
Value gather_rows(Value x, std::vector<int> idx);
Value repeat_rows(Value x, int n);  // x: 1xC -> nxC
Value pick(Value x, int r, int c);  // -> 1x1

Value vmax(Value x);  // -> 1x1, subgradient to first argmax
Value vmin(Value x);  // -> 1x1, subgradient to first argmin

}  // namespace cvid::ad
