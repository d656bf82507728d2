#include "causalvid/autodiff/tape.hpp"

#include <cmath>

#include "causalvid/core/kernels.hpp"

namespace cvid::ad {

namespace {

void check_same_tape(Value a, Value b) {
  CVID_CHECK(a.ok() && b.ok() && a.tape == b.tape, "autodiff: values from different tapes");
}

Mat& ensure_grad(Tape& t, Value v) { return t.grad(v); }

}  // namespace

int Value::rows() const { return tape->val(*this).rows; }
int Value::cols() const { return tape->val(*this).cols; }

int Tape::add(Mat val, std::vector<int> parents, std::function<void(Tape&, int)> back) {
  nodes_.push_back(Node{std::move(val), Mat{}, std::move(parents), std::move(back)});
  return static_cast<int>(nodes_.size()) - 1;
}

Value Tape::constant(Mat m) { return Value{this, add(std::move(m), {}, nullptr)}; }

Value Tape::leaf(Param& p) {
  int id = add(p.value, {}, nullptr);
  leaves_.emplace_back(id, &p);
  return Value{this, id};
}

const Mat& Tape::val(Value v) const {
  CVID_CHECK(v.tape == this && v.id >= 0 && v.id < static_cast<int>(nodes_.size()),
             "autodiff: bad value handle");
  return nodes_[v.id].val;
}

Mat& Tape::grad(Value v) {
  CVID_CHECK(v.tape == this && v.id >= 0 && v.id < static_cast<int>(nodes_.size()),
             "autodiff: bad value handle");
  Node& n = nodes_[v.id];
  if (n.grad.rows != n.val.rows || n.grad.cols != n.val.cols)
    n.grad = Mat::zeros(n.val.rows, n.val.cols);
  return n.grad;
}

void Tape::backward(Value loss) {
  CVID_CHECK(loss.tape == this, "autodiff: loss from another tape");
  const Mat& lv = val(loss);
  CVID_CHECK(lv.rows == 1 && lv.cols == 1, "autodiff: backward needs a 1x1 loss");
  grad(loss).at(0, 0) = 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.back) continue;
    if (n.grad.empty()) continue;  // never reached from the loss
    n.back(*this, i);
  }
  for (auto& [id, p] : leaves_) {
    const Mat& g = nodes_[id].grad;
    if (g.empty()) continue;
    CVID_CHECK(p->grad.same_shape(p->value) || p->grad.empty(), "param grad shape drift");
    if (p->grad.empty()) p->grad = Mat::zeros(p->value.rows, p->value.cols);
    for (size_t k = 0; k < g.a.size(); ++k) p->grad.a[k] += g.a[k];
  }
}

Value raw_op(Tape& t, Mat out, std::vector<int> parents, std::function<void(Tape&, int)> back) {
  return Value{&t, t.add(std::move(out), std::move(parents), std::move(back))};
}

// --- helpers for backward bodies ---------------------------------------------

namespace {

const Mat& nval(Tape& t, int id) { return t.val(Value{&t, id}); }
Mat& ngrad(Tape& t, int id) { return t.grad(Value{&t, id}); }

}  // namespace

// --- binary elementwise -------------------------------------------------------

Value add(Value a, Value b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Mat& av = t.val(a);
  const Mat& bv = t.val(b);
  CVID_CHECK(av.same_shape(bv), "add: shape mismatch " << av.rows << "x" << av.cols << " vs "
                                                       << bv.rows << "x" << bv.cols);
  Mat y(av.rows, av.cols);
  kernels::ew_add(av.data(), bv.data(), y.data(), y.size());
  int ai = a.id, bi = b.id;
  return raw_op(t, std::move(y), {ai, bi}, [ai, bi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& ga = ngrad(tt, ai);
    Mat& gb = ngrad(tt, bi);
    for (size_t i = 0; i < g.a.size(); ++i) {
      ga.a[i] += g.a[i];
      gb.a[i] += g.a[i];
    }
  });
}

Value sub(Value a, Value b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Mat& av = t.val(a);
  const Mat& bv = t.val(b);
  CVID_CHECK(av.same_shape(bv), "sub: shape mismatch");
  Mat y(av.rows, av.cols);
  kernels::ew_sub(av.data(), bv.data(), y.data(), y.size());
  int ai = a.id, bi = b.id;
  return raw_op(t, std::move(y), {ai, bi}, [ai, bi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& ga = ngrad(tt, ai);
    Mat& gb = ngrad(tt, bi);
    for (size_t i = 0; i < g.a.size(); ++i) {
      ga.a[i] += g.a[i];
      gb.a[i] -= g.a[i];
    }
  });
}

Value mul(Value a, Value b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Mat& av = t.val(a);
  const Mat& bv = t.val(b);
  CVID_CHECK(av.same_shape(bv), "mul: shape mismatch");
  Mat y(av.rows, av.cols);
  kernels::ew_mul(av.data(), bv.data(), y.data(), y.size());
  int ai = a.id, bi = b.id;
  return raw_op(t, std::move(y), {ai, bi}, [ai, bi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& av2 = nval(tt, ai);
    const Mat& bv2 = nval(tt, bi);
    Mat& ga = ngrad(tt, ai);
    Mat& gb = ngrad(tt, bi);
    for (size_t i = 0; i < g.a.size(); ++i) {
      ga.a[i] += g.a[i] * bv2.a[i];
      gb.a[i] += g.a[i] * av2.a[i];
    }
  });
}

Value matmul(Value a, Value b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Mat& av = t.val(a);
  const Mat& bv = t.val(b);
  CVID_CHECK(av.cols == bv.rows, "matmul: inner dims differ");
  Mat y = kernels::matmul(av, bv);
  int ai = a.id, bi = b.id;
  return raw_op(t, std::move(y), {ai, bi}, [ai, bi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& av2 = nval(tt, ai);
    const Mat& bv2 = nval(tt, bi);
    Mat da = kernels::matmul_nt(g, bv2);   // g * b^T
    Mat db = kernels::matmul_tn(av2, g);   // a^T * g
    Mat& ga = ngrad(tt, ai);
    Mat& gb = ngrad(tt, bi);
    for (size_t i = 0; i < da.a.size(); ++i) ga.a[i] += da.a[i];
    for (size_t i = 0; i < db.a.size(); ++i) gb.a[i] += db.a[i];
  });
}

Value transpose(Value a) {
  Tape& t = *a.tape;
  Mat y = t.val(a).transposed();
  int ai = a.id;
  return raw_op(t, std::move(y), {ai}, [ai](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& ga = ngrad(tt, ai);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) ga.at(c, r) += g.at(r, c);
  });
}

// --- broadcasts ----------------------------------------------------------------

Value add_rowvec(Value x, Value v) {
  check_same_tape(x, v);
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  const Mat& vv = t.val(v);
  CVID_CHECK(vv.rows == 1 && vv.cols == xv.cols, "add_rowvec: want 1x" << xv.cols);
  Mat y = xv;
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < y.cols; ++c) y.at(r, c) += vv.at(0, c);
  int xi = x.id, vi = v.id;
  return raw_op(t, std::move(y), {xi, vi}, [xi, vi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    Mat& gv = ngrad(tt, vi);
    for (size_t i = 0; i < g.a.size(); ++i) gx.a[i] += g.a[i];
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) gv.at(0, c) += g.at(r, c);
  });
}

Value mul_rowvec(Value x, Value v) {
  check_same_tape(x, v);
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  const Mat& vv = t.val(v);
  CVID_CHECK(vv.rows == 1 && vv.cols == xv.cols, "mul_rowvec: want 1x" << xv.cols);
  Mat y = xv;
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < y.cols; ++c) y.at(r, c) *= vv.at(0, c);
  int xi = x.id, vi = v.id;
  return raw_op(t, std::move(y), {xi, vi}, [xi, vi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& xv2 = nval(tt, xi);
    const Mat& vv2 = nval(tt, vi);
    Mat& gx = ngrad(tt, xi);
    Mat& gv = ngrad(tt, vi);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) {
        gx.at(r, c) += g.at(r, c) * vv2.at(0, c);
        gv.at(0, c) += g.at(r, c) * xv2.at(r, c);
      }
  });
}

Value sub_colvec(Value x, Value v) {
  check_same_tape(x, v);
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  const Mat& vv = t.val(v);
  CVID_CHECK(vv.cols == 1 && vv.rows == xv.rows, "sub_colvec: want " << xv.rows << "x1");
  Mat y = xv;
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < y.cols; ++c) y.at(r, c) -= vv.at(r, 0);
  int xi = x.id, vi = v.id;
  return raw_op(t, std::move(y), {xi, vi}, [xi, vi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    Mat& gv = ngrad(tt, vi);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) {
        gx.at(r, c) += g.at(r, c);
        gv.at(r, 0) -= g.at(r, c);
      }
  });
}

Value scale_rows(Value x, Value s) {
  check_same_tape(x, s);
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  const Mat& sv = t.val(s);
  CVID_CHECK(sv.cols == 1 && sv.rows == xv.rows, "scale_rows: want " << xv.rows << "x1");
  Mat y = xv;
  for (int r = 0; r < y.rows; ++r)
    for (int c = 0; c < y.cols; ++c) y.at(r, c) *= sv.at(r, 0);
  int xi = x.id, si = s.id;
  return raw_op(t, std::move(y), {xi, si}, [xi, si](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& xv2 = nval(tt, xi);
    const Mat& sv2 = nval(tt, si);
    Mat& gx = ngrad(tt, xi);
    Mat& gs = ngrad(tt, si);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) {
        gx.at(r, c) += g.at(r, c) * sv2.at(r, 0);
        gs.at(r, 0) += g.at(r, c) * xv2.at(r, c);
      }
  });
}

Value scale_dyn(Value x, Value s) {
  check_same_tape(x, s);
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  const Mat& sv = t.val(s);
  CVID_CHECK(sv.rows == 1 && sv.cols == 1, "scale_dyn: scalar must be 1x1");
  Mat y = xv;
  const double sc = sv.at(0, 0);
  for (double& e : y.a) e *= sc;
  int xi = x.id, si = s.id;
  return raw_op(t, std::move(y), {xi, si}, [xi, si](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& xv2 = nval(tt, xi);
    const double sc2 = nval(tt, si).at(0, 0);
    Mat& gx = ngrad(tt, xi);
    Mat& gs = ngrad(tt, si);
    double acc = 0.0;
    for (size_t i = 0; i < g.a.size(); ++i) {
      gx.a[i] += g.a[i] * sc2;
      acc += g.a[i] * xv2.a[i];
    }
    gs.at(0, 0) += acc;
  });
}

// --- scalar ops -----------------------------------------------------------------

Value smul(Value x, double c) {
  Tape& t = *x.tape;
  Mat y = t.val(x);
  for (double& e : y.a) e *= c;
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, c](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (size_t i = 0; i < g.a.size(); ++i) gx.a[i] += c * g.a[i];
  });
}

Value sadd(Value x, double c) {
  Tape& t = *x.tape;
  Mat y = t.val(x);
  for (double& e : y.a) e += c;
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (size_t i = 0; i < g.a.size(); ++i) gx.a[i] += g.a[i];
  });
}

Value neg(Value x) { return smul(x, -1.0); }

// --- unary maps -------------------------------------------------------------------

namespace {

template <typename F, typename DF>
Value unary(Value x, F f, DF df_from_xy) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  Mat y(xv.rows, xv.cols);
  for (size_t i = 0; i < xv.a.size(); ++i) y.a[i] = f(xv.a[i]);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, df_from_xy](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& xv2 = nval(tt, xi);
    const Mat& yv2 = nval(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (size_t i = 0; i < g.a.size(); ++i) gx.a[i] += g.a[i] * df_from_xy(xv2.a[i], yv2.a[i]);
  });
}

}  // namespace

Value vtanh(Value x) {
  return unary(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Value vsigmoid(Value x) {
  return unary(
      x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double y) { return y * (1.0 - y); });
}

Value vexp(Value x) {
  return unary(
      x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Value vlog(Value x) {
  return unary(
      x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Value vsqrt(Value x) {
  return unary(
      x, [](double v) { return std::sqrt(v); },
      [](double, double y) { return 0.5 / y; });
}

Value vinv(Value x) {
  return unary(
      x, [](double v) { return 1.0 / v; },
      [](double, double y) { return -y * y; });
}

Value vrelu(Value x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Value clamp_min(Value x, double c) {
  return unary(
      x, [c](double v) { return v < c ? c : v; },
      [c](double v, double) { return v > c ? 1.0 : 0.0; });
}

// --- softmax and reductions ---------------------------------------------------------

Value row_softmax(Value x) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  Mat y = kernels::row_softmax(xv);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    const Mat& y2 = nval(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (int r = 0; r < g.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < g.cols; ++c) dot += g.at(r, c) * y2.at(r, c);
      for (int c = 0; c < g.cols; ++c) gx.at(r, c) += y2.at(r, c) * (g.at(r, c) - dot);
    }
  });
}

Value row_sum(Value x) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  Mat y(xv.rows, 1);
  for (int r = 0; r < xv.rows; ++r) {
    double s = 0.0;
    for (int c = 0; c < xv.cols; ++c) s += xv.at(r, c);
    y.at(r, 0) = s;
  }
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (int r = 0; r < gx.rows; ++r)
      for (int c = 0; c < gx.cols; ++c) gx.at(r, c) += g.at(r, 0);
  });
}

Value row_mean(Value x) {
  int c = x.cols();
  return smul(row_sum(x), 1.0 / c);
}

Value col_sum(Value x) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  Mat y(1, xv.cols);
  for (int r = 0; r < xv.rows; ++r)
    for (int c = 0; c < xv.cols; ++c) y.at(0, c) += xv.at(r, c);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (int r = 0; r < gx.rows; ++r)
      for (int c = 0; c < gx.cols; ++c) gx.at(r, c) += g.at(0, c);
  });
}

Value sum_all(Value x) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  double s = 0.0;
  for (double e : xv.a) s += e;
  Mat y(1, 1);
  y.at(0, 0) = s;
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi](Tape& tt, int self) {
    const double g = ngrad(tt, self).at(0, 0);
    Mat& gx = ngrad(tt, xi);
    for (double& e : gx.a) e += g;
  });
}

Value mean_all(Value x) {
  size_t n = x.tape->val(x).size();
  CVID_CHECK(n > 0, "mean_all: empty");
  return smul(sum_all(x), 1.0 / static_cast<double>(n));
}

// --- structure ops ----------------------------------------------------------------

Value slice_rows(Value x, int r0, int r1) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  CVID_CHECK(0 <= r0 && r0 < r1 && r1 <= xv.rows, "slice_rows: bad range");
  Mat y(r1 - r0, xv.cols);
  for (int r = r0; r < r1; ++r)
    for (int c = 0; c < xv.cols; ++c) y.at(r - r0, c) = xv.at(r, c);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, r0](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) gx.at(r + r0, c) += g.at(r, c);
  });
}

Value slice_cols(Value x, int c0, int c1) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  CVID_CHECK(0 <= c0 && c0 < c1 && c1 <= xv.cols, "slice_cols: bad range");
  Mat y(xv.rows, c1 - c0);
  for (int r = 0; r < xv.rows; ++r)
    for (int c = c0; c < c1; ++c) y.at(r, c - c0) = xv.at(r, c);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, c0](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) gx.at(r, c + c0) += g.at(r, c);
  });
}

Value concat_rows(Value a, Value b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Mat& av = t.val(a);
  const Mat& bv = t.val(b);
  CVID_CHECK(av.cols == bv.cols, "concat_rows: col mismatch");
  Mat y(av.rows + bv.rows, av.cols);
  for (int r = 0; r < av.rows; ++r)
    for (int c = 0; c < av.cols; ++c) y.at(r, c) = av.at(r, c);
  for (int r = 0; r < bv.rows; ++r)
    for (int c = 0; c < bv.cols; ++c) y.at(av.rows + r, c) = bv.at(r, c);
  int ai = a.id, bi = b.id, ar = av.rows;
  return raw_op(t, std::move(y), {ai, bi}, [ai, bi, ar](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& ga = ngrad(tt, ai);
    Mat& gb = ngrad(tt, bi);
    for (int r = 0; r < ga.rows; ++r)
      for (int c = 0; c < g.cols; ++c) ga.at(r, c) += g.at(r, c);
    for (int r = 0; r < gb.rows; ++r)
      for (int c = 0; c < g.cols; ++c) gb.at(r, c) += g.at(ar + r, c);
  });
}

Value concat_cols(Value a, Value b) {
  check_same_tape(a, b);
  Tape& t = *a.tape;
  const Mat& av = t.val(a);
  const Mat& bv = t.val(b);
  CVID_CHECK(av.rows == bv.rows, "concat_cols: row mismatch");
  Mat y(av.rows, av.cols + bv.cols);
  for (int r = 0; r < av.rows; ++r) {
    for (int c = 0; c < av.cols; ++c) y.at(r, c) = av.at(r, c);
    for (int c = 0; c < bv.cols; ++c) y.at(r, av.cols + c) = bv.at(r, c);
  }
  int ai = a.id, bi = b.id, ac = av.cols;
  return raw_op(t, std::move(y), {ai, bi}, [ai, bi, ac](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& ga = ngrad(tt, ai);
    Mat& gb = ngrad(tt, bi);
    for (int r = 0; r < g.rows; ++r) {
      for (int c = 0; c < ga.cols; ++c) ga.at(r, c) += g.at(r, c);
      for (int c = 0; c < gb.cols; ++c) gb.at(r, c) += g.at(r, ac + c);
    }
  });
}

Value gather_rows(Value x, std::vector<int> idx) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  Mat y(static_cast<int>(idx.size()), xv.cols);
  for (size_t i = 0; i < idx.size(); ++i) {
    CVID_CHECK(idx[i] >= 0 && idx[i] < xv.rows, "gather_rows: index " << idx[i] << " out of range");
    for (int c = 0; c < xv.cols; ++c) y.at(static_cast<int>(i), c) = xv.at(idx[i], c);
  }
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, idx = std::move(idx)](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (size_t i = 0; i < idx.size(); ++i)
      for (int c = 0; c < g.cols; ++c) gx.at(idx[i], c) += g.at(static_cast<int>(i), c);
  });
}

Value repeat_rows(Value x, int n) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  CVID_CHECK(xv.rows == 1, "repeat_rows: input must be 1xC");
  Mat y(n, xv.cols);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < xv.cols; ++c) y.at(r, c) = xv.at(0, c);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi](Tape& tt, int self) {
    const Mat& g = ngrad(tt, self);
    Mat& gx = ngrad(tt, xi);
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) gx.at(0, c) += g.at(r, c);
  });
}

Value pick(Value x, int r, int c) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  CVID_CHECK(r >= 0 && r < xv.rows && c >= 0 && c < xv.cols, "pick: out of range");
  Mat y(1, 1);
  y.at(0, 0) = xv.at(r, c);
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, r, c](Tape& tt, int self) {
    ngrad(tt, xi).at(r, c) += ngrad(tt, self).at(0, 0);
  });
}

Value vmax(Value x) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  CVID_CHECK(!xv.empty(), "vmax: empty");
  size_t best = 0;
  for (size_t i = 1; i < xv.a.size(); ++i)
    if (xv.a[i] > xv.a[best]) best = i;
  Mat y(1, 1);
  y.at(0, 0) = xv.a[best];
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, best](Tape& tt, int self) {
    ngrad(tt, xi).a[best] += ngrad(tt, self).at(0, 0);
  });
}

Value vmin(Value x) {
  Tape& t = *x.tape;
  const Mat& xv = t.val(x);
  CVID_CHECK(!xv.empty(), "vmin: empty");
  size_t best = 0;
  for (size_t i = 1; i < xv.a.size(); ++i)
    if (xv.a[i] < xv.a[best]) best = i;
  Mat y(1, 1);
  y.at(0, 0) = xv.a[best];
  int xi = x.id;
  return raw_op(t, std::move(y), {xi}, [xi, best](Tape& tt, int self) {
    ngrad(tt, xi).a[best] += ngrad(tt, self).at(0, 0);
  });
}

}  // namespace cvid::ad
