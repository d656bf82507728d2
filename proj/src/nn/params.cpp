#include "causalvid/nn/params.hpp"

#include <cmath>

namespace cvid::nn {

Param& ParamStore::get(const std::string& name, int rows, int cols,
                       const std::function<void(Mat&)>& init) {
  auto it = params_.find(name);
  if (it != params_.end()) {
    CVID_CHECK(it->second.value.rows == rows && it->second.value.cols == cols,
               "param " << name << " re-requested with different shape");
    return it->second;
  }
  Param p;
  p.name = name;
  p.value = Mat(rows, cols);
  init(p.value);
  p.grad = Mat::zeros(rows, cols);
  p.m = Mat::zeros(rows, cols);
  p.v = Mat::zeros(rows, cols);
  auto [pos, ok] = params_.emplace(name, std::move(p));
  (void)ok;
  return pos->second;
}

Param& ParamStore::existing(const std::string& name) {
  auto it = params_.find(name);
  CVID_CHECK(it != params_.end(), "unknown param: " << name);
  return it->second;
}

const Param& ParamStore::existing(const std::string& name) const {
  auto it = params_.find(name);
  CVID_CHECK(it != params_.end(), "unknown param: " << name);
  return it->second;
}

void ParamStore::zero_grads() {
  for (auto& [name, p] : params_) std::fill(p.grad.a.begin(), p.grad.a.end(), 0.0);
}

size_t ParamStore::total_params() const {
  size_t n = 0;
  for (const auto& [name, p] : params_) n += p.value.size();
  return n;
}

bool ParamStore::grads_finite() const {
  for (const auto& [name, p] : params_)
    if (!p.grad.all_finite()) return false;
  return true;
}

void adam_step(ParamStore& store, const AdamConfig& cfg) {
  store.adam_step_count += 1;
  const double t = static_cast<double>(store.adam_step_count);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  for (auto& [name, p] : store.all()) {
    for (size_t i = 0; i < p.value.a.size(); ++i) {
      const double g = p.grad.a[i];
      p.m.a[i] = cfg.beta1 * p.m.a[i] + (1.0 - cfg.beta1) * g;
      p.v.a[i] = cfg.beta2 * p.v.a[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = p.m.a[i] / bc1;
      const double vhat = p.v.a[i] / bc2;
      p.value.a[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    std::fill(p.grad.a.begin(), p.grad.a.end(), 0.0);
  }
}

std::function<void(Mat&)> init_zero() {
  return [](Mat&) {};
}

std::function<void(Mat&)> init_normal(Rng& rng, double stddev) {
  return [&rng, stddev](Mat& m) {
    for (double& v : m.a) v = stddev * rng.normal();
  };
}

std::function<void(Mat&)> init_glorot(Rng& rng) {
  return [&rng](Mat& m) {
    const double s = 1.0 / std::sqrt(std::max(1, m.rows));
    for (double& v : m.a) v = s * rng.normal();
  };
}

}  // namespace cvid::nn
