#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "causalvid/autodiff/tape.hpp"
#include "causalvid/core/rng.hpp"

namespace cvid::nn {

using ad::Param;

// Named parameter registry. Names are unique; iteration is sorted so
// checkpoints and optimizer sweeps are order-stable.
class ParamStore {
 public:
  // Creates (with init) or fetches. Shape must match on re-fetch.
  Param& get(const std::string& name, int rows, int cols,
             const std::function<void(Mat&)>& init);

  Param& existing(const std::string& name);
  const Param& existing(const std::string& name) const;
  bool has(const std::string& name) const { return params_.count(name) > 0; }

  void zero_grads();
  size_t total_params() const;
  bool grads_finite() const;

  std::map<std::string, Param>& all() { return params_; }
  const std::map<std::string, Param>& all() const { return params_; }

  int64_t adam_step_count = 0;

 private:
  std::map<std::string, Param> params_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One Adam update over every parameter with a live gradient; zeroes grads.
void adam_step(ParamStore& store, const AdamConfig& cfg);

// Initializers. All draw from an explicit Rng for reproducibility.
std::function<void(Mat&)> init_zero();
std::function<void(Mat&)> init_normal(Rng& rng, double stddev);
// Scaled by 1/sqrt(fan_in) of the matrix.
std::function<void(Mat&)> init_glorot(Rng& rng);

}  // namespace cvid::nn
