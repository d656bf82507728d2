#pragma once

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "causalvid/nn/params.hpp"

namespace cvid::test {

// Relative gradient error with an absolute floor so near-zero pairs do not
// blow up the ratio. Central differences in double land around 1e-10 for
// O(1) values, far below the 1e-4 gate.
inline double grad_rel_err(double analytic, double numeric) {
  const double denom = std::max(1e-3, std::fabs(analytic) + std::fabs(numeric));
  return std::fabs(analytic - numeric) / denom;
}

// Central finite differences over every element of every param in `store`
// against the analytic grads produced by one forward/backward of `loss_fn`.
// Returns the worst relative error seen; `loss_fn` must be deterministic.
inline double check_gradients(nn::ParamStore& store,
                              const std::function<double()>& loss_fn,
                              const std::function<void()>& backward_fn,
                              double step = 1e-5) {
  store.zero_grads();
  backward_fn();
  // snapshot analytic grads
  std::vector<std::pair<std::string, Mat>> analytic;
  for (auto& [name, p] : store.all()) analytic.emplace_back(name, p.grad);
  double worst = 0.0;
  for (auto& [name, p] : store.all()) {
    Mat* ag = nullptr;
    for (auto& [n2, g2] : analytic)
      if (n2 == name) ag = &g2;
    for (size_t i = 0; i < p.value.a.size(); ++i) {
      const double orig = p.value.a[i];
      p.value.a[i] = orig + step;
      const double up = loss_fn();
      p.value.a[i] = orig - step;
      const double dn = loss_fn();
      p.value.a[i] = orig;
      const double numeric = (up - dn) / (2.0 * step);
      worst = std::max(worst, grad_rel_err(ag->a[i], numeric));
    }
  }
  store.zero_grads();
  return worst;
}

// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    namespace fs = std::filesystem;
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("causalvid_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace cvid::test
