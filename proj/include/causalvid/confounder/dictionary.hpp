#pragma once

#include <string>
#include <vector>

#include "causalvid/core/mat.hpp"

namespace cvid {

// One detected region: class label, normalized box, feature vector.
struct RoI {
  int class_id = 0;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  std::vector<double> feature;
};

void validate_roi(const RoI& roi, int num_classes, int dim);

// Per-class mean region features plus an empirical class prior. Rows with no
// contributing samples stay zero so the NxD shape never depends on corpus
// coverage. Immutable once built; safe for shared concurrent reads.
struct ConfounderDictionary {
  Mat entries;                  // N x d
  std::vector<int64_t> counts;  // N
  std::vector<double> prior;    // N, sums to 1
  bool empty_corpus = false;    // set when built from zero samples

  int num_classes() const { return entries.rows; }
  int dim() const { return entries.cols; }
};

// entry[i] = mean of features with class i; prior = counts normalized
// (uniform when every count is zero). Rejects features whose length differs
// from `dim` and class ids outside [0, num_classes).
ConfounderDictionary build_dictionary(
    const std::vector<std::pair<int, std::vector<double>>>& samples, int num_classes, int dim);

const std::vector<double>& class_prior(const ConfounderDictionary& dict);

// Count-weighted mean merge; building once over a+b equals merging the parts.
ConfounderDictionary merge_dictionaries(const ConfounderDictionary& a,
                                        const ConfounderDictionary& b);

// Binary format: magic "IPCDICT1", then N and d as 64-bit little-endian
// integers, then the N counts (64-bit), then row-major entries as float32.
void save_dictionary(const std::string& path, const ConfounderDictionary& dict);
ConfounderDictionary load_dictionary(const std::string& path);

}  // namespace cvid
