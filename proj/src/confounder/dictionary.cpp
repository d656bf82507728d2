#include "causalvid/confounder/dictionary.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "causalvid/core/binio.hpp"
#include "causalvid/core/check.hpp"

namespace cvid {

namespace {
constexpr char kDictMagic[8] = {'I', 'P', 'C', 'D', 'I', 'C', 'T', '1'};

void normalize_prior(ConfounderDictionary& d) {
  int64_t total = 0;
  for (int64_t c : d.counts) total += c;
  d.prior.assign(d.counts.size(), 0.0);
  if (total == 0) {
    const double u = 1.0 / static_cast<double>(d.counts.size());
    std::fill(d.prior.begin(), d.prior.end(), u);
  } else {
    for (size_t i = 0; i < d.counts.size(); ++i)
      d.prior[i] = static_cast<double>(d.counts[i]) / static_cast<double>(total);
  }
}
}  // namespace

void validate_roi(const RoI& roi, int num_classes, int dim) {
  CVID_CHECK(roi.class_id >= 0 && roi.class_id < num_classes,
             "RoI class_id " << roi.class_id << " outside [0," << num_classes << ")");
  CVID_CHECK(roi.x0 < roi.x1 && roi.y0 < roi.y1,
             "RoI box degenerate: (" << roi.x0 << "," << roi.y0 << "," << roi.x1 << "," << roi.y1
                                     << ")");
  CVID_CHECK(roi.x0 >= 0.0 && roi.y0 >= 0.0 && roi.x1 <= 1.0 && roi.y1 <= 1.0,
             "RoI box outside the unit square");
  CVID_CHECK(static_cast<int>(roi.feature.size()) == dim,
             "RoI feature dim " << roi.feature.size() << " != " << dim);
}

ConfounderDictionary build_dictionary(
    const std::vector<std::pair<int, std::vector<double>>>& samples, int num_classes, int dim) {
  CVID_CHECK(num_classes >= 1, "build_dictionary: num_classes must be >= 1");
  CVID_CHECK(dim >= 1, "build_dictionary: dim must be >= 1");
  ConfounderDictionary d;
  d.entries = Mat::zeros(num_classes, dim);
  d.counts.assign(num_classes, 0);
  for (const auto& [cls, feat] : samples) {
    CVID_CHECK(cls >= 0 && cls < num_classes,
               "build_dictionary: class_id " << cls << " outside [0," << num_classes << ")");
    CVID_CHECK(static_cast<int>(feat.size()) == dim,
               "build_dictionary: feature of length " << feat.size() << " (want " << dim << ")");
    for (int c = 0; c < dim; ++c) d.entries.at(cls, c) += feat[c];
    d.counts[cls] += 1;
  }
  for (int i = 0; i < num_classes; ++i)
    if (d.counts[i] > 0)
      for (int c = 0; c < dim; ++c) d.entries.at(i, c) /= static_cast<double>(d.counts[i]);
  d.empty_corpus = samples.empty();
  normalize_prior(d);
  return d;
}

const std::vector<double>& class_prior(const ConfounderDictionary& dict) { return dict.prior; }

ConfounderDictionary merge_dictionaries(const ConfounderDictionary& a,
                                        const ConfounderDictionary& b) {
  CVID_CHECK(a.num_classes() == b.num_classes() && a.dim() == b.dim(),
             "merge_dictionaries: shape mismatch");
  ConfounderDictionary d;
  d.entries = Mat::zeros(a.num_classes(), a.dim());
  d.counts.assign(a.num_classes(), 0);
  for (int i = 0; i < a.num_classes(); ++i) {
    d.counts[i] = a.counts[i] + b.counts[i];
    if (d.counts[i] == 0) continue;
    const double wa = static_cast<double>(a.counts[i]);
    const double wb = static_cast<double>(b.counts[i]);
    for (int c = 0; c < a.dim(); ++c)
      d.entries.at(i, c) =
          (wa * a.entries.at(i, c) + wb * b.entries.at(i, c)) / static_cast<double>(d.counts[i]);
  }
  d.empty_corpus = a.empty_corpus && b.empty_corpus;
  normalize_prior(d);
  return d;
}

void save_dictionary(const std::string& path, const ConfounderDictionary& dict) {
  std::ofstream os(path, std::ios::binary);
  CVID_CHECK(os.is_open(), "cannot open for writing: " << path);
  binio::write_bytes(os, kDictMagic, 8);
  binio::write_i64(os, dict.num_classes());
  binio::write_i64(os, dict.dim());
  for (int64_t c : dict.counts) binio::write_i64(os, c);
  for (double v : dict.entries.a) binio::write_f32(os, static_cast<float>(v));
}

ConfounderDictionary load_dictionary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  CVID_CHECK(is.is_open(), "cannot open: " << path);
  char magic[8];
  binio::read_bytes(is, magic, 8);
  CVID_CHECK(std::memcmp(magic, kDictMagic, 8) == 0, "bad dictionary magic in " << path);
  const int64_t n = binio::read_i64(is);
  const int64_t dim = binio::read_i64(is);
  CVID_CHECK(n >= 1 && dim >= 1, "bad dictionary shape in " << path);
  ConfounderDictionary d;
  d.entries = Mat::zeros(static_cast<int>(n), static_cast<int>(dim));
  d.counts.resize(n);
  for (int64_t& c : d.counts) c = binio::read_i64(is);
  for (double& v : d.entries.a) v = static_cast<double>(binio::read_f32(is));
  int64_t total = 0;
  for (int64_t c : d.counts) total += c;
  d.empty_corpus = (total == 0);
  normalize_prior(d);
  return d;
}

}  // namespace cvid
