#include "causalvid/core/binio.hpp"

#include <cstring>
#include <fstream>

#include "causalvid/core/check.hpp"

namespace cvid::binio {

void write_bytes(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  CVID_CHECK(os.good(), "binio: write failed");
}

void write_u8(std::ostream& os, uint8_t v) { write_bytes(os, &v, 1); }

void write_u64(std::ostream& os, uint64_t v) {
  uint8_t b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
  write_bytes(os, b, 8);
}

void write_i64(std::ostream& os, int64_t v) { write_u64(os, static_cast<uint64_t>(v)); }

void write_f32(std::ostream& os, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(u >> (8 * i));
  write_bytes(os, b, 4);
}

void write_f64(std::ostream& os, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  write_u64(os, u);
}

void write_string(std::ostream& os, const std::string& s) {
  write_u64(os, s.size());
  if (!s.empty()) write_bytes(os, s.data(), s.size());
}

void read_bytes(std::istream& is, void* p, size_t n) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  CVID_CHECK(is.good(), "binio: unexpected end of stream");
}

uint8_t read_u8(std::istream& is) {
  uint8_t v;
  read_bytes(is, &v, 1);
  return v;
}

uint64_t read_u64(std::istream& is) {
  uint8_t b[8];
  read_bytes(is, b, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

int64_t read_i64(std::istream& is) { return static_cast<int64_t>(read_u64(is)); }

float read_f32(std::istream& is) {
  uint8_t b[4];
  read_bytes(is, b, 4);
  uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= static_cast<uint32_t>(b[i]) << (8 * i);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

double read_f64(std::istream& is) {
  uint64_t u = read_u64(is);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

std::string read_string(std::istream& is) {
  uint64_t n = read_u64(is);
  std::string s(n, '\0');
  if (n > 0) read_bytes(is, s.data(), n);
  return s;
}

void save_feature_matrix(const std::string& path, const Mat& m) {
  std::ofstream os(path, std::ios::binary);
  CVID_CHECK(os.is_open(), "cannot open for writing: " << path);
  write_bytes(os, kFeatMagic, 8);
  write_i64(os, 2);
  write_i64(os, m.rows);
  write_i64(os, m.cols);
  write_u8(os, kDtypeF32);
  for (double v : m.a) write_f32(os, static_cast<float>(v));
}

Mat load_feature_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  CVID_CHECK(is.is_open(), "cannot open: " << path);
  char magic[8];
  read_bytes(is, magic, 8);
  CVID_CHECK(std::memcmp(magic, kFeatMagic, 8) == 0, "bad feature-file magic in " << path);
  int64_t rank = read_i64(is);
  CVID_CHECK(rank == 2, "feature file rank " << rank << " unsupported (want 2): " << path);
  int64_t rows = read_i64(is);
  int64_t cols = read_i64(is);
  CVID_CHECK(rows >= 0 && cols >= 0, "bad shape in " << path);
  uint8_t dtype = read_u8(is);
  CVID_CHECK(dtype == kDtypeF32, "unknown dtype tag " << int(dtype) << " in " << path);
  Mat m(static_cast<int>(rows), static_cast<int>(cols));
  for (double& v : m.a) v = static_cast<double>(read_f32(is));
  return m;
}

}  // namespace cvid::binio
