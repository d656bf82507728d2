#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "causalvid/core/mat.hpp"

namespace cvid::binio {

// Explicit little-endian primitives, independent of host byte order.
void write_u8(std::ostream& os, uint8_t v);
void write_i64(std::ostream& os, int64_t v);
void write_u64(std::ostream& os, uint64_t v);
void write_f32(std::ostream& os, float v);
void write_f64(std::ostream& os, double v);
void write_bytes(std::ostream& os, const void* p, size_t n);
void write_string(std::ostream& os, const std::string& s);

uint8_t read_u8(std::istream& is);
int64_t read_i64(std::istream& is);
uint64_t read_u64(std::istream& is);
float read_f32(std::istream& is);
double read_f64(std::istream& is);
void read_bytes(std::istream& is, void* p, size_t n);
std::string read_string(std::istream& is);

// Feature file: magic "IPCFEAT1", rank as i64, shape dims as i64, one dtype
// tag byte (1 = float32), then row-major float32 payload.
constexpr char kFeatMagic[8] = {'I', 'P', 'C', 'F', 'E', 'A', 'T', '1'};
constexpr uint8_t kDtypeF32 = 1;

void save_feature_matrix(const std::string& path, const Mat& m);
Mat load_feature_matrix(const std::string& path);

}  // namespace cvid::binio
