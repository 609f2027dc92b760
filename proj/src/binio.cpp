// Copyright 2026 The spot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spot/binio.hpp"

#include <cstring>
#include <fstream>

#include "spot/error.hpp"

namespace spot {

void BinWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
}

void BinWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
}

void BinWriter::f32(float v) {
  std::uint32_t u;
  std::memcpy(&u, &v, 4);
  u32(u);
}

void BinWriter::f64(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  u64(u);
}

void BinWriter::bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  buf_.insert(buf_.end(), p, p + n);
}

void BinWriter::str(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  bytes(s.data(), s.size());
}

void BinWriter::vec_f32(const std::vector<float>& v) {
  u32(static_cast<std::uint32_t>(v.size()));
  for (float x : v) f32(x);
}

void BinWriter::vec_i32(const std::vector<int>& v) {
  u32(static_cast<std::uint32_t>(v.size()));
  for (int x : v) i32(x);
}

void BinWriter::matrix(const Eigen::MatrixXf& m) {
  u32(static_cast<std::uint32_t>(m.rows()));
  u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) f32(m(r, c));
}

void BinWriter::vector(const Eigen::VectorXf& v) {
  u32(static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) f32(v(i));
}

void BinReader::need(std::size_t n) {
  if (pos_ + n > buf_.size()) fail(Err::Io, "truncated binary payload");
}

std::uint8_t BinReader::u8() {
  need(1);
  return buf_[pos_++];
}

std::uint32_t BinReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t BinReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

float BinReader::f32() {
  const std::uint32_t u = u32();
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

double BinReader::f64() {
  const std::uint64_t u = u64();
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

std::string BinReader::str() {
  const std::uint32_t n = u32();
  need(n);
  std::string s(reinterpret_cast<const char*>(buf_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<float> BinReader::vec_f32() {
  const std::uint32_t n = u32();
  std::vector<float> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = f32();
  return v;
}

std::vector<int> BinReader::vec_i32() {
  const std::uint32_t n = u32();
  std::vector<int> v(n);
  for (std::uint32_t i = 0; i < n; ++i) v[i] = i32();
  return v;
}

Eigen::MatrixXf BinReader::matrix() {
  const std::uint32_t rows = u32();
  const std::uint32_t cols = u32();
  Eigen::MatrixXf m(rows, cols);
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = f32();
  return m;
}

Eigen::VectorXf BinReader::vector() {
  const std::uint32_t n = u32();
  Eigen::VectorXf v(n);
  for (std::uint32_t i = 0; i < n; ++i) v(i) = f32();
  return v;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& data) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Err::Io, "cannot open for writing: " + tmp.string());
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
    if (!f) fail(Err::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(Err::Io, "rename failed: " + path.string() + ": " + ec.message());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary | std::ios::ate);
  if (!f) fail(Err::Io, "cannot open: " + path.string());
  const std::streamsize n = f.tellg();
  f.seekg(0);
  std::vector<std::uint8_t> data(static_cast<std::size_t>(n));
  f.read(reinterpret_cast<char*>(data.data()), n);
  if (!f) fail(Err::Io, "read failed: " + path.string());
  return data;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  const auto data = read_file(path);
  return fnv1a64(data.data(), data.size());
}

}  // namespace spot
