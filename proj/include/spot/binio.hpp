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

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace spot {

/// Little-endian binary writer into a memory buffer. Artifact files are
/// assembled in memory, hashed, and written atomically (temp + rename).
class BinWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v);
  void f64(double v);
  void bytes(const void* data, std::size_t n);
  void str(const std::string& s);  // u32 length + raw bytes
  void vec_f32(const std::vector<float>& v);
  void vec_i32(const std::vector<int>& v);
  void matrix(const Eigen::MatrixXf& m);  // rows, cols, row-major f32
  void vector(const Eigen::VectorXf& v);

  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class BinReader {
 public:
  explicit BinReader(std::vector<std::uint8_t> data) : buf_(std::move(data)) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32();
  double f64();
  std::string str();
  std::vector<float> vec_f32();
  std::vector<int> vec_i32();
  Eigen::MatrixXf matrix();
  Eigen::VectorXf vector();
  bool at_end() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n);
  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t seed = 1469598103934665603ull);

void write_file_atomic(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace spot
