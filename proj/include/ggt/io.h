// Copyright 2026 The GGT Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GGT_IO_H_
#define GGT_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ggt {

std::string ReadFile(const std::filesystem::path& path);
// Writes through a temporary sibling and renames, so readers never see a
// partially written file.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

std::string Sha256Hex(std::string_view data);

// Little-endian binary encoding helpers for the model and corpus containers.
class ByteWriter {
 public:
  void Bytes(std::string_view data) { out_.append(data); }
  void U32(uint32_t v);
  void U64(uint64_t v);
  void F32s(std::span<const float> values);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data, std::string context)
      : data_(data), context_(std::move(context)) {}

  std::string_view Bytes(size_t n);
  uint32_t U32();
  uint64_t U64();
  std::vector<float> F32s(size_t count);
  bool AtEnd() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::string context_;
  size_t pos_ = 0;
};

}  // namespace ggt

#endif  // GGT_IO_H_
