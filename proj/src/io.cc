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

#include "ggt/io.h"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "ggt/error.h"

namespace ggt {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) Fail(ErrorKind::kIo, "read failed for " + path.string());
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create " + path.parent_path().string());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) Fail(ErrorKind::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot rename to " + path.string() + ": " + ec.message());
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    Fail(ErrorKind::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

void ByteWriter::U32(uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out_.append(b, 4);
}

void ByteWriter::U64(uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out_.append(b, 8);
}

void ByteWriter::F32s(std::span<const float> values) {
  out_.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
}

std::string_view ByteReader::Bytes(size_t n) {
  if (n > remaining()) Fail(ErrorKind::kFormat, context_ + ": truncated data");
  std::string_view s = data_.substr(pos_, n);
  pos_ += n;
  return s;
}

uint32_t ByteReader::U32() {
  uint32_t v;
  std::memcpy(&v, Bytes(4).data(), 4);
  return v;
}

uint64_t ByteReader::U64() {
  uint64_t v;
  std::memcpy(&v, Bytes(8).data(), 8);
  return v;
}

std::vector<float> ByteReader::F32s(size_t count) {
  if (count > remaining() / sizeof(float)) Fail(ErrorKind::kFormat, context_ + ": truncated tensor");
  std::vector<float> v(count);
  std::memcpy(v.data(), Bytes(count * sizeof(float)).data(), count * sizeof(float));
  return v;
}

}  // namespace ggt
