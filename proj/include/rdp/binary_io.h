//
// Copyright 2026 The RDP Authors
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
//

// Minimal little-endian record I/O for calibration bundle files.

#ifndef RDP_BINARY_IO_H_
#define RDP_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "rdp/error.h"

namespace rdp {

static_assert(std::endian::native == std::endian::little,
              "bundle files are written in host order");

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  }

  void Magic(const char (&tag)[5]) { Raw(tag, 4); }
  void U32(uint32_t v) { Raw(&v, sizeof v); }
  void F64(double v) { Raw(&v, sizeof v); }
  void F64s(const double* v, size_t n) { Raw(v, n * sizeof(double)); }

  void Close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::kIoFailure, "write failed: " + path_);
  }

 private:
  void Raw(const void* p, size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw Error(ErrorCode::kIoFailure, "write failed: " + path_);
  }

  std::string path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path)
      : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kCalibrationMissing, path);
  }

  void ExpectMagic(const char (&tag)[5]) {
    char got[4];
    Raw(got, 4);
    if (std::memcmp(got, tag, 4) != 0) {
      throw Error(ErrorCode::kMalformedHeader, path_ + ": bad magic");
    }
  }
  uint32_t U32() {
    uint32_t v;
    Raw(&v, sizeof v);
    return v;
  }
  double F64() {
    double v;
    Raw(&v, sizeof v);
    return v;
  }
  void F64s(double* v, size_t n) { Raw(v, n * sizeof(double)); }

 private:
  void Raw(void* p, size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw Error(ErrorCode::kMalformedHeader, path_ + ": truncated");
  }

  std::string path_;
  std::ifstream in_;
};

}  // namespace rdp

#endif  // RDP_BINARY_IO_H_
