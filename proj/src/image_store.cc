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

#include "rdp/image_store.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "rdp/error.h"

namespace rdp {
namespace {

namespace fs = std::filesystem;

// Cursor over the raw bytes of a graymap file.
class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  // Skips whitespace and '#' comments, then reads a non-negative integer.
  long ReadInt() {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(Peek())) {
      throw Error(ErrorCode::kMalformedHeader, path_ + ": expected integer");
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(Peek())) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1L << 30)) {
        throw Error(ErrorCode::kMalformedHeader, path_ + ": value overflow");
      }
    }
    return value;
  }

  // Exactly one whitespace byte separates the header from P5 raster data.
  void ConsumeSingleWhitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(Peek())) {
      throw Error(ErrorCode::kMalformedHeader, path_ + ": bad raster start");
    }
    ++pos_;
  }

  size_t pos() const { return pos_; }

 private:
  unsigned char Peek() const {
    return static_cast<unsigned char>(bytes_[pos_]);
  }

  void SkipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(Peek())) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& path_;
  size_t pos_ = 2;
};

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

GrayImage LoadImage(const std::string& path) {
  const std::string bytes = ReadAll(path);
  if (bytes.size() < 2 || bytes[0] != 'P' ||
      (bytes[1] != '2' && bytes[1] != '5')) {
    throw Error(ErrorCode::kMalformedHeader, path + ": not a P2/P5 graymap");
  }
  const bool binary = bytes[1] == '5';
  HeaderReader header(bytes, path);
  const long width = header.ReadInt();
  const long height = header.ReadInt();
  const long maxval = header.ReadInt();
  if (width <= 0 || height <= 0 || maxval <= 0) {
    throw Error(ErrorCode::kMalformedHeader, path + ": zero dimension");
  }
  if (width != height) {
    throw Error(ErrorCode::kNonSquare,
                path + ": " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  if (!IsPowerOfTwo(static_cast<int>(width)) || width < 4) {
    throw Error(ErrorCode::kNonPowerOfTwo,
                path + ": side " + std::to_string(width) +
                    " is not a power of two >= 4");
  }
  if (maxval > 255) {
    throw Error(ErrorCode::kMaxvalTooLarge,
                path + ": maxval " + std::to_string(maxval));
  }

  const int side = static_cast<int>(width);
  GrayImage img(side);
  const size_t count = static_cast<size_t>(side) * side;
  double* out = img.pixels.data();
  if (binary) {
    header.ConsumeSingleWhitespace();
    if (bytes.size() - header.pos() < count) {
      throw Error(ErrorCode::kMalformedHeader, path + ": truncated raster");
    }
    for (size_t i = 0; i < count; ++i) {
      const int v = static_cast<unsigned char>(bytes[header.pos() + i]);
      if (v > maxval) {
        throw Error(ErrorCode::kMalformedHeader, path + ": pixel > maxval");
      }
      out[i] = v;
    }
  } else {
    for (size_t i = 0; i < count; ++i) {
      const long v = header.ReadInt();
      if (v > maxval) {
        throw Error(ErrorCode::kMalformedHeader, path + ": pixel > maxval");
      }
      out[i] = static_cast<double>(v);
    }
  }
  return img;
}

int QuantizePixel(double v) {
  const double clamped = std::clamp(v, 0.0, 255.0);
  // nearbyint honours the default round-half-to-even mode.
  return static_cast<int>(std::nearbyint(clamped));
}

void SaveImage(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  out << "P5\n" << img.side << " " << img.side << "\n255\n";
  std::string raster(static_cast<size_t>(img.side) * img.side, '\0');
  const double* in = img.pixels.data();
  for (size_t i = 0; i < raster.size(); ++i) {
    raster[i] = static_cast<char>(QuantizePixel(in[i]));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
}

Eigen::VectorXd Flatten(const GrayImage& img) {
  return Eigen::Map<const Eigen::VectorXd>(img.pixels.data(),
                                           img.pixels.size());
}

GrayImage Unflatten(const Eigen::VectorXd& v, int side) {
  if (v.size() != static_cast<Eigen::Index>(side) * side) {
    throw Error(ErrorCode::kDimensionMismatch, "unflatten length");
  }
  GrayImage img(side);
  Eigen::Map<Eigen::VectorXd>(img.pixels.data(), v.size()) = v;
  return img;
}

DatasetManifest LoadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "manifest " + path);
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    const fs::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  DatasetManifest manifest;
  bool have_standard = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string role, file;
    if (!(fields >> role) || role[0] == '#') continue;
    if (!(fields >> file)) {
      throw Error(ErrorCode::kConfig,
                  path + ":" + std::to_string(line_no) + ": missing path");
    }
    if (role == "subject") {
      manifest.subject_images.push_back(resolve(file));
    } else if (role == "impostor") {
      manifest.impostor_images.push_back(resolve(file));
    } else if (role == "standard") {
      if (have_standard) {
        throw Error(ErrorCode::kConfig, path + ": duplicate standard entry");
      }
      manifest.standard_image = resolve(file);
      have_standard = true;
    } else {
      throw Error(ErrorCode::kConfig, path + ":" + std::to_string(line_no) +
                                          ": unknown role '" + role + "'");
    }
  }
  if (!have_standard) {
    throw Error(ErrorCode::kConfig, path + ": no standard image");
  }
  ValidateManifest(manifest);
  return manifest;
}

void ValidateManifest(const DatasetManifest& manifest) {
  if (manifest.subject_images.empty()) {
    throw Error(ErrorCode::kEmptyClass, "manifest has no subject images");
  }
  std::set<std::string> seen;
  auto add = [&seen](const std::string& p) {
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::kConfig, "duplicate manifest path " + p);
    }
  };
  for (const auto& p : manifest.subject_images) add(p);
  for (const auto& p : manifest.impostor_images) add(p);
  // The enrollment face may double as a subject sample but never as an
  // impostor.
  if (std::find(manifest.impostor_images.begin(),
                manifest.impostor_images.end(),
                manifest.standard_image) != manifest.impostor_images.end()) {
    throw Error(ErrorCode::kConfig, "standard image listed as impostor");
  }
}

void SaveManifest(const DatasetManifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  for (const auto& p : manifest.subject_images) out << "subject " << p << "\n";
  for (const auto& p : manifest.impostor_images) {
    out << "impostor " << p << "\n";
  }
  out << "standard " << manifest.standard_image << "\n";
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
}

}  // namespace rdp
