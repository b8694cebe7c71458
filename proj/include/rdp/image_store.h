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

#ifndef RDP_IMAGE_STORE_H_
#define RDP_IMAGE_STORE_H_

#include <string>
#include <vector>

#include <Eigen/Core>

namespace rdp {

using PixelMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Square grayscale image. Pixels are real-valued in memory; only save_image
// clamps and rounds.
struct GrayImage {
  int side = 0;
  PixelMatrix pixels;

  GrayImage() = default;
  explicit GrayImage(int s, double fill = 0.0)
      : side(s), pixels(PixelMatrix::Constant(s, s, fill)) {}
};

bool IsPowerOfTwo(int n);

// Reads a P2 or P5 graymap. Width must equal height, be a power of two and
// be at least 4; maxval must not exceed 255.
GrayImage LoadImage(const std::string& path);

// Writes binary P5 after clamping to [0, 255] and rounding half to even.
void SaveImage(const GrayImage& img, const std::string& path);

// Value written by SaveImage for one pixel.
int QuantizePixel(double v);

// Row-major flattening, length side * side.
Eigen::VectorXd Flatten(const GrayImage& img);
GrayImage Unflatten(const Eigen::VectorXd& v, int side);

struct DatasetManifest {
  std::vector<std::string> subject_images;
  std::vector<std::string> impostor_images;
  std::string standard_image;
};

// One "role path" pair per line, roles subject / impostor / standard.
// Blank lines and lines starting with '#' are skipped. Relative paths are
// resolved against the manifest's directory.
DatasetManifest LoadManifest(const std::string& path);
void SaveManifest(const DatasetManifest& manifest, const std::string& path);
void ValidateManifest(const DatasetManifest& manifest);

}  // namespace rdp

#endif  // RDP_IMAGE_STORE_H_
