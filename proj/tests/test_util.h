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

#ifndef RDP_TESTS_TEST_UTIL_H_
#define RDP_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Core>

#include "rdp/image_store.h"

namespace rdp::testing {

// Fresh per-test scratch directory under the system temp dir.
inline std::string ScratchDir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("rdp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

inline void WriteBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline std::string ReadBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Integer-valued image in [0, 255].
inline GrayImage RandomImage(int side, std::mt19937_64& gen) {
  std::uniform_int_distribution<int> dist(0, 255);
  GrayImage img(side);
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
    img.pixels.data()[i] = dist(gen);
  }
  return img;
}

inline Eigen::VectorXd RandomVector(int n, std::mt19937_64& gen,
                                    double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

inline Eigen::MatrixXd RandomMatrix(int r, int c, std::mt19937_64& gen,
                                    double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i < r; ++i) m(i, j) = dist(gen);
  }
  return m;
}

}  // namespace rdp::testing

#endif  // RDP_TESTS_TEST_UTIL_H_
