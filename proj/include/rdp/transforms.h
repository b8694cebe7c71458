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

#ifndef RDP_TRANSFORMS_H_
#define RDP_TRANSFORMS_H_

#include <string>

#include <Eigen/Core>

#include "rdp/image_store.h"

namespace rdp {

struct WaveletPlan {
  int side = 0;
  int levels = 0;

  // levels = log2(side) - 1, so the coarsest approximation block is 2x2.
  // A 2x2 plan gets one level.
  static WaveletPlan Default(int side);
  void Validate() const;
};

enum class TransformKind { kHaar, kDct, kIdentity };

const char* TransformKindName(TransformKind kind);
TransformKind ParseTransformKind(const std::string& name);

// Orthonormal multi-level 2D Haar analysis. Coefficient layout: the level-N
// approximation block first, then for each level from coarsest to finest the
// top-right, bottom-left and bottom-right detail bands; each block row-major.
Eigen::VectorXd HaarForward(const GrayImage& img, const WaveletPlan& plan);
Eigen::VectorXd HaarForward(const Eigen::VectorXd& pixels,
                            const WaveletPlan& plan);
GrayImage HaarInverse(const Eigen::VectorXd& coeffs, const WaveletPlan& plan);
Eigen::VectorXd HaarInverseFlat(const Eigen::VectorXd& coeffs,
                                const WaveletPlan& plan);

// Orthonormal type-II 2D DCT; coefficients are the row-major N x N matrix.
Eigen::VectorXd DctForward(const GrayImage& img);
Eigen::VectorXd DctForward(const Eigen::VectorXd& pixels, int side);
GrayImage DctInverse(const Eigen::VectorXd& coeffs, int side);
Eigen::VectorXd DctInverseFlat(const Eigen::VectorXd& coeffs, int side);

// Dispatch on kind; kIdentity is a copy. The plan supplies the side for
// every kind and the levels for Haar.
Eigen::VectorXd Forward(TransformKind kind, const Eigen::VectorXd& pixels,
                        const WaveletPlan& plan);
Eigen::VectorXd Inverse(TransformKind kind, const Eigen::VectorXd& coeffs,
                        const WaveletPlan& plan);

// Largest side accepted by BuildOperator (the matrix is side^4 doubles).
inline constexpr int kMaxOperatorSide = 64;

// Synthesis matrix G with Flatten(inverse(c)) == G * c. Columns are the
// synthesized unit coefficient vectors.
Eigen::MatrixXd BuildOperator(const WaveletPlan& plan, TransformKind kind);

}  // namespace rdp

#endif  // RDP_TRANSFORMS_H_
