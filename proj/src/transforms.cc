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

#include "rdp/transforms.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "rdp/error.h"

namespace rdp {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

int Log2(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  return l;
}

// Slot k of the coefficient vector lives at order[k] of the Mallat array.
std::vector<int> PyramidOrder(const WaveletPlan& plan) {
  const int side = plan.side;
  std::vector<int> order;
  order.reserve(static_cast<size_t>(side) * side);
  auto push_block = [&](int r0, int c0, int m) {
    for (int r = r0; r < r0 + m; ++r) {
      for (int c = c0; c < c0 + m; ++c) order.push_back(r * side + c);
    }
  };
  const int approx = side >> plan.levels;
  push_block(0, 0, approx);
  for (int l = plan.levels; l >= 1; --l) {
    const int m = side >> l;
    push_block(0, m, m);
    push_block(m, 0, m);
    push_block(m, m, m);
  }
  return order;
}

// One analysis step on n strided samples: averages then differences.
void AnalyzeLine(double* x, int n, int stride, std::vector<double>& tmp) {
  const int h = n / 2;
  for (int j = 0; j < h; ++j) {
    const double a = x[(2 * j) * stride];
    const double b = x[(2 * j + 1) * stride];
    tmp[j] = (a + b) * kInvSqrt2;
    tmp[h + j] = (a - b) * kInvSqrt2;
  }
  for (int j = 0; j < n; ++j) x[j * stride] = tmp[j];
}

void SynthesizeLine(double* x, int n, int stride, std::vector<double>& tmp) {
  const int h = n / 2;
  for (int j = 0; j < h; ++j) {
    const double a = x[j * stride];
    const double d = x[(h + j) * stride];
    tmp[2 * j] = (a + d) * kInvSqrt2;
    tmp[2 * j + 1] = (a - d) * kInvSqrt2;
  }
  for (int j = 0; j < n; ++j) x[j * stride] = tmp[j];
}

void CheckLength(Eigen::Index n, const WaveletPlan& plan) {
  if (n != static_cast<Eigen::Index>(plan.side) * plan.side) {
    throw Error(ErrorCode::kPlanMismatch,
                "vector length " + std::to_string(n) + " vs side " +
                    std::to_string(plan.side));
  }
}

Eigen::MatrixXd DctMatrix(int n) {
  Eigen::MatrixXd c(n, n);
  const double a0 = std::sqrt(1.0 / n);
  const double a = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      c(k, i) = (k == 0 ? a0 : a) *
                std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
  }
  return c;
}

}  // namespace

WaveletPlan WaveletPlan::Default(int side) {
  WaveletPlan plan{side, std::max(1, Log2(side) - 1)};
  plan.Validate();
  return plan;
}

void WaveletPlan::Validate() const {
  if (!IsPowerOfTwo(side) || side < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "plan side must be a power of two >= 2");
  }
  if (levels < 1 || (1 << levels) > side) {
    throw Error(ErrorCode::kInvalidArgument,
                "plan levels must satisfy 1 <= levels and 2^levels <= side");
  }
}

const char* TransformKindName(TransformKind kind) {
  switch (kind) {
    case TransformKind::kHaar: return "haar";
    case TransformKind::kDct: return "dct";
    case TransformKind::kIdentity: return "identity";
  }
  return "unknown";
}

TransformKind ParseTransformKind(const std::string& name) {
  if (name == "haar") return TransformKind::kHaar;
  if (name == "dct") return TransformKind::kDct;
  if (name == "identity") return TransformKind::kIdentity;
  throw Error(ErrorCode::kConfig, "unknown transform kind " + name);
}

Eigen::VectorXd HaarForward(const Eigen::VectorXd& pixels,
                            const WaveletPlan& plan) {
  plan.Validate();
  CheckLength(pixels.size(), plan);
  const int side = plan.side;
  std::vector<double> a(pixels.data(), pixels.data() + pixels.size());
  std::vector<double> tmp(side);
  for (int l = 0; l < plan.levels; ++l) {
    const int m = side >> l;
    for (int r = 0; r < m; ++r) AnalyzeLine(&a[r * side], m, 1, tmp);
    for (int c = 0; c < m; ++c) AnalyzeLine(&a[c], m, side, tmp);
  }
  const std::vector<int> order = PyramidOrder(plan);
  Eigen::VectorXd out(pixels.size());
  for (size_t k = 0; k < order.size(); ++k) out[k] = a[order[k]];
  return out;
}

Eigen::VectorXd HaarForward(const GrayImage& img, const WaveletPlan& plan) {
  if (img.side != plan.side) {
    throw Error(ErrorCode::kPlanMismatch, "image side differs from plan");
  }
  return HaarForward(Flatten(img), plan);
}

Eigen::VectorXd HaarInverseFlat(const Eigen::VectorXd& coeffs,
                                const WaveletPlan& plan) {
  plan.Validate();
  CheckLength(coeffs.size(), plan);
  const int side = plan.side;
  const std::vector<int> order = PyramidOrder(plan);
  std::vector<double> a(coeffs.size());
  for (size_t k = 0; k < order.size(); ++k) a[order[k]] = coeffs[k];
  std::vector<double> tmp(side);
  for (int l = plan.levels - 1; l >= 0; --l) {
    const int m = side >> l;
    for (int c = 0; c < m; ++c) SynthesizeLine(&a[c], m, side, tmp);
    for (int r = 0; r < m; ++r) SynthesizeLine(&a[r * side], m, 1, tmp);
  }
  return Eigen::Map<Eigen::VectorXd>(a.data(), a.size());
}

GrayImage HaarInverse(const Eigen::VectorXd& coeffs, const WaveletPlan& plan) {
  return Unflatten(HaarInverseFlat(coeffs, plan), plan.side);
}

Eigen::VectorXd DctForward(const Eigen::VectorXd& pixels, int side) {
  if (pixels.size() != static_cast<Eigen::Index>(side) * side) {
    throw Error(ErrorCode::kPlanMismatch, "dct length");
  }
  const Eigen::MatrixXd c = DctMatrix(side);
  const PixelMatrix x = Eigen::Map<const PixelMatrix>(pixels.data(), side,
                                                      side);
  const PixelMatrix y = c * x * c.transpose();
  return Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
}

Eigen::VectorXd DctForward(const GrayImage& img) {
  return DctForward(Flatten(img), img.side);
}

Eigen::VectorXd DctInverseFlat(const Eigen::VectorXd& coeffs, int side) {
  if (coeffs.size() != static_cast<Eigen::Index>(side) * side) {
    throw Error(ErrorCode::kPlanMismatch, "dct length");
  }
  const Eigen::MatrixXd c = DctMatrix(side);
  const PixelMatrix y = Eigen::Map<const PixelMatrix>(coeffs.data(), side,
                                                      side);
  const PixelMatrix x = c.transpose() * y * c;
  return Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
}

GrayImage DctInverse(const Eigen::VectorXd& coeffs, int side) {
  return Unflatten(DctInverseFlat(coeffs, side), side);
}

Eigen::VectorXd Forward(TransformKind kind, const Eigen::VectorXd& pixels,
                        const WaveletPlan& plan) {
  switch (kind) {
    case TransformKind::kHaar:
      return HaarForward(pixels, plan);
    case TransformKind::kDct:
      return DctForward(pixels, plan.side);
    case TransformKind::kIdentity:
      CheckLength(pixels.size(), plan);
      return pixels;
  }
  throw Error(ErrorCode::kInvalidArgument, "transform kind");
}

Eigen::VectorXd Inverse(TransformKind kind, const Eigen::VectorXd& coeffs,
                        const WaveletPlan& plan) {
  switch (kind) {
    case TransformKind::kHaar:
      return HaarInverseFlat(coeffs, plan);
    case TransformKind::kDct:
      return DctInverseFlat(coeffs, plan.side);
    case TransformKind::kIdentity:
      CheckLength(coeffs.size(), plan);
      return coeffs;
  }
  throw Error(ErrorCode::kInvalidArgument, "transform kind");
}

Eigen::MatrixXd BuildOperator(const WaveletPlan& plan, TransformKind kind) {
  if (plan.side > kMaxOperatorSide) {
    throw Error(ErrorCode::kInvalidArgument,
                "BuildOperator limited to side <= " +
                    std::to_string(kMaxOperatorSide));
  }
  if (kind == TransformKind::kHaar) plan.Validate();
  const Eigen::Index n = static_cast<Eigen::Index>(plan.side) * plan.side;
  if (kind == TransformKind::kIdentity) {
    return Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::MatrixXd g(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    g.col(j) = Inverse(kind, e, plan);
  }
  return g;
}

}  // namespace rdp
