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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rdp/error.h"
#include "test_util.h"

namespace rdp {
namespace {

constexpr double kTol = 1e-9;

// Independent single-level orthonormal Haar step on the top-left n x n block,
// written out pixel by pixel.
void HaarStepOracle(Eigen::MatrixXd& a, int n) {
  const int h = n / 2;
  Eigen::MatrixXd out = a;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < h; ++c) {
      const double p = a(2 * r, 2 * c), q = a(2 * r, 2 * c + 1);
      const double s = a(2 * r + 1, 2 * c), t = a(2 * r + 1, 2 * c + 1);
      out(r, c) = (p + q + s + t) / 2;          // approximation
      out(r, c + h) = (p - q + s - t) / 2;      // horizontal detail
      out(r + h, c) = (p + q - s - t) / 2;      // vertical detail
      out(r + h, c + h) = (p - q - s + t) / 2;  // diagonal detail
    }
  }
  a = out;
}

// Pyramid coefficients in the documented layout: approximation block, then
// per level (coarse to fine) the top-right, bottom-left, bottom-right bands.
Eigen::VectorXd HaarOracle(const GrayImage& img, int levels) {
  const int side = img.side;
  Eigen::MatrixXd a = img.pixels;
  for (int l = 0; l < levels; ++l) HaarStepOracle(a, side >> l);
  Eigen::VectorXd out(side * side);
  int pos = 0;
  const int coarse = side >> levels;
  auto block = [&](int r0, int c0, int n) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) out[pos++] = a(r0 + r, c0 + c);
    }
  };
  block(0, 0, coarse);
  for (int n = coarse; n < side; n *= 2) {
    block(0, n, n);
    block(n, 0, n);
    block(n, n, n);
  }
  return out;
}

TEST(HaarTest, TwoByTwoConstant) {
  const WaveletPlan plan{2, 1};
  const Eigen::VectorXd c = HaarForward(GrayImage(2, 1.0), plan);
  EXPECT_NEAR(c[0], 2.0, kTol);
  EXPECT_NEAR(c.tail(3).cwiseAbs().maxCoeff(), 0.0, kTol);
  const GrayImage back = HaarInverse(c, plan);
  EXPECT_NEAR((back.pixels.array() - 1.0).abs().maxCoeff(), 0.0, kTol);
}

TEST(HaarTest, ZeroCoefficientsGiveZeroImage) {
  const WaveletPlan plan{8, 2};
  EXPECT_EQ(HaarInverse(Eigen::VectorXd::Zero(64), plan).pixels.norm(), 0.0);
}

TEST(HaarTest, MatchesPixelLevelOracle) {
  std::mt19937_64 gen(1);
  for (int side : {4, 8, 16}) {
    for (int levels = 1; (1 << levels) <= side; ++levels) {
      const GrayImage img = testing::RandomImage(side, gen);
      const Eigen::VectorXd got = HaarForward(img, {side, levels});
      EXPECT_LT((got - HaarOracle(img, levels)).cwiseAbs().maxCoeff(), kTol)
          << side << " " << levels;
    }
  }
}

TEST(HaarTest, RoundTripAndParseval) {
  std::mt19937_64 gen(2);
  const WaveletPlan plan{64, 4};
  for (int t = 0; t < 5; ++t) {
    const GrayImage img = testing::RandomImage(64, gen);
    const Eigen::VectorXd c = HaarForward(img, plan);
    const GrayImage back = HaarInverse(c, plan);
    EXPECT_LT((back.pixels - img.pixels).cwiseAbs().maxCoeff(), kTol);
    const double e = img.pixels.squaredNorm();
    EXPECT_NEAR(c.squaredNorm(), e, kTol * e);
  }
}

TEST(HaarTest, Linearity) {
  std::mt19937_64 gen(3);
  const WaveletPlan plan{16, 3};
  const Eigen::VectorXd x = testing::RandomVector(256, gen);
  const Eigen::VectorXd y = testing::RandomVector(256, gen);
  const Eigen::VectorXd lhs = HaarForward(Eigen::VectorXd(2.5 * x - 0.7 * y), plan);
  const Eigen::VectorXd rhs =
      2.5 * HaarForward(x, plan) - 0.7 * HaarForward(y, plan);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), kTol);
}

TEST(HaarTest, PlanMismatch) {
  try {
    HaarForward(GrayImage(8), WaveletPlan{16, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlanMismatch);
  }
  EXPECT_THROW(HaarInverseFlat(Eigen::VectorXd::Zero(10), {4, 1}), Error);
}

TEST(PlanTest, DefaultAndValidation) {
  EXPECT_EQ(WaveletPlan::Default(64).levels, 5);
  EXPECT_EQ(WaveletPlan::Default(4).levels, 1);
  EXPECT_EQ(WaveletPlan::Default(2).levels, 1);
  EXPECT_THROW((WaveletPlan{8, 4}.Validate()), Error);
  EXPECT_THROW((WaveletPlan{8, 0}.Validate()), Error);
  EXPECT_THROW((WaveletPlan{12, 1}.Validate()), Error);
}

// Orthonormal DCT-II matrix from its definition.
Eigen::MatrixXd DctMatrixOracle(int n) {
  Eigen::MatrixXd c(n, n);
  for (int k = 0; k < n; ++k) {
    const double a = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int i = 0; i < n; ++i) {
      c(k, i) = a * std::cos(M_PI * (2 * i + 1) * k / (2.0 * n));
    }
  }
  return c;
}

TEST(DctTest, ConstantImageHasOnlyDc) {
  const Eigen::VectorXd c = DctForward(GrayImage(8, 3.0));
  EXPECT_NEAR(c[0], 24.0, kTol);
  EXPECT_LT(c.tail(63).cwiseAbs().maxCoeff(), kTol);
}

TEST(DctTest, MatchesDefinitionAndRoundTrips) {
  std::mt19937_64 gen(4);
  const GrayImage img = testing::RandomImage(8, gen);
  const Eigen::MatrixXd cm = DctMatrixOracle(8);
  const Eigen::MatrixXd expect = cm * Eigen::MatrixXd(img.pixels) * cm.transpose();
  const Eigen::VectorXd got = DctForward(img);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) EXPECT_NEAR(got[r * 8 + c], expect(r, c), kTol);
  }
  EXPECT_NEAR(got.squaredNorm(), img.pixels.squaredNorm(),
              kTol * img.pixels.squaredNorm());
  EXPECT_LT((DctInverse(got, 8).pixels - img.pixels).cwiseAbs().maxCoeff(), kTol);
}

TEST(OperatorTest, IdentityAndHaarTwoByTwo) {
  EXPECT_TRUE(BuildOperator({4, 1}, TransformKind::kIdentity)
                  .isApprox(Eigen::MatrixXd::Identity(16, 16)));
  const Eigen::MatrixXd g = BuildOperator({2, 1}, TransformKind::kHaar);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(g(i, 0), 0.5, kTol);
  EXPECT_LT((g.transpose() * g - Eigen::MatrixXd::Identity(4, 4))
                .cwiseAbs()
                .maxCoeff(),
            kTol);
}

TEST(OperatorTest, OrthogonalAndConsistentWithTransforms) {
  std::mt19937_64 gen(5);
  for (TransformKind kind : {TransformKind::kHaar, TransformKind::kDct}) {
    const WaveletPlan plan{16, 2};
    const Eigen::MatrixXd g = BuildOperator(plan, kind);
    EXPECT_LT((g.transpose() * g - Eigen::MatrixXd::Identity(256, 256))
                  .cwiseAbs()
                  .maxCoeff(),
              kTol);
    const Eigen::VectorXd c = testing::RandomVector(256, gen);
    EXPECT_LT((Inverse(kind, c, plan) - g * c).cwiseAbs().maxCoeff(), kTol);
    const Eigen::VectorXd x = testing::RandomVector(256, gen);
    EXPECT_LT((Forward(kind, x, plan) - g.transpose() * x).cwiseAbs().maxCoeff(),
              kTol);
  }
}

TEST(OperatorTest, RefusesLargeSides) {
  EXPECT_THROW(BuildOperator({128, 1}, TransformKind::kHaar), Error);
}

}  // namespace
}  // namespace rdp
