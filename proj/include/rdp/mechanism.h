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

#ifndef RDP_MECHANISM_H_
#define RDP_MECHANISM_H_

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdp/budget_optim.h"
#include "rdp/eigenfeatures.h"
#include "rdp/image_store.h"
#include "rdp/influence.h"
#include "rdp/transforms.h"

namespace rdp {

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t z);

// Folds a tuple of integers into one stream id.
uint64_t StreamId(std::initializer_list<uint64_t> parts);

// Counter-based generator: output n of stream (seed, stream) is
// Mix64(key + n * golden_gamma) with key = Mix64(seed ^ Mix64(stream)).
// Any (seed, stream, n) can be evaluated independently, so batches are
// reproducible regardless of scheduling.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream);

  uint64_t Next();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double Uniform();
  // Standard normal by Box-Muller (two uniforms per call).
  double Normal();

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

enum class GeometricMode {
  // P(K = k) = p (1-p)^k for k = 1..m_p; the remaining mass
  // p + (1-p)^(m_p+1) goes to K = 0 (no noise). P(K >= k) is exactly the
  // envelope g_k.
  kZeroAtom,
  // P(K = k) = p (1-p)^(k-1) on [1, m_p) with the tail folded into m_p.
  kSaturate,
};

const char* GeometricModeName(GeometricMode mode);
GeometricMode ParseGeometricMode(const std::string& name);

int SampleGeometric(double p, int m_p, CounterRng& rng,
                    GeometricMode mode = GeometricMode::kZeroAtom);

// Zero-mean Laplace by inverse CDF. Always consumes one draw.
double SampleLaplace(double scale, CounterRng& rng);

enum class Method { kRdpNa, kRdpLmgd, kRdpUniform, kPixelDp, kDctDp };

inline constexpr std::array<Method, 5> kAllMethods = {
    Method::kRdpNa, Method::kRdpLmgd, Method::kRdpUniform, Method::kPixelDp,
    Method::kDctDp};

const char* MethodName(Method method);
Method ParseMethod(const std::string& name);
TransformKind MethodTransform(Method method);
bool IsOptimized(Method method);

// Everything needed to sanitize an image with one calibrated method.
struct MechanismPlan {
  Method method = Method::kRdpNa;
  TransformKind kind = TransformKind::kHaar;
  WaveletPlan plan;
  GeometricMode mode = GeometricMode::kZeroAtom;
  double p = 0.02;
  double epsilon0 = 1.0;
  std::vector<int> perm;   // ranked slot -> coefficient index
  Eigen::VectorXd scales;  // ranked order
  Eigen::MatrixXd w;       // ranked Jacobian
  double achieved_epsilon = 0.0;
  double cost = 0.0;
  // Solver diagnostics (LMGD only).
  bool converged = true;
  int iterations = 0;
  double f1 = 0.0;
  double f2 = 0.0;
  std::vector<LmgdTraceRow> trace;
};

struct CalibrationOptions {
  RankingKey ranking = RankingKey::kWeightEnergy;
  GeometricMode mode = GeometricMode::kZeroAtom;
  LmgdOptions lmgd;
  double tau_w = kWeightClampTau;
  double active_mass = kActiveMass;
  // Coefficients ranked by amplitude come from this image; empty means the
  // mean face.
  Eigen::VectorXd amplitude_reference;
};

// Shared scale beta with epsilon(beta * 1) == epsilon0, by bisection on
// log(beta).
double CalibrateUniformScale(const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& deltas,
                             const GeomEnvelope& env, double epsilon0,
                             double rel_tol = 1e-13);

// epsilon0 = +infinity calibrates every method to zero noise.
MechanismPlan Calibrate(Method method, const EigenBasis& basis,
                        const Eigen::VectorXd& deltas, const WaveletPlan& plan,
                        const MechanismParams& params,
                        const CalibrationOptions& options = {});

struct SanitizeResult {
  GrayImage noisy_image;  // unclamped
  Eigen::VectorXd noisy_features;
  int k_drawn = 0;
  Eigen::VectorXd scales_used;  // ranked order
  Method method = Method::kRdpNa;
  uint64_t seed = 0;
  uint64_t stream = 0;
};

// Draws K, adds Laplace noise to ranked slots 1..K in coefficient space and
// synthesizes P' = P + G xi. Deterministic in (inputs, seed, stream).
SanitizeResult Sanitize(const GrayImage& img, const EigenBasis& basis,
                        const MechanismPlan& mplan, uint64_t seed,
                        uint64_t stream = 0);

// Noise-only variant: the coefficient-space noise vector in original
// coefficient order. Returns K.
int DrawCoefficientNoise(const MechanismPlan& mplan, CounterRng& rng,
                         Eigen::VectorXd* noise);

// Named entry points for each mechanism.
SanitizeResult SanitizeRdp(const GrayImage& img, const EigenBasis& basis,
                           const MechanismPlan& calibrated, uint64_t seed);
SanitizeResult SanitizeRdpUniform(const GrayImage& img,
                                  const EigenBasis& basis,
                                  const Eigen::VectorXd& deltas,
                                  const WaveletPlan& plan,
                                  const MechanismParams& params);
SanitizeResult SanitizePixelDp(const GrayImage& img, const EigenBasis& basis,
                               const Eigen::VectorXd& deltas,
                               const MechanismParams& params);
SanitizeResult SanitizeDctDp(const GrayImage& img, const EigenBasis& basis,
                             const Eigen::VectorXd& deltas,
                             const MechanismParams& params);

// One result per image; image j uses stream j. OpenMP over images.
std::vector<SanitizeResult> SanitizeBatch(const std::vector<GrayImage>& imgs,
                                          const EigenBasis& basis,
                                          const MechanismPlan& mplan,
                                          uint64_t seed);

namespace serial {
std::vector<SanitizeResult> SanitizeBatch(const std::vector<GrayImage>& imgs,
                                          const EigenBasis& basis,
                                          const MechanismPlan& mplan,
                                          uint64_t seed);
}  // namespace serial

// key=value text next to a sanitized PGM.
void WriteSidecar(const SanitizeResult& result, const MechanismPlan& mplan,
                  const std::string& path);

// Binary calibrated plan ("RDPS"): method, kind, plan, mode, p, epsilon0,
// achieved epsilon, cost, perm, scales, ranked weights.
void SaveMechanismPlan(const MechanismPlan& mplan, const std::string& path);
MechanismPlan LoadMechanismPlan(const std::string& path);

}  // namespace rdp

#endif  // RDP_MECHANISM_H_
