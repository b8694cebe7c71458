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

#include "rdp/mechanism.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "rdp/binary_io.h"
#include "rdp/error.h"

namespace rdp {
namespace {

constexpr uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
constexpr uint32_t kPlanVersion = 1;
constexpr int kMaxBisectionSteps = 400;

void CheckPlanAgainst(const MechanismPlan& mplan, const EigenBasis& basis,
                      const GrayImage& img) {
  const Eigen::Index m_p = static_cast<Eigen::Index>(mplan.plan.side) *
                           mplan.plan.side;
  if (img.side != mplan.plan.side || basis.m_p() != m_p ||
      mplan.scales.size() != m_p ||
      static_cast<Eigen::Index>(mplan.perm.size()) != m_p) {
    throw Error(ErrorCode::kCalibrationMismatch,
                "calibration is for side " + std::to_string(mplan.plan.side) +
                    ", image side " + std::to_string(img.side));
  }
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t StreamId(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x243f6a8885a308d3ULL;
  for (uint64_t part : parts) h = Mix64(h ^ Mix64(part + kGoldenGamma));
  return h;
}

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(Mix64(seed ^ Mix64(stream + kGoldenGamma))) {}

uint64_t CounterRng::Next() { return Mix64(key_ + (++counter_) * kGoldenGamma); }

double CounterRng::Uniform() {
  return (static_cast<double>(Next() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::Normal() {
  const double u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

const char* GeometricModeName(GeometricMode mode) {
  return mode == GeometricMode::kZeroAtom ? "zero_atom" : "saturate";
}

GeometricMode ParseGeometricMode(const std::string& name) {
  if (name == "zero_atom") return GeometricMode::kZeroAtom;
  if (name == "saturate") return GeometricMode::kSaturate;
  throw Error(ErrorCode::kConfig, "unknown geometric mode " + name);
}

int SampleGeometric(double p, int m_p, CounterRng& rng, GeometricMode mode) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kBadProbability,
                "p must lie in (0, 1), got " + std::to_string(p));
  }
  if (m_p < 1) throw Error(ErrorCode::kInvalidArgument, "m_p must be >= 1");
  // Failures before the first success: P(G = g) = p (1-p)^g.
  const double g = std::floor(std::log(rng.Uniform()) / std::log1p(-p));
  if (mode == GeometricMode::kZeroAtom) {
    return g >= 1.0 && g <= m_p ? static_cast<int>(g) : 0;
  }
  return g + 1.0 >= m_p ? m_p : static_cast<int>(g) + 1;
}

double SampleLaplace(double scale, CounterRng& rng) {
  const double u = rng.Uniform() - 0.5;
  if (scale == 0.0) return 0.0;
  return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

const char* MethodName(Method method) {
  switch (method) {
    case Method::kRdpNa: return "rdp_na";
    case Method::kRdpLmgd: return "rdp_lmgd";
    case Method::kRdpUniform: return "rdp_uniform";
    case Method::kPixelDp: return "pixel_dp";
    case Method::kDctDp: return "dct_dp";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  for (Method m : kAllMethods) {
    if (name == MethodName(m)) return m;
  }
  throw Error(ErrorCode::kConfig, "unknown method " + name);
}

TransformKind MethodTransform(Method method) {
  switch (method) {
    case Method::kPixelDp: return TransformKind::kIdentity;
    case Method::kDctDp: return TransformKind::kDct;
    default: return TransformKind::kHaar;
  }
}

bool IsOptimized(Method method) {
  return method == Method::kRdpNa || method == Method::kRdpLmgd;
}

double CalibrateUniformScale(const Eigen::MatrixXd& w,
                             const Eigen::VectorXd& deltas,
                             const GeomEnvelope& env, double epsilon0,
                             double rel_tol) {
  if (!(epsilon0 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon0 must be positive");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(w.cols());
  auto eps_at = [&](double beta) {
    return EpsilonOfScales(w, deltas, beta * ones, env);
  };
  // epsilon is strictly decreasing in beta.
  double lo = 1.0, hi = 1.0;
  for (int i = 0; eps_at(hi) > epsilon0; ++i) {
    if (i == kMaxBisectionSteps) {
      throw Error(ErrorCode::kNonConvergence, "no upper bracket");
    }
    hi *= 2.0;
  }
  for (int i = 0; eps_at(lo) < epsilon0; ++i) {
    if (i == kMaxBisectionSteps) {
      throw Error(ErrorCode::kNonConvergence, "no lower bracket");
    }
    lo *= 0.5;
  }
  for (int i = 0; i < kMaxBisectionSteps && hi - lo > rel_tol * lo; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (eps_at(mid) > epsilon0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

MechanismPlan Calibrate(Method method, const EigenBasis& basis,
                        const Eigen::VectorXd& deltas, const WaveletPlan& plan,
                        const MechanismParams& params,
                        const CalibrationOptions& options) {
  if (deltas.size() != basis.m_f()) {
    throw Error(ErrorCode::kDimensionMismatch, "deltas length differs from M_F");
  }
  MechanismPlan out;
  out.method = method;
  out.kind = MethodTransform(method);
  out.plan = plan;
  out.mode = options.mode;
  out.p = params.p;
  out.epsilon0 = params.epsilon0;

  const Eigen::MatrixXd jac = JacobianOperatorFree(basis, plan, out.kind);
  Eigen::VectorXd coeffs;
  if (options.ranking == RankingKey::kAmplitude) {
    const Eigen::VectorXd& ref = options.amplitude_reference.size() > 0
                                     ? options.amplitude_reference
                                     : basis.mean_face;
    coeffs = Forward(out.kind, ref, plan);
  }
  out.perm = RankPermutation(jac, coeffs, options.ranking);
  out.w = RankColumns(jac, out.perm);
  const GeomEnvelope env = Envelope(basis.m_p(), params.p);

  if (std::isinf(params.epsilon0)) {
    out.scales = Eigen::VectorXd::Zero(basis.m_p());
    out.achieved_epsilon = std::numeric_limits<double>::infinity();
    out.cost = 0.0;
    return out;
  }

  switch (method) {
    case Method::kRdpNa:
    case Method::kRdpLmgd: {
      const int k_active = DefaultActiveCount(env, options.active_mass);
      out.scales = SolveNa(out.w, deltas, params, k_active, env,
                           options.tau_w);
      if (method == Method::kRdpLmgd) {
        const double lambda0 = InitialLambda(out.w, deltas, out.scales, env);
        LmgdResult res = SolveLmgd(out.w, deltas, params, out.scales, lambda0,
                                   env, options.lmgd);
        out.scales = res.b;
        out.converged = res.converged;
        out.iterations = res.iterations;
        out.f1 = res.f1;
        out.f2 = res.f2;
        out.trace = std::move(res.trace);
      }
      break;
    }
    default: {
      const double beta =
          CalibrateUniformScale(out.w, deltas, env, params.epsilon0);
      out.scales = Eigen::VectorXd::Constant(basis.m_p(), beta);
      break;
    }
  }
  out.achieved_epsilon = EpsilonOfScales(out.w, deltas, out.scales, env);
  out.cost = Cost(out.scales, env);
  return out;
}

int DrawCoefficientNoise(const MechanismPlan& mplan, CounterRng& rng,
                         Eigen::VectorXd* noise) {
  const int m_p = static_cast<int>(mplan.scales.size());
  noise->setZero(m_p);
  const int k = SampleGeometric(mplan.p, m_p, rng, mplan.mode);
  for (int j = 0; j < k; ++j) {
    (*noise)[mplan.perm[j]] = SampleLaplace(mplan.scales[j], rng);
  }
  return k;
}

SanitizeResult Sanitize(const GrayImage& img, const EigenBasis& basis,
                        const MechanismPlan& mplan, uint64_t seed,
                        uint64_t stream) {
  CheckPlanAgainst(mplan, basis, img);
  CounterRng rng(seed, stream);
  Eigen::VectorXd noise;
  SanitizeResult out;
  out.k_drawn = DrawCoefficientNoise(mplan, rng, &noise);
  Eigen::VectorXd pixels = Flatten(img);
  // Linearity: inverse(C + xi) = P + inverse(xi), and K = 0 stays exact.
  if (out.k_drawn > 0) pixels += Inverse(mplan.kind, noise, mplan.plan);
  out.noisy_image = Unflatten(pixels, img.side);
  out.noisy_features = ProjectFlat(basis, pixels);
  out.scales_used = mplan.scales;
  out.method = mplan.method;
  out.seed = seed;
  out.stream = stream;
  return out;
}

SanitizeResult SanitizeRdp(const GrayImage& img, const EigenBasis& basis,
                           const MechanismPlan& calibrated, uint64_t seed) {
  return Sanitize(img, basis, calibrated, seed);
}

SanitizeResult SanitizeRdpUniform(const GrayImage& img,
                                  const EigenBasis& basis,
                                  const Eigen::VectorXd& deltas,
                                  const WaveletPlan& plan,
                                  const MechanismParams& params) {
  const MechanismPlan m =
      Calibrate(Method::kRdpUniform, basis, deltas, plan, params);
  return Sanitize(img, basis, m, params.seed);
}

SanitizeResult SanitizePixelDp(const GrayImage& img, const EigenBasis& basis,
                               const Eigen::VectorXd& deltas,
                               const MechanismParams& params) {
  const MechanismPlan m = Calibrate(Method::kPixelDp, basis, deltas,
                                    WaveletPlan::Default(img.side), params);
  return Sanitize(img, basis, m, params.seed);
}

SanitizeResult SanitizeDctDp(const GrayImage& img, const EigenBasis& basis,
                             const Eigen::VectorXd& deltas,
                             const MechanismParams& params) {
  const MechanismPlan m = Calibrate(Method::kDctDp, basis, deltas,
                                    WaveletPlan::Default(img.side), params);
  return Sanitize(img, basis, m, params.seed);
}

std::vector<SanitizeResult> SanitizeBatch(const std::vector<GrayImage>& imgs,
                                          const EigenBasis& basis,
                                          const MechanismPlan& mplan,
                                          uint64_t seed) {
  std::vector<SanitizeResult> out(imgs.size());
  const long n = static_cast<long>(imgs.size());
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < n; ++j) {
    out[j] = Sanitize(imgs[j], basis, mplan, seed, static_cast<uint64_t>(j));
  }
  return out;
}

namespace serial {

std::vector<SanitizeResult> SanitizeBatch(const std::vector<GrayImage>& imgs,
                                          const EigenBasis& basis,
                                          const MechanismPlan& mplan,
                                          uint64_t seed) {
  std::vector<SanitizeResult> out;
  out.reserve(imgs.size());
  for (size_t j = 0; j < imgs.size(); ++j) {
    out.push_back(Sanitize(imgs[j], basis, mplan, seed, j));
  }
  return out;
}

}  // namespace serial

void WriteSidecar(const SanitizeResult& result, const MechanismPlan& mplan,
                  const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  out << "method=" << MethodName(result.method) << "\n"
      << "seed=" << result.seed << "\n"
      << "stream=" << result.stream << "\n"
      << "epsilon0=" << Fmt(mplan.epsilon0) << "\n"
      << "p=" << Fmt(mplan.p) << "\n"
      << "geometric_mode=" << GeometricModeName(mplan.mode) << "\n"
      << "transform=" << TransformKindName(mplan.kind) << "\n"
      << "levels=" << mplan.plan.levels << "\n"
      << "K=" << result.k_drawn << "\n"
      << "achieved_epsilon=" << Fmt(mplan.achieved_epsilon) << "\n"
      << "cost=" << Fmt(mplan.cost) << "\n";
  out << "features=";
  for (Eigen::Index i = 0; i < result.noisy_features.size(); ++i) {
    out << (i ? "," : "") << Fmt(result.noisy_features[i]);
  }
  out << "\n";
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
}

void SaveMechanismPlan(const MechanismPlan& m, const std::string& path) {
  BinaryWriter out(path);
  out.Magic("RDPS");
  out.U32(kPlanVersion);
  out.U32(static_cast<uint32_t>(m.method));
  out.U32(static_cast<uint32_t>(m.kind));
  out.U32(static_cast<uint32_t>(m.plan.side));
  out.U32(static_cast<uint32_t>(m.plan.levels));
  out.U32(static_cast<uint32_t>(m.mode));
  out.U32(static_cast<uint32_t>(m.w.rows()));
  out.F64(m.p);
  out.F64(m.epsilon0);
  out.F64(m.achieved_epsilon);
  out.F64(m.cost);
  out.U32(m.converged ? 1 : 0);
  out.U32(static_cast<uint32_t>(m.iterations));
  out.F64(m.f1);
  out.F64(m.f2);
  for (int idx : m.perm) out.U32(static_cast<uint32_t>(idx));
  out.F64s(m.scales.data(), m.scales.size());
  const Eigen::MatrixXd w = m.w;  // column-major
  out.F64s(w.data(), w.size());
  out.Close();
}

MechanismPlan LoadMechanismPlan(const std::string& path) {
  BinaryReader in(path);
  in.ExpectMagic("RDPS");
  if (in.U32() != kPlanVersion) {
    throw Error(ErrorCode::kMalformedHeader, path + ": plan version");
  }
  MechanismPlan m;
  const uint32_t method = in.U32();
  const uint32_t kind = in.U32();
  m.plan.side = static_cast<int>(in.U32());
  m.plan.levels = static_cast<int>(in.U32());
  const uint32_t mode = in.U32();
  const uint32_t m_f = in.U32();
  if (method > 4 || kind > 2 || mode > 1 || !IsPowerOfTwo(m.plan.side) ||
      m.plan.side > 4096 || m_f == 0) {
    throw Error(ErrorCode::kMalformedHeader, path + ": plan header");
  }
  m.method = static_cast<Method>(method);
  m.kind = static_cast<TransformKind>(kind);
  m.mode = static_cast<GeometricMode>(mode);
  m.p = in.F64();
  m.epsilon0 = in.F64();
  m.achieved_epsilon = in.F64();
  m.cost = in.F64();
  m.converged = in.U32() != 0;
  m.iterations = static_cast<int>(in.U32());
  m.f1 = in.F64();
  m.f2 = in.F64();
  const Eigen::Index m_p = static_cast<Eigen::Index>(m.plan.side) *
                           m.plan.side;
  m.perm.resize(m_p);
  for (auto& idx : m.perm) {
    idx = static_cast<int>(in.U32());
    if (idx < 0 || idx >= m_p) {
      throw Error(ErrorCode::kMalformedHeader, path + ": permutation");
    }
  }
  m.scales.resize(m_p);
  in.F64s(m.scales.data(), m_p);
  m.w.resize(m_f, m_p);
  in.F64s(m.w.data(), m.w.size());
  return m;
}

}  // namespace rdp
