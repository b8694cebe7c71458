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

#include "rdp/budget_optim.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "rdp/error.h"

namespace rdp {
namespace {

void CheckProbability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kBadProbability,
                "p must lie in (0, 1), got " + std::to_string(p));
  }
}

void CheckShapes(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                 const Eigen::VectorXd& b, const GeomEnvelope& env) {
  if (w.rows() != deltas.size() || w.cols() != b.size() ||
      w.cols() != env.g.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "w is " + std::to_string(w.rows()) + "x" +
                    std::to_string(w.cols()) + ", deltas " +
                    std::to_string(deltas.size()) + ", b " +
                    std::to_string(b.size()) + ", envelope " +
                    std::to_string(env.g.size()));
  }
}

// A step that would multiply F by more than kDivergenceFactor, or make it
// non-finite, is halved up to kMaxHalvings times; the last candidate is then
// taken regardless.
constexpr double kDivergenceFactor = 2.0;
constexpr int kMaxHalvings = 4;

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

// Solver state restricted to the active columns.
struct Problem {
  Eigen::MatrixXd w2;  // M_F x n, squared weights
  Eigen::VectorXd g;   // n
  Eigen::VectorXd deltas;
  std::vector<int> cols;  // active column -> full column
};

struct Point {
  Eigen::VectorXd v;  // per-feature noise power
  double epsilon = 0.0;
  Eigen::VectorXd a;  // sum_i delta_i w_ik^2 / v_i^1.5
  Eigen::VectorXd r;
  Eigen::VectorXd x;  // b_k^2 g_k
  double x_sum = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

Point Evaluate(const Problem& prob, const Eigen::VectorXd& b, double lambda,
               double epsilon0) {
  Point pt;
  pt.x = b.cwiseAbs2().cwiseProduct(prob.g);
  pt.v = prob.w2 * pt.x;
  pt.epsilon = (prob.deltas.array() / pt.v.array().sqrt()).sum();
  const Eigen::VectorXd coef =
      prob.deltas.array() / pt.v.array().pow(1.5);
  pt.a = prob.w2.transpose() * coef;
  pt.r = (lambda * pt.a).array() - 2.0;
  pt.x_sum = pt.x.sum();
  pt.f1 = std::abs(pt.epsilon - epsilon0);
  pt.f2 = pt.x.dot(pt.r.cwiseAbs()) / pt.x_sum;
  return pt;
}

// One LMGD step of size eta from (b, lambda), whose losses are in pt.
void Step(const Problem& prob, const Point& pt, const Eigen::VectorXd& b,
          double lambda, double eta, double eps0, LmgdUpdate update,
          Eigen::VectorXd* next_b, double* next_lambda) {
  if (update == LmgdUpdate::kMultiplicative) {
    // Step 1: F1 moves every log-scale by the Newton step along the
    // homogeneous direction, epsilon(c b) = epsilon(b) / c. F2 moves
    // log b_k by the signed residual, in the bounded form
    // log(1 + r_k / 2) = log(lambda a_k / 2).
    const double shift = std::log(pt.epsilon / eps0);
    const Eigen::ArrayXd half = (pt.r.array() * 0.5).log1p();
    *next_b = (b.array().log() + shift + 2.0 * eta * half).exp();
    *next_b = next_b->cwiseMax(kScaleFloor);
    // Step 2: lambda follows the cost-weighted mean residual.
    const double rbar = pt.x.dot(half.matrix()) / pt.x_sum;
    *next_lambda = lambda * std::exp(-2.0 * eta * rbar);
    return;
  }
  const Eigen::VectorXd s = pt.r.unaryExpr(&Sign);
  const Eigen::VectorXd inv_v52 = prob.deltas.array() / pt.v.array().pow(2.5);
  const Eigen::VectorXd c = prob.w2 * pt.x.cwiseProduct(s);
  const Eigen::VectorXd t = prob.w2.transpose() * inv_v52.cwiseProduct(c);
  const Eigen::ArrayXd bg = b.array() * prob.g.array();
  const Eigen::ArrayXd dn =
      2.0 * bg * pt.r.array().abs() - 3.0 * lambda * bg * t.array();
  const Eigen::ArrayXd df2 = (dn - pt.f2 * 2.0 * bg) / pt.x_sum;
  const Eigen::ArrayXd deps = -bg * pt.a.array();
  const double df2_dlambda = pt.x.cwiseProduct(s).dot(pt.a) / pt.x_sum;
  *next_b =
      (b.array() - eta * (Sign(pt.epsilon - eps0) * deps + df2)).matrix();
  *next_b = next_b->cwiseMax(kScaleFloor);
  *next_lambda = lambda - eta * df2_dlambda;
}

}  // namespace

void MechanismParams::Validate() const {
  CheckProbability(p);
  if (!(epsilon0 > 0.0)) {
    throw Error(ErrorCode::kConfig, "epsilon0 must be positive");
  }
  if (!(eta >= 0.001 && eta <= 1.0)) {
    throw Error(ErrorCode::kConfig, "eta must lie in [0.001, 1]");
  }
  if (!(delta > 0.0)) throw Error(ErrorCode::kConfig, "delta must be > 0");
  if (max_iters < 1) throw Error(ErrorCode::kConfig, "max_iters must be >= 1");
}

GeomEnvelope Envelope(int m_p, double p) {
  CheckProbability(p);
  if (m_p < 1) throw Error(ErrorCode::kInvalidArgument, "m_p must be >= 1");
  GeomEnvelope env;
  env.p = p;
  env.g.resize(m_p);
  const double l = std::log1p(-p);
  // (1-p)^k (1 - (1-p)^(M_P+1-k)) keeps full relative precision at large k.
  for (int k = 1; k <= m_p; ++k) {
    env.g[k - 1] = std::exp(k * l) * -std::expm1((m_p + 1 - k) * l);
  }
  return env;
}

double EnvelopeSumClosedForm(int m_p, double p) {
  CheckProbability(p);
  const double tail = std::exp((m_p + 1.0) * std::log1p(-p));
  return (1.0 - p - tail) / p - m_p * tail;
}

int DefaultActiveCount(const GeomEnvelope& env, double mass) {
  KahanSum total;
  for (Eigen::Index k = 0; k < env.g.size(); ++k) total.Add(env.g[k]);
  KahanSum run;
  for (Eigen::Index k = 0; k < env.g.size(); ++k) {
    run.Add(env.g[k]);
    if (run.value() >= mass * total.value()) return static_cast<int>(k + 1);
  }
  return env.m_p();
}

BudgetEvaluation EvaluateBudget(const Eigen::MatrixXd& w,
                                const Eigen::VectorXd& deltas,
                                const Eigen::VectorXd& b,
                                const GeomEnvelope& env) {
  CheckShapes(w, deltas, b, env);
  BudgetEvaluation out;
  out.features.b_f.resize(w.rows());
  out.features.eps_i.resize(w.rows());
  KahanSum eps;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    KahanSum v;
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
      const double t = w(i, k) * b[k];
      v.Add(t * t * env.g[k]);
    }
    if (!(v.value() > 0.0)) {
      throw Error(ErrorCode::kZeroDenominator,
                  "feature " + std::to_string(i) + " receives no noise");
    }
    out.features.b_f[i] = std::sqrt(v.value());
    out.features.eps_i[i] = deltas[i] / out.features.b_f[i];
    eps.Add(out.features.eps_i[i]);
  }
  out.epsilon = eps.value();
  return out;
}

double EpsilonOfScales(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                       const Eigen::VectorXd& b, const GeomEnvelope& env) {
  return EvaluateBudget(w, deltas, b, env).epsilon;
}

double Cost(const Eigen::VectorXd& b, const GeomEnvelope& env) {
  if (b.size() != env.g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scale/envelope length");
  }
  KahanSum s;
  for (Eigen::Index k = 0; k < b.size(); ++k) s.Add(b[k] * b[k] * env.g[k]);
  return s.value();
}

Eigen::VectorXd StationarityResidual(const Eigen::MatrixXd& w,
                                     const Eigen::VectorXd& deltas,
                                     const Eigen::VectorXd& b, double lambda,
                                     const GeomEnvelope& env) {
  const BudgetEvaluation ev = EvaluateBudget(w, deltas, b, env);
  Eigen::VectorXd coef(w.rows());
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double bf = ev.features.b_f[i];
    coef[i] = lambda * deltas[i] / (bf * bf * bf);
  }
  Eigen::VectorXd r(w.cols());
  for (Eigen::Index k = 0; k < w.cols(); ++k) {
    KahanSum s;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      s.Add(coef[i] * w(i, k) * w(i, k));
    }
    r[k] = s.value() - 2.0;
  }
  return r;
}

Eigen::VectorXd SolveNa(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                        const MechanismParams& params, int k_active,
                        const GeomEnvelope& env, double tau) {
  CheckProbability(params.p);
  if (w.rows() != deltas.size() || w.cols() != env.g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "NA shapes");
  }
  if (k_active < 1 || k_active > w.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "k_active out of range: " + std::to_string(k_active));
  }
  if (!(params.epsilon0 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon0 must be positive");
  }
  const double s = EnvelopeSumClosedForm(static_cast<int>(w.cols()), params.p);
  const double denom = params.epsilon0 * std::sqrt(s);
  const double cutoff = tau * w.cwiseAbs().maxCoeff();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(w.cols());
  for (int k = 0; k < k_active; ++k) {
    KahanSum sum;
    bool any = false;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      const double aw = std::abs(w(i, k));
      if (aw < cutoff || aw == 0.0) continue;
      sum.Add(deltas[i] / aw);
      any = true;
    }
    if (!any) {
      throw Error(ErrorCode::kAllWeightsNegligible,
                  "ranked column " + std::to_string(k) +
                      " has no weight above the clamp");
    }
    b[k] = sum.value() / denom;
  }
  return b;
}

const char* LmgdUpdateName(LmgdUpdate update) {
  return update == LmgdUpdate::kMultiplicative ? "multiplicative"
                                               : "subgradient";
}

LmgdUpdate ParseLmgdUpdate(const std::string& name) {
  if (name == "multiplicative") return LmgdUpdate::kMultiplicative;
  if (name == "subgradient") return LmgdUpdate::kSubgradient;
  throw Error(ErrorCode::kConfig, "unknown lmgd update " + name);
}

double InitialLambda(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                     const Eigen::VectorXd& b, const GeomEnvelope& env) {
  // r_k + 2 is linear in lambda, so the mean over the support is too.
  const Eigen::VectorXd r1 = StationarityResidual(w, deltas, b, 1.0, env);
  double mean_a = 0.0;
  int n = 0;
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    if (b[k] > 0.0) {
      mean_a += r1[k] + 2.0;
      ++n;
    }
  }
  if (n == 0 || !(mean_a > 0.0)) {
    throw Error(ErrorCode::kZeroDenominator, "no active coefficient");
  }
  return 2.0 * n / mean_a;
}

LmgdResult SolveLmgd(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                     const MechanismParams& params, const Eigen::VectorXd& b0,
                     double lambda0, const GeomEnvelope& env,
                     const LmgdOptions& options) {
  CheckShapes(w, deltas, b0, env);
  if (!(params.eta > 0.0) || !(params.delta > 0.0) || params.max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument, "eta, delta, max_iters");
  }
  const double eps0 = params.epsilon0;
  const double e_start = EpsilonOfScales(w, deltas, b0, env);
  if (!std::isfinite(e_start)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon(b0) is not finite");
  }

  Problem prob;
  for (Eigen::Index k = 0; k < b0.size(); ++k) {
    if (b0[k] > 0.0) prob.cols.push_back(static_cast<int>(k));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(prob.cols.size());
  prob.w2.resize(w.rows(), n);
  prob.g.resize(n);
  Eigen::VectorXd b(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    prob.w2.col(j) = w.col(prob.cols[j]).cwiseAbs2();
    prob.g[j] = env.g[prob.cols[j]];
    b[j] = b0[prob.cols[j]];
  }
  prob.deltas = deltas;

  const double eta = params.eta;
  double lambda = lambda0;
  Eigen::VectorXd best_b = b;
  double best_lambda = lambda;
  double best_f = std::numeric_limits<double>::infinity();
  double best_f1 = 0.0, best_f2 = 0.0;

  LmgdResult out;
  int iter = 0;
  for (; iter < params.max_iters; ++iter) {
    const Point pt = Evaluate(prob, b, lambda, eps0);
    const double f = pt.f1 + pt.f2;
    if (options.record_trace) {
      out.trace.push_back({iter, pt.f1, pt.f2, pt.epsilon, pt.x_sum, lambda});
    }
    if (!std::isfinite(f) || !std::isfinite(lambda)) break;
    if (f < best_f) {
      best_f = f;
      best_b = b;
      best_lambda = lambda;
      best_f1 = pt.f1;
      best_f2 = pt.f2;
    }
    if (f < params.delta) {
      out.converged = true;
      break;
    }

    double step = eta;
    Eigen::VectorXd next_b;
    double next_lambda = lambda;
    for (int h = 0;; ++h) {
      Step(prob, pt, b, lambda, step, eps0, options.update, &next_b,
           &next_lambda);
      if (h == kMaxHalvings) break;
      const Point cand = Evaluate(prob, next_b, next_lambda, eps0);
      if (cand.f1 + cand.f2 <= kDivergenceFactor * f) break;
      step *= 0.5;
    }
    b = std::move(next_b);
    lambda = next_lambda;
  }

  out.iterations = iter;
  out.b = Eigen::VectorXd::Zero(b0.size());
  for (Eigen::Index j = 0; j < n; ++j) out.b[prob.cols[j]] = best_b[j];
  out.lambda = best_lambda;
  out.f1 = best_f1;
  out.f2 = best_f2;
  if (!std::isfinite(best_f)) {
    out.b = b0;
    out.lambda = lambda0;
    out.f1 = out.f2 = std::numeric_limits<double>::infinity();
  }
  return out;
}

void WriteTraceCsv(const LmgdResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  out << "iter,F1,F2,epsilon,cost,lambda\n";
  char line[256];
  for (const auto& row : result.trace) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  row.iter, row.f1, row.f2, row.epsilon, row.cost,
                  row.lambda);
    out << line;
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path);
}

}  // namespace rdp
