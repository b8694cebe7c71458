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

#ifndef RDP_BUDGET_OPTIM_H_
#define RDP_BUDGET_OPTIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rdp {

// Compensated summation.
class KahanSum {
 public:
  void Add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

struct MechanismParams {
  double epsilon0 = 1.0;
  double p = 0.02;
  double eta = 0.05;
  double delta = 1e-3;
  int max_iters = 50000;
  uint64_t seed = 0;

  // Checks 0 < p < 1, epsilon0 > 0, eta in [0.001, 1], delta > 0.
  void Validate() const;
};

// g_k = (1-p)^k - (1-p)^(M_P+1), stored 0-based (g[0] is g_1).
struct GeomEnvelope {
  double p = 0.0;
  Eigen::VectorXd g;

  int m_p() const { return static_cast<int>(g.size()); }
};

GeomEnvelope Envelope(int m_p, double p);

// sum_k g_k = (1-p-(1-p)^(M_P+1))/p - M_P (1-p)^(M_P+1).
double EnvelopeSumClosedForm(int m_p, double p);

inline constexpr double kActiveMass = 0.999;

// Smallest k whose cumulative envelope mass reaches `mass`.
int DefaultActiveCount(const GeomEnvelope& env, double mass = kActiveMass);

struct FeatureScales {
  Eigen::VectorXd b_f;    // sqrt(sum_k (w_ik b_k)^2 g_k)
  Eigen::VectorXd eps_i;  // delta_i / b_f_i
};

struct BudgetEvaluation {
  double epsilon = 0.0;
  FeatureScales features;
};

// w is M_F x M_P in ranked order; b in ranked order.
BudgetEvaluation EvaluateBudget(const Eigen::MatrixXd& w,
                                const Eigen::VectorXd& deltas,
                                const Eigen::VectorXd& b,
                                const GeomEnvelope& env);

double EpsilonOfScales(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                       const Eigen::VectorXd& b, const GeomEnvelope& env);

// sum_k b_k^2 g_k.
double Cost(const Eigen::VectorXd& b, const GeomEnvelope& env);

// r_k = sum_i lambda delta_i w_ik^2 / v_i^(3/2) - 2 with
// v_i = sum_k (w_ik b_k)^2 g_k.
Eigen::VectorXd StationarityResidual(const Eigen::MatrixXd& w,
                                     const Eigen::VectorXd& deltas,
                                     const Eigen::VectorXd& b, double lambda,
                                     const GeomEnvelope& env);

inline constexpr double kWeightClampTau = 1e-8;

// Closed-form scales assuming every (i, k) term contributes equally to the
// budget. Terms with |w_ik| < tau * max|w| are skipped; b_k = 0 past
// k_active.
Eigen::VectorXd SolveNa(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                        const MechanismParams& params, int k_active,
                        const GeomEnvelope& env,
                        double tau = kWeightClampTau);

enum class LmgdUpdate {
  // Log-scale steps proportional to the signed residuals (default).
  kMultiplicative,
  // Literal additive signed-subgradient steps on F1 + F2.
  kSubgradient,
};

const char* LmgdUpdateName(LmgdUpdate update);
LmgdUpdate ParseLmgdUpdate(const std::string& name);

struct LmgdOptions {
  LmgdUpdate update = LmgdUpdate::kMultiplicative;
  bool record_trace = true;
};

struct LmgdTraceRow {
  int iter = 0;
  double f1 = 0.0;
  double f2 = 0.0;
  double epsilon = 0.0;
  double cost = 0.0;
  double lambda = 0.0;
};

struct LmgdResult {
  Eigen::VectorXd b;
  double lambda = 0.0;
  bool converged = false;
  int iterations = 0;
  double f1 = 0.0;
  double f2 = 0.0;
  std::vector<LmgdTraceRow> trace;
};

inline constexpr double kScaleFloor = 1e-12;

// Lagrange-multiplier descent for min cost(b) s.t. epsilon(b) = epsilon0.
//   F1 = |epsilon(b) - epsilon0|
//   F2 = sum_k x_k |r_k| / sum_k x_k over active k, x_k = b_k^2 g_k
// F2 vanishes exactly at stationary points, including those whose support
// is a strict subset of the active set. Only coefficients with b0_k > 0 are
// updated. Stops when F1 + F2 < delta; otherwise returns the best iterate
// with converged = false.
LmgdResult SolveLmgd(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                     const MechanismParams& params, const Eigen::VectorXd& b0,
                     double lambda0, const GeomEnvelope& env,
                     const LmgdOptions& options = {});

// Lambda that zeroes the mean residual over the support of b.
double InitialLambda(const Eigen::MatrixXd& w, const Eigen::VectorXd& deltas,
                     const Eigen::VectorXd& b, const GeomEnvelope& env);

// Columns: iter,F1,F2,epsilon,cost,lambda.
void WriteTraceCsv(const LmgdResult& result, const std::string& path);

}  // namespace rdp

#endif  // RDP_BUDGET_OPTIM_H_
