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
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <gtest/gtest.h>

#include "rdp/error.h"
#include "test_util.h"

namespace rdp {
namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

Big BigEnvelope(int k, int m_p, double p) {
  const Big q = Big(1) - Big(p);
  return pow(q, k) - pow(q, m_p + 1);
}

double BigEpsilon(const Eigen::MatrixXd& w, const Eigen::VectorXd& d,
                  const Eigen::VectorXd& b, double p) {
  const int m_p = static_cast<int>(w.cols());
  Big total = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    Big v = 0;
    for (int k = 0; k < m_p; ++k) {
      v += Big(w(i, k)) * Big(w(i, k)) * Big(b[k]) * Big(b[k]) *
           BigEnvelope(k + 1, m_p, p);
    }
    total += Big(d[i]) / sqrt(v);
  }
  return total.convert_to<double>();
}

MechanismParams Params(double eps0, double p) {
  MechanismParams params;
  params.epsilon0 = eps0;
  params.p = p;
  return params;
}

TEST(EnvelopeTest, ClosedForms) {
  const GeomEnvelope e1 = Envelope(1, 0.5);
  ASSERT_EQ(e1.m_p(), 1);
  EXPECT_DOUBLE_EQ(e1.g[0], 0.25);
  const GeomEnvelope e2 = Envelope(2, 0.5);
  EXPECT_DOUBLE_EQ(e2.g[0], 0.375);
  EXPECT_DOUBLE_EQ(e2.g[1], 0.125);
  EXPECT_THROW(Envelope(4, 0.0), Error);
  EXPECT_THROW(Envelope(4, 1.0), Error);
}

TEST(EnvelopeTest, LargeSupportAgainstHighPrecision) {
  const int m_p = 10000;
  const GeomEnvelope e = Envelope(m_p, 0.02);
  for (int k = 1; k < m_p; ++k) ASSERT_GT(e.g[k - 1], e.g[k]);
  EXPECT_GT(e.g[m_p - 1], 0.0);
  for (int k : {1, 2, 50, 1000, 5000, 9999, 10000}) {
    const double want = BigEnvelope(k, m_p, 0.02).convert_to<double>();
    EXPECT_NEAR(e.g[k - 1], want, 1e-12 * want) << k;
  }
  Big s = 0;
  for (int k = 1; k <= m_p; ++k) s += BigEnvelope(k, m_p, 0.02);
  const double sd = s.convert_to<double>();
  EXPECT_NEAR(EnvelopeSumClosedForm(m_p, 0.02), sd, 1e-12 * sd);
}

TEST(EnvelopeTest, ActiveCount) {
  const GeomEnvelope e = Envelope(4096, 0.02);
  const int k = DefaultActiveCount(e);
  EXPECT_EQ(k, 342);
  EXPECT_EQ(DefaultActiveCount(Envelope(16, 0.02)), 16);
}

TEST(BudgetTest, SingleTermAndHomogeneity) {
  const GeomEnvelope env = Envelope(1, 0.5);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
  EXPECT_DOUBLE_EQ(EpsilonOfScales(w, d, Eigen::VectorXd::Ones(1), env), 2.0);

  std::mt19937_64 gen(1);
  const Eigen::MatrixXd w2 = testing::RandomMatrix(3, 8, gen);
  const Eigen::VectorXd d2 = testing::RandomVector(3, gen, 0.5, 2.0);
  const Eigen::VectorXd b = testing::RandomVector(8, gen, 0.1, 3.0);
  const GeomEnvelope env8 = Envelope(8, 0.3);
  const double e = EpsilonOfScales(w2, d2, b, env8);
  EXPECT_NEAR(EpsilonOfScales(w2, d2, 2.0 * b, env8), e / 2.0, 1e-12 * e);
  EXPECT_NEAR(EpsilonOfScales(w2, d2, 3.7 * b, env8), e / 3.7, 1e-12 * e);
  EXPECT_NEAR(e, BigEpsilon(w2, d2, b, 0.3), 1e-13 * e);

  const BudgetEvaluation ev = EvaluateBudget(w2, d2, b, env8);
  EXPECT_NEAR(ev.features.eps_i.sum(), ev.epsilon, 1e-12 * e);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(ev.features.eps_i[i], d2[i] / ev.features.b_f[i], 1e-15);
  }
}

TEST(BudgetTest, ZeroDenominator) {
  const GeomEnvelope env = Envelope(2, 0.5);
  Eigen::MatrixXd w(2, 2);
  w << 1, 0, 0, 1;
  try {
    EpsilonOfScales(w, Eigen::VectorXd::Ones(2), Eigen::Vector2d(1, 0), env);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroDenominator);
  }
}

TEST(CostTest, ClosedFormsAndMonotonicity) {
  const GeomEnvelope env = Envelope(2, 0.5);
  EXPECT_DOUBLE_EQ(Cost(Eigen::Vector2d(1, 1), env), 0.5);
  EXPECT_EQ(Cost(Eigen::Vector2d::Zero(), env), 0.0);
  const Eigen::Vector2d b(0.7, 1.3);
  for (int k = 0; k < 2; ++k) {
    Eigen::Vector2d up = b;
    up[k] += 1e-3;
    EXPECT_GT(Cost(up, env), Cost(b, env));
  }
}

TEST(SolveNaTest, SymmetricAnchor) {
  const GeomEnvelope env = Envelope(1, 0.5);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd b = SolveNa(w, d, Params(2.0, 0.5), 1, env);
  EXPECT_NEAR(b[0], 1.0, 1e-12);
  EXPECT_NEAR(EpsilonOfScales(w, d, b, env), 2.0, 1e-12);
  const Eigen::VectorXd b4 = SolveNa(w, d, Params(4.0, 0.5), 1, env);
  EXPECT_NEAR(b4[0], 0.5, 1e-12);
}

TEST(SolveNaTest, MatchesDirectFormula) {
  std::mt19937_64 gen(2);
  const Eigen::MatrixXd w = testing::RandomMatrix(2, 4, gen);
  const Eigen::VectorXd d = testing::RandomVector(2, gen, 0.5, 2.0);
  const double p = 0.2, e0 = 1.3;
  const GeomEnvelope env = Envelope(4, p);
  const Eigen::VectorXd b = SolveNa(w, d, Params(e0, p), 3, env);
  const double q = 1 - p, tail = std::pow(q, 5);
  const double s = (1 - p - tail) / p - 4 * tail;
  for (int k = 0; k < 3; ++k) {
    const double want =
        (d[0] / std::abs(w(0, k)) + d[1] / std::abs(w(1, k))) / (e0 * std::sqrt(s));
    EXPECT_NEAR(b[k], want, 1e-12 * want);
  }
  EXPECT_EQ(b[3], 0.0);
}

TEST(SolveNaTest, ExactWhenWeightsAreEqualMagnitude) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> mf(1, 8), mp(1, 64);
  for (int t = 0; t < 50; ++t) {
    const int m_f = mf(gen), m_p = mp(gen);
    const double c = std::uniform_real_distribution<double>(0.1, 3.0)(gen);
    Eigen::MatrixXd w(m_f, m_p);
    for (int i = 0; i < m_f; ++i) {
      for (int k = 0; k < m_p; ++k) w(i, k) = (gen() & 1) ? c : -c;
    }
    const Eigen::VectorXd d = testing::RandomVector(m_f, gen, 0.5, 2.0);
    const double p = std::uniform_real_distribution<double>(0.01, 0.9)(gen);
    const double e0 = std::uniform_real_distribution<double>(0.2, 5.0)(gen);
    const GeomEnvelope env = Envelope(m_p, p);
    const Eigen::VectorXd b = SolveNa(w, d, Params(e0, p), m_p, env);
    EXPECT_NEAR(EpsilonOfScales(w, d, b, env), e0, 1e-9 * e0);
  }
}

TEST(SolveNaTest, ClampAndErrors) {
  const GeomEnvelope env = Envelope(2, 0.5);
  Eigen::MatrixXd w(2, 2);
  w << 1.0, 1e-12, 1.0, 1e-12;
  try {
    SolveNa(w, Eigen::VectorXd::Ones(2), Params(1.0, 0.5), 2, env);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllWeightsNegligible);
  }
  // A negligible entry in one row is skipped, not divided by.
  w << 1.0, 1.0, 1.0, 1e-12;
  const Eigen::VectorXd b =
      SolveNa(w, Eigen::VectorXd::Ones(2), Params(1.0, 0.5), 2, env);
  EXPECT_NEAR(b[1] / b[0], 0.5, 1e-12);
}

TEST(ResidualTest, SymmetricZeroAndLinearity) {
  const GeomEnvelope env = Envelope(1, 0.5);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(1);
  const double lambda = 2.0 * std::pow(0.25, 1.5);
  EXPECT_NEAR(StationarityResidual(w, d, b, lambda, env)[0], 0.0, 1e-12);
  EXPECT_NEAR(InitialLambda(w, d, b, env), lambda, 1e-12);

  std::mt19937_64 gen(4);
  const Eigen::MatrixXd w2 = testing::RandomMatrix(3, 6, gen);
  const Eigen::VectorXd d2 = testing::RandomVector(3, gen, 0.5, 2.0);
  const Eigen::VectorXd b2 = testing::RandomVector(6, gen, 0.1, 2.0);
  const GeomEnvelope env6 = Envelope(6, 0.25);
  const Eigen::VectorXd r1 = StationarityResidual(w2, d2, b2, 0.8, env6);
  const Eigen::VectorXd r2 = StationarityResidual(w2, d2, b2, 1.6, env6);
  EXPECT_LT(((r2 + Eigen::VectorXd::Constant(6, 2.0)) -
             2.0 * (r1 + Eigen::VectorXd::Constant(6, 2.0)))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  // Oracle evaluation.
  for (int k = 0; k < 6; ++k) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      double v = 0.0;
      for (int j = 0; j < 6; ++j) v += w2(i, j) * w2(i, j) * b2[j] * b2[j] * env6.g[j];
      s += 0.8 * d2[i] * w2(i, k) * w2(i, k) / std::pow(v, 1.5);
    }
    EXPECT_NEAR(r1[k], s - 2.0, 1e-10 * std::max(1.0, std::abs(s)));
  }
}

TEST(LmgdTest, SymmetricInstanceFromOffsetStart) {
  const GeomEnvelope env = Envelope(1, 0.5);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Ones(1, 1);
  const Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
  MechanismParams params = Params(2.0, 0.5);
  const Eigen::VectorXd start = Eigen::VectorXd::Constant(1, 1.3);
  const LmgdResult r = SolveLmgd(w, d, params, start, 1.0, env);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.b[0], 1.0, 1e-3);
  EXPECT_LT(r.f1, params.delta);

  // The literal signed-subgradient step oscillates at this eta; it must still
  // hand back its best iterate, which is no worse than the start.
  LmgdOptions sub;
  sub.update = LmgdUpdate::kSubgradient;
  const LmgdResult s = SolveLmgd(w, d, params, start, 1.0, env, sub);
  ASSERT_FALSE(s.trace.empty());
  EXPECT_TRUE(std::isfinite(s.f1 + s.f2));
  EXPECT_LE(s.f1 + s.f2, s.trace[0].f1 + s.trace[0].f2);
  for (const auto& t : s.trace) EXPECT_GE(t.f1 + t.f2, s.f1 + s.f2 - 1e-15);

  // Tight tolerance pins b to the stationary point.
  params.delta = 1e-9;
  const LmgdResult tight =
      SolveLmgd(w, d, params, Eigen::VectorXd::Constant(1, 1.3), 1.0, env);
  EXPECT_TRUE(tight.converged);
  EXPECT_NEAR(tight.b[0], 1.0, 1e-4);
  EXPECT_NEAR(tight.lambda, 0.25, 1e-4);
}

TEST(LmgdTest, AbsurdStepDiverges) {
  const GeomEnvelope env = Envelope(1, 0.5);
  MechanismParams params = Params(2.0, 0.5);
  params.eta = 10.0;
  params.max_iters = 2000;
  const LmgdResult r =
      SolveLmgd(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1), params,
                Eigen::VectorXd::Constant(1, 1.3), 1.0, env);
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(params.Validate(), Error);
}

struct Instance {
  Eigen::MatrixXd w;
  Eigen::VectorXd d;
  double e0;
  double p;
};

Instance RandomInstance(std::mt19937_64& gen, double p) {
  std::uniform_int_distribution<int> mf(1, 8), mp(4, 64);
  const int m_f = mf(gen), m_p = mp(gen);
  std::normal_distribution<double> normal;
  Instance in;
  in.w.resize(m_f, m_p);
  for (int i = 0; i < m_f; ++i) {
    for (int k = 0; k < m_p; ++k) in.w(i, k) = normal(gen);
  }
  in.d = testing::RandomVector(m_f, gen, 0.5, 2.0);
  in.e0 = std::uniform_real_distribution<double>(0.5, 2.0)(gen);
  in.p = p;
  return in;
}

TEST(LmgdTest, RandomInstancesBeatNa) {
  std::mt19937_64 gen(5);
  for (double p : {0.1, 0.02}) {
    int converged = 0;
    for (int t = 0; t < 20; ++t) {
      const Instance in = RandomInstance(gen, p);
      const GeomEnvelope env = Envelope(static_cast<int>(in.w.cols()), p);
      const MechanismParams params = Params(in.e0, p);
      const Eigen::VectorXd b0 =
          SolveNa(in.w, in.d, params, DefaultActiveCount(env), env);
      const double l0 = InitialLambda(in.w, in.d, b0, env);
      const LmgdResult r = SolveLmgd(in.w, in.d, params, b0, l0, env);
      if (!r.converged) continue;
      ++converged;
      const double e = EpsilonOfScales(in.w, in.d, r.b, env);
      EXPECT_LE(std::abs(e - in.e0), params.delta);
      EXPECT_LE(Cost(r.b, env), Cost(b0, env) * 1.05);
      EXPECT_LE(std::abs(e - in.e0),
                std::abs(EpsilonOfScales(in.w, in.d, b0, env) - in.e0) +
                    params.delta);
    }
    EXPECT_GE(converged, 18) << "p=" << p;
  }
}

TEST(LmgdTest, TraceSettlesAfterWarmup) {
  std::mt19937_64 gen(6);
  int monotone = 0;
  constexpr int kTrials = 20;
  for (int t = 0; t < kTrials; ++t) {
    const Instance in = RandomInstance(gen, 0.02);
    const GeomEnvelope env = Envelope(static_cast<int>(in.w.cols()), 0.02);
    const MechanismParams params = Params(in.e0, 0.02);
    const Eigen::VectorXd b0 =
        SolveNa(in.w, in.d, params, DefaultActiveCount(env), env);
    const LmgdResult r = SolveLmgd(in.w, in.d, params, b0,
                                   InitialLambda(in.w, in.d, b0, env), env);
    ASSERT_TRUE(r.converged) << "trial " << t;
    ASSERT_GT(r.trace.size(), 12u);
    EXPECT_NEAR(r.trace[0].epsilon, EpsilonOfScales(in.w, in.d, b0, env),
                1e-9);
    const auto loss = [&](size_t i) { return r.trace[i].f1 + r.trace[i].f2; };
    int rises = 0;
    for (size_t i = 11; i < r.trace.size(); ++i) {
      if (loss(i) > loss(i - 1) * (1 + 1e-9)) {
        ++rises;
        // Late rises are small wobbles of the L1 residual term.
        EXPECT_LT(loss(i), 1.1 * loss(i - 1)) << "trial " << t << " iter " << i;
      }
    }
    EXPECT_LT(loss(r.trace.size() - 1), loss(10)) << "trial " << t;
    if (rises == 0) ++monotone;
  }
  EXPECT_GE(monotone, kTrials / 2);
}

TEST(LmgdTest, TraceCsv) {
  LmgdResult r;
  r.trace.push_back({0, 0.5, 0.25, 1.5, 2.0, 0.1});
  const std::string dir = testing::ScratchDir("trace_csv");
  WriteTraceCsv(r, dir + "/t.csv");
  EXPECT_EQ(testing::ReadBytes(dir + "/t.csv"),
            "iter,F1,F2,epsilon,cost,lambda\n0,0.5,0.25,1.5,2,0.10000000000000001\n");
}

TEST(ParamsTest, Validate) {
  MechanismParams p;
  EXPECT_NO_THROW(p.Validate());
  p.p = 1.0;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.epsilon0 = 0.0;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.eta = 0.0005;
  EXPECT_THROW(p.Validate(), Error);
  p = {};
  p.delta = 0.0;
  EXPECT_THROW(p.Validate(), Error);
  EXPECT_EQ(ParseLmgdUpdate("subgradient"), LmgdUpdate::kSubgradient);
  EXPECT_THROW(ParseLmgdUpdate("newton"), Error);
}

}  // namespace
}  // namespace rdp
