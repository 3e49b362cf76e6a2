#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <olspice/core.hpp>

#include "support.hpp"

using namespace olspice;
using namespace olspice::testing;

TEST(Ingest, RealRankOneUpdate) {
  SufficientStats<double> st(2);
  ingest(st, Sample<double>{2.0, Vec<double>{{1.0, 0.0}}});
  Mat<double> expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_EQ(st.gamma, expected);
  EXPECT_EQ(st.rho, (Vec<double>{{2.0, 0.0}}));
  EXPECT_EQ(st.kappa, 4.0);
  EXPECT_EQ(st.n, 1);
}

TEST(Ingest, ComplexSingleSample) {
  SufficientStats<cdouble> st(1);
  ingest(st, Sample<cdouble>{cdouble(1, 1), Vec<cdouble>{{cdouble(0, 1)}}});
  EXPECT_EQ(st.gamma(0, 0), cdouble(1, 0));
  EXPECT_EQ(st.rho(0), cdouble(-1, 1));
  EXPECT_EQ(st.kappa, 2.0);
  EXPECT_EQ(st.n, 1);
}

TEST(Ingest, MatchesBatchGramComplex) {
  std::mt19937_64 rng(11);
  const Vec<cdouble> theta = draw_vec<cdouble>(rng, 4);
  const auto samples = draw_stream<cdouble>(rng, theta, 10, 0.3);
  SufficientStats<cdouble> st(4);
  for (const auto& s : samples) ingest(st, s);
  const auto prob = stack(samples);
  EXPECT_LT(rel_err(st.gamma, Mat<cdouble>(prob.hmat.adjoint() * prob.hmat)), 1e-12);
  EXPECT_LT(rel_err(st.rho, Vec<cdouble>(prob.hmat.adjoint() * prob.y)), 1e-12);
  EXPECT_LT(rel_err(st.kappa, prob.y.squaredNorm()), 1e-12);
  EXPECT_EQ(st.n, 10);
}

TEST(Ingest, HermitianExactAndPsd) {
  std::mt19937_64 rng(12);
  SufficientStats<cdouble> st(6);
  const Vec<cdouble> theta = draw_vec<cdouble>(rng, 6);
  for (const auto& s : draw_stream<cdouble>(rng, theta, 3, 1.0)) ingest(st, s);
  const Mat<cdouble> diff = st.gamma - st.gamma.adjoint();
  EXPECT_EQ(diff.cwiseAbs().maxCoeff(), 0.0);
  for (Index i = 0; i < 6; ++i) {
    EXPECT_EQ(st.gamma(i, i).imag(), 0.0);
    EXPECT_GE(st.gamma(i, i).real(), 0.0);
  }
  Eigen::SelfAdjointEigenSolver<Mat<cdouble>> es(st.gamma);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * st.gamma.trace().real());
}

TEST(Ingest, RejectsBadInput) {
  SufficientStats<double> st(2);
  EXPECT_THROW(ingest(st, Sample<double>{1.0, Vec<double>{{1.0, 2.0, 3.0}}}), std::invalid_argument);
  EXPECT_THROW(ingest(st, Sample<double>{NAN, Vec<double>{{1.0, 2.0}}}), std::invalid_argument);
  EXPECT_THROW(ingest(st, Sample<double>{1.0, Vec<double>{{INFINITY, 2.0}}}), std::invalid_argument);
  EXPECT_EQ(st.n, 0);
}

TEST(InitAux, ZeroEstimateGivesRawStatistics) {
  std::mt19937_64 rng(13);
  SufficientStats<cdouble> st(3);
  const Vec<cdouble> theta = draw_vec<cdouble>(rng, 3);
  for (const auto& s : draw_stream<cdouble>(rng, theta, 5, 0.1)) ingest(st, s);
  const auto aux = init_aux(st, Vec<cdouble>::Zero(3).eval());
  EXPECT_EQ(aux.eta, st.kappa);
  EXPECT_EQ(aux.zeta, st.rho);
}

TEST(InitAux, ExactFitHasZeroResidual) {
  SufficientStats<double> st(1);
  ingest(st, Sample<double>{3.0, Vec<double>{{1.0}}});
  ingest(st, Sample<double>{3.0, Vec<double>{{1.0}}});
  const auto aux = init_aux(st, Vec<double>{{3.0}});
  EXPECT_EQ(aux.eta, 0.0);
  EXPECT_EQ(aux.zeta(0), 0.0);
}

TEST(InitAux, MatchesBatchResidual) {
  std::mt19937_64 rng(14);
  const Vec<double> truth = draw_vec<double>(rng, 3);
  const auto samples = draw_stream<double>(rng, truth, 8, 0.5);
  SufficientStats<double> st(3);
  for (const auto& s : samples) ingest(st, s);
  const Vec<double> theta = draw_vec<double>(rng, 3);
  const auto aux = init_aux(st, theta);
  const auto prob = stack(samples);
  const Vec<double> z = prob.y - prob.hmat * theta;
  EXPECT_LT(rel_err(aux.eta, z.squaredNorm()), 1e-10);
  EXPECT_LT(rel_err(aux.zeta, Vec<double>(prob.hmat.transpose() * z)), 1e-10);
}

TEST(ApplyDelta, ZeroDeltaIsNoOp) {
  std::mt19937_64 rng(15);
  SufficientStats<cdouble> st(3);
  const Vec<cdouble> theta = draw_vec<cdouble>(rng, 3);
  for (const auto& s : draw_stream<cdouble>(rng, theta, 4, 0.1)) ingest(st, s);
  auto aux = init_aux(st, theta);
  const auto before = aux;
  apply_coordinate_delta(aux, st, 1, theta(1), theta(1));
  EXPECT_EQ(aux.eta, before.eta);
  EXPECT_EQ(aux.zeta, before.zeta);
}

TEST(ApplyDelta, ExactFitUpdateClearsResidual) {
  SufficientStats<double> st(1);
  ingest(st, Sample<double>{3.0, Vec<double>{{1.0}}});
  ingest(st, Sample<double>{3.0, Vec<double>{{1.0}}});
  auto aux = init_aux(st, Vec<double>{{0.0}});
  EXPECT_EQ(aux.eta, 18.0);
  EXPECT_EQ(aux.zeta(0), 6.0);
  apply_coordinate_delta(aux, st, 0, 0.0, 3.0);
  EXPECT_EQ(aux.eta, 0.0);
  EXPECT_EQ(aux.zeta(0), 0.0);
}

TEST(ApplyDelta, MatchesRecomputation) {
  std::mt19937_64 rng(16);
  SufficientStats<cdouble> st(3);
  const Vec<cdouble> truth = draw_vec<cdouble>(rng, 3);
  for (const auto& s : draw_stream<cdouble>(rng, truth, 9, 0.4)) ingest(st, s);
  Vec<cdouble> theta = draw_vec<cdouble>(rng, 3);
  auto aux = init_aux(st, theta);
  for (int k = 0; k < 20; ++k) {
    const Index i = k % 3;
    const cdouble next = draw<cdouble>(rng);
    apply_coordinate_delta(aux, st, i, theta(i), next);
    theta(i) = next;
    const auto fresh = init_aux(st, theta);
    EXPECT_LT(rel_err(aux.eta, fresh.eta), 1e-10);
    EXPECT_LT(rel_err(aux.zeta, fresh.zeta), 1e-10);
  }
}

TEST(ApplyDelta, RejectsBadIndex) {
  SufficientStats<double> st(2);
  auto aux = init_aux(st, Vec<double>::Zero(2).eval());
  EXPECT_THROW(apply_coordinate_delta(aux, st, 2, 0.0, 1.0), std::out_of_range);
  EXPECT_THROW(apply_coordinate_delta(aux, st, -1, 0.0, 1.0), std::out_of_range);
}
