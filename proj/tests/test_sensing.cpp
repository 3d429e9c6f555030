#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace cjs;
using cjs::test::random_cvector;

namespace {

SchemeConfig cfg_for(Scheme s, SamplingMode mode, std::uint64_t seed, std::size_t n, int q, double gamma = 1.0) {
  return SchemeConfig::matched(s, n, 1.0 / q, mode, seed, q, gamma);
}

// Frequencies {2k/q} on both axes: a complete q-point DFT per axis, n = m.
SamplingPlan even_subgrid_plan(int q) {
  const auto c = cfg_for(Scheme::Backward, SamplingMode::OnGrid, 0, 1, q);
  SamplingPlan plan;
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) plan.samples.push_back(make_sample((2.0 * a - q) / q, (2.0 * b - q) / q, c));
  return plan;
}

CMatrix dense_reference(const SamplingPlan& plan, int q) {
  CMatrix a(static_cast<Eigen::Index>(plan.size()), q * q);
  for (std::size_t l = 0; l < plan.size(); ++l)
    for (int p1 = 1; p1 <= q; ++p1)
      for (int p2 = 1; p2 <= q; ++p2) {
        const double ph = std::numbers::pi * (p1 * plan[l].xi + p2 * plan[l].zeta);
        a(static_cast<Eigen::Index>(l), (p1 - 1) * q + p2 - 1) = std::polar(1.0 / std::sqrt(double(plan.size())), ph);
      }
  return a;
}

}  // namespace

TEST(SensingOperatorBuild, CompleteGridIsOrthonormal) {
  const int q = 6;
  for (const auto& plan : {even_subgrid_plan(q), full_grid_plan(cfg_for(Scheme::Backward, SamplingMode::OnGrid, 0, 1, q))}) {
    const SensingOperator op(plan, q, cfg_for(Scheme::Backward, SamplingMode::OnGrid, 0, plan.size(), q));
    const CMatrix a = op.to_dense();
    EXPECT_LE((a.adjoint() * a - CMatrix::Identity(q * q, q * q)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SensingOperatorBuild, UnitColumns) {
  const int q = 8;
  const auto c = cfg_for(Scheme::Forward, SamplingMode::Continuous, 2, 37, q);
  const SensingOperator op(draw_sampling_plan(c), q, c);
  for (Eigen::Index j = 0; j < op.cols(); ++j) EXPECT_NEAR(op.column(j).norm(), 1.0, 1e-12);
}

TEST(SensingOperatorBuild, RejectsBandLimitMismatch) {
  auto c = cfg_for(Scheme::Backward, SamplingMode::Continuous, 2, 10, 8);
  const auto plan = draw_sampling_plan(c);
  c.bandwidth *= 1.001;
  EXPECT_THROW(SensingOperator(plan, 8, c), InvalidConfiguration);
}

TEST(SensingOperatorBuild, FftNeedsOnGridPlan) {
  const auto c = cfg_for(Scheme::Backward, SamplingMode::Continuous, 2, 10, 8);
  EXPECT_THROW(SensingOperator(draw_sampling_plan(c), 8, c, Representation::Fft), InvalidArgument);
  const SensingOperator sep(draw_sampling_plan(c), 8, c);
  EXPECT_EQ(sep.representation(), Representation::Separable);
  EXPECT_THROW(sep.grid_indices(), PreconditionError);
  EXPECT_THROW(SensingOperator(SamplingPlan{}, 8), InvalidArgument);
}

TEST(SensingOperatorBuild, PhysicalMatchesFourierForm) {
  const int q = 16;
  for (auto scheme : {Scheme::Backward, Scheme::Forward}) {
    const auto c = cfg_for(scheme, SamplingMode::Continuous, 3, 200, q, 1.5);
    const auto plan = draw_sampling_plan(c);
    Rng rng(30);
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (int k = 0; k < 1000; ++k) entries.emplace_back(rng.index(plan.size()), rng.index(q * q));
    EXPECT_LE(max_form_disagreement(plan, q, c.ell, entries), 1e-10);
    const SensingOperator op(plan, q, c);
    for (int k = 0; k < 50; ++k) {
      const auto [l, j] = entries[static_cast<std::size_t>(k)];
      EXPECT_LE(std::abs(op.entry(l, j) - physical_entry(plan[l], int(j / q) + 1, int(j % q) + 1, c.ell, plan.size())), 1e-10);
    }
  }
}

TEST(SensingApply, ZeroAndCanonical) {
  const int q = 8;
  const auto c = cfg_for(Scheme::Backward, SamplingMode::OnGrid, 4, 50, q);
  for (auto rep : {Representation::Explicit, Representation::Separable, Representation::Fft}) {
    const SensingOperator op(draw_sampling_plan(c), q, c, rep);
    EXPECT_EQ(op.apply(CVector::Zero(q * q)).norm(), 0.0);
    CVector e = CVector::Zero(q * q);
    e(19) = 1.0;
    const CVector col = op.apply(e);
    EXPECT_NEAR(col.norm(), 1.0, 1e-12);
    EXPECT_LE((col - op.column(19)).norm(), 1e-12);
  }
}

TEST(SensingApply, RepresentationsAgreeWithDenseReference) {
  const int q = 8;
  Rng rng(31);
  for (auto mode : {SamplingMode::Continuous, SamplingMode::OnGrid}) {
    const auto c = cfg_for(Scheme::Forward, mode, 5, 45, q);
    const auto plan = draw_sampling_plan(c);
    const CMatrix ref = dense_reference(plan, q);
    const CVector x = random_cvector(q * q, rng);
    const CVector y = random_cvector(45, rng);
    std::vector<Representation> reps{Representation::Explicit, Representation::Separable};
    if (mode == SamplingMode::OnGrid) reps.push_back(Representation::Fft);
    for (auto rep : reps) {
      const SensingOperator op(plan, q, c, rep);
      EXPECT_LE((op.apply(x) - ref * x).norm(), 1e-10 * (ref * x).norm());
      EXPECT_LE((op.adjoint_apply(y) - ref.adjoint() * y).norm(), 1e-10 * (ref.adjoint() * y).norm());
    }
  }
}

TEST(SensingApply, AdjointPair) {
  Rng rng(32);
  for (int q : {5, 8, 16}) {
    for (auto mode : {SamplingMode::Continuous, SamplingMode::OnGrid}) {
      const auto c = cfg_for(Scheme::Backward, mode, 6, 3 * q, q);
      const SensingOperator op(draw_sampling_plan(c), q, c);
      for (int t = 0; t < 5; ++t) {
        const CVector x = random_cvector(q * q, rng);
        const CVector y = random_cvector(3 * q, rng);
        const cplx lhs = op.apply(x).dot(y);
        const cplx rhs = x.dot(op.adjoint_apply(y));
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * x.norm() * y.norm());
      }
    }
  }
}

TEST(SensingApply, DimensionMismatch) {
  const auto c = cfg_for(Scheme::Backward, SamplingMode::Continuous, 7, 10, 4);
  const SensingOperator op(draw_sampling_plan(c), 4, c);
  EXPECT_THROW(op.apply(CVector::Zero(15)), InvalidArgument);
  EXPECT_THROW(op.adjoint_apply(CVector::Zero(11)), InvalidArgument);
}

TEST(ScatteringAmplitude, OriginScatterer) {
  const std::vector<cplx> w{1.0};
  const std::vector<std::array<double, 2>> pos{{0.0, 0.0}};
  for (double th : {0.0, 0.7, 2.5}) {
    const cplx a = scattering_amplitude_point(w, pos, th, th - 1.1, 3.0);
    EXPECT_NEAR(std::abs(a - 9.0 / (4.0 * std::numbers::pi)), 0.0, 1e-15);
  }
}

TEST(ScatteringAmplitude, TwoScatterersBruteForce) {
  const std::vector<cplx> w{{1.0, 0.5}, {-0.3, 2.0}};
  const std::vector<std::array<double, 2>> pos{{0.2, -0.1}, {0.05, 0.4}};
  const double th = 0.4, tt = -2.0, om = 5.5;
  const double k1 = std::cos(th) - std::cos(tt), k2 = std::sin(th) - std::sin(tt);
  const cplx want = om * om / (4 * std::numbers::pi) *
                    (w[0] * std::exp(cplx(0, om * (0.2 * k1 - 0.1 * k2))) + w[1] * std::exp(cplx(0, om * (0.05 * k1 + 0.4 * k2))));
  EXPECT_NEAR(std::abs(scattering_amplitude_point(w, pos, th, tt, om) - want), 0.0, 1e-13);
  EXPECT_THROW(scattering_amplitude_point(w, std::span(pos).first(1), th, tt, om), InvalidArgument);
}

TEST(ScatteringAmplitude, PointDataEqualsOperator) {
  const int q = 8;
  for (auto scheme : {Scheme::Backward, Scheme::Forward}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto c = cfg_for(scheme, SamplingMode::Continuous, seed, 30, q, 1.3);
      const auto plan = draw_sampling_plan(c);
      const SensingOperator op(plan, q, c);
      const CVector x = point_phantom(q * q, 4, 0.5, 1.5, seed + 100);
      const CVector y = point_object_data(plan, x, q, c.ell);
      EXPECT_LE((y - op.apply(x)).norm(), 1e-10 * y.norm());
    }
  }
}

TEST(Coherence, OrthonormalIsZero) {
  const int q = 6;
  const auto c = cfg_for(Scheme::Backward, SamplingMode::OnGrid, 0, 4 * q * q, q);
  const SensingOperator op(full_grid_plan(c), q, c);
  EXPECT_LE(mutual_coherence(op), 1e-12);
  EXPECT_LE(mutual_coherence(op.to_dense()), 1e-12);
}

TEST(Coherence, DuplicateColumnsGiveOne) {
  CMatrix a(3, 3);
  a << 1, 0, 1, 0, 1, 0, 0, 0, 0;
  EXPECT_DOUBLE_EQ(mutual_coherence(DenseOperator(a)), 1.0);
}

TEST(Coherence, FastFormMatchesGram) {
  for (auto mode : {SamplingMode::Continuous, SamplingMode::OnGrid})
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const int q = 8;
      const auto c = cfg_for(Scheme::Forward, mode, seed, 40, q);
      const SensingOperator op(draw_sampling_plan(c), q, c);
      EXPECT_NEAR(mutual_coherence(op), mutual_coherence(op.to_dense()), 1e-12);
      EXPECT_LE(sampled_coherence(op, 200, seed), mutual_coherence(op) + 1e-12);
    }
}

TEST(Coherence, BudgetExceeded) {
  const DenseOperator op(CMatrix::Identity(4, 4));
  EXPECT_THROW(mutual_coherence(op, 3), TooLarge);
}

TEST(Coherence, DecreasesWithN) {
  const int q = 16;
  double prev = 1.0;
  for (std::size_t n : {32u, 128u, 512u}) {
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto c = cfg_for(Scheme::Backward, SamplingMode::Continuous, seed, n, q);
      mean += mutual_coherence(SensingOperator(draw_sampling_plan(c), q, c)) / 5.0;
    }
    EXPECT_LT(mean, prev);
    prev = mean;
  }
}

TEST(Ric, OrthonormalIsZero) {
  const int q = 4;
  const auto c = cfg_for(Scheme::Backward, SamplingMode::OnGrid, 0, 16, q);
  const SensingOperator op(even_subgrid_plan(q), q, c);
  EXPECT_LE(ric_lower_bound(op, 3, 100, 1), 1e-12);
  EXPECT_LE(ric_lower_bound(op, 16, 1, 1), 1e-12);
}

TEST(Ric, OrderOneIsZero) {
  const auto c = cfg_for(Scheme::Forward, SamplingMode::Continuous, 1, 9, 4);
  EXPECT_LE(ric_lower_bound(SensingOperator(draw_sampling_plan(c), 4, c), 1, 50, 2), 1e-12);
}

TEST(Ric, ExhaustiveOrderTwoMatchesSingularValues) {
  const auto c = cfg_for(Scheme::Backward, SamplingMode::Continuous, 2, 10, 4);
  const SensingOperator op(draw_sampling_plan(c), 4, c);
  const CMatrix a = op.to_dense();
  double want = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j) {
      CMatrix sub(a.rows(), 2);
      sub << a.col(i), a.col(j);
      const Eigen::JacobiSVD<CMatrix> svd(sub);
      const double smax = svd.singularValues()(0), smin = svd.singularValues()(1);
      want = std::max({want, 1.0 - smin * smin, smax * smax - 1.0});
    }
  EXPECT_NEAR(ric_lower_bound(op, 2, 120, 3), want, 1e-12);
  EXPECT_LE(ric_lower_bound(op, 2, 30, 3), want + 1e-12);
  EXPECT_THROW(ric_lower_bound(op, 0, 10, 3), InvalidArgument);
  EXPECT_THROW(ric_lower_bound(op, 17, 10, 3), InvalidArgument);
}
