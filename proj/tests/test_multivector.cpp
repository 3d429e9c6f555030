#include <gtest/gtest.h>

#include <limits>

#include "test_support.hpp"

using namespace cjs;
using cjs::test::random_multivector;

namespace {

MultiVector rows(std::initializer_list<std::initializer_list<double>> r) {
  MultiVector x(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index j = 0;
  for (const auto& row : r) {
    Eigen::Index c = 0;
    for (double v : row) x(j, c++) = v;
    ++j;
  }
  return x;
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(NormBa, ZeroIsZeroForEveryPair) {
  const MultiVector z(3, 2);
  for (double b : {1.0, 2.0, kInf})
    for (double a : {1.0, 2.0, kInf}) EXPECT_EQ(norm_ba(z, b, a), 0.0);
}

TEST(NormBa, SingleRow345) { EXPECT_DOUBLE_EQ(norm_ba(rows({{3, 4}, {0, 0}}), 1.0, 2.0), 5.0); }

TEST(NormBa, IdentityRows) { EXPECT_DOUBLE_EQ(norm_ba(rows({{1, 0}, {0, 1}}), 2.0, 2.0), std::sqrt(2.0)); }

TEST(NormBa, TwoTwoIsFrobenius) {
  Rng rng(3);
  const auto x = random_multivector(7, 3, rng);
  EXPECT_NEAR(norm22(x), x.data().norm(), 1e-14);
}

TEST(NormBa, MixedPairsByHand) {
  const auto x = rows({{3, -4}, {1, 2}});
  EXPECT_DOUBLE_EQ(norm_ba(x, 1.0, 1.0), 10.0);
  EXPECT_DOUBLE_EQ(norm_ba(x, kInf, 1.0), 7.0);
  EXPECT_DOUBLE_EQ(norm_ba(x, kInf, kInf), 4.0);
  EXPECT_DOUBLE_EQ(norm_ba(x, 2.0, 1.0), std::sqrt(49.0 + 9.0));
  EXPECT_DOUBLE_EQ(norm_inf2(x), 5.0);
}

TEST(NormBa, RejectsUnsupportedExponent) {
  const MultiVector z(2, 2);
  EXPECT_THROW(norm_ba(z, 3.0, 2.0), InvalidArgument);
  EXPECT_THROW(norm_ba(z, 2.0, 0.5), InvalidArgument);
  EXPECT_THROW(norm_ba(z, -kInf, 2.0), InvalidArgument);
}

TEST(NormBa, TriangleInequality) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_multivector(6, 2, rng);
    const auto b = random_multivector(6, 2, rng);
    for (auto bexp : {NormExp::One, NormExp::Two, NormExp::Inf})
      EXPECT_LE(norm_ba(a + b, bexp, NormExp::Two), norm_ba(a, bexp, NormExp::Two) + norm_ba(b, bexp, NormExp::Two) + 1e-12);
  }
}

TEST(NormBa, PythagorasOverRowPartition) {
  Rng rng(5);
  const auto x = random_multivector(10, 2, rng);
  const SupportSet s0({0, 3, 4}), s1({1, 2, 9}), s2({5, 6, 7, 8});
  double acc = 0.0;
  for (const auto& s : {s0, s1, s2}) acc += std::pow(norm22(x.restricted(s)), 2);
  EXPECT_NEAR(acc, std::pow(norm22(x), 2), 1e-12);
}

TEST(MultiVectorType, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(MultiVector(0, 2), InvalidArgument);
  CMatrix bad = CMatrix::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(MultiVector{bad}, InvalidArgument);
}

TEST(MultiVectorType, ShapeMismatchInArithmetic) {
  EXPECT_THROW(MultiVector(2, 2) - MultiVector(3, 2), InvalidArgument);
}

TEST(Inner, SelfIsSquaredNorm) { EXPECT_EQ(inner(rows({{1, 0}, {0, 1}}), rows({{1, 0}, {0, 1}})), cplx(2.0)); }

TEST(Inner, WithZero) { EXPECT_EQ(inner(rows({{1, 2}, {3, 4}}), MultiVector(2, 2)), cplx(0.0)); }

TEST(Inner, MatchesDoubleLoop) {
  Rng rng(8);
  const auto a = random_multivector(4, 2, rng);
  const auto b = random_multivector(4, 2, rng);
  cplx ref{};
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) ref += std::conj(a(i, j)) * b(i, j);
  EXPECT_NEAR(std::abs(inner(a, b) - ref), 0.0, 1e-14);
  EXPECT_NEAR(inner(a, a).real(), std::pow(norm22(a), 2), 1e-12);
}

TEST(Inner, ShapeMismatch) { EXPECT_THROW(inner(MultiVector(2, 2), MultiVector(2, 3)), InvalidArgument); }

TEST(RowSupport, ZeroIsEmpty) { EXPECT_TRUE(row_support(MultiVector(4, 2)).empty()); }

TEST(RowSupport, StrictTolerance) {
  const auto x = rows({{1, 0}, {0, 0}, {0, 2}});
  EXPECT_EQ(row_support(x).indices(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(row_support(x, 1.0).indices(), (std::vector<std::size_t>{2}));
  EXPECT_TRUE(row_support(x, 2.0).empty());
}

TEST(RowSupport, MatchesRowScan) {
  Rng rng(21);
  auto x = random_multivector(30, 2, rng);
  for (Eigen::Index j = 0; j < 30; j += 3) x.data().row(j).setZero();
  std::size_t count = 0;
  for (Eigen::Index j = 0; j < 30; ++j) count += (x(j, 0) != cplx{} || x(j, 1) != cplx{}) ? 1 : 0;
  EXPECT_EQ(row_support(x).size(), count);
}

TEST(SupportSetType, SortsAndDeduplicates) {
  SupportSet s({5, 1, 5, 3});
  EXPECT_EQ(s.indices(), (std::vector<std::size_t>{1, 3, 5}));
  s.insert(2);
  s.insert(3);
  EXPECT_EQ(s.indices(), (std::vector<std::size_t>{1, 2, 3, 5}));
  EXPECT_TRUE(s.contains(2));
  EXPECT_FALSE(s.contains(4));
}

TEST(Jaccard, Basics) {
  EXPECT_DOUBLE_EQ(jaccard(SupportSet{}, SupportSet{}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(SupportSet({1, 2}), SupportSet({2, 3})), 1.0 / 3.0);
}

TEST(BestSRow, IdempotentOnSparse) {
  const auto x = rows({{0, 0}, {1, 2}, {0, 0}, {3, 0}});
  EXPECT_EQ(norm22(best_s_row_approx(x, 2) - x), 0.0);
}

TEST(BestSRow, KeepsLargestRows) {
  const auto x = rows({{3, 0}, {1, 0}, {2, 0}});
  EXPECT_EQ(row_support(best_s_row_approx(x, 2)).indices(), (std::vector<std::size_t>{0, 2}));
}

TEST(BestSRow, TiesGoToLowerIndex) {
  const auto x = rows({{1, 0}, {0, 1}, {1, 0}, {2, 0}});
  EXPECT_EQ(row_support(best_s_row_approx(x, 2)).indices(), (std::vector<std::size_t>{0, 3}));
}

TEST(BestSRow, RejectsOversizedS) { EXPECT_THROW(best_s_row_approx(MultiVector(3, 2), 4), InvalidArgument); }

TEST(BestSRow, OptimalOverAllSupports) {
  Rng rng(13);
  const auto x = random_multivector(6, 2, rng);
  const double best = norm12(x - best_s_row_approx(x, 3));
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = a + 1; b < 6; ++b)
      for (std::size_t c = b + 1; c < 6; ++c)
        EXPECT_LE(best, norm12(x - x.restricted(SupportSet({a, b, c}))) + 1e-14);
}

TEST(BestSRow, ResidualNonincreasingInS) {
  Rng rng(17);
  const auto x = random_multivector(12, 3, rng);
  double prev = norm12(x);
  for (std::size_t s = 1; s <= 12; ++s) {
    const double cur = norm12(x - best_s_row_approx(x, s));
    EXPECT_LE(cur, prev + 1e-14);
    prev = cur;
  }
  EXPECT_EQ(prev, 0.0);
}
