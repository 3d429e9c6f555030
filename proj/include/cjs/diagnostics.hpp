#pragma once

// Coherence and restricted-isometry diagnostics for sensing operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "cjs/errors.hpp"
#include "cjs/rng.hpp"
#include "cjs/sensing_operator.hpp"

namespace cjs {

/// Largest m for which the explicit Gram matrix is formed.
inline constexpr Eigen::Index kExplicitBudget = 4096;

/// max_{i != j} |<a_i, a_j>| / (|a_i| |a_j|) over columns of a dense matrix.
inline double mutual_coherence(const CMatrix& a) {
  Eigen::VectorXd norms = a.colwise().norm().transpose();
  const CMatrix gram = a.adjoint() * a;
  double mu = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const double den = norms(i) * norms(j);
      if (den > 0.0) mu = std::max(mu, std::abs(gram(i, j)) / den);
    }
  return mu;
}

/// Exact coherence of a partial Fourier operator. Column inner products only
/// depend on the pixel offset, so (2q - 1)^2 offsets replace the m^2 pairs.
inline double mutual_coherence(const SensingOperator& op) {
  const int q = op.q();
  const auto& plan = op.plan();
  const auto n = static_cast<Eigen::Index>(plan.size());
  CMatrix e1(q, n), e2(n, 2 * q - 1);
  for (Eigen::Index l = 0; l < n; ++l) {
    const Sample& s = plan[static_cast<std::size_t>(l)];
    for (int a = 0; a < q; ++a) e1(a, l) = std::polar(1.0, std::numbers::pi * a * s.xi);
    for (int b = -(q - 1); b <= q - 1; ++b) e2(l, b + q - 1) = std::polar(1.0, std::numbers::pi * b * s.zeta);
  }
  // G(a, b) = <column at offset (a, b)>; G(-a, -b) is its conjugate.
  const CMatrix g = e1 * e2 / static_cast<double>(n);
  double mu = 0.0;
  for (int a = 0; a < q; ++a)
    for (int b = -(q - 1); b <= q - 1; ++b) {
      if (a == 0 && b <= 0) continue;
      mu = std::max(mu, std::abs(g(a, b + q - 1)));
    }
  return mu;
}

inline double mutual_coherence(const LinearOperator& op, Eigen::Index budget = kExplicitBudget) {
  if (const auto* sop = dynamic_cast<const SensingOperator*>(&op)) return mutual_coherence(*sop);
  if (op.cols() > budget)
    throw TooLarge("mutual_coherence: m exceeds the explicit-evaluation budget; use a sampled estimate");
  return mutual_coherence(op.to_dense());
}

/// Coherence estimated over `pairs` random column pairs; a lower bound on the true value.
inline double sampled_coherence(const LinearOperator& op, std::size_t pairs, std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<std::uint64_t>(op.cols());
  double mu = 0.0;
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto i = static_cast<Eigen::Index>(rng.index(m));
    auto j = static_cast<Eigen::Index>(rng.index(m - 1));
    if (j >= i) ++j;
    const CVector a = op.column(i);
    const CVector b = op.column(j);
    mu = std::max(mu, std::abs(a.dot(b)) / (a.norm() * b.norm()));
  }
  return mu;
}

/// max(1 - sigma_min^2, sigma_max^2 - 1) of the column submatrix on `support`.
inline double isometry_defect(const CMatrix& a, const std::vector<Eigen::Index>& support) {
  CMatrix sub(a.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(support[k]);
  const CMatrix gram = sub.adjoint() * sub;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(gram, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(1.0 - ev.minCoeff(), ev.maxCoeff() - 1.0);
}

namespace detail {
inline double binomial(std::uint64_t n, std::uint64_t k) {
  double r = 1.0;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}
}  // namespace detail

/// Exact restricted isometry constant of order k by enumerating all supports.
inline double exhaustive_ric(const CMatrix& a, Eigen::Index k) {
  const Eigen::Index m = a.cols();
  if (k < 1 || k > m) throw InvalidArgument("exhaustive_ric: need 1 <= k <= m");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  double delta = 0.0;
  while (true) {
    delta = std::max(delta, isometry_defect(a, idx));
    // next combination in lexicographic order
    Eigen::Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (Eigen::Index t = i + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
  return delta;
}

/// Monte-Carlo lower bound on delta_k from random size-k supports.
///
/// When `trials` covers every support the enumeration is exhaustive and the
/// result is the exact constant.
inline double ric_lower_bound(const LinearOperator& op, Eigen::Index k, std::size_t trials,
                              std::uint64_t seed) {
  const Eigen::Index m = op.cols();
  if (k < 1 || k > m) throw InvalidArgument("ric_lower_bound: need 1 <= k <= m");
  const CMatrix a = op.to_dense();
  if (static_cast<double>(trials) >= detail::binomial(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(k)))
    return exhaustive_ric(a, k);
  Rng rng(seed);
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
  double delta = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto pick = i + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(m - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick)]);
    }
    std::vector<Eigen::Index> support(pool.begin(), pool.begin() + k);
    delta = std::max(delta, isometry_defect(a, support));
  }
  return delta;
}

}  // namespace cjs
