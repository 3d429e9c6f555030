#pragma once

// Orthogonal matching pursuit for jointly sparse multi-vectors, the recovery
// condition and error bound that go with it, the curl-constrained refit on a
// fixed support, and level-set reconstruction of the object.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "cjs/errors.hpp"
#include "cjs/grad_field.hpp"
#include "cjs/measurement.hpp"
#include "cjs/multivector.hpp"
#include "cjs/sensing_operator.hpp"

namespace cjs {

struct OmpConfig {
  double epsilon = 0.0;         // stop once sum_j ||R_j||_2 <= epsilon
  std::size_t max_support = 0;  // 0 means m
  double unit_column_tol = 1e-8;
  double roundoff_floor = 1e-12;  // also stop once the residual sum is this fraction of the data
};

struct OmpTrace {
  std::vector<std::size_t> selected;        // in selection order
  std::vector<double> correlation_max;      // winning score per step
  std::vector<double> residual_sum;         // sum_j ||R_j||_2, entry 0 is the data
  std::vector<double> residual_22;          // ||R||_{2,2}, entry 0 is the data
  std::vector<double> support_correlation;  // max |Phi_j^* R_j| on the support after each step
  bool rank_deficient = false;
  std::string stop_reason;  // "epsilon", "max_support", "zero_correlation"
};

inline nlohmann::json trace_to_json(const OmpTrace& t) {
  return {{"selected", t.selected},
          {"correlation_max", t.correlation_max},
          {"residual_sum", t.residual_sum},
          {"residual_22", t.residual_22},
          {"support_correlation", t.support_correlation},
          {"rank_deficient", t.rank_deficient},
          {"stop_reason", t.stop_reason}};
}

namespace detail {

inline const LinearOperator& channel_op(std::span<const OperatorPtr> ops, Eigen::Index c) {
  return *(ops.size() == 1 ? ops[0] : ops[static_cast<std::size_t>(c)]);
}

inline void check_channel_ops(std::span<const OperatorPtr> ops, const MultiVector& y, const char* who) {
  if (ops.empty()) throw InvalidArgument(std::string(who) + ": no operators");
  if (ops.size() != 1 && static_cast<Eigen::Index>(ops.size()) != y.d())
    throw InvalidArgument(std::string(who) + ": operator count does not match channels");
  for (const auto& op : ops) {
    if (!op) throw InvalidArgument(std::string(who) + ": null operator");
    if (op->rows() != y.m() || op->cols() != ops[0]->cols())
      throw InvalidArgument(std::string(who) + ": inconsistent operator shapes");
  }
}

// Incremental QR of a growing column set by modified Gram-Schmidt with one
// reorthogonalization pass.
class IncrementalQr {
 public:
  explicit IncrementalQr(Eigen::Index n) : n_(n) {}

  // Returns false when the new column is numerically dependent on the others.
  bool push(const CVector& a) {
    CVector v = a;
    CVector coef = CVector::Zero(static_cast<Eigen::Index>(q_.size()));
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t k = 0; k < q_.size(); ++k) {
        const cplx h = q_[k].dot(v);
        coef(static_cast<Eigen::Index>(k)) += h;
        v -= h * q_[k];
      }
    const double nv = v.norm();
    cols_.push_back(a);
    if (nv <= 1e-10 * std::max(a.norm(), 1e-300)) {
      deficient_ = true;
      return false;
    }
    const auto k = static_cast<Eigen::Index>(q_.size());
    r_.conservativeResize(k + 1, k + 1);
    r_.row(k).setZero();
    r_.col(k).head(k) = coef;
    r_(k, k) = nv;
    q_.push_back(v / nv);
    return true;
  }

  // Least-squares coefficients for b; minimum norm once a column was dependent.
  CVector solve(const CVector& b) const {
    const auto k = static_cast<Eigen::Index>(cols_.size());
    if (deficient_) {
      CMatrix a(n_, k);
      for (Eigen::Index j = 0; j < k; ++j) a.col(j) = cols_[static_cast<std::size_t>(j)];
      return a.completeOrthogonalDecomposition().solve(b);
    }
    CVector qb(k);
    for (Eigen::Index j = 0; j < k; ++j) qb(j) = q_[static_cast<std::size_t>(j)].dot(b);
    return r_.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(qb);
  }

  bool deficient() const { return deficient_; }

 private:
  Eigen::Index n_;
  std::vector<CVector> q_;
  std::vector<CVector> cols_;
  CMatrix r_;
  bool deficient_ = false;
};

}  // namespace detail

struct OmpResult {
  SupportSet support;
  MultiVector estimate;
  OmpTrace trace;
};

/// Greedy joint-sparse recovery. Each step picks argmax_i sum_j |Phi_j^* R_j|_i
/// (lowest index on ties), refits every channel by unconstrained least squares
/// on the accumulated support and updates the residual.
inline OmpResult omp_cjs(std::span<const OperatorPtr> ops, const MultiVector& y, const OmpConfig& cfg) {
  detail::check_channel_ops(ops, y, "omp_cjs");
  if (cfg.epsilon < 0.0) throw InvalidArgument("omp_cjs: epsilon must be nonnegative");
  const Eigen::Index m = ops[0]->cols();
  const Eigen::Index d = y.d();
  const std::size_t cap = cfg.max_support == 0 ? static_cast<std::size_t>(m)
                                               : std::min(cfg.max_support, static_cast<std::size_t>(m));

  OmpResult res{SupportSet{}, MultiVector(m, d), OmpTrace{}};
  auto& tr = res.trace;
  MultiVector r = y;
  auto sum_norms = [&](const MultiVector& x) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) s += x.col(c).norm();
    return s;
  };
  tr.residual_sum.push_back(sum_norms(r));
  tr.residual_22.push_back(norm22(r));

  std::vector<detail::IncrementalQr> qr(static_cast<std::size_t>(d), detail::IncrementalQr(y.m()));
  std::vector<std::size_t> order;
  CMatrix coef;

  const double stop_at = std::max(cfg.epsilon, cfg.roundoff_floor * tr.residual_sum.front());
  while (true) {
    if (tr.residual_sum.back() <= stop_at) {
      tr.stop_reason = "epsilon";
      break;
    }
    if (order.size() >= cap) {
      tr.stop_reason = "max_support";
      break;
    }
    Eigen::VectorXd score = Eigen::VectorXd::Zero(m);
    for (Eigen::Index c = 0; c < d; ++c)
      score += detail::channel_op(ops, c).adjoint_apply(r.col(c)).cwiseAbs();
    for (auto j : order) score(static_cast<Eigen::Index>(j)) = -1.0;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < m; ++i)
      if (score(i) > score(best)) best = i;
    if (score(best) <= 0.0) {
      tr.stop_reason = "zero_correlation";
      break;
    }
    const auto pick = static_cast<std::size_t>(best);
    order.push_back(pick);
    res.support.insert(pick);
    tr.selected.push_back(pick);
    tr.correlation_max.push_back(score(best));

    coef.resize(static_cast<Eigen::Index>(order.size()), d);
    for (Eigen::Index c = 0; c < d; ++c) {
      const CVector col = detail::channel_op(ops, c).column(best);
      if (std::abs(col.norm() - 1.0) > cfg.unit_column_tol)
        throw PreconditionError("omp_cjs: operator columns must have unit norm");
      qr[static_cast<std::size_t>(c)].push(col);
      coef.col(c) = qr[static_cast<std::size_t>(c)].solve(y.col(c));
    }
    tr.rank_deficient = tr.rank_deficient || std::any_of(qr.begin(), qr.end(), [](const auto& f) { return f.deficient(); });

    res.estimate = MultiVector(m, d);
    for (std::size_t k = 0; k < order.size(); ++k)
      res.estimate.data().row(static_cast<Eigen::Index>(order[k])) = coef.row(static_cast<Eigen::Index>(k));
    r = y - apply_channels(ops, res.estimate);
    tr.residual_sum.push_back(sum_norms(r));
    tr.residual_22.push_back(norm22(r));

    double on_support = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const CVector g = detail::channel_op(ops, c).adjoint_apply(r.col(c));
      for (auto j : order) on_support = std::max(on_support, std::abs(g(static_cast<Eigen::Index>(j))));
    }
    tr.support_correlation.push_back(on_support);
  }
  return res;
}

/// Quantities of the sufficient condition for exact support recovery.
struct OmpCondition {
  std::size_t s = 0;
  double mu_max = 0.0;
  double epsilon = 0.0;
  double x_min = 0.0;  // smallest row 1-norm over the support
  Eigen::Index d = 1;
  double threshold = 0.0;  // (1 + 1/mu) / 2 - sqrt(d) eps / (mu x_min)
  double snr_lhs = 0.0;    // (2s - 1) mu + 2 sqrt(d) eps / x_min, must be < 1
  bool holds = false;
  bool trivially_true = false;  // mu_max = 0
};

inline OmpCondition check_omp_condition(std::size_t s, double mu_max, double epsilon, const MultiVector& x,
                                        Eigen::Index d) {
  if (mu_max < 0.0 || epsilon < 0.0 || d < 1) throw InvalidArgument("check_omp_condition: bad arguments");
  OmpCondition c;
  c.s = s;
  c.mu_max = mu_max;
  c.epsilon = epsilon;
  c.d = d;
  c.x_min = std::numeric_limits<double>::infinity();
  for (auto j : row_support(x))
    c.x_min = std::min(c.x_min, x.data().row(static_cast<Eigen::Index>(j)).cwiseAbs().sum());
  const double rd = std::sqrt(static_cast<double>(d));
  const double noise_term = epsilon == 0.0 ? 0.0 : rd * epsilon / c.x_min;
  c.snr_lhs = (2.0 * static_cast<double>(s) - 1.0) * mu_max + 2.0 * noise_term;
  if (mu_max == 0.0) {
    c.trivially_true = true;
    c.threshold = std::numeric_limits<double>::infinity();
    c.holds = true;
    return c;
  }
  c.threshold = (1.0 + 1.0 / mu_max) / 2.0 - noise_term / mu_max;
  c.holds = static_cast<double>(s) < c.threshold;
  return c;
}

/// 2 eps / sqrt(1 - mu (s - 1)).
inline double omp_error_bound(double epsilon, double mu_max, std::size_t s) {
  if (epsilon < 0.0 || mu_max < 0.0) throw InvalidArgument("omp_error_bound: bad arguments");
  const double gap = 1.0 - mu_max * (static_cast<double>(s) - 1.0);
  if (s == 0 || gap <= 0.0) throw PreconditionError("omp_error_bound: requires mu_max (s - 1) < 1");
  return 2.0 * epsilon / std::sqrt(gap);
}

/// sqrt(2) eps / min_j sigma_min(Phi_j restricted to S).
inline double omp_sharp_bound(std::span<const OperatorPtr> ops, Eigen::Index d, const SupportSet& s, double epsilon) {
  if (s.empty()) return 0.0;
  double smin = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < d; ++c) {
    const auto& op = detail::channel_op(ops, c);
    CMatrix a(op.rows(), static_cast<Eigen::Index>(s.size()));
    Eigen::Index k = 0;
    for (auto j : s) a.col(k++) = op.column(static_cast<Eigen::Index>(j));
    const Eigen::JacobiSVD<CMatrix> svd(a);
    smin = std::min(smin, svd.singularValues().minCoeff());
  }
  if (smin <= 0.0) throw PreconditionError("omp_sharp_bound: support submatrix is singular");
  return std::numbers::sqrt2 * epsilon / smin;
}

struct RefitResult {
  MultiVector estimate;
  double objective = 0.0;  // ||Y - phi(B)||_{2,2}
  std::size_t constraints = 0;
  bool singular = false;
};

namespace detail {

// Curl equations restricted to the unknowns (X1 on S, X2 on S). Column k of
// the unknown vector is X1(S[k]) for k < |S| and X2(S[k - |S|]) otherwise.
inline Eigen::MatrixXd independent_rows(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return a;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a.transpose());
  const Eigen::Index r = qr.rank();
  Eigen::MatrixXd out(r, a.cols());
  for (Eigen::Index k = 0; k < r; ++k) out.row(k) = a.row(qr.colsPermutation().indices()(k));
  return out;
}

inline Eigen::MatrixXd curl_constraints(int q, const SupportSet& s) {
  const auto ns = static_cast<Eigen::Index>(s.size());
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(q) * q, -1);
  Eigen::Index k = 0;
  for (auto j : s) pos[j] = k++;
  auto var = [&](int comp, int r, int c) -> Eigen::Index {
    if (r < 0 || r >= q || c < 0 || c >= q) return -1;
    const Eigen::Index p = pos[static_cast<std::size_t>(r) * q + c];
    return p < 0 ? -1 : p + comp * ns;
  };
  std::vector<Eigen::RowVectorXd> rows;
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      // X2(r+1,c) - X2(r,c) - X1(r,c+1) + X1(r,c) = 0
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * ns);
      bool any = false;
      auto add = [&](Eigen::Index v, double w) {
        if (v >= 0) {
          row(v) += w;
          any = true;
        }
      };
      add(var(1, r + 1, c), 1.0);
      add(var(1, r, c), -1.0);
      add(var(0, r, c + 1), -1.0);
      add(var(0, r, c), 1.0);
      if (any) rows.push_back(row);
    }
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 2 * ns);
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
  return out;
}

}  // namespace detail

/// argmin ||Y - phi(B)||_{2,2} over two-channel B supported in S with zero curl.
///
/// Solved through the stationarity system [G C^T; C 0]; a singular system is
/// resolved in the minimum-norm sense and flagged.
inline RefitResult constrained_ls_refit(std::span<const OperatorPtr> ops, const MultiVector& y, const SupportSet& s) {
  detail::check_channel_ops(ops, y, "constrained_ls_refit");
  if (y.d() != 2) throw InvalidArgument("constrained_ls_refit: gradient data must have two channels");
  const Eigen::Index m = ops[0]->cols();
  const int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (static_cast<Eigen::Index>(q) * q != m) throw InvalidArgument("constrained_ls_refit: m is not a square");
  if (static_cast<Eigen::Index>(s.size()) > y.m()) throw PreconditionError("constrained_ls_refit: |S| exceeds n");
  for (auto j : s)
    if (static_cast<Eigen::Index>(j) >= m) throw InvalidArgument("constrained_ls_refit: support index out of range");

  RefitResult out{MultiVector(m, 2), 0.0, 0, false};
  if (s.empty()) {
    out.objective = norm22(y);
    return out;
  }
  const auto ns = static_cast<Eigen::Index>(s.size());
  const Eigen::MatrixXd cm = detail::independent_rows(detail::curl_constraints(q, s));
  out.constraints = static_cast<std::size_t>(cm.rows());
  const Eigen::Index nc = cm.rows();

  CMatrix kkt = CMatrix::Zero(2 * ns + nc, 2 * ns + nc);
  CVector rhs = CVector::Zero(2 * ns + nc);
  for (Eigen::Index c = 0; c < 2; ++c) {
    const auto& op = detail::channel_op(ops, c);
    CMatrix a(op.rows(), ns);
    Eigen::Index k = 0;
    for (auto j : s) a.col(k++) = op.column(static_cast<Eigen::Index>(j));
    kkt.block(c * ns, c * ns, ns, ns) = a.adjoint() * a;
    rhs.segment(c * ns, ns) = a.adjoint() * y.col(c);
  }
  kkt.block(2 * ns, 0, nc, 2 * ns) = cm.cast<cplx>();
  kkt.block(0, 2 * ns, 2 * ns, nc) = cm.transpose().cast<cplx>();

  const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(kkt);
  out.singular = cod.rank() < kkt.rows();
  const CVector sol = cod.solve(rhs);
  Eigen::Index k = 0;
  for (auto j : s) {
    out.estimate(static_cast<Eigen::Index>(j), 0) = sol(k);
    out.estimate(static_cast<Eigen::Index>(j), 1) = sol(k + ns);
    ++k;
  }
  out.objective = norm22(y - apply_channels(ops, out.estimate));
  return out;
}

struct LevelSetResult {
  Image image;                     // piecewise-constant reconstruction
  std::vector<cplx> level_values;  // one per component, mean of the integrated image
  std::vector<int> labels;         // component id per pixel, row-major
  std::size_t components = 0;
  bool used_lsq = false;  // field was not curl-free; least-squares integration used
  double curl = 0.0;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Object from a recovered gradient field: pixels joined by a (numerically)
/// zero difference form one level set, whose value is the mean of the
/// integrated image over it. `tol` is relative to ||X||_{inf,2}.
inline LevelSetResult level_set_reconstruct(const GradientField& x, double spacing, Anchor anchor = {},
                                            double tol = 1e-9) {
  const int q = grid_side(x);
  LevelSetResult out;
  const double scale = norm_inf2(x);
  out.curl = curl_residual(x);
  if (out.curl > 1e-9 * scale) {
    out.used_lsq = true;
    out.image = integrate_gradient_lsq(x, spacing, anchor);
  } else {
    out.image = integrate_gradient(x, spacing, anchor);
  }

  const double cut = tol * scale;
  const auto m = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
  detail::DisjointSets sets(m);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) {
      const auto j = static_cast<std::size_t>(r) * q + c;
      if (r + 1 < q && std::abs(x(static_cast<Eigen::Index>(j), 0)) <= cut) sets.unite(j, j + q);
      if (c + 1 < q && std::abs(x(static_cast<Eigen::Index>(j), 1)) <= cut) sets.unite(j, j + 1);
    }

  out.labels.assign(m, -1);
  std::vector<cplx> sum;
  std::vector<std::size_t> count;
  std::vector<int> id(m, -1);
  for (std::size_t j = 0; j < m; ++j) {
    const auto root = sets.find(j);
    if (id[root] < 0) {
      id[root] = static_cast<int>(sum.size());
      sum.emplace_back();
      count.push_back(0);
    }
    out.labels[j] = id[root];
    sum[static_cast<std::size_t>(id[root])] += out.image.values().data()[j];
    ++count[static_cast<std::size_t>(id[root])];
  }
  out.components = sum.size();
  out.level_values.resize(sum.size());
  for (std::size_t k = 0; k < sum.size(); ++k) out.level_values[k] = sum[k] / static_cast<double>(count[k]);
  for (std::size_t j = 0; j < m; ++j)
    out.image.values().data()[j] = out.level_values[static_cast<std::size_t>(out.labels[j])];
  return out;
}

}  // namespace cjs
