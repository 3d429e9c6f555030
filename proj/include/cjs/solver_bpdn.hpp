#pragma once

// Basis pursuit denoising for joint sparsity.
//
// solve_tvmin: min TV(V) s.t. ||A ell^2 V - y|| <= eps over zero-border
//   images. Solving in the image variable makes the gradient multi-vector
//   ell^2 grad V curl-free by construction.
// solve_bpdn_rowsparse: min ||Z||_{1,2} s.t. ||Y - phi(Z)||_{2,2} <= eps.
//
// Both use first-order primal-dual splitting (Chambolle-Pock) on the
// constrained form, with the data block rescaled so that its operator norm
// matches the regularizer block.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cjs/errors.hpp"
#include "cjs/grad_field.hpp"
#include "cjs/image_io.hpp"
#include "cjs/measurement.hpp"
#include "cjs/multivector.hpp"
#include "cjs/rng.hpp"
#include "cjs/sensing_operator.hpp"

namespace cjs {

enum class StopReason { Tol, MaxIter, InfeasibleTrivial };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Tol: return "tol";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::InfeasibleTrivial: return "infeasible-trivial";
  }
  return "?";
}

// PrimalDual works with any operator; Admm needs an FFT-backed (on-grid)
// sensing operator. Auto picks Admm whenever it applies.
enum class TvAlgorithm { Auto, PrimalDual, Admm };

struct TvSolveConfig {
  TvMode mode = TvMode::Isotropic;
  TvAlgorithm algorithm = TvAlgorithm::Auto;
  double admm_rho = 10.0;
  double epsilon = 0.0;
  int max_iter = 5000;
  double rel_tol = 1e-6;
  int power_iters = 50;
  std::uint64_t seed = 0;
  // Data residual accepted as feasible: eps (1 + 1e-3), but never below
  // feas_floor * ||y|| so that eps = 0 runs can terminate.
  double feas_floor = 1e-6;
  int stall_window = 10;  // consecutive small-change iterations required
  double step_ratio = 0.0;  // tau / sigma; 0 picks a default from the data scale
  int snapshot_every = 0;
  std::string snapshot_dir;
};

struct SolveReport {
  int iterations = 0;
  StopReason stopping_reason = StopReason::MaxIter;
  std::vector<double> objective;      // regularizer value per iteration
  std::vector<double> data_residual;  // ||A x - y|| per iteration
  double final_residual = 0.0;
  double epsilon = 0.0;
  double final_objective = 0.0;
  double final_curl_residual = 0.0;
  double operator_norm = 0.0;
  double wall_seconds = 0.0;

  bool feasible(double rel = 1e-3) const { return final_residual <= epsilon * (1.0 + rel); }
};

inline nlohmann::json report_to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"stopping_reason", to_string(r.stopping_reason)},
          {"final_residual", r.final_residual},
          {"epsilon", r.epsilon},
          {"final_objective", r.final_objective},
          {"final_curl_residual", r.final_curl_residual},
          {"operator_norm", r.operator_norm},
          {"wall_seconds", r.wall_seconds},
          {"objective_trace", r.objective},
          {"residual_trace", r.data_residual}};
}

namespace detail {

// Projection of u onto the ball {w : ||w - center|| <= radius}.
inline CVector project_ball(const CVector& u, const CVector& center, double radius) {
  const CVector d = u - center;
  const double nd = d.norm();
  if (nd <= radius) return u;
  return center + d * (radius / nd);
}

// Largest singular value of an operator given apply/adjoint closures.
template <class Fwd, class Adj, class Vec>
double power_norm(Fwd fwd, Adj adj, Vec x, int iters) {
  double nrm = 0.0;
  x /= x.norm();
  for (int k = 0; k < iters; ++k) {
    Vec y = adj(fwd(x));
    nrm = std::sqrt(y.norm());
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
  }
  return nrm;
}

inline void zero_border(RowMajorCMatrix& v) {
  const auto q = v.rows();
  v.row(0).setZero();
  v.row(q - 1).setZero();
  v.col(0).setZero();
  v.col(q - 1).setZero();
}


// Split-Bregman/ADMM for on-grid plans. The q x q image is embedded in the
// 2q x 2q periodic grid where A is a row subset of a unitary DFT U, so
//   min TV(w)  s.t.  w = grad z,  z = v,  ||(U z)_S - b|| <= eps,  v = 0 off the interior
// has closed-form updates: z by a diagonal solve in frequency plus a weighted
// ball projection on the sampled coefficients, w by shrinkage, v by masking.
inline std::pair<Image, SolveReport> solve_tvmin_admm(const SensingOperator& op, const CVector& y, int q, double ell,
                                                      const TvSolveConfig& cfg, SolveReport rep,
                                                      std::chrono::steady_clock::time_point t0) {
  const int side = 2 * q;
  const auto& idx = op.grid_indices();
  const auto n = static_cast<double>(op.rows());
  const double to_grid = std::sqrt(n) / (side * ell * ell);
  CVector b = y * to_grid;
  const double scale = 2.0 * b.norm() / std::sqrt(n);  // typical pixel magnitude
  b /= scale;
  const double beps = cfg.epsilon * to_grid / scale;
  const double ynorm = y.norm();
  const double feas_tol = std::max(cfg.epsilon / ynorm * (1.0 + 1e-3), cfg.feas_floor);
  const double rho = cfg.admm_rho;
  const double inv_side = 1.0 / side;

  Eigen::MatrixXd lam(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const double si = std::sin(std::numbers::pi * i / side), sj = std::sin(std::numbers::pi * j / side);
      lam(i, j) = 1.0 + 4.0 * (si * si + sj * sj);
    }
  Eigen::VectorXd wts(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t l = 0; l < idx.size(); ++l) wts(static_cast<Eigen::Index>(l)) = lam.data()[idx[l]];
  // lam is symmetric, so its flat index does not depend on storage order

  using Grid = RowMajorCMatrix;
  auto d1 = [&](const Grid& z) {
    Grid out(side, side);
    for (int i = 0; i < side; ++i) out.row(i) = z.row((i + 1) % side) - z.row(i);
    return out;
  };
  auto d2 = [&](const Grid& z) {
    Grid out(side, side);
    for (int j = 0; j < side; ++j) out.col(j) = z.col((j + 1) % side) - z.col(j);
    return out;
  };
  auto d_adj = [&](const Grid& a, const Grid& c) {
    Grid out(side, side);
    for (int i = 0; i < side; ++i) out.row(i) = a.row((i + side - 1) % side) - a.row(i);
    for (int j = 0; j < side; ++j) out.col(j) += c.col((j + side - 1) % side) - c.col(j);
    return out;
  };
  auto interior = [&](int i) { return i >= 2 && i <= q - 1; };  // grid index of pixels 2..q-1

  Grid z = Grid::Zero(side, side), v = z, vold, u2 = z, w1 = z, w2 = z, u1a = z, u1b = z, h, g1, g2;
  CVector c(b.size());
  double mu = 0.0;

  auto box = [&](const Grid& g) {
    RowMajorCMatrix out = g.block(1, 1, q, q) * scale;
    return Image(out, ell);
  };

  int calm = 0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    // z-update
    h = d_adj(w1 - u1a, w2 - u1b) + (v - u2);
    detail::fft2(h, +1);
    h *= inv_side;
    h.array() /= lam.array();
    for (std::size_t l = 0; l < idx.size(); ++l) c(static_cast<Eigen::Index>(l)) = h.data()[idx[l]];
    const CVector dev = c - b;
    if (dev.norm() > beps) {
      // minimize sum w |z - c|^2 on the ball: z = b + w (c - b) / (w + mu)
      auto radius = [&](double m) { return (dev.array() * (wts.array() / (wts.array() + m))).matrix().norm(); };
      if (beps == 0.0) {
        c = b;
      } else {
        double lo = 0.0, hi = std::max(mu, 1.0);
        while (radius(hi) > beps) hi *= 2.0;
        for (int k = 0; k < 100 && hi - lo > 1e-14 * hi; ++k) {
          const double mid = 0.5 * (lo + hi);
          (radius(mid) > beps ? lo : hi) = mid;
        }
        mu = hi;
        c = b + (dev.array() * (wts.array() / (wts.array() + mu))).matrix();
      }
      for (std::size_t l = 0; l < idx.size(); ++l) h.data()[idx[l]] = c(static_cast<Eigen::Index>(l));
    }
    detail::fft2(h, -1);
    z = h * inv_side;

    // w-update
    g1 = d1(z) + u1a;
    g2 = d2(z) + u1b;
    const double thr = 1.0 / rho;
    for (Eigen::Index k = 0; k < g1.size(); ++k) {
      const cplx a = g1.data()[k], e = g2.data()[k];
      if (cfg.mode == TvMode::Isotropic) {
        const double nrm = std::sqrt(std::norm(a) + std::norm(e));
        const double f = nrm > thr ? (nrm - thr) / nrm : 0.0;
        w1.data()[k] = a * f;
        w2.data()[k] = e * f;
      } else {
        const double na = std::abs(a), ne = std::abs(e);
        w1.data()[k] = na > thr ? a * ((na - thr) / na) : cplx{};
        w2.data()[k] = ne > thr ? e * ((ne - thr) / ne) : cplx{};
      }
    }

    // v-update
    vold = v;
    v = z + u2;
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side; ++j)
        if (!interior(i) || !interior(j)) v(i, j) = 0.0;

    u1a = g1 - w1;
    u1b = g2 - w2;
    u2 += z - v;

    const Image cur = box(v);
    const double res = (op.apply(cur.vec() * (ell * ell)) - y).norm() / ynorm;
    rep.data_residual.push_back(res * ynorm);
    rep.objective.push_back(tv_norm(cur, cfg.mode));
    rep.iterations = it;

    if (cfg.snapshot_every > 0 && it % cfg.snapshot_every == 0 && !cfg.snapshot_dir.empty()) {
      std::filesystem::create_directories(cfg.snapshot_dir);
      write_image_csv(cfg.snapshot_dir + "/iter_" + std::to_string(it) + ".csv", cur);
    }

    const double change = (v - vold).norm() / std::max(v.norm(), 1e-300);
    calm = (change < cfg.rel_tol) ? calm + 1 : 0;
    if (calm >= cfg.stall_window && res <= feas_tol) {
      rep.stopping_reason = StopReason::Tol;
      break;
    }
  }

  Image out = box(v);
  rep.operator_norm = 1.0;
  rep.final_residual = (op.apply(out.vec() * (ell * ell)) - y).norm();
  rep.final_objective = tv_norm(out, cfg.mode);
  rep.final_curl_residual = curl_residual(discrete_gradient(out));
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(out), rep};
}

}  // namespace detail

/// Isotropic or anisotropic TV-min over zero-border images.
///
/// `op` maps the length-q^2 object vector x = ell^2 vec(V) to data.
inline std::pair<Image, SolveReport> solve_tvmin(const LinearOperator& op, const CVector& y, int q, double ell,
                                                 const TvSolveConfig& cfg) {
  if (cfg.epsilon < 0.0) throw InvalidArgument("solve_tvmin: epsilon must be nonnegative");
  if (cfg.max_iter < 1) throw InvalidArgument("solve_tvmin: max_iter must be positive");
  if (op.cols() != static_cast<Eigen::Index>(q) * q || op.rows() != y.size())
    throw InvalidArgument("solve_tvmin: operator shape does not match data/grid");
  if (!y.allFinite()) throw InvalidArgument("solve_tvmin: data must be finite");

  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.epsilon = cfg.epsilon;
  const double ynorm = y.norm();
  if (cfg.epsilon >= ynorm) {
    rep.stopping_reason = StopReason::InfeasibleTrivial;
    rep.final_residual = ynorm;
    return {Image(q, ell), rep};
  }

  if (cfg.algorithm != TvAlgorithm::PrimalDual) {
    const auto* sop = dynamic_cast<const SensingOperator*>(&op);
    const bool fft = sop != nullptr && sop->representation() == Representation::Fft;
    if (cfg.algorithm == TvAlgorithm::Admm && !fft)
      throw InvalidConfiguration("solve_tvmin: ADMM needs an FFT-backed on-grid operator");
    if (fft) {
      if (cfg.admm_rho <= 0.0) throw InvalidArgument("solve_tvmin: admm_rho must be positive");
      return detail::solve_tvmin_admm(*sop, y, q, ell, cfg, rep, t0);
    }
  }

  // Work with unit-norm data; the problem is positively homogeneous.
  const CVector yn = y / ynorm;
  const double eps = cfg.epsilon / ynorm;
  const double ell2 = ell * ell;
  const Eigen::Index m = static_cast<Eigen::Index>(q) * q;

  auto a_fwd = [&](const RowMajorCMatrix& v) {
    return CVector(op.apply(Eigen::Map<const CVector>(v.data(), m) * ell2));
  };
  auto a_adj = [&](const CVector& r) {
    RowMajorCMatrix out = Eigen::Map<const RowMajorCMatrix>(CVector(op.adjoint_apply(r) * ell2).data(), q, q);
    detail::zero_border(out);
    return out;
  };

  Rng rng(cfg.seed);
  RowMajorCMatrix probe(q, q);
  for (Eigen::Index k = 0; k < probe.size(); ++k) probe.data()[k] = rng.complex_normal();
  detail::zero_border(probe);
  const double a_norm = detail::power_norm(a_fwd, a_adj, probe, cfg.power_iters);
  if (a_norm == 0.0) throw InvalidArgument("solve_tvmin: operator vanishes on zero-border images");
  const double grad_norm = std::sqrt(8.0);
  const double c = grad_norm / a_norm;  // data block scale
  const double k_norm = std::sqrt(2.0) * grad_norm * 1.01;
  rep.operator_norm = k_norm;
  const double ratio = cfg.step_ratio > 0.0 ? cfg.step_ratio : 1.0;
  const double tau = 0.95 * ratio / k_norm;
  const double sigma = 0.95 / (ratio * k_norm);

  const CVector cy = c * yn;
  const double ceps = c * eps;
  const double feas_tol = std::max(eps * (1.0 + 1e-3), cfg.feas_floor);

  // Primal x; dual (p1, p2) for the gradient block and r for the data block.
  // K x = (grad x, c A x) and K^* = (div^*, c A^*) are cached between steps.
  RowMajorCMatrix x = RowMajorCMatrix::Zero(q, q), xnew;
  RowMajorCMatrix p1 = RowMajorCMatrix::Zero(q, q), p2 = p1, p1n, p2n;
  RowMajorCMatrix g1 = p1, g2 = p1, g1n, g2n, div;
  CVector r = CVector::Zero(y.size()), rn;
  CVector ax = CVector::Zero(y.size()), axn;
  RowMajorCMatrix kty = RowMajorCMatrix::Zero(q, q);

  auto adjoint_k = [&](const RowMajorCMatrix& a, const RowMajorCMatrix& b, const CVector& rr) {
    detail::forward_differences_adjoint(a, b, div);
    RowMajorCMatrix out = div + c * a_adj(rr);
    detail::zero_border(out);
    return out;
  };

  int calm = 0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    xnew = x - tau * kty;
    detail::zero_border(xnew);
    detail::forward_differences(xnew, g1n, g2n);
    axn = a_fwd(xnew);

    // dual: gradient block, projection onto unit balls
    p1n = p1 + sigma * (2.0 * g1n - g1);
    p2n = p2 + sigma * (2.0 * g2n - g2);
    for (Eigen::Index k = 0; k < p1n.size(); ++k) {
      cplx& u = p1n.data()[k];
      cplx& v = p2n.data()[k];
      if (cfg.mode == TvMode::Isotropic) {
        const double nrm = std::sqrt(std::norm(u) + std::norm(v));
        if (nrm > 1.0) {
          u /= nrm;
          v /= nrm;
        }
      } else {
        if (std::abs(u) > 1.0) u /= std::abs(u);
        if (std::abs(v) > 1.0) v /= std::abs(v);
      }
    }
    // dual: data block, Moreau identity with the eps-ball indicator
    const CVector u = r + sigma * c * (2.0 * axn - ax);
    rn = u - sigma * detail::project_ball(u / sigma, cy, ceps);
    const double change = (xnew - x).norm() / std::max(xnew.norm(), 1e-300);

    x.swap(xnew);
    p1.swap(p1n);
    p2.swap(p2n);
    g1.swap(g1n);
    g2.swap(g2n);
    r.swap(rn);
    ax.swap(axn);
    kty = adjoint_k(p1, p2, r);

    const double res = (ax - yn).norm();
    rep.data_residual.push_back(res * ynorm);
    rep.objective.push_back(tv_norm(Image(x, ell), cfg.mode) * ynorm);
    rep.iterations = it;

    if (cfg.snapshot_every > 0 && it % cfg.snapshot_every == 0 && !cfg.snapshot_dir.empty()) {
      std::filesystem::create_directories(cfg.snapshot_dir);
      write_image_csv(cfg.snapshot_dir + "/iter_" + std::to_string(it) + ".csv", Image(RowMajorCMatrix(x * ynorm), ell));
    }

    calm = (change < cfg.rel_tol) ? calm + 1 : 0;
    if (calm >= cfg.stall_window && res <= feas_tol) {
      rep.stopping_reason = StopReason::Tol;
      break;
    }
  }

  Image out(RowMajorCMatrix(x * ynorm), ell);
  rep.final_residual = (op.apply(out.vec() * ell2) - y).norm();
  rep.final_objective = tv_norm(out, cfg.mode);
  rep.final_curl_residual = curl_residual(discrete_gradient(out));
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(out), rep};
}

/// Group soft-thresholding: each row shrinks in 2-norm by lambda.
inline MultiVector prox_norm12(const MultiVector& z, double lambda) {
  MultiVector out = z;
  for (Eigen::Index j = 0; j < z.m(); ++j) {
    const double nrm = z.row_norm2(j);
    if (nrm <= lambda) out.data().row(j).setZero();
    else out.data().row(j) *= (nrm - lambda) / nrm;
  }
  return out;
}

/// min ||Z||_{1,2} s.t. ||Y - phi(Z)||_{2,2} <= eps with per-channel operators.
///
/// `ops` has one operator per channel, or a single operator shared by all.
inline std::pair<MultiVector, SolveReport> solve_bpdn_rowsparse(std::span<const OperatorPtr> ops,
                                                                const MultiVector& ydata, double epsilon,
                                                                const TvSolveConfig& cfg) {
  if (ops.empty()) throw InvalidArgument("solve_bpdn_rowsparse: no operators");
  if (ops.size() != 1 && static_cast<Eigen::Index>(ops.size()) != ydata.d())
    throw InvalidArgument("solve_bpdn_rowsparse: operator count does not match channels");
  const Eigen::Index m = ops[0]->cols();
  for (const auto& op : ops)
    if (op->cols() != m || op->rows() != ydata.m())
      throw InvalidArgument("solve_bpdn_rowsparse: inconsistent operator shapes");
  if (epsilon < 0.0) throw InvalidArgument("solve_bpdn_rowsparse: epsilon must be nonnegative");

  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.epsilon = epsilon;
  const double ynorm = norm22(ydata);
  if (epsilon >= ynorm) {
    rep.stopping_reason = StopReason::InfeasibleTrivial;
    rep.final_residual = ynorm;
    return {MultiVector(m, ydata.d()), rep};
  }
  const MultiVector yn = ydata * cplx(1.0 / ynorm);
  const double eps = epsilon / ynorm;

  Rng rng(cfg.seed);
  MultiVector probe(m, ydata.d());
  for (Eigen::Index k = 0; k < probe.data().size(); ++k) probe.data().data()[k] = rng.complex_normal();
  auto fwd = [&](const CMatrix& z) { return CMatrix(apply_channels(ops, MultiVector(z)).data()); };
  auto adj = [&](const CMatrix& r) { return CMatrix(adjoint_channels(ops, MultiVector(r), m).data()); };
  const double k_norm = detail::power_norm(fwd, adj, CMatrix(probe.data()), cfg.power_iters) * 1.01;
  if (k_norm == 0.0) throw InvalidArgument("solve_bpdn_rowsparse: zero operator");
  rep.operator_norm = k_norm;
  // Default steps balance a primal of size ~ 1 / k_norm against a dual of size ~ 1.
  const double ratio = cfg.step_ratio > 0.0 ? cfg.step_ratio : 1.0 / k_norm;
  const double tau = 0.95 * ratio / k_norm;
  const double sigma = 0.95 / (ratio * k_norm);

  CMatrix z = CMatrix::Zero(m, ydata.d()), zbar = z, zold;
  CMatrix r = CMatrix::Zero(ydata.m(), ydata.d());
  const CVector center = Eigen::Map<const CVector>(yn.data().data(), yn.data().size());
  const double feas_tol = std::max(eps * (1.0 + 1e-3), cfg.feas_floor);
  int calm = 0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const CMatrix u = r + sigma * fwd(zbar);
    const CVector uv = Eigen::Map<const CVector>(u.data(), u.size());
    const CVector rv = uv - sigma * detail::project_ball(uv / sigma, center, eps);
    r = Eigen::Map<const CMatrix>(rv.data(), u.rows(), u.cols());
    zold = z;
    z = prox_norm12(MultiVector(CMatrix(z - tau * adj(r))), tau).data();
    zbar = 2.0 * z - zold;

    const double res = (fwd(z) - yn.data()).norm();
    rep.data_residual.push_back(res * ynorm);
    rep.objective.push_back(norm12(MultiVector(z)) * ynorm);
    rep.iterations = it;
    const double change = (z - zold).norm() / std::max(z.norm(), 1e-300);
    calm = (change < cfg.rel_tol) ? calm + 1 : 0;
    if (calm >= cfg.stall_window && res <= feas_tol) {
      rep.stopping_reason = StopReason::Tol;
      break;
    }
  }
  MultiVector out(CMatrix(z * ynorm));
  rep.final_residual = norm22(apply_channels(ops, out) - ydata);
  rep.final_objective = norm12(out);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(out), rep};
}

/// Error bound for the joint-sparsity BPDN minimizer from the RIP constant.
struct BpBound {
  double delta2s = 0.0;
  double alpha = 0.0;  // 2 sqrt(1 + delta) / (1 - delta)
  double rho = 0.0;    // sqrt(2) delta / (1 - delta)
  double e0 = 0.0;     // s^{-1/2} ||X - X^(s)||_{1,2}
  double bound = 0.0;  // 2 (alpha eps + (1 + rho) e0) / (1 - rho)
  double error = 0.0;  // ||Xhat - X||_{2,2}
  bool hypothesis_ok = false;  // delta2s < sqrt(2) - 1
  bool holds = false;
  double slack() const { return bound - error; }
};

inline BpBound check_bp_bound(const MultiVector& x, const MultiVector& xhat, std::size_t s, double epsilon,
                              double delta2s) {
  if (s == 0) throw InvalidArgument("check_bp_bound: s must be positive");
  BpBound b;
  b.delta2s = delta2s;
  b.hypothesis_ok = delta2s >= 0.0 && delta2s < std::numbers::sqrt2 - 1.0;
  b.alpha = 2.0 * std::sqrt(1.0 + delta2s) / (1.0 - delta2s);
  b.rho = std::numbers::sqrt2 * delta2s / (1.0 - delta2s);
  b.e0 = norm12(x - best_s_row_approx(x, s)) / std::sqrt(static_cast<double>(s));
  b.bound = 2.0 * (b.alpha * epsilon + (1.0 + b.rho) * b.e0) / (1.0 - b.rho);
  b.error = norm22(xhat - x);
  b.holds = b.hypothesis_ok && b.error <= b.bound;
  return b;
}

/// Object 2-norm bound implied by the gradient bound via the discrete
/// Poincare inequality: m^{1/d} / (2 sqrt d) * gradient_bound, d = 2.
inline double poincare_object_bound(Eigen::Index m, double gradient_bound) {
  return std::sqrt(static_cast<double>(m)) / (2.0 * std::numbers::sqrt2) * gradient_bound;
}

}  // namespace cjs
