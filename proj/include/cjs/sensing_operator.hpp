#pragma once

// Linear sensing operators: a small abstract interface, a dense matrix
// implementation and the random partial Fourier operator built from a
// sampling plan, with explicit, separable and FFT-backed application.

#include <cmath>
#include <complex>
#include <array>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "cjs/errors.hpp"
#include "cjs/multivector.hpp"
#include "cjs/sampling.hpp"

namespace cjs {

/// n x m complex linear map.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  virtual CVector apply(const CVector& x) const = 0;
  virtual CVector adjoint_apply(const CVector& y) const = 0;

  /// Column j. The default applies the operator to e_j.
  virtual CVector column(Eigen::Index j) const {
    CVector e = CVector::Zero(cols());
    e(j) = 1.0;
    return apply(e);
  }

  /// Dense copy, column by column.
  virtual CMatrix to_dense() const {
    CMatrix out(rows(), cols());
    for (Eigen::Index j = 0; j < cols(); ++j) out.col(j) = column(j);
    return out;
  }

 protected:
  void check_apply(const CVector& x) const {
    if (x.size() != cols()) throw InvalidArgument("apply: vector length does not match operator columns");
  }
  void check_adjoint(const CVector& y) const {
    if (y.size() != rows()) throw InvalidArgument("adjoint_apply: vector length does not match operator rows");
  }
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(CMatrix a) : a_(std::move(a)) {}

  Eigen::Index rows() const override { return a_.rows(); }
  Eigen::Index cols() const override { return a_.cols(); }
  CVector apply(const CVector& x) const override {
    check_apply(x);
    return a_ * x;
  }
  CVector adjoint_apply(const CVector& y) const override {
    check_adjoint(y);
    return a_.adjoint() * y;
  }
  CVector column(Eigen::Index j) const override { return a_.col(j); }
  CMatrix to_dense() const override { return a_; }

  const CMatrix& matrix() const { return a_; }

 private:
  CMatrix a_;
};

/// n^{-1/2} exp(i pi (p1 xi_l + p2 zeta_l)), p 1-based.
inline cplx fourier_entry(const Sample& s, int p1, int p2, std::size_t n) {
  const double phase = std::numbers::pi * (p1 * s.xi + p2 * s.zeta);
  return std::polar(1.0 / std::sqrt(static_cast<double>(n)), phase);
}

/// n^{-1/2} exp(-i omega r_hat . r_j) exp(i omega d_hat . r_j) with r_j = ell (p1, p2).
inline cplx physical_entry(const Sample& s, int p1, int p2, double ell, std::size_t n) {
  const double r1 = ell * p1;
  const double r2 = ell * p2;
  const double d_dot = std::cos(s.theta) * r1 + std::sin(s.theta) * r2;
  const double r_dot = std::cos(s.theta_tilde) * r1 + std::sin(s.theta_tilde) * r2;
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  return std::polar(inv, -s.omega * r_dot) * std::polar(1.0, s.omega * d_dot);
}

enum class Representation { Auto, Explicit, Separable, Fft };

namespace detail {

// Unscaled 2-D transform of a square row-major grid.
// sign > 0: sum a exp(+2 pi i k.n / side); sign < 0: exp(-...).
template <class Grid>
void fft2(Grid& g, int sign) {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  const auto side = static_cast<std::size_t>(g.rows());
  std::vector<cplx> in(side), out(side);
  auto pass = [&](auto get, auto set) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (std::size_t k = 0; k < side; ++k) in[k] = get(i, static_cast<Eigen::Index>(k));
      if (sign > 0) fft.inv(out, in); else fft.fwd(out, in);
      for (std::size_t k = 0; k < side; ++k) set(i, static_cast<Eigen::Index>(k), out[k]);
    }
  };
  pass([&](auto i, auto k) { return g(i, k); }, [&](auto i, auto k, cplx v) { g(i, k) = v; });
  pass([&](auto i, auto k) { return g(k, i); }, [&](auto i, auto k, cplx v) { g(k, i) = v; });
}

}  // namespace detail

/// Random partial Fourier sensing operator on a q x q lattice.
///
/// Explicit stores the dense n x q^2 matrix. Separable keeps two n x q phase
/// tables and applies in O(n q^2) without forming the matrix. Fft requires an
/// on-grid plan and uses a zero-padded 2q x 2q transform.
class SensingOperator final : public LinearOperator {
  using RowMajorMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

 public:
  /// Builds the operator; the config must satisfy the band-limit relation.
  SensingOperator(SamplingPlan plan, int q, const SchemeConfig& cfg,
                  Representation rep = Representation::Auto)
      : plan_(std::move(plan)), q_(q), ell_(cfg.ell) {
    if (!cfg.band_limit_matched())
      throw InvalidConfiguration("sensing operator requires Omega * ell = pi / sqrt(2)");
    init(rep);
  }

  /// Fourier-form operator without a physical configuration.
  SensingOperator(SamplingPlan plan, int q, Representation rep = Representation::Auto)
      : plan_(std::move(plan)), q_(q) {
    init(rep);
  }

  Eigen::Index rows() const override { return static_cast<Eigen::Index>(plan_.size()); }
  Eigen::Index cols() const override { return static_cast<Eigen::Index>(q_) * q_; }
  int q() const { return q_; }
  double ell() const { return ell_; }
  const SamplingPlan& plan() const { return plan_; }
  Representation representation() const { return rep_; }

  /// Flat indices into the 2q x 2q frequency grid, one per row (FFT representation only).
  const std::vector<int>& grid_indices() const {
    if (rep_ != Representation::Fft) throw PreconditionError("grid_indices: operator is not FFT-backed");
    return grid_index_;
  }

  cplx entry(Eigen::Index l, Eigen::Index j) const {
    return fourier_entry(plan_[static_cast<std::size_t>(l)], static_cast<int>(j / q_) + 1,
                         static_cast<int>(j % q_) + 1, plan_.size());
  }

  CVector apply(const CVector& x) const override {
    check_apply(x);
    switch (rep_) {
      case Representation::Explicit:
        return dense_ * x;
      case Representation::Fft:
        return apply_fft(x);
      default:
        return apply_separable(x);
    }
  }

  CVector adjoint_apply(const CVector& y) const override {
    check_adjoint(y);
    switch (rep_) {
      case Representation::Explicit:
        return dense_.adjoint() * y;
      case Representation::Fft:
        return adjoint_fft(y);
      default:
        return adjoint_separable(y);
    }
  }

  CVector column(Eigen::Index j) const override {
    CVector c(rows());
    for (Eigen::Index l = 0; l < rows(); ++l) c(l) = entry(l, j);
    return c;
  }

  CMatrix to_dense() const override {
    if (rep_ == Representation::Explicit) return dense_;
    CMatrix out(rows(), cols());
    for (Eigen::Index j = 0; j < cols(); ++j) out.col(j) = column(j);
    return out;
  }

 private:
  void init(Representation rep) {
    if (q_ < 1) throw InvalidArgument("SensingOperator: q must be positive");
    if (plan_.size() == 0) throw InvalidArgument("SensingOperator: empty plan");
    if (rep == Representation::Auto) rep = is_on_grid() ? Representation::Fft : Representation::Separable;
    if (rep == Representation::Fft && !is_on_grid())
      throw InvalidArgument("SensingOperator: FFT application needs an on-grid plan");
    rep_ = rep;
    const auto n = rows();
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    if (rep_ == Representation::Explicit) {
      dense_.resize(n, cols());
      for (Eigen::Index j = 0; j < cols(); ++j)
        for (Eigen::Index l = 0; l < n; ++l) dense_(l, j) = entry(l, j);
    } else if (rep_ == Representation::Separable) {
      row_phase_.resize(n, q_);
      col_phase_.resize(n, q_);
      for (Eigen::Index l = 0; l < n; ++l) {
        const Sample& s = plan_[static_cast<std::size_t>(l)];
        for (int p = 1; p <= q_; ++p) {
          row_phase_(l, p - 1) = std::polar(inv, std::numbers::pi * p * s.xi);
          col_phase_(l, p - 1) = std::polar(1.0, std::numbers::pi * p * s.zeta);
        }
      }
    } else {
      const int side = 2 * q_;
      grid_index_.resize(plan_.size());
      for (std::size_t l = 0; l < plan_.size(); ++l) {
        const auto k1 = std::llround(plan_[l].xi * q_);
        const auto k2 = std::llround(plan_[l].zeta * q_);
        const auto a = static_cast<int>(((k1 % side) + side) % side);
        const auto b = static_cast<int>(((k2 % side) + side) % side);
        grid_index_[l] = a * side + b;
      }
    }
  }

  bool is_on_grid() const {
    for (const auto& s : plan_.samples) {
      const double a = s.xi * q_;
      const double b = s.zeta * q_;
      if (std::abs(a - std::round(a)) > 1e-9 || std::abs(b - std::round(b)) > 1e-9) return false;
    }
    return true;
  }

  CVector apply_separable(const CVector& x) const {
    // y_l = sum_{p1,p2} R(l,p1) X(p1,p2) C(l,p2)
    Eigen::Map<const RowMajorMat> xm(x.data(), q_, q_);
    const CMatrix t = row_phase_ * xm;
    return t.cwiseProduct(col_phase_).rowwise().sum();
  }

  CVector adjoint_separable(const CVector& y) const {
    // X(p1,p2) = sum_l conj(R(l,p1)) y_l conj(C(l,p2))
    const CMatrix weighted = col_phase_.conjugate().array().colwise() * y.array();
    const RowMajorMat xm = row_phase_.adjoint() * weighted;
    return Eigen::Map<const CVector>(xm.data(), cols());
  }

  CVector apply_fft(const CVector& x) const {
    const int side = 2 * q_;
    RowMajorMat g = RowMajorMat::Zero(side, side);
    // pixel p (1-based) sits at grid index p mod side
    for (int r = 0; r < q_; ++r)
      for (int c = 0; c < q_; ++c) g((r + 1) % side, (c + 1) % side) = x(r * q_ + c);
    detail::fft2(g, +1);
    const double inv = 1.0 / std::sqrt(static_cast<double>(rows()));
    CVector y(rows());
    for (std::size_t l = 0; l < grid_index_.size(); ++l) y(static_cast<Eigen::Index>(l)) = g.data()[grid_index_[l]] * inv;
    return y;
  }

  CVector adjoint_fft(const CVector& y) const {
    const int side = 2 * q_;
    RowMajorMat g = RowMajorMat::Zero(side, side);
    for (std::size_t l = 0; l < grid_index_.size(); ++l) g.data()[grid_index_[l]] += y(static_cast<Eigen::Index>(l));
    detail::fft2(g, -1);
    const double inv = 1.0 / std::sqrt(static_cast<double>(rows()));
    CVector x(cols());
    for (int r = 0; r < q_; ++r)
      for (int c = 0; c < q_; ++c) x(r * q_ + c) = g((r + 1) % side, (c + 1) % side) * inv;
    return x;
  }

  SamplingPlan plan_;
  int q_ = 0;
  double ell_ = 0.0;
  Representation rep_ = Representation::Separable;
  CMatrix dense_;
  CMatrix row_phase_;
  CMatrix col_phase_;
  std::vector<int> grid_index_;
};

/// Build the sensing operator for a plan on a q x q grid.
inline std::shared_ptr<SensingOperator> build_sensing_operator(const SamplingPlan& plan, int q,
                                                               const SchemeConfig& cfg,
                                                               Representation rep = Representation::Auto) {
  return std::make_shared<SensingOperator>(plan, q, cfg, rep);
}

/// Largest entrywise gap between the physical and Fourier forms over the given (l, j) pairs.
inline double max_form_disagreement(const SamplingPlan& plan, int q, double ell,
                                    std::span<const std::pair<std::size_t, std::size_t>> entries) {
  double worst = 0.0;
  for (auto [l, j] : entries) {
    const int p1 = static_cast<int>(j / static_cast<std::size_t>(q)) + 1;
    const int p2 = static_cast<int>(j % static_cast<std::size_t>(q)) + 1;
    worst = std::max(worst, std::abs(physical_entry(plan[l], p1, p2, ell, plan.size()) -
                                     fourier_entry(plan[l], p1, p2, plan.size())));
  }
  return worst;
}

/// A = omega^2 / (4 pi) sum_j v_j exp(i omega r_j . (d_hat - r_hat)).
inline cplx scattering_amplitude_point(std::span<const cplx> weights,
                                       std::span<const std::array<double, 2>> positions, double theta,
                                       double theta_tilde, double omega) {
  if (weights.size() != positions.size())
    throw InvalidArgument("scattering_amplitude_point: weights and positions differ in length");
  const double k1 = std::cos(theta) - std::cos(theta_tilde);
  const double k2 = std::sin(theta) - std::sin(theta_tilde);
  cplx acc{};
  for (std::size_t j = 0; j < weights.size(); ++j)
    acc += weights[j] * std::polar(1.0, omega * (positions[j][0] * k1 + positions[j][1] * k2));
  return omega * omega / (4.0 * std::numbers::pi) * acc;
}

/// Point-object datum y_l = 4 pi / (omega_l^2 sqrt n) A for every sample.
///
/// `x` is the point-object vector on the lattice ell (p1, p2). At omega = 0 the
/// normalized datum is taken as its limit (1/sqrt n) sum_j x_j.
inline CVector point_object_data(const SamplingPlan& plan, const CVector& x, int q, double ell) {
  std::vector<cplx> w;
  std::vector<std::array<double, 2>> pos;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) == cplx{}) continue;
    w.push_back(x(j));
    pos.push_back({ell * static_cast<double>(j / q + 1), ell * static_cast<double>(j % q + 1)});
  }
  const double rn = std::sqrt(static_cast<double>(plan.size()));
  CVector y(static_cast<Eigen::Index>(plan.size()));
  for (std::size_t l = 0; l < plan.size(); ++l) {
    const Sample& s = plan[l];
    if (s.omega == 0.0) {
      cplx acc{};
      for (auto v : w) acc += v;
      y(static_cast<Eigen::Index>(l)) = acc / rn;
      continue;
    }
    const cplx a = scattering_amplitude_point(w, pos, s.theta, s.theta_tilde, s.omega);
    y(static_cast<Eigen::Index>(l)) = 4.0 * std::numbers::pi / (s.omega * s.omega * rn) * a;
  }
  return y;
}

}  // namespace cjs
