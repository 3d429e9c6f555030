#pragma once

// Pixelated images on a q x q lattice of spacing ell, their forward-difference
// gradients, total variation, the discrete curl and path integration.
//
// Pixel p = (p1, p2) with p1, p2 in [1, q] is stored at (p1 - 1, p2 - 1) and
// flattened row-major: j = (p1 - 1) q + (p2 - 1). Differences use zero
// extension beyond the grid.

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "cjs/errors.hpp"
#include "cjs/multivector.hpp"

namespace cjs {

using RowMajorCMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Image {
 public:
  Image() = default;

  Image(int q, double spacing) : q_(q), spacing_(spacing), values_(RowMajorCMatrix::Zero(q, q)) {
    validate();
  }

  Image(RowMajorCMatrix values, double spacing)
      : q_(static_cast<int>(values.rows())), spacing_(spacing), values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw InvalidArgument("Image: grid must be square");
    validate();
  }

  /// From a row-major flattened vector of length q^2.
  static Image from_vector(const CVector& v, int q, double spacing) {
    if (v.size() != static_cast<Eigen::Index>(q) * q)
      throw InvalidArgument("Image::from_vector: length is not q^2");
    RowMajorCMatrix m = Eigen::Map<const RowMajorCMatrix>(v.data(), q, q);
    return Image(std::move(m), spacing);
  }

  int q() const { return q_; }
  Eigen::Index m() const { return static_cast<Eigen::Index>(q_) * q_; }
  double spacing() const { return spacing_; }

  const RowMajorCMatrix& values() const { return values_; }
  RowMajorCMatrix& values() { return values_; }

  /// 0-based access (r, c) = (p1 - 1, p2 - 1).
  cplx operator()(int r, int c) const { return values_(r, c); }
  cplx& operator()(int r, int c) { return values_(r, c); }

  /// Zero-extended read.
  cplx at_or_zero(int r, int c) const {
    return (r >= 0 && r < q_ && c >= 0 && c < q_) ? values_(r, c) : cplx{};
  }

  CVector vec() const { return Eigen::Map<const CVector>(values_.data(), m()); }

  bool has_zero_border() const {
    for (int k = 0; k < q_; ++k) {
      if (values_(0, k) != cplx{} || values_(q_ - 1, k) != cplx{} || values_(k, 0) != cplx{} ||
          values_(k, q_ - 1) != cplx{})
        return false;
    }
    return true;
  }

  void require_zero_border(const char* who) const {
    if (!has_zero_border())
      throw PreconditionError(std::string(who) + ": image must have a one-pixel zero border");
  }

  double norm2() const { return values_.norm(); }

  Image operator-(const Image& o) const {
    check_grid(o);
    return Image(RowMajorCMatrix(values_ - o.values_), spacing_);
  }
  Image operator+(const Image& o) const {
    check_grid(o);
    return Image(RowMajorCMatrix(values_ + o.values_), spacing_);
  }
  Image operator*(cplx a) const { return Image(RowMajorCMatrix(values_ * a), spacing_); }

 private:
  void validate() const {
    if (q_ < 3) throw InvalidArgument("Image: q must be at least 3");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_))
      throw InvalidArgument("Image: spacing must be positive");
    if (!values_.allFinite()) throw InvalidArgument("Image: entries must be finite");
  }
  void check_grid(const Image& o) const {
    if (o.q_ != q_) throw InvalidArgument("Image: grid size mismatch");
  }

  int q_ = 0;
  double spacing_ = 1.0;
  RowMajorCMatrix values_;
};

/// A d = 2 multi-vector holding ell^2 (D1 V, D2 V) row by row.
using GradientField = MultiVector;

inline int grid_side(const GradientField& x) {
  const auto q = static_cast<int>(std::llround(std::sqrt(static_cast<double>(x.m()))));
  if (static_cast<Eigen::Index>(q) * q != x.m() || x.d() != 2)
    throw InvalidArgument("gradient field must be q^2 x 2");
  return q;
}

namespace detail {

// Unscaled forward differences of a q x q array (zero extension).
inline void forward_differences(const RowMajorCMatrix& v, RowMajorCMatrix& d1, RowMajorCMatrix& d2) {
  const auto q = v.rows();
  d1.resize(q, q);
  d2.resize(q, q);
  for (Eigen::Index r = 0; r < q; ++r) {
    for (Eigen::Index c = 0; c < q; ++c) {
      const cplx here = v(r, c);
      d1(r, c) = (r + 1 < q ? v(r + 1, c) : cplx{}) - here;
      d2(r, c) = (c + 1 < q ? v(r, c + 1) : cplx{}) - here;
    }
  }
}

// Adjoint of forward_differences: out = D1^* d1 + D2^* d2.
inline void forward_differences_adjoint(const RowMajorCMatrix& d1, const RowMajorCMatrix& d2,
                                        RowMajorCMatrix& out) {
  const auto q = d1.rows();
  out.resize(q, q);
  for (Eigen::Index r = 0; r < q; ++r) {
    for (Eigen::Index c = 0; c < q; ++c) {
      cplx acc = -d1(r, c) - d2(r, c);
      if (r > 0) acc += d1(r - 1, c);
      if (c > 0) acc += d2(r, c - 1);
      out(r, c) = acc;
    }
  }
}

}  // namespace detail

/// Row j = ell^2 (D1 V, D2 V) at pixel j.
inline GradientField discrete_gradient(const Image& v) {
  RowMajorCMatrix d1, d2;
  detail::forward_differences(v.values(), d1, d2);
  const double s = v.spacing() * v.spacing();
  GradientField g(v.m(), 2);
  g.col(0) = Eigen::Map<const CVector>(d1.data(), v.m()) * s;
  g.col(1) = Eigen::Map<const CVector>(d2.data(), v.m()) * s;
  return g;
}

enum class TvMode { Isotropic, Anisotropic };

/// Total variation on unscaled pixel differences.
inline double tv_norm(const Image& v, TvMode mode = TvMode::Isotropic) {
  RowMajorCMatrix d1, d2;
  detail::forward_differences(v.values(), d1, d2);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < d1.size(); ++k) {
    const double a = std::abs(d1.data()[k]);
    const double b = std::abs(d2.data()[k]);
    acc += (mode == TvMode::Isotropic) ? std::hypot(a, b) : a + b;
  }
  return acc;
}

/// max_p |D1 X2 - D2 X1|, same zero-extension convention as the gradient.
inline double curl_residual(const GradientField& x) {
  const int q = grid_side(x);
  auto at = [&](int c, int r, int col) -> cplx {
    if (r < 0 || r >= q || col < 0 || col >= q) return {};
    return x(static_cast<Eigen::Index>(r) * q + col, c);
  };
  double worst = 0.0;
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      const cplx d1x2 = at(1, r + 1, c) - at(1, r, c);
      const cplx d2x1 = at(0, r, c + 1) - at(0, r, c);
      worst = std::max(worst, std::abs(d1x2 - d2x1));
    }
  }
  return worst;
}

/// 0-based pixel with the value the integrated image must take there.
struct Anchor {
  int row = 0;
  int col = 0;
  cplx value{};
};

enum class SweepOrder { RowFirst, ColumnFirst };

/// Recover V from X = ell^2 grad V by path integration from the anchor.
///
/// RowFirst integrates along the anchor's row with D2, then each column with
/// D1; ColumnFirst does the transpose. For curl-free fields both agree. Throws
/// InconsistentField if the curl exceeds 1e-9 ||X||_{inf,2}.
inline Image integrate_gradient(const GradientField& x, double spacing, Anchor anchor = {},
                                SweepOrder order = SweepOrder::RowFirst) {
  const int q = grid_side(x);
  if (anchor.row < 0 || anchor.row >= q || anchor.col < 0 || anchor.col >= q)
    throw InvalidArgument("integrate_gradient: anchor outside grid");
  const double scale = norm_inf2(x);
  if (curl_residual(x) > 1e-9 * scale)
    throw InconsistentField("integrate_gradient: curl residual exceeds tolerance");

  const double inv = 1.0 / (spacing * spacing);
  auto g = [&](int comp, int r, int c) { return x(static_cast<Eigen::Index>(r) * q + c, comp) * inv; };

  Image out(q, spacing);
  auto& v = out.values();
  v(anchor.row, anchor.col) = anchor.value;
  // comp 0 steps along rows (p1), comp 1 along columns (p2).
  auto sweep_row = [&](int r, int from) {
    for (int c = from + 1; c < q; ++c) v(r, c) = v(r, c - 1) + g(1, r, c - 1);
    for (int c = from - 1; c >= 0; --c) v(r, c) = v(r, c + 1) - g(1, r, c);
  };
  auto sweep_col = [&](int c, int from) {
    for (int r = from + 1; r < q; ++r) v(r, c) = v(r - 1, c) + g(0, r - 1, c);
    for (int r = from - 1; r >= 0; --r) v(r, c) = v(r + 1, c) - g(0, r, c);
  };
  if (order == SweepOrder::RowFirst) {
    sweep_row(anchor.row, anchor.col);
    for (int c = 0; c < q; ++c) sweep_col(c, anchor.row);
  } else {
    sweep_col(anchor.col, anchor.row);
    for (int r = 0; r < q; ++r) sweep_row(r, anchor.col);
  }
  return out;
}

/// Least-squares integration: argmin ||grad V - X / ell^2|| with V(anchor) fixed.
///
/// Used when X is not exactly curl-free. Differences are the same zero-extended
/// forward differences, so the border equations take part in the fit.
inline Image integrate_gradient_lsq(const GradientField& x, double spacing, Anchor anchor = {}) {
  const int q = grid_side(x);
  const Eigen::Index m = static_cast<Eigen::Index>(q) * q;
  const Eigen::Index fixed = static_cast<Eigen::Index>(anchor.row) * q + anchor.col;
  auto unknown = [&](Eigen::Index j) { return j < fixed ? j : j - 1; };

  // Rows: 2m difference equations. Columns: m - 1 free pixels.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(4 * m));
  CVector rhs(2 * m);
  const double inv = 1.0 / (spacing * spacing);
  for (int r = 0; r < q; ++r) {
    for (int c = 0; c < q; ++c) {
      const Eigen::Index j = static_cast<Eigen::Index>(r) * q + c;
      for (int comp = 0; comp < 2; ++comp) {
        const Eigen::Index row = comp * m + j;
        cplx b = x(j, comp) * inv;
        const bool has_next = comp == 0 ? r + 1 < q : c + 1 < q;
        const Eigen::Index next = comp == 0 ? j + q : j + 1;
        // D V = V(next) - V(j)
        if (j == fixed) b += anchor.value; else trip.emplace_back(row, unknown(j), -1.0);
        if (has_next) {
          if (next == fixed) b -= anchor.value; else trip.emplace_back(row, unknown(next), 1.0);
        }
        rhs(row) = b;
      }
    }
  }
  Eigen::SparseMatrix<double> a(2 * m, m - 1);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> ata = a.transpose() * a;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(ata);
  if (solver.info() != Eigen::Success) throw Error("integrate_gradient_lsq: factorization failed");
  const CVector atb = a.transpose() * rhs;
  const Eigen::VectorXd re = solver.solve(Eigen::VectorXd(atb.real()));
  const Eigen::VectorXd im = solver.solve(Eigen::VectorXd(atb.imag()));

  Image out(q, spacing);
  for (Eigen::Index j = 0; j < m; ++j) {
    const cplx val = (j == fixed) ? anchor.value : cplx(re(unknown(j)), im(unknown(j)));
    out.values().data()[j] = val;
  }
  return out;
}

/// ||V||^2 * 4d / (m^(2/d) ||grad V||^2) with d = 2; at most 1 for zero-border images.
inline double poincare_ratio(const Image& v) {
  v.require_zero_border("poincare_ratio");
  RowMajorCMatrix d1, d2;
  detail::forward_differences(v.values(), d1, d2);
  const double grad2 = d1.squaredNorm() + d2.squaredNorm();
  if (grad2 == 0.0) throw DivisionByZero("poincare_ratio: gradient is identically zero");
  const double m = static_cast<double>(v.m());
  return v.values().squaredNorm() * 8.0 / (m * grad2);
}

}  // namespace cjs
