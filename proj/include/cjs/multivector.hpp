#pragma once

// Multi-vectors: m x d complex arrays whose rows are the unknown locations and
// whose columns are channels. Mixed (b,a) row norms, row supports and the best
// s-row-sparse approximation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "cjs/errors.hpp"

namespace cjs {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Exponent of a row norm or of the outer sum. Only 1, 2 and infinity are supported.
enum class NormExp { One, Two, Inf };

/// Sorted, duplicate-free set of row indices.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::vector<std::size_t> indices) : idx_(std::move(indices)) {
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
  }

  const std::vector<std::size_t>& indices() const { return idx_; }
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  bool contains(std::size_t i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }
  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  void insert(std::size_t i) {
    auto it = std::lower_bound(idx_.begin(), idx_.end(), i);
    if (it == idx_.end() || *it != i) idx_.insert(it, i);
  }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::vector<std::size_t> idx_;
};

/// Jaccard index |A n B| / |A u B|; two empty sets count as identical.
inline double jaccard(const SupportSet& a, const SupportSet& b) {
  std::vector<std::size_t> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  const std::size_t uni = a.size() + b.size() - inter.size();
  return uni == 0 ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni);
}

class MultiVector {
 public:
  MultiVector() = default;

  MultiVector(Eigen::Index m, Eigen::Index d) : data_(CMatrix::Zero(m, d)) {
    if (m <= 0 || d <= 0) throw InvalidArgument("MultiVector: m and d must be positive");
  }

  explicit MultiVector(CMatrix data) : data_(std::move(data)) {
    if (data_.rows() <= 0 || data_.cols() <= 0)
      throw InvalidArgument("MultiVector: m and d must be positive");
    if (!data_.allFinite()) throw InvalidArgument("MultiVector: entries must be finite");
  }

  Eigen::Index m() const { return data_.rows(); }
  Eigen::Index d() const { return data_.cols(); }

  const CMatrix& data() const { return data_; }
  CMatrix& data() { return data_; }

  cplx operator()(Eigen::Index j, Eigen::Index c) const { return data_(j, c); }
  cplx& operator()(Eigen::Index j, Eigen::Index c) { return data_(j, c); }

  auto col(Eigen::Index c) const { return data_.col(c); }
  auto col(Eigen::Index c) { return data_.col(c); }

  double row_norm2(Eigen::Index j) const { return data_.row(j).norm(); }

  bool same_shape(const MultiVector& o) const { return m() == o.m() && d() == o.d(); }

  MultiVector operator-(const MultiVector& o) const {
    check_shape(o, "operator-");
    return MultiVector(CMatrix(data_ - o.data_));
  }
  MultiVector operator+(const MultiVector& o) const {
    check_shape(o, "operator+");
    return MultiVector(CMatrix(data_ + o.data_));
  }
  MultiVector operator*(cplx a) const { return MultiVector(CMatrix(data_ * a)); }

  /// Copy keeping only rows in `s`.
  MultiVector restricted(const SupportSet& s) const {
    MultiVector out(m(), d());
    for (auto j : s) {
      if (static_cast<Eigen::Index>(j) >= m()) throw InvalidArgument("restricted: index out of range");
      out.data_.row(static_cast<Eigen::Index>(j)) = data_.row(static_cast<Eigen::Index>(j));
    }
    return out;
  }

 private:
  void check_shape(const MultiVector& o, const char* what) const {
    if (!same_shape(o)) throw InvalidArgument(std::string(what) + ": shape mismatch");
  }

  CMatrix data_;
};

namespace detail {

inline double row_norm(const CMatrix& x, Eigen::Index j, NormExp a) {
  switch (a) {
    case NormExp::One: {
      double s = 0.0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) s += std::abs(x(j, c));
      return s;
    }
    case NormExp::Two:
      return x.row(j).norm();
    case NormExp::Inf: {
      double s = 0.0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) s = std::max(s, std::abs(x(j, c)));
      return s;
    }
  }
  return 0.0;
}

}  // namespace detail

/// (sum_j ||row_j(Y)||_a^b)^(1/b); b = Inf gives the largest row norm.
inline double norm_ba(const MultiVector& y, NormExp b, NormExp a) {
  const CMatrix& x = y.data();
  if (b == NormExp::Inf) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < x.rows(); ++j) r = std::max(r, detail::row_norm(x, j, a));
    return r;
  }
  if (b == NormExp::Two && a == NormExp::Two) return x.norm();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    const double r = detail::row_norm(x, j, a);
    acc += (b == NormExp::One) ? r : r * r;
  }
  return b == NormExp::One ? acc : std::sqrt(acc);
}

/// Numeric-exponent overload; anything other than 1, 2 or +inf is rejected.
inline double norm_ba(const MultiVector& y, double b, double a) {
  auto to_exp = [](double e) {
    if (e == 1.0) return NormExp::One;
    if (e == 2.0) return NormExp::Two;
    if (std::isinf(e) && e > 0) return NormExp::Inf;
    throw InvalidArgument("norm_ba: exponents must be 1, 2 or infinity");
  };
  return norm_ba(y, to_exp(b), to_exp(a));
}

inline double norm12(const MultiVector& y) { return norm_ba(y, NormExp::One, NormExp::Two); }
inline double norm22(const MultiVector& y) { return norm_ba(y, NormExp::Two, NormExp::Two); }
inline double norm_inf2(const MultiVector& y) { return norm_ba(y, NormExp::Inf, NormExp::Two); }

/// <A, B> = sum conj(A_ij) B_ij.
inline cplx inner(const MultiVector& a, const MultiVector& b) {
  if (!a.same_shape(b)) throw InvalidArgument("inner: shape mismatch");
  return (a.data().conjugate().cwiseProduct(b.data())).sum();
}

/// Rows whose 2-norm strictly exceeds `tol`, ascending.
inline SupportSet row_support(const MultiVector& x, double tol = 0.0) {
  std::vector<std::size_t> idx;
  for (Eigen::Index j = 0; j < x.m(); ++j)
    if (x.row_norm2(j) > tol) idx.push_back(static_cast<std::size_t>(j));
  return SupportSet(std::move(idx));
}

/// Indices of the s rows with largest 2-norm; ties go to the lower index.
inline SupportSet largest_rows(const MultiVector& x, std::size_t s) {
  if (s > static_cast<std::size_t>(x.m())) throw InvalidArgument("largest_rows: s exceeds m");
  std::vector<std::size_t> order(static_cast<std::size_t>(x.m()));
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> norms(order.size());
  for (std::size_t j = 0; j < order.size(); ++j) norms[j] = x.row_norm2(static_cast<Eigen::Index>(j));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });
  order.resize(s);
  return SupportSet(std::move(order));
}

/// Best s-row-sparse approximation in the (1,2) norm.
inline MultiVector best_s_row_approx(const MultiVector& x, std::size_t s) {
  return x.restricted(largest_rows(x, s));
}

}  // namespace cjs
