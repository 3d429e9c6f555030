#pragma once

// Test objects: the modified Shepp-Logan head phantom, piecewise-constant
// unions of rectangles and disks, and random point objects.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "cjs/errors.hpp"
#include "cjs/grad_field.hpp"
#include "cjs/rng.hpp"

namespace cjs {

/// Rasterized 10-ellipse modified Shepp-Logan phantom, values in [0, 1].
///
/// Pixel centres sit on the symmetric grid ((k - (q-1)/2) / ((q-1)/2)) in
/// [-1, 1], with the vertical axis pointing up (row 0 is y = +1). Values are
/// rounded to 1e-9 so that cancelling intensities give exact zeros.
inline Image shepp_logan(int q, double spacing = -1.0) {
  if (q < 32) throw InvalidArgument("shepp_logan: q must be at least 32");
  if (spacing <= 0.0) spacing = 1.0 / q;
  struct Ellipse {
    double a, b, x0, y0, deg, value;
  };
  static constexpr std::array<Ellipse, 10> kEllipses{{
      {0.69, 0.92, 0.0, 0.0, 0.0, 1.0},
      {0.6624, 0.874, 0.0, -0.0184, 0.0, -0.8},
      {0.11, 0.31, 0.22, 0.0, -18.0, -0.2},
      {0.16, 0.41, -0.22, 0.0, 18.0, -0.2},
      {0.21, 0.25, 0.0, 0.35, 0.0, 0.1},
      {0.046, 0.046, 0.0, 0.1, 0.0, 0.1},
      {0.046, 0.046, 0.0, -0.1, 0.0, 0.1},
      {0.046, 0.023, -0.08, -0.605, 0.0, 0.1},
      {0.023, 0.023, 0.0, -0.606, 0.0, 0.1},
      {0.023, 0.046, 0.06, -0.605, 0.0, 0.1},
  }};
  Image img(q, spacing);
  const double half = (q - 1) / 2.0;
  for (int r = 0; r < q; ++r) {
    const double y = (half - r) / half;
    for (int c = 0; c < q; ++c) {
      const double x = (c - half) / half;
      double v = 0.0;
      for (const auto& e : kEllipses) {
        const double t = e.deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0, dy = y - e.y0;
        const double xr = dx * std::cos(t) + dy * std::sin(t);
        const double yr = -dx * std::sin(t) + dy * std::cos(t);
        if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) v += e.value;
      }
      v = std::round(v * 1e9) / 1e9;
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

/// One component of a piecewise-constant object, in unit-square coordinates
/// (u along rows, w along columns, pixel centre at ((p - 1/2) / q)).
struct Shape {
  enum class Kind { Rect, Disk } kind = Kind::Rect;
  double u0 = 0, u1 = 0, w0 = 0, w1 = 0;  // rectangle [u0,u1] x [w0,w1]
  double cu = 0, cw = 0, radius = 0;      // disk
  cplx value{1.0, 0.0};

  static Shape rect(double u0, double u1, double w0, double w1, cplx value) {
    Shape s;
    s.kind = Kind::Rect;
    s.u0 = u0, s.u1 = u1, s.w0 = w0, s.w1 = w1, s.value = value;
    return s;
  }
  static Shape disk(double cu, double cw, double radius, cplx value) {
    Shape s;
    s.kind = Kind::Disk;
    s.cu = cu, s.cw = cw, s.radius = radius, s.value = value;
    return s;
  }

  bool contains(double u, double w) const {
    if (kind == Kind::Rect) return u >= u0 && u <= u1 && w >= w0 && w <= w1;
    return (u - cu) * (u - cu) + (w - cw) * (w - cw) <= radius * radius;
  }
};

/// Sum of shape indicators on a q x q grid. Border pixels must stay zero.
inline Image piecewise_phantom(const std::vector<Shape>& shapes, int q, double spacing = -1.0) {
  if (spacing <= 0.0) spacing = 1.0 / q;
  Image img(q, spacing);
  for (int r = 0; r < q; ++r) {
    const double u = (r + 0.5) / q;
    for (int c = 0; c < q; ++c) {
      const double w = (c + 0.5) / q;
      for (const auto& s : shapes)
        if (s.contains(u, w)) img(r, c) += s.value;
    }
  }
  if (!img.has_zero_border()) throw PreconditionError("piecewise_phantom: shapes reach the border pixels");
  return img;
}

inline nlohmann::json shape_to_json(const Shape& s) {
  nlohmann::json v = {s.value.real(), s.value.imag()};
  if (s.kind == Shape::Kind::Rect) return {{"kind", "rect"}, {"u0", s.u0}, {"u1", s.u1}, {"w0", s.w0}, {"w1", s.w1}, {"value", v}};
  return {{"kind", "disk"}, {"cu", s.cu}, {"cw", s.cw}, {"r", s.radius}, {"value", v}};
}

inline Shape shape_from_json(const nlohmann::json& j) {
  cplx value{1.0, 0.0};
  if (j.contains("value")) {
    const auto& v = j.at("value");
    value = v.is_array() ? cplx(v.at(0).get<double>(), v.size() > 1 ? v.at(1).get<double>() : 0.0)
                         : cplx(v.get<double>(), 0.0);
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "rect")
    return Shape::rect(j.at("u0").get<double>(), j.at("u1").get<double>(), j.at("w0").get<double>(),
                       j.at("w1").get<double>(), value);
  if (kind == "disk") return Shape::disk(j.at("cu").get<double>(), j.at("cw").get<double>(), j.at("r").get<double>(), value);
  throw InvalidArgument("unknown shape kind '" + kind + "'");
}

/// s distinct uniformly random locations with complex values of modulus in [lo, hi].
inline CVector point_phantom(Eigen::Index m, std::size_t s, double lo, double hi, std::uint64_t seed) {
  if (s > static_cast<std::size_t>(m)) throw InvalidArgument("point_phantom: s exceeds m");
  if (lo < 0.0 || hi < lo) throw InvalidArgument("point_phantom: bad modulus range");
  Rng rng(seed);
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
  CVector x = CVector::Zero(m);
  for (std::size_t k = 0; k < s; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.index(static_cast<std::uint64_t>(m) - k));
    std::swap(pool[k], pool[pick]);
    const double mod = rng.uniform(lo, hi);
    const double arg = rng.uniform(-std::numbers::pi, std::numbers::pi);
    x(pool[k]) = std::polar(mod, arg);
  }
  return x;
}

}  // namespace cjs
