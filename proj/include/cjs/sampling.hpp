#pragma once

// Sampling schemes for scattering measurements.
//
// Each measurement l draws a Fourier frequency (xi, zeta) in [-1, 1]^2 and
// chooses incident angle theta, sampling angle theta_tilde and probe frequency
// omega so that omega * ell * (d_hat - r_hat) . p = pi (p1 xi + p2 zeta) on the
// lattice, given Omega * ell = pi / sqrt(2).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "cjs/errors.hpp"
#include "cjs/rng.hpp"

namespace cjs {

enum class Scheme { Backward, Forward };
enum class SamplingMode { Continuous, OnGrid };

inline std::string to_string(Scheme s) { return s == Scheme::Backward ? "backward" : "forward"; }
inline std::string to_string(SamplingMode m) { return m == SamplingMode::Continuous ? "continuous" : "on_grid"; }

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "backward") return Scheme::Backward;
  if (s == "forward") return Scheme::Forward;
  throw InvalidArgument("unknown scheme '" + s + "'");
}
inline SamplingMode mode_from_string(const std::string& s) {
  if (s == "continuous") return SamplingMode::Continuous;
  if (s == "on_grid") return SamplingMode::OnGrid;
  throw InvalidArgument("unknown sampling mode '" + s + "'");
}

/// Band limit matched to the grid: Omega = pi / (sqrt(2) ell).
inline double matched_bandwidth(double ell) { return std::numbers::pi / (std::numbers::sqrt2 * ell); }

struct SchemeConfig {
  Scheme scheme = Scheme::Backward;
  std::size_t n = 0;
  double bandwidth = 0.0;  // Omega, 1/length
  double ell = 1.0;        // grid spacing
  double gamma = 1.0;      // Forward frequency multiplier
  SamplingMode mode = SamplingMode::Continuous;
  std::uint64_t seed = 0;
  int grid_side = 0;  // q; required for on-grid draws

  /// Config with Omega derived from ell.
  static SchemeConfig matched(Scheme scheme, std::size_t n, double ell, SamplingMode mode,
                              std::uint64_t seed, int q, double gamma = 1.0) {
    SchemeConfig c;
    c.scheme = scheme;
    c.n = n;
    c.ell = ell;
    c.bandwidth = matched_bandwidth(ell);
    c.gamma = gamma;
    c.mode = mode;
    c.seed = seed;
    c.grid_side = q;
    return c;
  }

  void validate() const {
    if (n == 0) throw InvalidArgument("SchemeConfig: n must be positive");
    if (!(ell > 0.0)) throw InvalidArgument("SchemeConfig: ell must be positive");
    if (!(bandwidth > 0.0)) throw InvalidArgument("SchemeConfig: bandwidth must be positive");
    if (!(gamma >= 1.0)) throw InvalidArgument("SchemeConfig: gamma must be >= 1");
    if (mode == SamplingMode::OnGrid && grid_side < 1)
      throw InvalidArgument("SchemeConfig: on-grid sampling needs grid_side");
  }

  /// Omega * ell = pi / sqrt(2) to 1e-12 relative.
  bool band_limit_matched() const {
    const double target = std::numbers::pi / std::numbers::sqrt2;
    return std::abs(bandwidth * ell - target) <= 1e-12 * target;
  }
};

struct Sample {
  double xi = 0.0;
  double zeta = 0.0;
  double rho = 0.0;
  double phi = 0.0;
  double theta = 0.0;        // incident direction d_hat = (cos, sin)(theta)
  double theta_tilde = 0.0;  // sampling direction r_hat = (cos, sin)(theta_tilde)
  double omega = 0.0;
};

struct SamplingPlan {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  const Sample& operator[](std::size_t l) const { return samples[l]; }
};

/// Angles and frequency for one frequency pair under a scheme.
///
/// theta = phi - pi/2 + a and theta_tilde = phi - pi/2 - a, where a = pi/2 for
/// backward sampling and a = arcsin(rho / (gamma sqrt 2)) for forward sampling.
/// Then theta + theta_tilde = 2 phi + pi (mod 2 pi), theta - theta_tilde = 2a and
/// omega = Omega rho / (sqrt 2 sin a).
inline Sample make_sample(double xi, double zeta, const SchemeConfig& cfg) {
  Sample s;
  s.xi = xi;
  s.zeta = zeta;
  s.rho = std::hypot(xi, zeta);
  s.phi = std::atan2(zeta, xi);
  const double half_pi = std::numbers::pi / 2.0;
  if (cfg.scheme == Scheme::Backward) {
    s.theta = s.phi;
    s.theta_tilde = s.phi - std::numbers::pi;
    s.omega = cfg.bandwidth * s.rho / std::numbers::sqrt2;
  } else {
    const double a = std::asin(s.rho / (cfg.gamma * std::numbers::sqrt2));
    s.theta = s.phi - half_pi + a;
    s.theta_tilde = s.phi - half_pi - a;
    s.omega = cfg.gamma * cfg.bandwidth;
  }
  return s;
}

/// Draw n measurements.
///
/// Continuous: (xi, zeta) i.i.d. uniform on [-1, 1]^2, redrawing the null
/// frequency. On-grid: n distinct points of the 2q x 2q grid {k / q : k = -q..q-1}^2.
inline SamplingPlan draw_sampling_plan(const SchemeConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SamplingPlan plan;
  plan.samples.reserve(cfg.n);
  if (cfg.mode == SamplingMode::Continuous) {
    while (plan.samples.size() < cfg.n) {
      const double xi = rng.uniform(-1.0, 1.0);
      const double zeta = rng.uniform(-1.0, 1.0);
      if (xi == 0.0 && zeta == 0.0) continue;
      plan.samples.push_back(make_sample(xi, zeta, cfg));
    }
  } else {
    const std::uint64_t side = 2 * static_cast<std::uint64_t>(cfg.grid_side);
    const std::uint64_t total = side * side;
    if (cfg.n > total) throw InvalidArgument("draw_sampling_plan: n exceeds the frequency grid size");
    // Partial Fisher-Yates over grid cell ids.
    std::vector<std::uint64_t> cells(total);
    for (std::uint64_t i = 0; i < total; ++i) cells[i] = i;
    const double q = cfg.grid_side;
    for (std::size_t l = 0; l < cfg.n; ++l) {
      const std::uint64_t pick = l + rng.index(total - l);
      std::swap(cells[l], cells[pick]);
      const auto k1 = static_cast<std::int64_t>(cells[l] / side) - cfg.grid_side;
      const auto k2 = static_cast<std::int64_t>(cells[l] % side) - cfg.grid_side;
      plan.samples.push_back(make_sample(static_cast<double>(k1) / q, static_cast<double>(k2) / q, cfg));
    }
  }
  return plan;
}

/// Every frequency of the 2q x 2q grid, in cell order.
inline SamplingPlan full_grid_plan(const SchemeConfig& cfg) {
  SchemeConfig c = cfg;
  c.mode = SamplingMode::OnGrid;
  const int side = 2 * cfg.grid_side;
  SamplingPlan plan;
  for (int a = 0; a < side; ++a)
    for (int b = 0; b < side; ++b)
      plan.samples.push_back(make_sample(static_cast<double>(a - cfg.grid_side) / cfg.grid_side,
                                         static_cast<double>(b - cfg.grid_side) / cfg.grid_side, c));
  return plan;
}

struct PlanCheck {
  bool ok = true;
  std::vector<std::string> violations;
  double max_identity_error = 0.0;  // largest deviation over the equality invariants

  void fail(std::size_t l, const std::string& what) {
    ok = false;
    if (violations.size() < 20) violations.push_back("sample " + std::to_string(l) + ": " + what);
  }
};

namespace detail {
inline double angle_gap(double a, double b) {
  const double two_pi = 2.0 * std::numbers::pi;
  double d = std::fmod(a - b, two_pi);
  if (d < 0) d += two_pi;
  return std::min(d, two_pi - d);
}
}  // namespace detail

/// Check the per-sample invariants of a plan against its scheme.
inline PlanCheck check_plan(const SamplingPlan& plan, const SchemeConfig& cfg, double tol = 1e-9) {
  PlanCheck out;
  const double sqrt2 = std::numbers::sqrt2;
  auto eq = [&](std::size_t l, double got, double want, const char* what) {
    const double err = std::abs(got - want);
    out.max_identity_error = std::max(out.max_identity_error, err);
    if (err > tol * std::max(1.0, std::abs(want))) out.fail(l, what);
  };
  for (std::size_t l = 0; l < plan.size(); ++l) {
    const Sample& s = plan[l];
    if (std::abs(s.xi) > 1.0 || std::abs(s.zeta) > 1.0) out.fail(l, "frequency outside [-1,1]^2");
    if (s.rho > sqrt2 * (1.0 + 1e-15)) out.fail(l, "rho exceeds sqrt(2)");
    eq(l, s.rho, std::hypot(s.xi, s.zeta), "rho != |(xi,zeta)|");
    eq(l, s.rho * std::cos(s.phi), s.xi, "xi != rho cos phi");
    eq(l, s.rho * std::sin(s.phi), s.zeta, "zeta != rho sin phi");
    const double sum_gap = detail::angle_gap(s.theta + s.theta_tilde, 2.0 * s.phi + std::numbers::pi);
    out.max_identity_error = std::max(out.max_identity_error, sum_gap);
    if (sum_gap > tol) out.fail(l, "theta + theta_tilde != 2 phi + pi (mod 2 pi)");
    const double half = std::sin((s.theta - s.theta_tilde) / 2.0);
    if (cfg.scheme == Scheme::Backward) {
      eq(l, s.theta_tilde, s.theta - std::numbers::pi, "theta_tilde != theta - pi");
      eq(l, s.omega, cfg.bandwidth * s.rho / sqrt2, "omega != Omega rho / sqrt 2");
      if (s.omega > cfg.bandwidth * (1.0 + 1e-12)) out.fail(l, "omega exceeds the band limit");
      if (std::abs(half) < s.rho / sqrt2 * (1.0 - 1e-12)) out.fail(l, "band-limit constraint violated");
    } else {
      eq(l, s.omega, cfg.gamma * cfg.bandwidth, "omega != gamma Omega");
      eq(l, s.theta - s.theta_tilde, 2.0 * std::asin(s.rho / (cfg.gamma * sqrt2)),
         "theta - theta_tilde != 2 arcsin(rho / (gamma sqrt 2))");
    }
    // omega sin((theta - theta_tilde)/2) = Omega rho / sqrt 2
    eq(l, s.omega * half, cfg.bandwidth * s.rho / sqrt2, "frequency relation violated");
  }
  return out;
}

inline nlohmann::json plan_to_json(const SamplingPlan& plan) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : plan.samples) {
    arr.push_back({{"xi", s.xi},
                   {"zeta", s.zeta},
                   {"rho", s.rho},
                   {"phi", s.phi},
                   {"theta", s.theta},
                   {"theta_tilde", s.theta_tilde},
                   {"omega", s.omega}});
  }
  return arr;
}

inline SamplingPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidArgument("sampling plan file must be a JSON array");
  SamplingPlan plan;
  for (const auto& r : j) {
    Sample s;
    s.xi = r.at("xi").get<double>();
    s.zeta = r.at("zeta").get<double>();
    s.rho = r.at("rho").get<double>();
    s.phi = r.at("phi").get<double>();
    s.theta = r.at("theta").get<double>();
    s.theta_tilde = r.at("theta_tilde").get<double>();
    s.omega = r.at("omega").get<double>();
    plan.samples.push_back(s);
  }
  return plan;
}

}  // namespace cjs
