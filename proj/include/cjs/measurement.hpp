#pragma once

// Object-domain measurements of pixelated objects and their lift to
// gradient-domain joint-sparse data.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cjs/errors.hpp"
#include "cjs/grad_field.hpp"
#include "cjs/multivector.hpp"
#include "cjs/rng.hpp"
#include "cjs/sampling.hpp"
#include "cjs/sensing_operator.hpp"

namespace cjs {

/// phi(X) = [A_1 X_1, ..., A_d X_d]; a single operator is shared by all channels.
inline MultiVector apply_channels(std::span<const OperatorPtr> ops, const MultiVector& x) {
  if (ops.empty()) throw InvalidArgument("apply_channels: no operators");
  if (ops.size() != 1 && static_cast<Eigen::Index>(ops.size()) != x.d())
    throw InvalidArgument("apply_channels: operator count does not match channel count");
  MultiVector out(ops[0]->rows(), x.d());
  for (Eigen::Index c = 0; c < x.d(); ++c) {
    const auto& op = ops.size() == 1 ? ops[0] : ops[static_cast<std::size_t>(c)];
    out.col(c) = op->apply(x.col(c));
  }
  return out;
}

inline MultiVector adjoint_channels(std::span<const OperatorPtr> ops, const MultiVector& y, Eigen::Index m) {
  MultiVector out(m, y.d());
  for (Eigen::Index c = 0; c < y.d(); ++c) {
    const auto& op = ops.size() == 1 ? ops[0] : ops[static_cast<std::size_t>(c)];
    out.col(c) = op->adjoint_apply(y.col(c));
  }
  return out;
}

/// Separable pixel form factor g_l = sinc-like product for unit square pixels.
inline double pixel_form_factor(const Sample& s) {
  auto f = [](double t) {
    if (t == 0.0) return 1.0;
    return 2.0 * std::sin(std::numbers::pi * t / 2.0) / (std::numbers::pi * t);
  };
  return f(s.xi) * f(s.zeta);
}

/// y_l = (ell^2 / sqrt n) sum_p v_p exp(i pi (p1 xi_l + p2 zeta_l)).
///
/// This is the Born amplitude of the piecewise-constant object after dividing
/// out omega_l^2 / (4 pi) and the pixel form factor. Requires a zero border.
inline CVector forward_measure(const Image& v, const LinearOperator& op) {
  v.require_zero_border("forward_measure");
  if (op.cols() != v.m()) throw InvalidArgument("forward_measure: operator and image sizes differ");
  return op.apply(v.vec() * (v.spacing() * v.spacing()));
}

inline CVector forward_measure(const Image& v, const SamplingPlan& plan) {
  const SensingOperator op(plan, v.q());
  return forward_measure(v, op);
}

/// Raw Born amplitudes A_l recovered from normalized data: A_l = omega^2 g_l sqrt(n) y_l / (4 pi).
inline CVector raw_amplitudes(const CVector& y, const SamplingPlan& plan) {
  CVector a(y.size());
  const double rn = std::sqrt(static_cast<double>(plan.size()));
  for (std::size_t l = 0; l < plan.size(); ++l) {
    const Sample& s = plan[l];
    a(static_cast<Eigen::Index>(l)) =
        s.omega * s.omega * pixel_form_factor(s) * rn * y(static_cast<Eigen::Index>(l)) / (4.0 * std::numbers::pi);
  }
  return a;
}

/// Per-measurement lifting multipliers (exp(-i pi xi) - 1, exp(-i pi zeta) - 1).
inline std::pair<cplx, cplx> lift_multipliers(const Sample& s) {
  return {std::polar(1.0, -std::numbers::pi * s.xi) - 1.0, std::polar(1.0, -std::numbers::pi * s.zeta) - 1.0};
}

/// Y1 = ((exp(-i pi xi_l) - 1) y_l), Y2 = ((exp(-i pi zeta_l) - 1) y_l).
inline MultiVector lift_to_gradient_data(const CVector& y, const SamplingPlan& plan) {
  if (static_cast<std::size_t>(y.size()) != plan.size())
    throw InvalidArgument("lift_to_gradient_data: data length does not match plan");
  MultiVector out(y.size(), 2);
  for (std::size_t l = 0; l < plan.size(); ++l) {
    const auto [a, b] = lift_multipliers(plan[l]);
    const auto i = static_cast<Eigen::Index>(l);
    out(i, 0) = a * y(i);
    out(i, 1) = b * y(i);
  }
  return out;
}

struct NoisyData {
  CVector y;                  // noisy object-domain data
  CVector noise;              // realized e
  double eps_object = 0.0;    // ||e||_2
  double eps_gradient = 0.0;  // ||(E1, E2)||_{2,2}
  double eps_gradient_sum = 0.0;  // ||E1||_2 + ||E2||_2
};

/// Add circular complex Gaussian noise scaled to ||e|| = level ||y||.
inline NoisyData add_noise(const CVector& y, const SamplingPlan& plan, double relative_level, std::uint64_t seed) {
  if (relative_level < 0.0) throw InvalidArgument("add_noise: level must be nonnegative");
  NoisyData out;
  out.y = y;
  out.noise = CVector::Zero(y.size());
  if (relative_level == 0.0 || y.size() == 0) return out;
  Rng rng(seed);
  for (Eigen::Index l = 0; l < y.size(); ++l) out.noise(l) = rng.complex_normal();
  const double target = relative_level * y.norm();
  const double cur = out.noise.norm();
  if (cur > 0.0) out.noise *= target / cur;
  out.y = y + out.noise;
  out.eps_object = out.noise.norm();
  const MultiVector e = lift_to_gradient_data(out.noise, plan);
  out.eps_gradient = norm22(e);
  out.eps_gradient_sum = e.col(0).norm() + e.col(1).norm();
  return out;
}

/// Median of ||e|| for complex Gaussian noise with E||e||^2 = (level ||y||)^2.
inline double chi2_median_noise_norm(double relative_level, double y_norm, std::size_t n) {
  const double k = 2.0 * static_cast<double>(n);
  const double sigma2 = (relative_level * y_norm) * (relative_level * y_norm) / static_cast<double>(n);
  const double median = k * std::pow(1.0 - 2.0 / (9.0 * k), 3.0);
  return std::sqrt(sigma2 / 2.0 * median);
}

struct MeasurementSet {
  CVector y;
  MultiVector gradient_data;  // n x 2
  double eps_object = 0.0;
  double eps_gradient = 0.0;
  double eps_gradient_sum = 0.0;
  int q = 0;
  double ell = 1.0;
  Scheme scheme = Scheme::Backward;
  SamplingMode mode = SamplingMode::Continuous;
  std::uint64_t seed = 0;
  double noise_level = 0.0;
};

namespace detail {
inline std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}
}  // namespace detail

/// Writes `<stem>.json` (header) and `<stem>.csv` (y, Y1, Y2 as re,im pairs), each via a temp file.
inline void write_measurements(const std::string& stem, const MeasurementSet& ms) {
  nlohmann::json h = {{"n", ms.y.size()},
                      {"q", ms.q},
                      {"ell", ms.ell},
                      {"scheme", to_string(ms.scheme)},
                      {"mode", to_string(ms.mode)},
                      {"seed", ms.seed},
                      {"noise_level", ms.noise_level},
                      {"epsilon_object", ms.eps_object},
                      {"epsilon_gradient", ms.eps_gradient},
                      {"epsilon_gradient_sum", ms.eps_gradient_sum},
                      {"data_file", stem.substr(stem.find_last_of('/') + 1) + ".csv"}};
  std::ofstream hj(stem + ".json.tmp");
  hj << h.dump(2) << "\n";
  std::ofstream csv(stem + ".csv.tmp");
  csv << "y_re,y_im,Y1_re,Y1_im,Y2_re,Y2_im\n";
  for (Eigen::Index l = 0; l < ms.y.size(); ++l) {
    const cplx a = ms.y(l), b = ms.gradient_data(l, 0), c = ms.gradient_data(l, 1);
    csv << detail::fmt17(a.real()) << ',' << detail::fmt17(a.imag()) << ',' << detail::fmt17(b.real()) << ','
        << detail::fmt17(b.imag()) << ',' << detail::fmt17(c.real()) << ',' << detail::fmt17(c.imag()) << '\n';
  }
  hj.close();
  csv.close();
  if (!hj || !csv) throw Error("write_measurements: failed to write " + stem);
  std::filesystem::rename(stem + ".csv.tmp", stem + ".csv");
  std::filesystem::rename(stem + ".json.tmp", stem + ".json");
}

inline MeasurementSet read_measurements(const std::string& stem) {
  std::ifstream hj(stem + ".json");
  if (!hj) throw InvalidArgument("read_measurements: cannot open " + stem + ".json");
  const nlohmann::json h = nlohmann::json::parse(hj);
  MeasurementSet ms;
  const auto n = h.at("n").get<Eigen::Index>();
  ms.q = h.at("q").get<int>();
  ms.ell = h.at("ell").get<double>();
  ms.scheme = scheme_from_string(h.at("scheme").get<std::string>());
  ms.mode = mode_from_string(h.value("mode", std::string("continuous")));
  ms.seed = h.at("seed").get<std::uint64_t>();
  ms.noise_level = h.value("noise_level", 0.0);
  ms.eps_object = h.at("epsilon_object").get<double>();
  ms.eps_gradient = h.at("epsilon_gradient").get<double>();
  ms.eps_gradient_sum = h.value("epsilon_gradient_sum", 0.0);
  std::ifstream csv(stem + ".csv");
  if (!csv) throw InvalidArgument("read_measurements: cannot open " + stem + ".csv");
  std::string line;
  std::getline(csv, line);
  ms.y.resize(n);
  ms.gradient_data = MultiVector(n, 2);
  for (Eigen::Index l = 0; l < n; ++l) {
    if (!std::getline(csv, line)) throw InvalidArgument("read_measurements: truncated data file");
    std::stringstream ss(line);
    double v[6];
    for (double& x : v) {
      std::string cell;
      std::getline(ss, cell, ',');
      x = std::stod(cell);
    }
    ms.y(l) = {v[0], v[1]};
    ms.gradient_data(l, 0) = {v[2], v[3]};
    ms.gradient_data(l, 1) = {v[4], v[5]};
  }
  return ms;
}

}  // namespace cjs
