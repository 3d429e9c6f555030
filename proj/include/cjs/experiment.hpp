#pragma once

// End-to-end experiments: phantom -> plan -> operator -> data -> noise ->
// reconstruction -> metrics, with artifacts written atomically to disk, and
// noise sweeps with log-log slope fits.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "cjs/diagnostics.hpp"
#include "cjs/errors.hpp"
#include "cjs/grad_field.hpp"
#include "cjs/image_io.hpp"
#include "cjs/measurement.hpp"
#include "cjs/phantoms.hpp"
#include "cjs/sampling.hpp"
#include "cjs/sensing_operator.hpp"
#include "cjs/solver_bpdn.hpp"
#include "cjs/solver_omp.hpp"

namespace cjs {

struct PhantomSpec {
  std::string kind = "shapes";  // "shapes" or "shepp_logan"
  std::vector<Shape> shapes;
};

struct ExperimentConfig {
  PhantomSpec phantom;
  int q = 64;
  double ell = 0.0;  // 0 means 1/q
  Scheme scheme = Scheme::Backward;
  SamplingMode mode = SamplingMode::OnGrid;
  double gamma = 1.0;
  std::size_t n = 0;      // 0 means round(n_factor * s)
  double n_factor = 6.0;
  std::vector<double> noise_levels{0.0};
  std::vector<std::string> solvers{"tv"};  // any of tv, omp, l1
  TvSolveConfig tv;
  TvSolveConfig l1;
  std::size_t omp_max_support = 0;
  double delta2s = -1.0;  // known RIC for the bound record, negative if unknown
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  double spacing() const { return ell > 0.0 ? ell : 1.0 / q; }
};

inline nlohmann::json tv_config_to_json(const TvSolveConfig& c) {
  return {{"mode", c.mode == TvMode::Isotropic ? "isotropic" : "anisotropic"},
          {"algorithm", c.algorithm == TvAlgorithm::Auto ? "auto" : c.algorithm == TvAlgorithm::Admm ? "admm" : "primal_dual"},
          {"admm_rho", c.admm_rho},
          {"max_iter", c.max_iter},
          {"rel_tol", c.rel_tol},
          {"step_ratio", c.step_ratio},
          {"power_iters", c.power_iters},
          {"seed", c.seed}};
}

inline TvSolveConfig tv_config_from_json(const nlohmann::json& j, TvSolveConfig c = {}) {
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "isotropic") c.mode = TvMode::Isotropic;
    else if (m == "anisotropic") c.mode = TvMode::Anisotropic;
    else throw InvalidConfiguration("unknown TV mode '" + m + "'");
  }
  if (j.contains("algorithm")) {
    const auto a = j.at("algorithm").get<std::string>();
    if (a == "auto") c.algorithm = TvAlgorithm::Auto;
    else if (a == "admm") c.algorithm = TvAlgorithm::Admm;
    else if (a == "primal_dual") c.algorithm = TvAlgorithm::PrimalDual;
    else throw InvalidConfiguration("unknown TV algorithm '" + a + "'");
  }
  c.admm_rho = j.value("admm_rho", c.admm_rho);
  c.max_iter = j.value("max_iter", c.max_iter);
  c.rel_tol = j.value("rel_tol", c.rel_tol);
  c.step_ratio = j.value("step_ratio", c.step_ratio);
  c.power_iters = j.value("power_iters", c.power_iters);
  c.seed = j.value("seed", c.seed);
  if (c.max_iter < 1) throw InvalidConfiguration("max_iter must be at least 1");
  if (!(c.rel_tol > 0.0)) throw InvalidConfiguration("rel_tol must be positive");
  if (!(c.step_ratio >= 0.0)) throw InvalidConfiguration("step_ratio must be non-negative");
  return c;
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& s : c.phantom.shapes) shapes.push_back(shape_to_json(s));
  return {{"phantom", {{"kind", c.phantom.kind}, {"shapes", shapes}}},
          {"q", c.q},
          {"ell", c.spacing()},
          {"scheme", to_string(c.scheme)},
          {"mode", to_string(c.mode)},
          {"gamma", c.gamma},
          {"n", c.n},
          {"n_factor", c.n_factor},
          {"noise_levels", c.noise_levels},
          {"solvers", c.solvers},
          {"tv", tv_config_to_json(c.tv)},
          {"l1", tv_config_to_json(c.l1)},
          {"omp", {{"max_support", c.omp_max_support}}},
          {"delta2s", c.delta2s},
          {"seed", c.seed}};
}

inline void validate(const ExperimentConfig& c) {
  if (c.q < 3) throw InvalidConfiguration("q must be at least 3");
  if (c.ell < 0.0 || !std::isfinite(c.ell)) throw InvalidConfiguration("ell must be positive");
  if (c.phantom.kind != "shapes" && c.phantom.kind != "shepp_logan")
    throw InvalidConfiguration("unknown phantom kind '" + c.phantom.kind + "'");
  if (c.phantom.kind == "shepp_logan" && c.q < 32) throw InvalidConfiguration("shepp_logan needs q >= 32");
  if (c.n == 0 && !(c.n_factor > 0.0)) throw InvalidConfiguration("n or n_factor must be positive");
  if (c.gamma < 1.0) throw InvalidConfiguration("gamma must be at least 1");
  if (c.noise_levels.empty()) throw InvalidConfiguration("noise_levels must not be empty");
  for (double l : c.noise_levels)
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidConfiguration("noise levels must be nonnegative");
  if (c.solvers.empty()) throw InvalidConfiguration("no solver selected");
  for (const auto& s : c.solvers)
    if (s != "tv" && s != "omp" && s != "l1") throw InvalidConfiguration("unknown solver '" + s + "'");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("phantom")) {
      const auto& p = j.at("phantom");
      c.phantom.kind = p.value("kind", c.phantom.kind);
      if (p.contains("shapes"))
        for (const auto& s : p.at("shapes")) c.phantom.shapes.push_back(shape_from_json(s));
    }
    c.q = j.value("q", c.q);
    c.ell = j.value("ell", c.ell);
    if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
    c.gamma = j.value("gamma", c.gamma);
    c.n = j.value("n", c.n);
    c.n_factor = j.value("n_factor", c.n_factor);
    if (j.contains("noise_levels")) c.noise_levels = j.at("noise_levels").get<std::vector<double>>();
    if (j.contains("solvers")) c.solvers = j.at("solvers").get<std::vector<std::string>>();
    if (j.contains("tv")) c.tv = tv_config_from_json(j.at("tv"));
    if (j.contains("l1")) c.l1 = tv_config_from_json(j.at("l1"));
    if (j.contains("omp")) c.omp_max_support = j.at("omp").value("max_support", c.omp_max_support);
    c.delta2s = j.value("delta2s", c.delta2s);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfiguration(std::string("malformed config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidConfiguration(e.what());
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfiguration("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfiguration("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// Writes through `writer(tmp)` and renames tmp onto `path`.
inline void write_atomic(const std::filesystem::path& path, const std::function<void(const std::string&)>& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  writer(tmp.string());
  std::filesystem::rename(tmp, path);
}

inline void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j) {
  write_atomic(path, [&](const std::string& tmp) {
    std::ofstream out(tmp);
    out << j.dump(2) << "\n";
    if (!out) throw Error("cannot write " + tmp);
  });
}

/// Everything shared by the cells of one experiment.
struct Pipeline {
  ExperimentConfig cfg;
  Image phantom;
  GradientField gradient;  // ell^2 grad V
  std::size_t sparsity = 0;
  SchemeConfig scheme;
  SamplingPlan plan;
  std::shared_ptr<SensingOperator> op;
  CVector y;  // clean data
};

inline Image make_phantom(const ExperimentConfig& cfg) {
  if (cfg.phantom.kind == "shepp_logan") return shepp_logan(cfg.q, cfg.spacing());
  return piecewise_phantom(cfg.phantom.shapes, cfg.q, cfg.spacing());
}

inline Pipeline prepare(const ExperimentConfig& cfg) {
  validate(cfg);
  Pipeline p;
  p.cfg = cfg;
  p.phantom = make_phantom(cfg);
  p.gradient = discrete_gradient(p.phantom);
  p.sparsity = row_support(p.gradient).size();
  std::size_t n = cfg.n;
  if (n == 0) n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.n_factor * static_cast<double>(p.sparsity))));
  p.scheme = SchemeConfig::matched(cfg.scheme, n, cfg.spacing(), cfg.mode, cfg.seed, cfg.q, cfg.gamma);
  try {
    p.plan = draw_sampling_plan(p.scheme);
  } catch (const InvalidArgument& e) {
    throw InvalidConfiguration(e.what());
  }
  p.op = build_sensing_operator(p.plan, cfg.q, p.scheme);
  p.y = forward_measure(p.phantom, *p.op);
  return p;
}

struct MetricsRecord {
  std::string solver;
  double noise_level = 0.0;
  std::string status = "ok";  // ok, max_iter, or error: <message>
  double eps_object = 0.0;
  double eps_gradient = 0.0;
  double rel_l2_object = 0.0;
  double rel_tv = 0.0;
  double gradient_rel_l22 = 0.0;
  double gradient_error_22 = 0.0;
  double object_error_l2 = 0.0;
  double support_jaccard = 0.0;
  int iterations = 0;
  nlohmann::json bound = nullptr;  // bound check record for the solver, if any
  double runtime_seconds = 0.0;    // kept out of the metrics file
  std::optional<Image> reconstruction;
  nlohmann::json report = nullptr;
};

inline nlohmann::json record_to_json(const MetricsRecord& r) {
  return {{"solver", r.solver},
          {"noise_level", r.noise_level},
          {"status", r.status},
          {"epsilon_object", r.eps_object},
          {"epsilon_gradient", r.eps_gradient},
          {"rel_l2_object", r.rel_l2_object},
          {"rel_tv", r.rel_tv},
          {"gradient_rel_l22", r.gradient_rel_l22},
          {"gradient_error_22", r.gradient_error_22},
          {"object_error_l2", r.object_error_l2},
          {"support_jaccard", r.support_jaccard},
          {"iterations", r.iterations},
          {"bound", r.bound}};
}

/// Error metrics of a reconstruction against the pipeline's phantom.
inline void fill_metrics(const Pipeline& p, const Image& vhat, MetricsRecord& rec) {
  const Image diff = vhat - p.phantom;
  const double vn = p.phantom.norm2();
  rec.object_error_l2 = diff.norm2();
  rec.rel_l2_object = vn > 0.0 ? rec.object_error_l2 / vn : rec.object_error_l2;
  const double tv = tv_norm(p.phantom);
  rec.rel_tv = tv > 0.0 ? tv_norm(diff) / tv : tv_norm(diff);
  const GradientField ghat = discrete_gradient(vhat);
  rec.gradient_error_22 = norm22(ghat - p.gradient);
  const double gn = norm22(p.gradient);
  rec.gradient_rel_l22 = gn > 0.0 ? rec.gradient_error_22 / gn : rec.gradient_error_22;
  const double tol = 1e-3 * norm_inf2(p.gradient);
  rec.support_jaccard = jaccard(row_support(ghat, tol), row_support(p.gradient, tol));
}

inline std::uint64_t noise_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL; }

/// One (solver, noise level) cell. Failures are recorded, never thrown.
inline MetricsRecord run_cell(const Pipeline& p, const std::string& solver, double level) {
  const auto t0 = std::chrono::steady_clock::now();
  MetricsRecord rec;
  rec.solver = solver;
  rec.noise_level = level;
  try {
    const NoisyData nd = add_noise(p.y, p.plan, level, noise_seed(p.cfg.seed));
    rec.eps_object = nd.eps_object;
    rec.eps_gradient = nd.eps_gradient;
    const double ell = p.cfg.spacing();
    const int q = p.cfg.q;
    const std::vector<OperatorPtr> ops{p.op};

    if (solver == "tv") {
      TvSolveConfig tc = p.cfg.tv;
      tc.epsilon = nd.eps_object;
      auto [vhat, rep] = solve_tvmin(*p.op, nd.y, q, ell, tc);
      rec.iterations = rep.iterations;
      if (rep.stopping_reason == StopReason::MaxIter) rec.status = "max_iter";
      rec.report = report_to_json(rep);
      fill_metrics(p, vhat, rec);
      const MultiVector ydata = lift_to_gradient_data(nd.y, p.plan);
      const GradientField ghat = discrete_gradient(vhat);
      const double eps_eff = std::max(norm22(ydata - apply_channels(ops, p.gradient)),
                                      norm22(ydata - apply_channels(ops, ghat)));
      if (p.cfg.delta2s >= 0.0) {
        const BpBound b = check_bp_bound(p.gradient, ghat, std::max<std::size_t>(p.sparsity, 1), eps_eff, p.cfg.delta2s);
        rec.bound = {{"kind", "tv_rip"}, {"delta2s", b.delta2s}, {"epsilon", eps_eff}, {"e0", b.e0},
                     {"bound", b.bound}, {"error", b.error}, {"hypothesis_ok", b.hypothesis_ok}, {"holds", b.holds}};
      } else {
        rec.bound = {{"kind", "tv_rip"}, {"delta2s", nullptr}, {"epsilon", eps_eff}};
      }
      rec.reconstruction = std::move(vhat);
    } else if (solver == "omp") {
      const MultiVector ydata = lift_to_gradient_data(nd.y, p.plan);
      OmpConfig oc;
      double ysum = 0.0;
      for (Eigen::Index c = 0; c < 2; ++c) ysum += ydata.col(c).norm();
      oc.epsilon = std::max(std::numbers::sqrt2 * nd.eps_gradient, 1e-10 * ysum);
      oc.max_support = p.cfg.omp_max_support > 0 ? p.cfg.omp_max_support
                                                 : std::min<std::size_t>(p.plan.size(), static_cast<std::size_t>(q) * q);
      const OmpResult omp = omp_cjs(ops, ydata, oc);
      rec.iterations = static_cast<int>(omp.trace.selected.size());
      const RefitResult refit = constrained_ls_refit(ops, ydata, omp.support);
      const LevelSetResult ls = level_set_reconstruct(refit.estimate, ell, Anchor{0, 0, 0.0});
      rec.report = trace_to_json(omp.trace);
      rec.report["refit_singular"] = refit.singular;
      rec.report["level_set_lsq"] = ls.used_lsq;
      rec.report["components"] = ls.components;
      fill_metrics(p, ls.image, rec);
      const double mu = mutual_coherence(*p.op);
      const OmpCondition cond = check_omp_condition(p.sparsity, mu, nd.eps_gradient, p.gradient, 2);
      nlohmann::json b = {{"kind", "omp"}, {"mu_max", mu}, {"x_min", cond.x_min}, {"threshold", cond.threshold},
                          {"condition_holds", cond.holds}, {"support_exact", omp.support == row_support(p.gradient)},
                          {"error", norm22(omp.estimate - p.gradient)}};
      if (mu * (static_cast<double>(p.sparsity) - 1.0) < 1.0 && p.sparsity > 0)
        b["bound"] = omp_error_bound(nd.eps_gradient, mu, p.sparsity);
      rec.bound = b;
      rec.reconstruction = ls.image;
    } else if (solver == "l1") {
      TvSolveConfig lc = p.cfg.l1;
      MultiVector ydata(CMatrix(nd.y));
      auto [xhat, rep] = solve_bpdn_rowsparse(ops, ydata, nd.eps_object, lc);
      rec.iterations = rep.iterations;
      if (rep.stopping_reason == StopReason::MaxIter) rec.status = "max_iter";
      rec.report = report_to_json(rep);
      const Image vhat = Image::from_vector(CVector(xhat.col(0) / (ell * ell)), q, ell);
      fill_metrics(p, vhat, rec);
      rec.reconstruction = vhat;
    } else {
      throw InvalidConfiguration("unknown solver '" + solver + "'");
    }
  } catch (const InvalidConfiguration&) {
    throw;
  } catch (const std::exception& e) {
    rec.status = std::string("error: ") + e.what();
  }
  rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

/// Runs `count` independent jobs on up to `threads` workers.
inline void run_parallel(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex mtx;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(mtx);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct ExperimentResult {
  nlohmann::json metrics;  // deterministic: config, sizes and records
  nlohmann::json timing;   // wall-clock seconds per cell
  std::vector<MetricsRecord> records;
};

inline std::string cell_name(const std::string& solver, std::size_t level_index) {
  return solver + "_" + std::to_string(level_index);
}

/// Runs every (solver, noise level) cell and writes artifacts under cfg.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads = 1, bool write = true) {
  const Pipeline p = prepare(cfg);
  const std::filesystem::path dir(cfg.out_dir);
  const nlohmann::json cj = config_to_json(cfg);

  std::vector<std::pair<std::string, std::size_t>> cells;
  for (const auto& s : cfg.solvers)
    for (std::size_t k = 0; k < cfg.noise_levels.size(); ++k) cells.emplace_back(s, k);
  ExperimentResult res;
  res.records.resize(cells.size());
  run_parallel(cells.size(), threads, [&](std::size_t i) {
    res.records[i] = run_cell(p, cells[i].first, cfg.noise_levels[cells[i].second]);
  });

  res.metrics = {{"config", cj},
                 {"sparsity", p.sparsity},
                 {"n", p.plan.size()},
                 {"m", p.phantom.m()},
                 {"records", nlohmann::json::array()}};
  res.timing = nlohmann::json::object();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    res.metrics["records"].push_back(record_to_json(res.records[i]));
    res.timing[cell_name(cells[i].first, cells[i].second)] = res.records[i].runtime_seconds;
  }

  if (write) {
    write_json_atomic(dir / "config.json", cj);
    write_atomic(dir / "phantom.csv", [&](const std::string& t) { write_image_csv(t, p.phantom); });
    write_atomic(dir / "phantom.pgm", [&](const std::string& t) { write_pgm(t, p.phantom); });
    write_json_atomic(dir / "plan.json", {{"config", cj}, {"samples", plan_to_json(p.plan)}});
    for (std::size_t k = 0; k < cfg.noise_levels.size(); ++k) {
      const NoisyData nd = add_noise(p.y, p.plan, cfg.noise_levels[k], noise_seed(cfg.seed));
      MeasurementSet ms;
      ms.y = nd.y;
      ms.gradient_data = lift_to_gradient_data(nd.y, p.plan);
      ms.eps_object = nd.eps_object;
      ms.eps_gradient = nd.eps_gradient;
      ms.eps_gradient_sum = nd.eps_gradient_sum;
      ms.q = cfg.q;
      ms.ell = cfg.spacing();
      ms.scheme = cfg.scheme;
      ms.mode = cfg.mode;
      ms.seed = cfg.seed;
      ms.noise_level = cfg.noise_levels[k];
      write_measurements((dir / ("measurements_" + std::to_string(k))).string(), ms);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& r = res.records[i];
      const std::string name = cell_name(cells[i].first, cells[i].second);
      if (r.reconstruction) {
        write_atomic(dir / ("recon_" + name + ".csv"), [&](const std::string& t) { write_image_csv(t, *r.reconstruction); });
        write_atomic(dir / ("recon_" + name + ".pgm"), [&](const std::string& t) { write_pgm(t, *r.reconstruction); });
      }
      write_json_atomic(dir / ("report_" + name + ".json"),
                        {{"config", cj}, {"record", record_to_json(r)}, {"report", r.report}});
    }
    write_json_atomic(dir / "metrics.json", res.metrics);
    write_json_atomic(dir / "timing.json", res.timing);
  }
  return res;
}

/// Least-squares slope of log(y) against log(x) over pairs with x, y > 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InvalidArgument("loglog_slope: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++k;
  }
  if (k < 2) throw InvalidArgument("loglog_slope: need at least two positive points");
  const double den = static_cast<double>(k) * sxx - sx * sx;
  if (den == 0.0) throw DivisionByZero("loglog_slope: abscissae coincide");
  return (static_cast<double>(k) * sxy - sx * sy) / den;
}

struct SweepTable {
  std::vector<MetricsRecord> rows;
  double gradient_slope = std::numeric_limits<double>::quiet_NaN();  // gradient error vs eps
  double object_slope = std::numeric_limits<double>::quiet_NaN();    // object error vs eps
};

inline nlohmann::json sweep_to_json(const SweepTable& t, const ExperimentConfig& cfg) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) rows.push_back(record_to_json(r));
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"config", config_to_json(cfg)},
          {"rows", rows},
          {"gradient_slope", num(t.gradient_slope)},
          {"object_slope", num(t.object_slope)}};
}

/// Same plan and noise direction at every level; slopes use the realized
/// gradient-domain epsilon and skip noiseless rows.
inline SweepTable noise_sweep(const ExperimentConfig& cfg, const std::vector<double>& levels, const std::string& solver,
                              int threads = 1) {
  if (levels.size() < 2) throw InvalidConfiguration("noise_sweep: need at least two levels");
  const Pipeline p = prepare(cfg);
  SweepTable t;
  t.rows.resize(levels.size());
  run_parallel(levels.size(), threads, [&](std::size_t i) { t.rows[i] = run_cell(p, solver, levels[i]); });
  std::vector<double> eps, ge, oe;
  for (const auto& r : t.rows) {
    if (r.status.rfind("error", 0) == 0) continue;
    eps.push_back(r.eps_gradient);
    ge.push_back(r.gradient_error_22);
    oe.push_back(r.object_error_l2);
  }
  try {
    t.gradient_slope = loglog_slope(eps, ge);
    t.object_slope = loglog_slope(eps, oe);
  } catch (const Error&) {
    // fewer than two usable rows; slopes stay NaN
  }
  return t;
}

}  // namespace cjs
