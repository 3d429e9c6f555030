// cjs: command-line driver for phantoms, sampling plans, measurements,
// reconstructions, diagnostics, noise sweeps and replays.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cjs/cjs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitNotConverged = 3;

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 1;
  bool strict = false;
};

struct Overrides {
  int q = 0;
  std::size_t n = 0;
  double n_factor = 0.0;
  std::string scheme;
  std::string mode;
  std::string phantom;
  std::vector<double> noise;
};

void add_overrides(CLI::App* sub, Overrides& o) {
  sub->add_option("--q", o.q, "grid side");
  sub->add_option("--n", o.n, "number of measurements");
  sub->add_option("--n-factor", o.n_factor, "measurements per unit of gradient sparsity");
  sub->add_option("--scheme", o.scheme, "backward or forward")->check(CLI::IsMember({"backward", "forward"}));
  sub->add_option("--mode", o.mode, "continuous or on_grid")->check(CLI::IsMember({"continuous", "on_grid"}));
  sub->add_option("--phantom", o.phantom, "shapes or shepp_logan")->check(CLI::IsMember({"shapes", "shepp_logan"}));
  sub->add_option("--noise", o.noise, "relative noise levels")->delimiter(',');
}

cjs::ExperimentConfig default_config() {
  cjs::ExperimentConfig c;
  c.phantom.shapes = {cjs::Shape::rect(0.2, 0.5, 0.25, 0.6, 1.0), cjs::Shape::disk(0.65, 0.6, 0.15, {0.5, 0.0}),
                      cjs::Shape::rect(0.55, 0.8, 0.15, 0.35, {-0.3, 0.2})};
  return c;
}

cjs::ExperimentConfig resolve(const Globals& g, const Overrides& o) {
  cjs::ExperimentConfig c = g.config.empty() ? default_config() : cjs::load_config(g.config);
  if (!g.config.empty() && !nlohmann::json::parse(std::ifstream(g.config)).contains("phantom"))
    c.phantom.shapes = default_config().phantom.shapes;
  if (o.phantom == "shepp_logan") c.phantom.kind = "shepp_logan";
  if (o.phantom == "shapes") {
    c.phantom.kind = "shapes";
    if (c.phantom.shapes.empty()) c.phantom.shapes = default_config().phantom.shapes;
  }
  if (o.q > 0) c.q = o.q;
  if (o.n > 0) c.n = o.n;
  if (o.n_factor > 0.0) {
    c.n_factor = o.n_factor;
    c.n = 0;
  }
  if (!o.scheme.empty()) c.scheme = cjs::scheme_from_string(o.scheme);
  if (!o.mode.empty()) c.mode = cjs::mode_from_string(o.mode);
  if (!o.noise.empty()) c.noise_levels = o.noise;
  if (g.seed_set) c.seed = g.seed;
  if (!g.out.empty()) c.out_dir = g.out;
  cjs::validate(c);
  return c;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cjs::InvalidConfiguration("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw cjs::InvalidConfiguration(path + " is not valid JSON: " + e.what());
  }
}

int finish_cells(const cjs::ExperimentResult& res, bool strict) {
  int code = 0;
  for (const auto& r : res.records) {
    std::printf("%-4s noise=%-6g status=%-10s rel_l2=%.3e rel_tv=%.3e grad_rel=%.3e jaccard=%.3f iters=%d\n",
                r.solver.c_str(), r.noise_level, r.status.c_str(), r.rel_l2_object, r.rel_tv, r.gradient_rel_l22,
                r.support_jaccard, r.iterations);
    if (r.status.rfind("error", 0) == 0) code = std::max(code, 1);
    else if (strict && r.status != "ok") code = kExitNotConverged;
  }
  return code;
}

int cmd_phantom(const Globals& g, const Overrides& o) {
  const auto cfg = resolve(g, o);
  const cjs::Image v = cjs::make_phantom(cfg);
  const fs::path dir(cfg.out_dir);
  cjs::write_atomic(dir / "phantom.csv", [&](const std::string& t) { cjs::write_image_csv(t, v); });
  cjs::write_atomic(dir / "phantom.pgm", [&](const std::string& t) { cjs::write_pgm(t, v); });
  const auto s = cjs::row_support(cjs::discrete_gradient(v)).size();
  cjs::write_json_atomic(dir / "phantom.json", {{"config", cjs::config_to_json(cfg)}, {"q", cfg.q}, {"ell", cfg.spacing()},
                                                {"gradient_sparsity", s}, {"tv", cjs::tv_norm(v)}});
  std::printf("phantom q=%d sparsity=%zu -> %s\n", cfg.q, s, dir.c_str());
  return 0;
}

int cmd_plan(const Globals& g, const Overrides& o) {
  const auto p = cjs::prepare(resolve(g, o));
  const auto check = cjs::check_plan(p.plan, p.scheme);
  const fs::path dir(p.cfg.out_dir);
  cjs::write_json_atomic(dir / "plan.json", {{"config", cjs::config_to_json(p.cfg)},
                                             {"n", p.plan.size()},
                                             {"invariants_ok", check.ok},
                                             {"violations", check.violations},
                                             {"samples", cjs::plan_to_json(p.plan)}});
  std::printf("plan n=%zu invariants=%s -> %s\n", p.plan.size(), check.ok ? "ok" : "violated", dir.c_str());
  return check.ok ? 0 : 1;
}

int cmd_measure(const Globals& g, const Overrides& o) {
  const auto p = cjs::prepare(resolve(g, o));
  const fs::path dir(p.cfg.out_dir);
  fs::create_directories(dir);
  cjs::write_json_atomic(dir / "plan.json", {{"config", cjs::config_to_json(p.cfg)}, {"samples", cjs::plan_to_json(p.plan)}});
  for (std::size_t k = 0; k < p.cfg.noise_levels.size(); ++k) {
    const auto nd = cjs::add_noise(p.y, p.plan, p.cfg.noise_levels[k], cjs::noise_seed(p.cfg.seed));
    cjs::MeasurementSet ms;
    ms.y = nd.y;
    ms.gradient_data = cjs::lift_to_gradient_data(nd.y, p.plan);
    ms.eps_object = nd.eps_object;
    ms.eps_gradient = nd.eps_gradient;
    ms.eps_gradient_sum = nd.eps_gradient_sum;
    ms.q = p.cfg.q;
    ms.ell = p.cfg.spacing();
    ms.scheme = p.cfg.scheme;
    ms.mode = p.cfg.mode;
    ms.seed = p.cfg.seed;
    ms.noise_level = p.cfg.noise_levels[k];
    cjs::write_measurements((dir / ("measurements_" + std::to_string(k))).string(), ms);
    std::printf("measurements noise=%g n=%zu eps=%.6g -> %s\n", ms.noise_level, p.plan.size(), ms.eps_object,
                dir.c_str());
  }
  return 0;
}

int cmd_reconstruct(const Globals& g, const Overrides& o, const std::string& solver) {
  auto cfg = resolve(g, o);
  cfg.solvers = {solver};
  const auto res = cjs::run_experiment(cfg, g.threads);
  return finish_cells(res, g.strict);
}

int cmd_diagnose(const Globals& g, const Overrides& o, long ric_order, std::size_t ric_trials) {
  const auto p = cjs::prepare(resolve(g, o));
  const auto check = cjs::check_plan(p.plan, p.scheme);
  const double mu = cjs::mutual_coherence(*p.op);
  json out = {{"config", cjs::config_to_json(p.cfg)},
              {"n", p.plan.size()},
              {"m", p.op->cols()},
              {"gradient_sparsity", p.sparsity},
              {"mutual_coherence", mu},
              {"invariants_ok", check.ok},
              {"max_identity_error", check.max_identity_error},
              {"violations", check.violations}};
  if (ric_order > 0) {
    if (p.op->cols() > cjs::kExplicitBudget)
      throw cjs::InvalidConfiguration("RIC estimation needs m <= " + std::to_string(cjs::kExplicitBudget));
    out["ric_order"] = ric_order;
    out["ric_trials"] = ric_trials;
    out["ric_lower_bound"] = cjs::ric_lower_bound(*p.op, ric_order, ric_trials, p.cfg.seed);
  }
  cjs::write_json_atomic(fs::path(p.cfg.out_dir) / "diagnostics.json", out);
  std::printf("n=%zu m=%ld mu=%.6f invariants=%s", p.plan.size(), static_cast<long>(p.op->cols()), mu,
              check.ok ? "ok" : "violated");
  if (ric_order > 0) std::printf(" delta_%ld>=%.6f", ric_order, out["ric_lower_bound"].get<double>());
  std::printf("\n");
  return 0;
}

int cmd_sweep(const Globals& g, const Overrides& o, const std::string& solver) {
  auto cfg = resolve(g, o);
  if (o.noise.empty() && cfg.noise_levels.size() < 2) cfg.noise_levels = {0.01, 0.05, 0.10};
  const auto t = cjs::noise_sweep(cfg, cfg.noise_levels, solver, g.threads);
  cjs::write_json_atomic(fs::path(cfg.out_dir) / "sweep.json", cjs::sweep_to_json(t, cfg));
  for (const auto& r : t.rows)
    std::printf("noise=%-6g eps_grad=%.4e grad_err=%.4e obj_err=%.4e status=%s\n", r.noise_level, r.eps_gradient,
                r.gradient_error_22, r.object_error_l2, r.status.c_str());
  std::printf("slope gradient=%.3f object=%.3f\n", t.gradient_slope, t.object_slope);
  int code = 0;
  for (const auto& r : t.rows) {
    if (r.status.rfind("error", 0) == 0) code = std::max(code, 1);
    else if (g.strict && r.status != "ok") code = kExitNotConverged;
  }
  return code;
}

int cmd_replay(const Globals& g, const std::string& metrics_path) {
  const json stored = read_json(metrics_path);
  if (!stored.contains("config")) throw cjs::InvalidConfiguration(metrics_path + " has no embedded config");
  auto cfg = cjs::config_from_json(stored.at("config"));
  const auto res = cjs::run_experiment(cfg, g.threads, false);
  std::ifstream in(metrics_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const bool same = buf.str() == res.metrics.dump(2) + "\n";
  std::printf("replay %s\n", same ? "identical" : "differs");
  if (!g.out.empty()) cjs::write_json_atomic(fs::path(g.out) / "metrics.json", res.metrics);
  return same ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint-sparsity imaging from Born scattering data"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) {
    g.seed = s;
    g.seed_set = true;
  }, "random seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--threads", g.threads, "worker threads for independent cells")->check(CLI::PositiveNumber);
  app.add_flag("--strict", g.strict, "exit with status 3 when a solver stops at max_iter");

  Overrides o;
  auto* phantom = app.add_subcommand("phantom", "rasterize the configured phantom");
  auto* plan = app.add_subcommand("plan", "draw a sampling plan and check its invariants");
  auto* measure = app.add_subcommand("measure", "simulate object and gradient data");
  auto* rtv = app.add_subcommand("reconstruct-tv", "TV-min reconstruction");
  auto* romp = app.add_subcommand("reconstruct-omp", "joint-sparse OMP with refit and level sets");
  auto* rl1 = app.add_subcommand("reconstruct-l1", "plain L1 on the object");
  auto* diag = app.add_subcommand("diagnose", "coherence, RIC lower bound and plan invariants");
  auto* sweep = app.add_subcommand("sweep", "noise sweep with slope fits");
  auto* replay = app.add_subcommand("replay", "rerun a metrics file and compare byte for byte");
  for (auto* s : {phantom, plan, measure, rtv, romp, rl1, diag, sweep}) add_overrides(s, o);

  long ric_order = 0;
  std::size_t ric_trials = 200;
  diag->add_option("--ric-order", ric_order, "order k of the RIC lower bound (0 skips it)");
  diag->add_option("--ric-trials", ric_trials, "random supports for the RIC lower bound");
  std::string sweep_solver = "tv";
  sweep->add_option("--solver", sweep_solver, "tv, omp or l1")->check(CLI::IsMember({"tv", "omp", "l1"}));
  std::string metrics_path;
  replay->add_option("metrics", metrics_path, "metrics.json of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (*phantom) return cmd_phantom(g, o);
    if (*plan) return cmd_plan(g, o);
    if (*measure) return cmd_measure(g, o);
    if (*rtv) return cmd_reconstruct(g, o, "tv");
    if (*romp) return cmd_reconstruct(g, o, "omp");
    if (*rl1) return cmd_reconstruct(g, o, "l1");
    if (*diag) return cmd_diagnose(g, o, ric_order, ric_trials);
    if (*sweep) return cmd_sweep(g, o, sweep_solver);
    if (*replay) return cmd_replay(g, metrics_path);
  } catch (const cjs::InvalidConfiguration& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const cjs::InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
