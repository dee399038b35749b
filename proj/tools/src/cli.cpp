#include "tasep/cli.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "tasep/experiment.hpp"
#include "tasep/io.hpp"
#include "tasep/lpp.hpp"
#include "tasep/parallel.hpp"
#include "tasep/sim.hpp"
#include "tasep/twophase.hpp"
#include "tasep/variational.hpp"

namespace tasep::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double x) { return fmt::format("{:.10g}", x); }

std::uint64_t env_seed() {
  if (const char* s = std::getenv("TASEP_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && end != s) return v;
    throw std::runtime_error(std::string("TASEP_SEED must be a nonnegative integer, got '") + s + "'");
  }
  return 1;
}

std::vector<double> grid_points(const std::string& spec) {
  const auto g = io::parse_grid(spec);
  std::vector<double> xs;
  for (std::size_t k = 0; k < g.size(); ++k) xs.push_back(g.at(k));
  return xs;
}

struct SimulateArgs {
  std::string speed, rho0, bins, initial = "bernoulli", out_dir, snapshot;
  std::int64_t n = 0;
  double t = 0;
  int reps = 1;
  std::vector<double> current_at;
};

int simulate(const SimulateArgs& a, std::uint64_t seed, int jobs, std::ostream& out) {
  const auto speed = io::load_speed(a.speed);
  const auto rho0 = io::load_initial_profile(a.rho0);
  const auto edges = grid_points(a.bins);
  if (edges.size() < 2) throw std::runtime_error("--bins needs at least one bin");
  std::vector<double> at = a.current_at;
  if (at.empty()) at.assign(edges.begin(), edges.end() - 1);

  sim::SimConfig base;
  base.n = a.n;
  base.speed = speed;
  base.rho0 = rho0;
  base.t_end = a.t;
  base.initial = a.initial == "deterministic" ? sim::InitialKind::Deterministic : sim::InitialKind::Bernoulli;
  const double lo = std::min(edges.front(), *std::min_element(at.begin(), at.end()));
  const double hi = std::max(edges.back(), *std::max_element(at.begin(), at.end()));
  base.observe = {{lo, hi}};
  base.window = sim::window_for(a.n, speed, a.t, lo, hi);

  const auto reps = static_cast<std::size_t>(a.reps);
  std::vector<std::string> dens(reps), curr(reps);
  parallel_for(reps, jobs, [&](std::size_t r) {
    auto cfg = base;
    cfg.seed = seed + r;
    const auto snap = sim::run(cfg, {a.t}).front();
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
      const double d = sim::empirical_density(snap, edges[b], edges[b + 1], a.n) / (edges[b + 1] - edges[b]);
      dens[r] += fmt::format("{},{},{},{}\n", r, num(edges[b]), num(edges[b + 1]), num(d));
    }
    for (double x : at) {
      const auto site = static_cast<std::int64_t>(std::floor(x * static_cast<double>(a.n)));
      curr[r] += fmt::format("{},{},{}\n", r, site, snap.current(site));
    }
    if (!a.snapshot.empty()) sim::write_snapshot(snap, fmt::format("{}.rep{}.bin", a.snapshot, r));
  });

  std::string density = "rep,bin_lo,bin_hi,density\n", current = "rep,site,current\n";
  for (std::size_t r = 0; r < reps; ++r) {
    density += dens[r];
    current += curr[r];
  }
  if (a.out_dir.empty()) {
    out << density << "\n" << current;
  } else {
    fs::create_directories(a.out_dir);
    std::ofstream(fs::path(a.out_dir) / "density.csv") << density;
    std::ofstream(fs::path(a.out_dir) / "current.csv") << current;
  }
  return 0;
}

struct LppArgs {
  std::string speed, constrain;
  double x = 0, y = 0, q = 0;
  std::int64_t n = 0;
  int reps = 1;
};

int lpp_cmd(const LppArgs& a, std::uint64_t seed, int jobs, std::ostream& out) {
  const auto speed = io::load_speed(a.speed);
  std::optional<std::pair<double, double>> constrain;
  if (!a.constrain.empty()) {
    const auto comma = a.constrain.find(',');
    if (comma == std::string::npos) throw std::runtime_error("--constrain expects x0,x1");
    constrain = {std::stod(a.constrain.substr(0, comma)), std::stod(a.constrain.substr(comma + 1))};
  }
  const auto est = lpp::scaled_limit_estimate(a.x, a.y, a.n, a.reps, speed, a.q, seed, jobs, constrain);
  out << "n,rep,seed,T_over_n\n";
  for (std::size_t r = 0; r < est.samples.size(); ++r)
    out << fmt::format("{},{},{},{}\n", a.n, r, est.seeds[r], num(est.samples[r]));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"TASEP with discontinuous jump rates: simulation, last-passage percolation and hydrodynamic limits",
               "tasep"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(std::string("Default seed comes from $TASEP_SEED (else 1).\n\n") + std::string(experiment::schema()));
  int jobs = 1;
  std::optional<std::uint64_t> seed_opt;
  app.add_option("--jobs", jobs, "Worker threads for replicas")->check(CLI::PositiveNumber);

  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed_opt, "Base seed; replica r uses seed + r"); };

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo TASEP run; CSV rep,bin_lo,bin_hi,density and rep,site,current");
  simulate_cmd->add_option("--speed", sa.speed, "Speed JSON file")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--rho0", sa.rho0, "Initial density JSON file or const:<rho>")->required();
  simulate_cmd->add_option("--n", sa.n, "Scaling parameter")->required()->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--t", sa.t, "Macroscopic time")->required()->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--bins", sa.bins, "Bin edges x0:x1:dx")->required();
  simulate_cmd->add_option("--reps", sa.reps, "Replicas")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--initial", sa.initial, "bernoulli or deterministic")
      ->check(CLI::IsMember({"bernoulli", "deterministic"}));
  simulate_cmd->add_option("--current-at", sa.current_at, "Macroscopic positions a for J at floor(na)");
  simulate_cmd->add_option("--out-dir", sa.out_dir, "Write density.csv and current.csv here instead of stdout");
  simulate_cmd->add_option("--snapshot", sa.snapshot, "Binary snapshot prefix, one file per replica");
  add_seed(simulate_cmd);

  LppArgs la;
  auto* lpp_sub = app.add_subcommand("lpp", "Wedge last-passage estimates n^-1 T(nx, ny); CSV n,rep,seed,T_over_n");
  lpp_sub->add_option("--speed", la.speed, "Speed JSON file")->required()->check(CLI::ExistingFile);
  lpp_sub->add_option("--x", la.x, "Wedge x")->required();
  lpp_sub->add_option("--y", la.y, "Wedge y")->required();
  lpp_sub->add_option("--n", la.n, "Scaling parameter")->required()->check(CLI::PositiveNumber);
  lpp_sub->add_option("--reps", la.reps, "Replicas")->check(CLI::PositiveNumber);
  lpp_sub->add_option("--q", la.q, "Shift q (weights use c(i/n - q))");
  lpp_sub->add_option("--constrain", la.constrain, "Keep paths within columns x0,x1 (macroscopic)");
  add_seed(lpp_sub);

  auto* var = app.add_subcommand("variational", "Numerical variational formulas");
  var->require_subcommand(1);
  std::string v_speed, v_rho0, v_grid;
  double v_x = 0, v_y = 0, v_q = 0, v_t = 1, v_h = 1e-4;
  auto* gq = var->add_subcommand("gamma-q", "Gamma^q(x, y) and a maximising path as JSON");
  gq->add_option("--speed", v_speed, "Speed JSON file")->required()->check(CLI::ExistingFile);
  gq->add_option("--q", v_q, "Shift q");
  gq->add_option("--x", v_x, "Wedge x")->required();
  gq->add_option("--y", v_y, "Wedge y")->required();
  auto* vv = var->add_subcommand("v", "v(x, t); CSV x,v,rho");
  vv->add_option("--speed", v_speed, "Speed JSON file")->required()->check(CLI::ExistingFile);
  vv->add_option("--rho0", v_rho0, "Initial density JSON file or const:<rho>")->required();
  vv->add_option("--x", v_x, "Position")->required();
  vv->add_option("--t", v_t, "Time")->required()->check(CLI::PositiveNumber);
  vv->add_option("--step", v_h, "Difference step for rho");
  auto* vp = var->add_subcommand("profile", "v and rho on a grid; CSV x,v,rho");
  vp->add_option("--speed", v_speed, "Speed JSON file")->required()->check(CLI::ExistingFile);
  vp->add_option("--rho0", v_rho0, "Initial density JSON file or const:<rho>")->required();
  vp->add_option("--grid", v_grid, "x0:x1:dx")->required();
  vp->add_option("--t", v_t, "Time")->required()->check(CLI::PositiveNumber);
  vp->add_option("--step", v_h, "Difference step for rho");

  double p_rho = 0, p_c1 = 2, p_c2 = 1, p_t = 1;
  std::string p_grid;
  auto* prof = app.add_subcommand("profile", "Closed-form two-phase density profile; CSV x,rho");
  prof->add_option("--rho", p_rho, "Constant initial density")->required()->check(CLI::Range(0.0, 1.0));
  prof->add_option("--c1", p_c1, "Rate on x < 0")->required();
  prof->add_option("--c2", p_c2, "Rate on x >= 0")->required();
  prof->add_option("--t", p_t, "Time")->required()->check(CLI::PositiveNumber);
  prof->add_option("--grid", p_grid, "x0:x1:dx")->required();

  auto* verify = app.add_subcommand("verify", "Checks on closed-form solutions");
  verify->require_subcommand(1);
  bool verify_check = false;
  auto* ent = verify->add_subcommand("entropy", "Entropy conditions of the two-phase profile; JSON report");
  ent->add_option("--rho", p_rho, "Constant initial density")->required()->check(CLI::Range(0.0, 1.0));
  ent->add_option("--c1", p_c1, "Rate on x < 0")->required();
  ent->add_option("--c2", p_c2, "Rate on x >= 0")->required();
  ent->add_option("--t", p_t, "Time")->check(CLI::PositiveNumber);
  ent->add_flag("--check", verify_check, "Exit 2 when a condition fails");

  auto* exp = app.add_subcommand("experiment", "Config-driven experiments");
  exp->require_subcommand(1);
  std::string exp_file, exp_out;
  bool exp_check = false;
  auto* exp_run = exp->add_subcommand("run", "Run an experiment config (schema below)");
  exp_run->add_option("file", exp_file, "Config JSON")->required();
  exp_run->add_flag("--check", exp_check, "Exit 2 when a tolerance gate fails");
  exp_run->add_option("--out", exp_out, "Output directory (overrides the config)");
  add_seed(exp_run);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    const std::uint64_t seed = seed_opt ? *seed_opt : env_seed();
    if (simulate_cmd->parsed()) return simulate(sa, seed, jobs, out);
    if (lpp_sub->parsed()) return lpp_cmd(la, seed, jobs, out);
    if (gq->parsed()) {
      const auto speed = io::load_speed(v_speed);
      const auto res = variational::gamma_q(v_x, v_y, speed, v_q);
      json j;
      j["value"] = res.value;
      j["routes"] = res.routes;
      j["truncated"] = res.truncated;
      json path = json::array();
      for (std::size_t k = 0; k < res.path.vertices.size(); ++k)
        path.push_back({{"s", res.path.break_times[k]}, {"x", res.path.vertices[k].x}, {"y", res.path.vertices[k].y}});
      j["path"] = path;
      out << j.dump(2) << "\n";
      return 0;
    }
    if (vv->parsed() || vp->parsed()) {
      const auto speed = io::load_speed(v_speed);
      const auto rho0 = io::load_initial_profile(v_rho0);
      const std::vector<double> xs = vv->parsed() ? std::vector<double>{v_x} : grid_points(v_grid);
      auto v = [&](double x, double t) { return variational::hydro_v(x, t, speed, rho0); };
      std::vector<std::string> rows(xs.size());
      parallel_for(xs.size(), jobs, [&](std::size_t k) {
        rows[k] = fmt::format("{},{},{}\n", num(xs[k]), num(v(xs[k], v_t)), num(variational::rho_from_v(v, xs[k], v_t, v_h)));
      });
      out << "x,v,rho\n";
      for (const auto& r : rows) out << r;
      return 0;
    }
    if (prof->parsed()) {
      out << "x,rho\n";
      for (double x : grid_points(p_grid)) out << num(x) << "," << num(twophase::profile(p_rho, p_c1, p_c2, x, p_t)) << "\n";
      return 0;
    }
    if (ent->parsed()) {
      const auto report = twophase::entropy_check(twophase::profile_structure(p_rho, p_c1, p_c2, p_t), p_c1, p_c2);
      out << report.to_json() << "\n";
      return verify_check && !report.passed() ? 2 : 0;
    }
    if (exp_run->parsed()) {
      experiment::RunOptions opts;
      opts.jobs = jobs;
      opts.check = exp_check;
      opts.seed = seed_opt;
      opts.default_seed = seed;
      if (!exp_out.empty()) opts.output = fs::path(exp_out);
      const auto outcome = experiment::run_file(exp_file, opts);
      (outcome.exit_code == 1 ? err : out) << outcome.summary;
      return outcome.exit_code;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace tasep::cli
