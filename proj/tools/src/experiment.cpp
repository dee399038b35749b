#include "tasep/experiment.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "json.hpp"
#include "tasep/io.hpp"
#include "tasep/lpp.hpp"
#include "tasep/parallel.hpp"
#include "tasep/sim.hpp"
#include "tasep/twophase.hpp"
#include "tasep/variational.hpp"

#ifndef TASEP_VERSION
#define TASEP_VERSION "unknown"
#endif

namespace tasep::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Field access with diagnostics that name the offending key. Unknown keys
// are rejected so typos do not silently fall back to defaults.
class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {}

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    if (!has(key)) throw ConfigError("missing field '" + key + "'");
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = {}) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing field '" + key + "'");
    }
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError("field '" + key + "': expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = {}, std::int64_t min = 1) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing field '" + key + "'");
    }
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError("field '" + key + "': expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < min) throw ConfigError("field '" + key + "': must be at least " + std::to_string(min));
    return x;
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = {}) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing field '" + key + "'");
    }
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError("field '" + key + "': expected a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError("field '" + key + "': expected true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = {}) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError("missing field '" + key + "'");
    }
    const auto& v = j_.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError("field '" + key + "': expected a number or an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number()) throw ConfigError(fmt::format("field '{}[{}]': expected a number", key, k));
      out.push_back(v[k].get<double>());
    }
    return out;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown field '" + key + "'");
    }
  }

 private:
  const json& j_;
  std::set<std::string> seen_;
};

std::string num(double x) { return fmt::format("{:.10g}", x); }

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

struct Context {
  fs::path base_dir;
  fs::path out_dir;
  std::uint64_t seed = 1;
  int jobs = 1;
  Outcome outcome;

  fs::path artifact(const std::string& name) {
    fs::create_directories(out_dir);
    auto p = out_dir / name;
    outcome.artifacts.push_back(p);
    return p;
  }

  void gate(bool ok, const std::string& line) {
    outcome.within_tolerance = outcome.within_tolerance && ok;
    outcome.summary += (ok ? "ok    " : "FAIL  ") + line + "\n";
  }
};

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

SpeedFunction read_speed(Fields& f, const Context& ctx) {
  const auto& v = f.raw("speed");
  try {
    if (v.is_string()) return io::load_speed(ctx.base_dir / v.get<std::string>());
    if (v.is_object()) return io::parse_speed(v.dump());
  } catch (const io::ParseError& e) {
    throw ConfigError(std::string("field 'speed': ") + e.what());
  }
  throw ConfigError("field 'speed': expected an object or a file name");
}

InitialProfile read_rho0(Fields& f, const Context& ctx) {
  const auto& v = f.raw("rho0");
  try {
    if (v.is_number()) {
      const double rho = v.get<double>();
      if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("field 'rho0': density must lie in [0, 1]");
      return InitialProfile::constant(rho);
    }
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      return io::load_initial_profile(s.starts_with("const:") ? s : (ctx.base_dir / s).string());
    }
    if (v.is_object()) return io::parse_initial_profile(v.dump());
  } catch (const io::ParseError& e) {
    throw ConfigError(std::string("field 'rho0': ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'rho0': ") + e.what());
  }
  throw ConfigError("field 'rho0': expected a number, \"const:<rho>\", an object or a file name");
}

io::Grid read_grid(Fields& f, const std::string& key) {
  try {
    return io::parse_grid(f.string(key));
  } catch (const io::ParseError& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

// (c1, c2) when the speed is a genuine two-phase step at 0 with c1 > c2.
std::optional<std::pair<double, double>> two_phase_rates(const SpeedFunction& speed) {
  auto bps = speed.breakpoints();
  auto rates = speed.rates();
  if (bps.size() == 1 && bps[0] == 0.0 && rates[0] > rates[1]) return std::pair{rates[0], rates[1]};
  return std::nullopt;
}

void run_lpp_convergence(Fields& f, Context& ctx) {
  const auto speed = read_speed(f, ctx);
  const double x = f.number("x");
  const double y = f.number("y");
  const double q = f.number("q", 0.0);
  const auto ns = f.numbers("n");
  const int reps = static_cast<int>(f.integer("reps", 20));
  const double tol = f.number("tolerance", 0.025);
  f.reject_unknown();
  if (!(y > 0.0) || x + y < 0.0) throw ConfigError("fields 'x', 'y': need y > 0 and x + y >= 0");

  double limit = 0.0;
  std::string reference;
  auto tp = two_phase_rates(speed);
  if (tp && q == 0.0) {
    limit = twophase::phi_wedge(x, y, tp->first, tp->second);
    reference = "closed-form";
  } else if (speed.is_constant()) {
    limit = variational::gamma(x, y) / speed.rates()[0];
    reference = "homogeneous";
  } else {
    limit = variational::gamma_q(x, y, speed, q).value;
    reference = "variational";
  }

  std::string csv = "n,reps,mean,stderr,limit,abs_err,rel_err\n";
  double last_rel = 0.0;
  for (double nd : ns) {
    if (nd < 1 || nd != std::floor(nd)) throw ConfigError("field 'n': entries must be positive integers");
    const auto n = static_cast<std::int64_t>(nd);
    auto est = lpp::scaled_limit_estimate(x, y, n, reps, speed, q, ctx.seed, ctx.jobs);
    const double err = std::abs(est.mean - limit);
    last_rel = err / std::abs(limit);
    csv += fmt::format("{},{},{},{},{},{},{}\n", n, reps, num(est.mean), num(est.stderr_), num(limit), num(err),
                       num(last_rel));
  }
  write_text(ctx.artifact("convergence.csv"), csv);
  ctx.gate(last_rel <= tol, fmt::format("largest n: relative error {} vs {} limit {} (tolerance {})", num(last_rel),
                                        reference, num(limit), num(tol)));
}

void run_hydro_compare(Fields& f, Context& ctx) {
  const auto speed = read_speed(f, ctx);
  const auto rho0 = read_rho0(f, ctx);
  const auto n = f.integer("n");
  const double t = f.number("t");
  const int reps = static_cast<int>(f.integer("reps", 5));
  const auto grid = read_grid(f, "bins");
  const auto kind = f.string("initial", std::string("bernoulli"));
  const double tol = f.number("tolerance", 0.05);
  const double exclude = f.number("exclude", 0.1);
  const auto current_at = f.numbers("current_at", std::vector<double>{});
  const double current_tol = f.number("current_tolerance", 0.02);
  f.reject_unknown();
  if (!(t > 0.0)) throw ConfigError("field 't': must be positive");
  if (kind != "bernoulli" && kind != "deterministic")
    throw ConfigError("field 'initial': expected \"bernoulli\" or \"deterministic\"");
  if (grid.size() < 2) throw ConfigError("field 'bins': need at least one bin");

  std::vector<double> edges;
  for (std::size_t k = 0; k < grid.size(); ++k) edges.push_back(grid.at(k));
  const double lo = std::min(edges.front(), current_at.empty() ? edges.front() : *std::min_element(current_at.begin(), current_at.end()));
  const double hi = std::max(edges.back(), current_at.empty() ? edges.back() : *std::max_element(current_at.begin(), current_at.end()));

  // Theory: bin averages of rho are difference quotients of v.
  auto tp = two_phase_rates(speed);
  const bool closed = tp && rho0.is_constant();
  std::function<double(double)> v;
  std::vector<double> breaks(speed.breakpoints().begin(), speed.breakpoints().end());
  if (closed) {
    const double rho = rho0.density(0.0);
    v = [=](double x) { return twophase::v_closed(x, t, rho, tp->first, tp->second); };
    for (const auto& piece : twophase::profile_structure(rho, tp->first, tp->second, t).pieces) {
      if (std::isfinite(piece.lo)) breaks.push_back(piece.lo);
    }
  } else {
    v = [&](double x) { return variational::hydro_v(x, t, speed, rho0); };
    // Without a closed form, exclude bins whose theory density jumps sharply.
  }

  const auto nbins = edges.size() - 1;
  std::vector<double> vs(edges.size());
  parallel_for(edges.size(), ctx.jobs, [&](std::size_t k) { vs[k] = v(edges[k]); });
  std::vector<double> theory(nbins);
  for (std::size_t b = 0; b < nbins; ++b) theory[b] = (vs[b + 1] - vs[b]) / (edges[b + 1] - edges[b]);
  std::vector<bool> excluded(nbins, false);
  for (std::size_t b = 0; b < nbins; ++b) {
    for (double bp : breaks) {
      if (bp > edges[b] - exclude && bp < edges[b + 1] + exclude) excluded[b] = true;
    }
    if (!closed) {
      // Neighbouring theory bins differing by more than 0.1 mark a shock or fan edge.
      if (b > 0 && std::abs(theory[b] - theory[b - 1]) > 0.1) excluded[b] = excluded[b - 1] = true;
    }
  }

  sim::SimConfig base;
  base.n = n;
  base.speed = speed;
  base.rho0 = rho0;
  base.initial = kind == "bernoulli" ? sim::InitialKind::Bernoulli : sim::InitialKind::Deterministic;
  base.t_end = t;
  base.observe = {{lo, hi}};
  base.window = sim::window_for(n, speed, t, lo, hi);

  std::vector<std::vector<double>> density(static_cast<std::size_t>(reps), std::vector<double>(nbins));
  std::vector<std::vector<std::int64_t>> currents(static_cast<std::size_t>(reps),
                                                  std::vector<std::int64_t>(current_at.size()));
  parallel_for(static_cast<std::size_t>(reps), ctx.jobs, [&](std::size_t r) {
    auto cfg = base;
    cfg.seed = ctx.seed + r;
    const auto snap = sim::run(cfg, {t}).front();
    for (std::size_t b = 0; b < nbins; ++b)
      density[r][b] = sim::empirical_density(snap, edges[b], edges[b + 1], n) / (edges[b + 1] - edges[b]);
    for (std::size_t k = 0; k < current_at.size(); ++k)
      currents[r][k] = snap.current(static_cast<std::int64_t>(std::floor(current_at[k] * static_cast<double>(n))));
  });

  std::string reps_csv = "rep,seed,bin_lo,bin_hi,density\n";
  for (std::size_t r = 0; r < density.size(); ++r) {
    for (std::size_t b = 0; b < nbins; ++b)
      reps_csv += fmt::format("{},{},{},{},{}\n", r, ctx.seed + r, num(edges[b]), num(edges[b + 1]), num(density[r][b]));
  }
  write_text(ctx.artifact("replicas.csv"), reps_csv);

  std::string csv = "bin_lo,bin_hi,sim_density,sim_stderr,theory_density,delta,excluded\n";
  double max_delta = 0.0;
  for (std::size_t b = 0; b < nbins; ++b) {
    double mean = 0.0, var = 0.0;
    for (const auto& d : density) mean += d[b];
    mean /= reps;
    for (const auto& d : density) var += (d[b] - mean) * (d[b] - mean);
    const double se = reps > 1 ? std::sqrt(var / (reps - 1) / reps) : 0.0;
    const double delta = mean - theory[b];
    if (!excluded[b]) max_delta = std::max(max_delta, std::abs(delta));
    csv += fmt::format("{},{},{},{},{},{},{}\n", num(edges[b]), num(edges[b + 1]), num(mean), num(se), num(theory[b]),
                       num(delta), excluded[b] ? 1 : 0);
  }
  write_text(ctx.artifact("bins.csv"), csv);
  ctx.gate(max_delta <= tol, fmt::format("max |density delta| over included bins {} (tolerance {})", num(max_delta), num(tol)));

  if (!current_at.empty()) {
    std::string ccsv = "a,site,sim_current,theory_current,delta\n";
    double max_cd = 0.0;
    for (std::size_t k = 0; k < current_at.size(); ++k) {
      const double a = current_at[k];
      double mean = 0.0;
      for (const auto& c : currents) mean += static_cast<double>(c[k]);
      mean /= static_cast<double>(reps) * static_cast<double>(n);
      const double theory_j = rho0.antiderivative(a) - v(a);
      max_cd = std::max(max_cd, std::abs(mean - theory_j));
      ccsv += fmt::format("{},{},{},{},{}\n", num(a), static_cast<std::int64_t>(std::floor(a * static_cast<double>(n))),
                          num(mean), num(theory_j), num(mean - theory_j));
    }
    write_text(ctx.artifact("currents.csv"), ccsv);
    ctx.gate(max_cd <= current_tol,
             fmt::format("max |current delta| {} (tolerance {})", num(max_cd), num(current_tol)));
  }
}

void run_profile_table(Fields& f, Context& ctx) {
  const auto rhos = f.numbers("rho");
  const double c1 = f.number("c1");
  const double c2 = f.number("c2");
  const double t = f.number("t", 1.0);
  const auto grid = read_grid(f, "grid");
  const bool numerical = f.boolean("numerical", false);
  const double tol = f.number("tolerance", 1e-3);
  f.reject_unknown();
  const auto speed = SpeedFunction::two_phase(c1, c2);

  std::string csv = numerical ? "rho,x,density,v,v_numerical,v_delta\n" : "rho,x,density,v\n";
  double worst = 0.0;
  for (double rho : rhos) {
    std::vector<double> vn(grid.size());
    if (numerical) {
      const auto r0 = InitialProfile::constant(rho);
      parallel_for(grid.size(), ctx.jobs, [&](std::size_t k) { vn[k] = variational::hydro_v(grid.at(k), t, speed, r0); });
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double x = grid.at(k);
      const double v = twophase::v_closed(x, t, rho, c1, c2);
      const double d = twophase::profile(rho, c1, c2, x, t);
      if (numerical) {
        worst = std::max(worst, std::abs(vn[k] - v));
        csv += fmt::format("{},{},{},{},{},{}\n", num(rho), num(x), num(d), num(v), num(vn[k]), num(vn[k] - v));
      } else {
        csv += fmt::format("{},{},{},{}\n", num(rho), num(x), num(d), num(v));
      }
    }
  }
  write_text(ctx.artifact("profile.csv"), csv);
  if (numerical) ctx.gate(worst <= tol, fmt::format("max |v_numerical - v| {} (tolerance {})", num(worst), num(tol)));
}

void run_entropy_report(Fields& f, Context& ctx) {
  const auto rhos = f.numbers("rho");
  const double c1 = f.number("c1");
  const double c2 = f.number("c2");
  const double t = f.number("t", 1.0);
  const double tol = f.number("flux_tolerance", 1e-10);
  f.reject_unknown();
  std::string csv = "rho,case,rho_minus,rho_plus,ei_violations,flux_residual,eb_case,passed\n";
  json reports = json::array();
  bool all = true;
  for (double rho : rhos) {
    const auto prof = twophase::profile_structure(rho, c1, c2, t);
    const auto rep = twophase::entropy_check(prof, c1, c2);
    const bool ok = rep.passed(tol);
    all = all && ok;
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", num(rho), static_cast<int>(prof.kase), num(rep.rho_minus),
                       num(rep.rho_plus), rep.ei_violations, num(rep.flux_residual), rep.eb_case, ok ? 1 : 0);
    auto j = json::parse(rep.to_json());
    j["rho"] = rho;
    j["case"] = static_cast<int>(prof.kase);
    reports.push_back(j);
  }
  write_text(ctx.artifact("entropy.csv"), csv);
  write_text(ctx.artifact("entropy.json"), reports.dump(2) + "\n");
  ctx.gate(all, fmt::format("entropy conditions on {} profile(s)", rhos.size()));
}

void run_envelope_audit(Fields& f, Context& ctx) {
  const auto speed = read_speed(f, ctx);
  const auto rho0 = f.has("rho0") ? read_rho0(f, ctx) : InitialProfile::constant(0.5);
  const auto n = f.integer("n", 10);
  const auto sites = f.integer("sites", 20, 2);
  const auto events = f.integer("events", 1000);
  const auto seeds = f.integer("seeds", 50);
  const bool decouple = f.boolean("decouple", false);
  f.reject_unknown();

  sim::SimConfig base;
  base.n = n;
  base.speed = speed;
  base.rho0 = rho0;
  base.window = {-sites / 2, sites - sites / 2 - 1};
  base.t_end = 1e9;
  std::vector<std::int64_t> all_sites;
  for (auto i = base.window.i_min; i <= base.window.i_max; ++i) all_sites.push_back(i);

  std::vector<sim::EnvelopeReport> reports(static_cast<std::size_t>(seeds));
  parallel_for(reports.size(), ctx.jobs, [&](std::size_t s) {
    auto cfg = base;
    cfg.seed = ctx.seed + s;
    reports[s] = sim::envelope_check(cfg, cfg.t_end, {base.window.i_min - 1, base.window.i_max + 1}, all_sites,
                                     decouple, events);
  });
  std::string csv = "seed,events,checks,violations,inconclusive\n";
  std::int64_t failing = 0;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    const auto& r = reports[s];
    failing += r.holds() ? 0 : 1;
    csv += fmt::format("{},{},{},{},{}\n", ctx.seed + s, r.events, r.checks, r.violation_count, r.inconclusive ? 1 : 0);
  }
  write_text(ctx.artifact("envelope.csv"), csv);
  if (decouple) {
    ctx.gate(failing == seeds, fmt::format("decoupled control: {} of {} seeds flagged", failing, seeds));
  } else {
    ctx.gate(failing == 0, fmt::format("envelope identity: {} of {} seeds failing", failing, seeds));
  }
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view kind_name(Kind kind) {
  switch (kind) {
    case Kind::LppConvergence: return "lpp-convergence";
    case Kind::HydroCompare: return "hydro-compare";
    case Kind::ProfileTable: return "profile-table";
    case Kind::EntropyReport: return "entropy-report";
    case Kind::EnvelopeAudit: return "envelope-audit";
  }
  return "unknown";
}

Outcome run(std::string_view config_text, const fs::path& base_dir, const RunOptions& options) {
  json j;
  try {
    j = json::parse(config_text.begin(), config_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
  if (!j.is_object() || j.empty()) throw ConfigError("config must be a non-empty JSON object");
  Fields f(j);

  const std::map<std::string, Kind> kinds = {{"lpp-convergence", Kind::LppConvergence},
                                             {"hydro-compare", Kind::HydroCompare},
                                             {"profile-table", Kind::ProfileTable},
                                             {"entropy-report", Kind::EntropyReport},
                                             {"envelope-audit", Kind::EnvelopeAudit}};
  const auto kind_str = f.string("kind");
  const auto it = kinds.find(kind_str);
  if (it == kinds.end()) throw ConfigError("field 'kind': unknown experiment '" + kind_str + "'");

  Context ctx;
  ctx.base_dir = base_dir;
  ctx.jobs = std::max(1, options.jobs);
  const auto cfg_seed = f.has("seed") ? std::optional<std::int64_t>(f.integer("seed", {}, 0)) : std::nullopt;
  ctx.seed = options.seed ? *options.seed : cfg_seed ? static_cast<std::uint64_t>(*cfg_seed) : options.default_seed;
  const auto out_field = f.string("output", "out/" + kind_str);
  ctx.out_dir = options.output ? *options.output : fs::path(out_field);

  const auto start = std::chrono::steady_clock::now();
  const auto started = utc_now();
  // Each runner validates its fields before doing any work.
  std::function<void()> body;
  switch (it->second) {
    case Kind::LppConvergence: body = [&] { run_lpp_convergence(f, ctx); }; break;
    case Kind::HydroCompare: body = [&] { run_hydro_compare(f, ctx); }; break;
    case Kind::ProfileTable: body = [&] { run_profile_table(f, ctx); }; break;
    case Kind::EntropyReport: body = [&] { run_entropy_report(f, ctx); }; break;
    case Kind::EnvelopeAudit: body = [&] { run_envelope_audit(f, ctx); }; break;
  }
  try {
    body();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json manifest;
  manifest["kind"] = kind_str;
  manifest["config_sha256"] = sha256_hex(config_text);
  manifest["seed"] = ctx.seed;
  manifest["jobs"] = ctx.jobs;
  manifest["versions"] = {{"tasep", TASEP_VERSION},
                          {"compiler", __VERSION__},
                          {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR,
                                                        NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH)}};
  manifest["started_utc"] = started;
  manifest["wall_time_s"] = wall;
  manifest["within_tolerance"] = ctx.outcome.within_tolerance;
  std::vector<std::string> names;
  for (const auto& p : ctx.outcome.artifacts) names.push_back(p.filename().string());
  manifest["artifacts"] = names;
  fs::create_directories(ctx.out_dir);
  const auto manifest_path = ctx.out_dir / "manifest.json";
  write_text(manifest_path, manifest.dump(2) + "\n");
  ctx.outcome.artifacts.push_back(manifest_path);

  ctx.outcome.exit_code = options.check && !ctx.outcome.within_tolerance ? 2 : 0;
  return ctx.outcome;
}

Outcome run_file(const fs::path& config, const RunOptions& options) {
  try {
    std::string text;
    try {
      text = io::read_file(config);
    } catch (const io::ParseError& e) {
      throw ConfigError(e.what());
    }
    return run(text, config.parent_path(), options);
  } catch (const std::exception& e) {
    Outcome o;
    o.exit_code = 1;
    o.within_tolerance = false;
    o.summary = config.string() + ": " + e.what() + "\n";
    return o;
  }
}

std::string_view schema() {
  return R"(Experiment config (JSON object):
  kind      string, one of lpp-convergence | hydro-compare | profile-table |
            entropy-report | envelope-audit                       (required)
  output    output directory                          (default out/<kind>)
  seed      base seed; replica r uses seed + r  (default $TASEP_SEED or 1)
  speed     {"rates": [...], "breakpoints": [...]} or a file name
  rho0      number, "const:<rho>", {"densities": [...], "breakpoints": [...]}
            or a file name
Unknown fields are rejected.

lpp-convergence  speed, x, y, n (list), q = 0, reps = 20, tolerance = 0.025
                 writes convergence.csv: n,reps,mean,stderr,limit,abs_err,rel_err
hydro-compare    speed, rho0, n, t, bins "x0:x1:dx", reps = 5,
                 initial = "bernoulli" | "deterministic", tolerance = 0.05,
                 exclude = 0.1, current_at = [], current_tolerance = 0.02
                 writes bins.csv, replicas.csv, currents.csv
profile-table    rho (number or list), c1, c2, t = 1, grid "x0:x1:dx",
                 numerical = false, tolerance = 1e-3; writes profile.csv
entropy-report   rho (number or list), c1, c2, t = 1, flux_tolerance = 1e-10
                 writes entropy.csv, entropy.json
envelope-audit   speed, rho0 = 0.5, n = 10, sites = 20, events = 1000,
                 seeds = 50, decouple = false; writes envelope.csv
Every run also writes manifest.json (config hash, seed, versions, wall time).
)";
}

}  // namespace tasep::experiment
