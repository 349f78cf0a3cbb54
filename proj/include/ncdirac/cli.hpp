#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ncdirac/config.hpp"
#include "ncdirac/csv.hpp"
#include "ncdirac/fockevolve.hpp"
#include "ncdirac/invariant.hpp"
#include "ncdirac/lrsolve.hpp"
#include "ncdirac/mat2.hpp"
#include "ncdirac/ncmodel.hpp"

namespace ncdirac::cli {

inline constexpr const char* kToolName = "ncdirac";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsageError = 2 };

inline constexpr double kAlgebraTol = 1e-12;
inline constexpr double kInvariantTol = 1e-12;
inline constexpr double kXiTol = 1e-5;
inline constexpr double kDriftTol = 1e-6;

using nlohmann::json;

struct RunContext {
  RunConfig config;
  bool flip_bopp_sign = false;  // debug: corrupts the momentum Bopp shift
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

namespace detail {

inline std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.output_dir);
  return std::filesystem::path(cfg.output_dir) / name;
}

inline void write_json(const RunConfig& cfg, const std::string& name, const json& j) {
  std::ofstream f(out_path(cfg, name));
  if (!f) throw ParameterError("cannot write " + name);
  f << j.dump(2) << '\n';
}

inline json cplx_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline std::string run_label(const NCParams& p) {
  if (p.commutative()) return "commutative";
  return p.gamma == 0.0 ? "noncommutative (time-independent)" : "noncommutative (time-dependent)";
}

// Uniform grid t0, t0 + dt, ..., t1; dt must divide the interval.
inline std::vector<double> step_grid(const RunConfig& cfg) {
  const double span = cfg.t1 - cfg.t0;
  const auto steps = std::llround(span / cfg.dt);
  if (steps < 1 || std::abs(steps * cfg.dt - span) > 1e-9 * span)
    throw GridError("dt must divide [t0, t1] into a whole number of steps");
  std::vector<double> g(static_cast<std::size_t>(steps) + 1);
  for (long long k = 0; k <= steps; ++k) g[k] = cfg.t0 + span * static_cast<double>(k) / static_cast<double>(steps);
  return g;
}

}  // namespace detail

/// Dirac algebra, deformed NC algebra and the two-path Hamiltonian check.
inline int cmd_verify_algebra(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const NCParams& p = cfg.params;
  validate(p);
  BoppConvention conv;
  if (ctx.flip_bopp_sign) conv.momentum_sign = -1.0;

  const auto dirac = verify_dirac_algebra();
  const auto grid = uniform_grid(cfg.t0, cfg.t1, cfg.grid_points);
  const auto nc = verify_nc_algebra(p, grid, conv);

  json j;
  j["run_label"] = detail::run_label(p);
  j["tolerance"] = kAlgebraTol;
  j["consistency_ratio"] = consistency_ratio(p);
  j["consistency_warning"] = consistency_warning(p);
  json dchecks = json::array();
  for (const auto& c : dirac.checks) dchecks.push_back({{"relation", c.relation}, {"deviation", c.deviation}});
  j["dirac_algebra"] = {{"checks", dchecks}, {"max_deviation", dirac.max_deviation()}};

  json nchecks = json::array();
  double spin_leak = 0.0;
  for (const auto& c : nc.checks) {
    nchecks.push_back({{"t", c.t},
                       {"commutator", c.pair},
                       {"expected", detail::cplx_json(c.expected)},
                       {"constant", detail::cplx_json(c.computed.constant(0, 0))},
                       {"deviation", c.deviation}});
    spin_leak = std::max(spin_leak, c.spin_leak);
  }
  const CommutatorCheck* failure = nc.first_failure(kAlgebraTol);
  j["nc_algebra"] = {{"grid", grid},
                     {"hbar", p.hbar},
                     {"hbar_eff", nc.hbar_eff},
                     {"checks", nchecks},
                     {"max_deviation", nc.max_deviation},
                     {"spin_leak", spin_leak},
                     {"first_failure", failure ? json(failure->pair) : json(nullptr)}};

  double dual = 0.0;
  if (p.unit_mode == UnitMode::natural && p.hbar == 1.0) {
    dual = hamiltonian_dual_path_deviation(p, dual_path_check_times(), conv);
    j["hamiltonian_dual_path"] = {{"times", dual_path_check_times()}, {"max_deviation", dual}};
  } else {
    j["hamiltonian_dual_path"] = {{"skipped", "requires natural units with hbar = 1"}};
  }

  const bool pass = dirac.max_deviation() <= kAlgebraTol && nc.max_deviation <= kAlgebraTol && dual <= kAlgebraTol;
  j["passed"] = pass;
  if (cfg.emits("json")) detail::write_json(cfg, "algebra_report.json", j);

  auto& os = *ctx.out;
  os << "run: " << j["run_label"].get<std::string>() << "\n";
  os << "dirac algebra max deviation: " << dirac.max_deviation() << "\n";
  os << "nc algebra max deviation:    " << nc.max_deviation << " (hbar_eff = " << format_double(nc.hbar_eff) << ")\n";
  os << "hamiltonian dual path:       " << dual << "\n";
  if (consistency_warning(p)) os << "warning: theta*eta/(4 hbar^2) = " << consistency_ratio(p) << " is not small\n";
  if (failure) os << "FAILED: " << failure->pair << " at t = " << failure->t << " deviates by " << failure->deviation << "\n";
  return pass ? kOk : kCheckFailed;
}

/// Constraint residuals, constant-invariant nullspace and the invariance
/// residual of the configured constants.
inline int cmd_invariant(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const NCParams& p = cfg.params;
  validate(p);
  const TimePhasePoly h = build_h_nc(p);
  const SymplecticForm omega(p.hbar);
  const InvariantAnsatz ans = build_paper_invariant(cfg.constants);
  const auto grid = uniform_grid(cfg.t0, cfg.t1, cfg.grid_points);

  double worst_invariance = 0.0;
  double worst_constraint = 0.0;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header{"t"};
  for (const auto& e : constraint_residuals(ans, p, grid.front()).entries) header.push_back("res_" + e.monomial);
  header.push_back("invariance_residual");
  for (double t : grid) {
    const auto set = constraint_residuals(ans, p, t);
    const double inv = ps_residual_norm(invariance_residual(ans, h, omega, t));
    std::vector<double> row{t};
    for (const auto& e : set.entries) row.push_back(e.value.frobenius_norm());
    row.push_back(inv);
    rows.push_back(std::move(row));
    worst_invariance = std::max(worst_invariance, inv);
    worst_constraint = std::max(worst_constraint, set.max_norm);
  }
  if (cfg.emits("csv")) {
    CsvWriter w(detail::out_path(cfg, "residuals.csv").string(), header);
    for (const auto& r : rows) w.row(r);
  }

  const auto ns_grid = uniform_grid(0.0, 2.0 / std::max(std::abs(p.gamma), 1.0), cfg.grid_points);
  const NullspaceReport ns = solve_constant_invariant(p, ns_grid);
  json basis = json::array(), gens = json::array();
  auto vec_json = [](const Eigen::Vector4d& v) { return json{{"a1", v(0)}, {"a3", v(1)}, {"b1", v(2)}, {"b3", v(3)}}; };
  for (const auto& v : ns.basis) basis.push_back(vec_json(v));
  for (const auto& v : ns.generators) gens.push_back(vec_json(v));
  json j;
  j["run_label"] = detail::run_label(p);
  j["grid"] = ns.times;
  j["unknowns"] = {"a1", "a3", "b1", "b3"};
  j["singular_values"] = ns.singular_values;
  j["rank_tolerance"] = ns.tolerance;
  j["rank"] = ns.rank;
  j["nullspace_dim"] = ns.nullspace_dim();
  j["basis"] = basis;
  j["generators"] = gens;
  j["free_constants_tension"] = ns.free_constants_tension();
  j["tension_note"] = ns.tension_note();
  j["user_constants"] = {{"a1", cfg.constants.a1}, {"a3", cfg.constants.a3}, {"b1", cfg.constants.b1},
                         {"b3", cfg.constants.b3}, {"c1", cfg.constants.c1},
                         {"max_invariance_residual", worst_invariance},
                         {"max_constraint_residual", worst_constraint},
                         {"residual_grid", grid}};
  const bool pass = worst_invariance <= kInvariantTol;
  j["passed"] = pass;
  if (cfg.emits("json")) detail::write_json(cfg, "nullspace_report.json", j);

  auto& os = *ctx.out;
  os << "run: " << j["run_label"].get<std::string>() << "\n";
  os << "constant-invariant nullspace dimension: " << ns.nullspace_dim() << " (rank " << ns.rank << ")\n";
  for (const auto& g : ns.generators)
    os << "  generator (a1, a3, b1, b3) = (" << g(0) << ", " << g(1) << ", " << g(2) << ", " << g(3) << ")\n";
  if (ns.free_constants_tension()) os << "note: " << ns.tension_note() << "\n";
  os << "invariance residual of configured constants: " << worst_invariance << "\n";
  return pass ? kOk : kCheckFailed;
}

/// RK4 integration of the envelope/phase system against the closed forms.
inline int cmd_xi(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const NCParams& p = cfg.params;
  require_natural(p, "xi");
  (void)xi_closed(p, cfg.t0);  // surfaces the m = 0 singularity first
  validate(p);
  const XiTrajectory tr = integrate_rk4(p, cfg.t0, cfg.t1, cfg.dt, cfg.xi3_0, cfg.xi4_0);
  if (cfg.emits("csv")) {
    CsvWriter w(detail::out_path(cfg, "xi_trajectory.csv").string(),
                {"t",          "xi1_re",        "xi1_im",        "xi2_re",        "xi2_im",        "F1_re",
                 "F1_im",      "F2_re",         "F2_im",         "xi1_closed_re", "xi1_closed_im", "xi2_closed_re",
                 "xi2_closed_im", "F1_closed_re", "F1_closed_im", "F2_closed_re",  "F2_closed_im",  "nc_branch_re",
                 "nc_branch_im", "dev_xi1",     "dev_xi2",       "dev_F1",        "dev_F2"});
    for (const auto& s : tr.samples)
      w.row({s.t,
             s.rk4.xi1.real(),    s.rk4.xi1.imag(),    s.rk4.xi2.real(),    s.rk4.xi2.imag(),
             s.rk4.F1.real(),     s.rk4.F1.imag(),     s.rk4.F2.real(),     s.rk4.F2.imag(),
             s.closed.xi1.real(), s.closed.xi1.imag(), s.closed.xi2.real(), s.closed.xi2.imag(),
             s.closed.F1.real(),  s.closed.F1.imag(),  s.closed.F2.real(),  s.closed.F2.imag(),
             s.nc_branch.real(),  s.nc_branch.imag(),  s.dev_xi1,           s.dev_xi2,
             s.dev_F1,            s.dev_F2});
  }
  auto& os = *ctx.out;
  os << "max |dxi1| = " << tr.max_dev_xi1 << ", |dxi2| = " << tr.max_dev_xi2 << ", |dF1| = " << tr.max_dev_F1
     << ", |dF2| = " << tr.max_dev_F2 << "\n";
  return tr.max_deviation() <= kXiTol ? kOk : kCheckFailed;
}

/// Fock-space propagation with drift, uncertainty and energy tracking.
inline int cmd_evolve(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const NCParams& p = cfg.params;
  validate(p);
  const TimePhasePoly h = build_h_nc(p);
  const FockRep rep(cfg.fock_N, default_oscillator_length(p), p.hbar);
  const auto grid = detail::step_grid(cfg);
  EvolveOptions opts;
  opts.track_every = std::max<int>(1, static_cast<int>((grid.size() - 1) / 20));
  const EvolvedState st = evolve(h, rep, rep.coherent_state(cfg.alpha_x, cfg.alpha_y), grid, opts);

  const TimePhasePoly inv = build_paper_invariant(cfg.constants).as_time_poly();
  const DriftSeries drift = invariant_drift(inv, rep, st);
  const PhasePoly x = PhasePoly::monomial(Coord::x), px = PhasePoly::monomial(Coord::px);
  const PhasePoly y = PhasePoly::monomial(Coord::y), py = PhasePoly::monomial(Coord::py);

  double min_margin = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const auto ux = uncertainty_check(st.states[k], x, px, rep);
    const auto uy = uncertainty_check(st.states[k], y, py, rep);
    const auto unc = uncertainty_check(st.states[k], bopp_shift(p, NCVar::x_nc, t), bopp_shift(p, NCVar::px_nc, t), rep);
    min_margin = std::min({min_margin, ux.margin, uy.margin, unc.margin});
    rows.push_back({t, drift.expectation[k].real(), drift.drift[k], ux.lhs, ux.rhs, ux.margin, st.E_tracked[k], uy.lhs,
                    uy.rhs, uy.margin, unc.lhs, unc.rhs, unc.margin, st.states[k].norm()});
  }
  if (cfg.emits("csv")) {
    CsvWriter w(detail::out_path(cfg, "evolution.csv").string(),
                {"t", "re_I", "drift", "dx_dpx", "bound", "margin", "E_tracked", "dy_dpy", "bound_y", "margin_y",
                 "dxnc_dpxnc", "bound_nc", "margin_nc", "norm"});
    for (const auto& r : rows) w.row(r);
  }

  EnergySeries energy;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (!std::isnan(st.E_tracked[k])) energy.t.push_back(grid[k]), energy.E.push_back(st.E_tracked[k]);
  auto& os = *ctx.out;
  if (energy.t.size() >= 2) {
    const auto q = energy_integral(energy, cfg.t0, cfg.t1);
    os << "tracked energy integral over [t0, t1]: " << q.value << " (quadrature bound " << q.error_bound << ")\n";
  }
  os << "relative invariant drift: " << drift.summary << "\n";
  os << "minimum uncertainty margin: " << min_margin << "\n";
  os << "norm drift: " << st.max_norm_drift << "\n";
  bool pass = true;
  if (drift.summary > kDriftTol) {
    pass = false;
    *ctx.err << "warning: invariant drift " << drift.summary << " exceeds " << kDriftTol
             << "; the constants may not define an invariant, or fock_N = " << cfg.fock_N
             << " truncates the state (try a larger fock_N)\n";
  }
  if (min_margin < -kUncertaintyMarginTol) {
    pass = false;
    *ctx.err << "uncertainty inequality violated: margin " << min_margin << "\n";
  }
  return pass ? kOk : kCheckFailed;
}

/// Merges the outputs of the other commands into run_summary.json.
inline int cmd_report(const RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  const std::vector<std::string> needed{"algebra_report.json", "nullspace_report.json", "xi_trajectory.csv",
                                        "evolution.csv"};
  for (const auto& n : needed)
    if (!fs::exists(dir / n)) throw ParameterError("report: missing input " + (dir / n).string());

  auto load = [&](const std::string& n) {
    std::ifstream f(dir / n);
    return json::parse(f);
  };
  auto max_of = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  };
  auto min_of = [](const std::vector<double>& v) {
    double m = std::numeric_limits<double>::infinity();
    for (double x : v) m = std::min(m, x);
    return m;
  };

  const json algebra = load("algebra_report.json");
  const json nullspace = load("nullspace_report.json");
  const CsvTable xi = read_csv((dir / "xi_trajectory.csv").string());
  const CsvTable ev = read_csv((dir / "evolution.csv").string());

  json s;
  s["tool"] = kToolName;
  s["version"] = kToolVersion;
  s["config_hash"] = fnv1a_hex(canonical_config(cfg));
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  s["timestamp"] = stamp;
  s["sections"]["algebra"] = {{"run_label", algebra.at("run_label")},
                              {"dirac_max_deviation", algebra.at("dirac_algebra").at("max_deviation")},
                              {"nc_max_deviation", algebra.at("nc_algebra").at("max_deviation")},
                              {"hbar_eff", algebra.at("nc_algebra").at("hbar_eff")},
                              {"passed", algebra.at("passed")}};
  s["sections"]["invariant"] = {{"nullspace_dim", nullspace.at("nullspace_dim")},
                                {"rank", nullspace.at("rank")},
                                {"free_constants_tension", nullspace.at("free_constants_tension")},
                                {"tension_note", nullspace.at("tension_note")},
                                {"max_invariance_residual",
                                 nullspace.at("user_constants").at("max_invariance_residual")},
                                {"passed", nullspace.at("passed")}};
  s["sections"]["xi"] = {{"samples", xi.rows.size()},
                         {"max_dev_xi1", max_of(xi.numbers("dev_xi1"))},
                         {"max_dev_xi2", max_of(xi.numbers("dev_xi2"))},
                         {"max_dev_F1", max_of(xi.numbers("dev_F1"))},
                         {"max_dev_F2", max_of(xi.numbers("dev_F2"))}};
  const auto re_i = ev.numbers("re_I");
  s["sections"]["evolve"] = {{"samples", ev.rows.size()},
                             {"max_abs_drift", max_of(ev.numbers("drift"))},
                             {"relative_drift", max_of(ev.numbers("drift")) / (std::abs(re_i.front()) + 1.0)},
                             {"min_margin", std::min({min_of(ev.numbers("margin")), min_of(ev.numbers("margin_y")),
                                                      min_of(ev.numbers("margin_nc"))})}};
  std::ofstream f(dir / "run_summary.json");
  f << s.dump(2) << '\n';
  *ctx.out << "wrote " << (dir / "run_summary.json").string() << " with " << s["sections"].size() << " sections\n";
  return kOk;
}

/// Parses arguments and dispatches. Exit codes: 0 all checks pass, 1 a check
/// failed, 2 usage or configuration error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Verification tool for the Dirac equation in time-dependent noncommutative phase space", kToolName};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  bool flip = false;
  std::map<std::string, std::string> overrides;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.add_flag("--debug-flip-bopp-sign", flip, "flip the sign of the momentum Bopp shift (debug)");
  for (const auto& key : config_keys()) app.add_option("--" + key, overrides[key], "override config key " + key);

  auto* verify = app.add_subcommand("verify-algebra", "Dirac and deformed-algebra checks");
  auto* invariant = app.add_subcommand("invariant", "constraint residuals and constant-invariant nullspace");
  auto* xi = app.add_subcommand("xi", "RK4 versus closed-form envelope and phase functions");
  auto* evolve_cmd = app.add_subcommand("evolve", "truncated Fock-space propagation");
  auto* report = app.add_subcommand("report", "merge outputs into run_summary.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsageError;
  }

  RunContext ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.flip_bopp_sign = flip;
  try {
    if (!config_path.empty()) apply_config_file(ctx.config, config_path);
    for (const auto& key : config_keys()) {
      auto* opt = app.get_option("--" + key);
      if (opt->count() > 0) apply_config_value(ctx.config, key, overrides[key]);
    }
    if (!out_dir.empty()) ctx.config.output_dir = out_dir;
    finalize_config(ctx.config);

    if (verify->parsed()) return cmd_verify_algebra(ctx);
    if (invariant->parsed()) return cmd_invariant(ctx);
    if (xi->parsed()) return cmd_xi(ctx);
    if (evolve_cmd->parsed()) return cmd_evolve(ctx);
    if (report->parsed()) return cmd_report(ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed report input: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ncdirac::cli
