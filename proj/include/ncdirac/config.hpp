#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ncdirac/errors.hpp"
#include "ncdirac/invariant.hpp"
#include "ncdirac/ncmodel.hpp"

namespace ncdirac {

/// Everything a CLI run needs. Keys of the key=value config format are the
/// field names below.
struct RunConfig {
  NCParams params;
  bool kappa_explicit = false;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  int grid_points = 16;
  int fock_N = 16;
  cplx xi3_0{};
  cplx xi4_0{};
  // Coherent amplitudes of the initial oscillator state. A centered state has
  // <I> = 0 identically for every linear I by parity, so the default is
  // displaced.
  cplx alpha_x{0.5, 0.0};
  cplx alpha_y{0.0, 0.5};
  InvariantConstants constants{1.0, 1.0, 0.5, -0.5, 0.0};
  std::string output_dir = ".";
  std::set<std::string> emit{"csv", "json"};

  bool emits(const std::string& kind) const { return emit.count(kind) > 0; }
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> kKeys{
      "theta", "eta", "gamma", "B",  "e",     "m",        "hbar",    "kappa",   "q1", "q2", "unit_mode", "t0",
      "t1",    "dt",  "grid_points", "fock_N", "xi3_0", "xi4_0", "alpha_x", "alpha_y", "a1", "a3", "b1", "b3",
      "c1",    "output_dir", "emit"};
  return kKeys;
}

/// Shortest decimal form that round-trips (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ParameterError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
  if (used != v.size()) throw ParameterError("config: key '" + key + "' expects a number, got '" + v + "'");
  if (!std::isfinite(out)) throw ParameterError("config: key '" + key + "' must be finite");
  return out;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double d = parse_real(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ParameterError("config: key '" + key + "' expects an integer");
  return static_cast<int>(d);
}

// "re,im" or a bare real.
inline cplx parse_complex(const std::string& key, const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) return parse_real(key, trim(v));
  return {parse_real(key, trim(v.substr(0, comma))), parse_real(key, trim(v.substr(comma + 1)))};
}

inline std::string format_complex(cplx c) { return format_double(c.real()) + "," + format_double(c.imag()); }

}  // namespace detail

/// Applies one key=value assignment. Unknown keys are rejected.
inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = trim(raw);
  NCParams& p = cfg.params;
  if (key == "theta") p.theta = parse_real(key, v);
  else if (key == "eta") p.eta = parse_real(key, v);
  else if (key == "gamma") p.gamma = parse_real(key, v);
  else if (key == "B") p.B = parse_real(key, v);
  else if (key == "e") p.e = parse_real(key, v);
  else if (key == "m") p.m = parse_real(key, v);
  else if (key == "hbar") p.hbar = parse_real(key, v);
  else if (key == "kappa") p.kappa = parse_real(key, v), cfg.kappa_explicit = true;
  else if (key == "q1") p.q1 = parse_real(key, v);
  else if (key == "q2") p.q2 = parse_real(key, v);
  else if (key == "unit_mode") {
    if (v == "natural") p.unit_mode = UnitMode::natural;
    else if (v == "SI" || v == "si") p.unit_mode = UnitMode::si;
    else throw ParameterError("config: unit_mode must be 'natural' or 'SI'");
  } else if (key == "t0") cfg.t0 = parse_real(key, v);
  else if (key == "t1") cfg.t1 = parse_real(key, v);
  else if (key == "dt") cfg.dt = parse_real(key, v);
  else if (key == "grid_points") cfg.grid_points = parse_int(key, v);
  else if (key == "fock_N") cfg.fock_N = parse_int(key, v);
  else if (key == "xi3_0") cfg.xi3_0 = parse_complex(key, v);
  else if (key == "xi4_0") cfg.xi4_0 = parse_complex(key, v);
  else if (key == "alpha_x") cfg.alpha_x = parse_complex(key, v);
  else if (key == "alpha_y") cfg.alpha_y = parse_complex(key, v);
  else if (key == "a1") cfg.constants.a1 = parse_real(key, v);
  else if (key == "a3") cfg.constants.a3 = parse_real(key, v);
  else if (key == "b1") cfg.constants.b1 = parse_real(key, v);
  else if (key == "b3") cfg.constants.b3 = parse_real(key, v);
  else if (key == "c1") cfg.constants.c1 = parse_real(key, v);
  else if (key == "output_dir") cfg.output_dir = v;
  else if (key == "emit") {
    cfg.emit.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item != "csv" && item != "json") throw ParameterError("config: emit accepts only csv and json");
      cfg.emit.insert(item);
    }
  } else {
    throw ParameterError("config: unknown key '" + key + "'");
  }
}

/// Parses key=value lines; '#' starts a comment.
inline void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_config_value(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParameterError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  apply_config_text(cfg, ss.str());
}

/// Fills derived fields and checks the structural invariants of a run.
inline void finalize_config(RunConfig& cfg) {
  if (!cfg.kappa_explicit) cfg.params.kappa = std::exp(cfg.params.q2 - cfg.params.q1);
  if (!(cfg.dt > 0.0)) throw ParameterError("config: dt must be positive");
  if (!(cfg.t1 > cfg.t0)) throw ParameterError("config: t1 must exceed t0");
  if (cfg.fock_N < 2) throw ParameterError("config: fock_N must be at least 2");
  if (cfg.grid_points < 2) throw ParameterError("config: grid_points must be at least 2");
}

/// Canonical key=value listing of the effective configuration.
inline std::string canonical_config(const RunConfig& cfg) {
  using detail::format_complex;
  const NCParams& p = cfg.params;
  std::map<std::string, std::string> kv{
      {"theta", format_double(p.theta)},
      {"eta", format_double(p.eta)},
      {"gamma", format_double(p.gamma)},
      {"B", format_double(p.B)},
      {"e", format_double(p.e)},
      {"m", format_double(p.m)},
      {"hbar", format_double(p.hbar)},
      {"kappa", format_double(p.kappa)},
      {"q1", format_double(p.q1)},
      {"q2", format_double(p.q2)},
      {"unit_mode", p.unit_mode == UnitMode::natural ? "natural" : "SI"},
      {"t0", format_double(cfg.t0)},
      {"t1", format_double(cfg.t1)},
      {"dt", format_double(cfg.dt)},
      {"grid_points", std::to_string(cfg.grid_points)},
      {"fock_N", std::to_string(cfg.fock_N)},
      {"xi3_0", format_complex(cfg.xi3_0)},
      {"xi4_0", format_complex(cfg.xi4_0)},
      {"alpha_x", format_complex(cfg.alpha_x)},
      {"alpha_y", format_complex(cfg.alpha_y)},
      {"a1", format_double(cfg.constants.a1)},
      {"a3", format_double(cfg.constants.a3)},
      {"b1", format_double(cfg.constants.b1)},
      {"b3", format_double(cfg.constants.b3)},
      {"c1", format_double(cfg.constants.c1)},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ncdirac
