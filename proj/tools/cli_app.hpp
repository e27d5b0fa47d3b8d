#pragma once

// sqz command-line front end. Everything lives in this header so the test
// suite can drive commands in-process.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sqz/sqz.hpp"

namespace sqz::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTolerance = 3;
inline constexpr int kSchemaVersion = 1;

enum class Command { Evolve, Momentum, Fock, Verify, Tof };
enum class Format { Csv, Json };

inline const std::map<std::string, Command>& command_names() {
  static const std::map<std::string, Command> m{{"evolve", Command::Evolve},
                                                {"momentum", Command::Momentum},
                                                {"fock", Command::Fock},
                                                {"verify", Command::Verify},
                                                {"tof", Command::Tof}};
  return m;
}

inline std::string to_string(Command c) {
  for (const auto& [name, v] : command_names())
    if (v == c) return name;
  return "?";
}

/// Configuration errors map to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::Evolve;
  double mass = 1.0;
  double omega = 1.0;
  double hbar = 1.0;
  std::optional<double> sigma;  // when set, omega = hbar / (2 m sigma^2)
  double x0 = 0.0;
  double p0 = 0.0;
  std::vector<double> omega_t;  // empty: command default
  std::size_t grid_points = grid::kDefaultPoints;
  int fock_n = 0;
  std::optional<long> trunc_n;  // empty: command default
  double tol = 1e-8;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  Format format = Format::Csv;
  std::string out = "-";
  std::optional<double> k;  // verify only
  bool commutators_only = false;

  [[nodiscard]] PhysParams params() const {
    const double w = sigma ? omega_from_sigma(*sigma, mass, hbar) : omega;
    return PhysParams(mass, w, hbar);
  }
  [[nodiscard]] Displacement displacement() const { return {x0, p0}; }
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json to_json(const RunConfig& c) {
  json j;
  j["command"] = to_string(c.command);
  j["mass"] = fmt17(c.mass);
  j["omega"] = fmt17(c.omega);
  j["hbar"] = fmt17(c.hbar);
  j["sigma"] = c.sigma ? json(fmt17(*c.sigma)) : json(nullptr);
  j["x0"] = fmt17(c.x0);
  j["p0"] = fmt17(c.p0);
  json times = json::array();
  for (double w : c.omega_t) times.push_back(fmt17(w));
  j["omega_t"] = times;
  j["grid_points"] = c.grid_points;
  j["fock_n"] = c.fock_n;
  j["trunc_n"] = c.trunc_n ? json(*c.trunc_n) : json(nullptr);
  j["tol"] = fmt17(c.tol);
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["format"] = c.format == Format::Csv ? "csv" : "json";
  j["out"] = c.out;
  j["k"] = c.k ? json(fmt17(*c.k)) : json(nullptr);
  j["commutators_only"] = c.commutators_only;
  return j;
}

namespace detail {

inline double number(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    std::size_t used = 0;
    double d = 0.0;
    try {
      d = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: " + s);
    }
    if (used != s.size()) throw ConfigError("not a number: " + s);
    return d;
  }
  if (v.is_number()) return v.get<double>();
  throw ConfigError("expected a number, got " + v.dump());
}

}  // namespace detail

inline RunConfig from_json(const json& j) {
  RunConfig c;
  try {
    const auto name = j.at("command").get<std::string>();
    const auto it = command_names().find(name);
    if (it == command_names().end()) throw ConfigError("unknown command " + name);
    c.command = it->second;
    c.mass = detail::number(j.at("mass"));
    c.omega = detail::number(j.at("omega"));
    c.hbar = detail::number(j.at("hbar"));
    if (!j.at("sigma").is_null()) c.sigma = detail::number(j.at("sigma"));
    c.x0 = detail::number(j.at("x0"));
    c.p0 = detail::number(j.at("p0"));
    for (const auto& w : j.at("omega_t")) c.omega_t.push_back(detail::number(w));
    c.grid_points = j.at("grid_points").get<std::size_t>();
    c.fock_n = j.at("fock_n").get<int>();
    if (!j.at("trunc_n").is_null()) c.trunc_n = j.at("trunc_n").get<long>();
    c.tol = detail::number(j.at("tol"));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.samples = j.at("samples").get<std::size_t>();
    const auto f = j.at("format").get<std::string>();
    if (f != "csv" && f != "json") throw ConfigError("unknown format " + f);
    c.format = f == "csv" ? Format::Csv : Format::Json;
    c.out = j.at("out").get<std::string>();
    if (!j.at("k").is_null()) c.k = detail::number(j.at("k"));
    c.commutators_only = j.at("commutators_only").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

/// Reads a RunConfig from a bare config file, a JSON artifact ("config"
/// key) or a CSV artifact ("# config: {...}" line).
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string tag = "# config: ";
  if (text.rfind("#", 0) == 0) {
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      if (line.rfind(tag, 0) == 0) return from_json(json::parse(line.substr(tag.size())));
    }
    throw ConfigError("no '# config:' line in " + path);
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return from_json(j.contains("config") ? j.at("config") : j);
}

inline void validate(const RunConfig& c) {
  try {
    (void)c.params();
    c.displacement().validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  for (double w : c.omega_t)
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("--omega-t values must be finite and >= 0");
  if (!(c.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (c.fock_n < 0) throw ConfigError("--fock-n must be >= 0");
  if ((c.command == Command::Verify || c.command == Command::Tof) && c.format == Format::Csv) {
    throw ConfigError(to_string(c.command) + " writes JSON only; pass --format json");
  }
  if (c.command == Command::Tof && c.fock_n > 2) throw ConfigError("tof supports --fock-n 0, 1 or 2");
  if (c.command == Command::Tof && c.samples == 0) throw ConfigError("--samples must be positive");
  if ((c.command == Command::Evolve || c.command == Command::Momentum) && c.fock_n > 1) {
    throw ConfigError(to_string(c.command) + " supports --fock-n 0 or 1");
  }
  if (c.fock_n > 0 && (c.x0 != 0.0 || c.p0 != 0.0) && c.command != Command::Verify) {
    throw ConfigError("--fock-n > 0 requires zero displacement");
  }
}

inline std::vector<double> sorted_times(const RunConfig& c, std::vector<double> fallback) {
  auto ts = c.omega_t.empty() ? std::move(fallback) : c.omega_t;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

/// Rendered artifact plus the exit status it implies.
struct Artifact {
  std::string body;
  int exit_code = kExitOk;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline json envelope(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["library_version"] = kVersion;
  j["generated_at"] = utc_timestamp();
  j["config"] = to_json(c);
  return j;
}

inline std::string csv_preamble(const RunConfig& c) {
  std::string s = "# sqz " + std::string(kVersion) + "\n";
  s += "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
  s += "# config: " + to_json(c).dump() + "\n";
  return s;
}

inline std::string csv_row(std::initializer_list<double> values) {
  std::string s;
  bool first = true;
  for (double v : values) {
    if (!first) s += ',';
    s += fmt17(v);
    first = false;
  }
  s += '\n';
  return s;
}

// Rotates `oracle` onto `reference` using the phase at the oracle's density peak.
inline cplx peak_phase(const std::vector<cplx>& reference, const std::vector<cplx>& oracle) {
  std::size_t peak = 0;
  for (std::size_t i = 1; i < oracle.size(); ++i)
    if (std::norm(oracle[i]) > std::norm(oracle[peak])) peak = i;
  const cplx r = reference[peak] / oracle[peak];
  return r / std::abs(r);
}

struct EvolveSlice {
  double omega_t = 0.0;
  double t = 0.0;
  std::vector<double> x;
  std::vector<cplx> analytic;
  std::vector<cplx> oracle;  // phase aligned
  double var_analytic = 0.0;
  double var_oracle = 0.0;
  double max_abs_dev = 0.0;
};

/// Closed-form psi(x, t) against the grid oracle at each requested time.
inline std::vector<EvolveSlice> evolve_slices(const RunConfig& c) {
  const auto params = c.params();
  const auto d = c.displacement();
  const auto times = sorted_times(c, {0.0, 1.0, 2.0});
  const double t_max = times.back() / params.omega();
  const auto g = grid::GridSpec::for_evolution(params, d, t_max, c.grid_points);
  const auto psi0 = c.fock_n == 0 ? grid::init_gaussian(g, params, d)
                                  : grid::init_from_function(g, [&](double x) {
                                      return cplx(analytic::sho_eigenfunction(1, x, params));
                                    });
  const double h = params.hbar();
  const double s0 = params.sigma0_sq();
  std::vector<EvolveSlice> out;
  for (double wt : times) {
    EvolveSlice s;
    s.omega_t = wt;
    s.t = wt / params.omega();
    const auto psi = grid::free_propagate(psi0, s.t, params);
    s.x.resize(g.points);
    s.analytic.resize(g.points);
    for (std::size_t i = 0; i < g.points; ++i) {
      const double x = g.x(i);
      s.x[i] = x;
      s.analytic[i] = c.fock_n == 0
                          ? std::exp(I * (d.p0 * d.x0 / h)) * analytic::psi_xt(x - d.x0, s.t, params, d.p0)
                          : analytic::psi_1_xt(x, s.t, params);
    }
    const cplx ph = peak_phase(s.analytic, psi.samples);
    s.oracle = psi.samples;
    for (auto& z : s.oracle) z *= ph;
    for (std::size_t i = 0; i < g.points; ++i)
      s.max_abs_dev = std::max(s.max_abs_dev, std::abs(s.analytic[i] - s.oracle[i]));
    s.var_analytic = (2 * c.fock_n + 1) * s0 * (1.0 + wt * wt);
    s.var_oracle = grid::moments(psi).var_x;
    out.push_back(std::move(s));
  }
  return out;
}

inline Artifact cmd_evolve(const RunConfig& c) {
  const auto slices = evolve_slices(c);
  Artifact a;
  double worst = 0.0;
  if (c.format == Format::Csv) {
    a.body = csv_preamble(c);
    a.body += "t,x,re_psi,im_psi,density_analytic,density_oracle,abs_dev,variance_analytic,variance_oracle\n";
    for (const auto& s : slices) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const cplx z = s.analytic[i];
        a.body += csv_row({s.t, s.x[i], z.real(), z.imag(), std::norm(z), std::norm(s.oracle[i]),
                           std::abs(z - s.oracle[i]), s.var_analytic, s.var_oracle});
      }
      worst = std::max(worst, s.max_abs_dev);
    }
  } else {
    json j = envelope(c);
    json arr = json::array();
    for (const auto& s : slices) {
      json e;
      e["omega_t"] = fmt17(s.omega_t);
      e["t"] = fmt17(s.t);
      e["variance_analytic"] = fmt17(s.var_analytic);
      e["variance_oracle"] = fmt17(s.var_oracle);
      e["max_abs_dev"] = fmt17(s.max_abs_dev);
      json x = json::array(), re = json::array(), im = json::array(), dev = json::array();
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        x.push_back(fmt17(s.x[i]));
        re.push_back(fmt17(s.analytic[i].real()));
        im.push_back(fmt17(s.analytic[i].imag()));
        dev.push_back(fmt17(std::abs(s.analytic[i] - s.oracle[i])));
      }
      e["x"] = x;
      e["re_psi"] = re;
      e["im_psi"] = im;
      e["abs_dev"] = dev;
      arr.push_back(e);
      worst = std::max(worst, s.max_abs_dev);
    }
    j["slices"] = arr;
    a.body = j.dump(1) + "\n";
  }
  if (worst > c.tol) a.exit_code = kExitTolerance;
  return a;
}

/// Momentum amplitude from the grid oracle against phi(p, t).
inline Artifact cmd_momentum(const RunConfig& c) {
  const auto params = c.params();
  const auto d = c.displacement();
  const auto times = sorted_times(c, {0.0, 1.0, 2.0});
  const auto g = grid::GridSpec::for_evolution(params, d, times.back() / params.omega(), c.grid_points);
  const auto psi0 = c.fock_n == 0 ? grid::init_gaussian(g, params, d)
                                  : grid::init_from_function(g, [&](double x) {
                                      return cplx(analytic::sho_eigenfunction(1, x, params));
                                    });
  const double h = params.hbar();
  Artifact a;
  double worst = 0.0;
  json slices = json::array();
  if (c.format == Format::Csv) {
    a.body = csv_preamble(c);
    a.body += "t,p,re_phi,im_phi,density_analytic,density_oracle,abs_dev\n";
  }
  for (double wt : times) {
    const double t = wt / params.omega();
    const auto rep = grid::momentum_representation(grid::free_propagate(psi0, t, params), params);
    std::vector<cplx> exact(rep.p.size());
    for (std::size_t i = 0; i < rep.p.size(); ++i) {
      const double p = rep.p[i];
      exact[i] = c.fock_n == 0
                     ? analytic::phi_pt(p, t, params, d.p0) * std::exp(-I * ((p - d.p0) * d.x0 / h))
                     : analytic::phi_n_pt(c.fock_n, p, t, params);
    }
    const cplx ph = peak_phase(exact, rep.phi);
    double slice_worst = 0.0;
    json jp = json::array(), jre = json::array(), jim = json::array(), jdev = json::array();
    for (std::size_t i = 0; i < rep.p.size(); ++i) {
      const cplx o = rep.phi[i] * ph;
      const double dev = std::abs(exact[i] - o);
      slice_worst = std::max(slice_worst, dev);
      if (c.format == Format::Csv) {
        a.body += csv_row({t, rep.p[i], exact[i].real(), exact[i].imag(), std::norm(exact[i]), std::norm(o), dev});
      } else {
        jp.push_back(fmt17(rep.p[i]));
        jre.push_back(fmt17(exact[i].real()));
        jim.push_back(fmt17(exact[i].imag()));
        jdev.push_back(fmt17(dev));
      }
    }
    worst = std::max(worst, slice_worst);
    if (c.format == Format::Json) {
      json e;
      e["omega_t"] = fmt17(wt);
      e["t"] = fmt17(t);
      e["max_abs_dev"] = fmt17(slice_worst);
      e["p"] = jp;
      e["re_phi"] = jre;
      e["im_phi"] = jim;
      e["abs_dev"] = jdev;
      slices.push_back(e);
    }
  }
  if (c.format == Format::Json) {
    json j = envelope(c);
    j["slices"] = slices;
    a.body = j.dump(1) + "\n";
  }
  if (worst > c.tol) a.exit_code = kExitTolerance;
  return a;
}

/// Moments of a Fock-space state evolved with the truncated propagator.
inline Artifact cmd_fock(const RunConfig& c) {
  const auto params = c.params();
  const auto d = c.displacement();
  const Eigen::Index n = c.trunc_n.value_or(256);
  const auto times = sorted_times(c, {0.5, 1.0, 2.0});
  fock::FockState init;
  try {
    init = c.fock_n > 0 ? fock::fock_state(n, c.fock_n)
                        : fock::apply(fock::displacement_op(n, params, d), fock::fock_state(n, 0));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const auto xop = fock::position_op(n, params);
  const auto pop = fock::momentum_op(n, params);
  struct Row {
    double t, norm, mean_x, var_x, mean_p, var_p, var_x_analytic, rel_dev, tail;
    bool converged;
  };
  std::vector<Row> rows;
  double worst = 0.0;
  for (double wt : times) {
    const double t = wt / params.omega();
    const auto st = fock::apply(fock::free_evolution_op(n, params, t), init);
    const double expect_var = (2 * c.fock_n + 1) * params.sigma0_sq() * (1.0 + wt * wt);
    Row r{t,
          st.norm(),
          fock::expectation(xop, st).real(),
          fock::variance(xop, st),
          fock::expectation(pop, st).real(),
          fock::variance(pop, st),
          expect_var,
          0.0,
          st.tail_mass(),
          st.converged()};
    r.rel_dev = std::abs(r.var_x - expect_var) / expect_var;
    worst = std::max(worst, r.rel_dev);
    rows.push_back(r);
  }
  Artifact a;
  if (c.format == Format::Csv) {
    a.body = csv_preamble(c);
    a.body += "t,norm,mean_x,var_x,mean_p,var_p,var_x_analytic,rel_dev,tail_mass,converged\n";
    for (const auto& r : rows) {
      auto line = csv_row({r.t, r.norm, r.mean_x, r.var_x, r.mean_p, r.var_p, r.var_x_analytic, r.rel_dev, r.tail});
      line.pop_back();
      a.body += line + (r.converged ? ",1\n" : ",0\n");
    }
  } else {
    json j = envelope(c);
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"t", fmt17(r.t)},
                     {"norm", fmt17(r.norm)},
                     {"mean_x", fmt17(r.mean_x)},
                     {"var_x", fmt17(r.var_x)},
                     {"mean_p", fmt17(r.mean_p)},
                     {"var_p", fmt17(r.var_p)},
                     {"var_x_analytic", fmt17(r.var_x_analytic)},
                     {"rel_dev", fmt17(r.rel_dev)},
                     {"tail_mass", fmt17(r.tail)},
                     {"converged", r.converged}});
    }
    j["rows"] = arr;
    a.body = j.dump(1) + "\n";
  }
  if (worst > c.tol) a.exit_code = kExitTolerance;
  return a;
}

struct Check {
  std::string identity;
  double residual = 0.0;
  double threshold = 0.0;
  bool exact = false;  // threshold means "exactly zero"
  [[nodiscard]] bool pass() const { return exact ? residual == 0.0 : residual < threshold; }
};

/// The algebraic and operator identities, each with its residual.
inline std::vector<Check> verification_checks(const RunConfig& c) {
  using algebra::Branch;
  std::vector<Check> out;
  const auto rep = algebra::verify_rep_commutators();
  for (const auto& chk : rep.checks) {
    out.push_back({"commutator " + chk.identity, chk.exact_zero() ? 0.0 : 1.0, 0.0, true});
  }
  for (auto br : {Branch::Plus, Branch::Minus}) {
    const bool zero = algebra::is_zero(algebra::nilpotency_residual(br));
    out.push_back({std::string("nilpotency M") + algebra::to_string(br) + "^2", zero ? 0.0 : 1.0, 0.0, true});
  }
  if (c.commutators_only) return out;

  const auto params = c.params();
  std::vector<double> ks = c.k ? std::vector<double>{*c.k} : std::vector<double>{0.1, 0.25, 0.5};
  const Eigen::Index n_dis = c.trunc_n.value_or(128);

  // 2x2 reassembly: either the requested k or 200 seeded random draws.
  std::vector<cplx> sample_k;
  if (c.k) {
    sample_k.push_back(*c.k);
  } else {
    std::mt19937_64 gen(c.seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    while (sample_k.size() < 200) sample_k.emplace_back(u(gen), u(gen));
  }
  for (auto br : {Branch::Plus, Branch::Minus}) {
    double worst = 0.0;
    for (cplx k : sample_k) {
      if (std::abs(algebra::pole_factor(k, br)) < 1e-3) continue;
      const auto lhs = algebra::exp_simplified_squeeze_2x2(k, br);
      const auto rhs = algebra::reassemble_2x2(algebra::disentangle_factors(k, br));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    out.push_back({std::string("2x2 reassembly, branch ") + algebra::to_string(br), worst, 1e-13, false});
  }

  for (double k : ks) {
    for (auto br : {Branch::Plus, Branch::Minus}) {
      const auto r = fock::verify_disentangling(n_dis, k, br);
      const bool trivial = k == 0.0;
      std::string label = "disentangling N=" + std::to_string(n_dis) + " k=" + fmt17(k) + " branch " +
                          algebra::to_string(br);
      out.push_back({label, r.residual, 1e-8, trivial});
      out.push_back({"vacuum action " + label.substr(14), r.vacuum_residual, 1e-10, trivial});
    }
  }

  const double p0 = c.p0 != 0.0 ? c.p0 : 1.0;
  const auto b = fock::verify_braiding(n_dis, params, p0);
  out.push_back({"braiding N=" + std::to_string(n_dis) + " p0=" + fmt17(p0), b.residual, 1e-6, false});

  const Eigen::Index n_op = c.trunc_n.value_or(256);
  for (double wt : sorted_times(c, {1.0})) {
    const double t = wt / params.omega();
    const auto u = fock::free_evolution_op(n_op, params, t);
    const auto s = algebra::free_evolution_squeeze_params(t, params.omega());
    const auto sq = fock::squeeze_general(n_op, s.xi, s.eta);
    out.push_back({"free evolution = squeeze N=" + std::to_string(n_op) + " omega_t=" + fmt17(wt),
                   column_residual(u.matrix, sq.matrix, n_op / 2), 1e-10, false});
    const cplx k2 = algebra::position_stage_k(wt);
    const cplx lhs = I * k2 / algebra::pole_factor(k2, algebra::Branch::Plus);
    out.push_back({"position stage coefficient omega_t=" + fmt17(wt),
                   std::abs(lhs - algebra::free_evolution_vacuum_coefficient(wt)), 1e-14, false});
  }
  return out;
}

inline Artifact cmd_verify(const RunConfig& c) {
  const auto checks = verification_checks(c);
  json j = envelope(c);
  json arr = json::array();
  bool all = true;
  for (const auto& chk : checks) {
    arr.push_back({{"identity", chk.identity},
                   {"residual", fmt17(chk.residual)},
                   {"threshold", chk.exact ? json("exact") : json(fmt17(chk.threshold))},
                   {"pass", chk.pass()}});
    all = all && chk.pass();
  }
  j["checks"] = arr;
  j["all_pass"] = all;
  return {j.dump(1) + "\n", all ? kExitOk : kExitTolerance};
}

inline Artifact cmd_tof(const RunConfig& c) {
  const auto params = c.params();
  const int n = c.fock_n;
  json j = envelope(c);
  json runs = json::array();
  const auto momenta = tof::momentum_cdf(n, params);
  for (double wt : sorted_times(c, {10.0})) {
    if (!(wt > 0.0)) throw ConfigError("tof needs --omega-t > 0");
    const double t = wt / params.omega();
    const auto run = tof::run_tof(n, t, c.samples, c.seed, params);
    const auto st = tof::sample_stats(run.inferred_momenta);
    const double predicted = tof::predicted_inferred_variance(n, t, params);
    const double half = 6.0 * std::sqrt(predicted);
    const auto hist = tof::histogram(run.inferred_momenta, -half, half, 81);
    json centers = json::array(), counts = json::array();
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
      centers.push_back(fmt17(hist.center(i)));
      counts.push_back(hist.counts[i]);
    }
    json e;
    e["omega_t"] = fmt17(wt);
    e["t"] = fmt17(t);
    e["fock_n"] = n;
    e["samples"] = c.samples;
    e["seed"] = c.seed;
    e["rng"] = run.rng;
    e["inferred_mean"] = fmt17(st.mean);
    e["inferred_variance"] = fmt17(st.variance);
    e["trapped_variance"] = fmt17(tof::momentum_variance(n, params));
    e["predicted_inferred_variance"] = fmt17(predicted);
    e["systematic_error_prediction"] = fmt17(tof::tof_systematic_error(t, params));
    if (n == 0) {
      // Gaussian sample variance has relative sd sqrt(2/(samples-1)).
      const double band = 3.0 * predicted * std::sqrt(2.0 / static_cast<double>(c.samples - 1));
      e["monte_carlo_band_3sigma"] = fmt17(band);
      e["within_band"] = std::abs(st.variance - predicted) < band;
    }
    e["ks_to_trapped"] = fmt17(tof::ks_distance(run.inferred_momenta, momenta));
    e["histogram"] = {{"bin_centers", centers}, {"counts", counts}, {"bin_width", fmt17(hist.width())}};
    runs.push_back(e);
  }
  j["runs"] = runs;
  return {j.dump(1) + "\n", kExitOk};
}

/// Runs the command described by c. Library domain errors raised while
/// setting up the run are reported as configuration errors.
inline Artifact execute(const RunConfig& c) {
  validate(c);
  try {
    switch (c.command) {
      case Command::Evolve: return cmd_evolve(c);
      case Command::Momentum: return cmd_momentum(c);
      case Command::Fock: return cmd_fock(c);
      case Command::Verify: return cmd_verify(c);
      case Command::Tof: return cmd_tof(c);
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  } catch (const SingularityError& e) {
    throw ConfigError(e.what());
  } catch (const WraparoundError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown command");
}

/// Strips the timestamp so two artifacts can be compared byte for byte.
inline std::string numeric_payload(const std::string& body) {
  std::istringstream in(body);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    if (line.find("\"generated_at\"") != std::string::npos) continue;
    out += line + '\n';
  }
  return out;
}

inline int main_entry(int argc, const char* const* argv, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
  CLI::App app{"sqz: free expansion of oscillator states as squeezing"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format = "csv", config_path;
  double sigma = 0.0;
  long trunc = 0;
  double k = 0.0;
  std::map<std::string, CLI::Option*> opts;
  std::map<std::string, CLI::App*> subs;

  auto add_common = [&](CLI::App* s) {
    auto* om = s->add_option("--omega", cfg.omega, "trap angular frequency");
    auto* sg = s->add_option("--sigma", sigma, "initial position width; sets omega = hbar/(2 m sigma^2)");
    om->excludes(sg);
    opts[s->get_name() + "omega"] = om;
    opts[s->get_name() + "sigma"] = sg;
    opts[s->get_name() + "mass"] = s->add_option("--mass", cfg.mass, "particle mass");
    opts[s->get_name() + "hbar"] = s->add_option("--hbar", cfg.hbar, "reduced Planck constant");
    opts[s->get_name() + "p0"] = s->add_option("--p0", cfg.p0, "initial momentum kick");
    opts[s->get_name() + "x0"] = s->add_option("--x0", cfg.x0, "initial centre");
    opts[s->get_name() + "omega-t"] =
        s->add_option("--omega-t", cfg.omega_t, "dimensionless times, comma separated")->delimiter(',');
    opts[s->get_name() + "grid-points"] = s->add_option("--grid-points", cfg.grid_points, "grid size (power of two)");
    opts[s->get_name() + "fock-n"] = s->add_option("--fock-n", cfg.fock_n, "Fock state index");
    opts[s->get_name() + "trunc-N"] = s->add_option("--trunc-N", trunc, "Fock truncation dimension");
    opts[s->get_name() + "tol"] = s->add_option("--tol", cfg.tol, "tolerance for exit code 3");
    opts[s->get_name() + "seed"] = s->add_option("--seed", cfg.seed, "RNG seed");
    opts[s->get_name() + "samples"] = s->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    opts[s->get_name() + "format"] =
        s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    opts[s->get_name() + "out"] = s->add_option("--out", cfg.out, "output path, '-' for stdout");
    opts[s->get_name() + "config"] =
        s->add_option("--config", config_path, "config file or earlier artifact; flags override it");
  };
  for (const auto& [name, cmd] : command_names()) {
    static const std::map<std::string, std::string> about{
        {"evolve", "position wavefunction and density after free flight, checked against the grid oracle"},
        {"momentum", "momentum wavefunction and density, checked for stationarity"},
        {"fock", "moments of a Fock state evolved in a truncated Fock basis"},
        {"verify", "operator identities with residuals and thresholds"},
        {"tof", "time-of-flight momentum inference from sampled positions"},
    };
    auto* s = app.add_subcommand(name, about.at(name));
    subs[name] = s;
    add_common(s);
  }
  opts["verifyk"] = subs["verify"]->add_option("--k", k, "restrict disentangling checks to this k");
  opts["verifycommutators"] = subs["verify"]->add_flag("--commutators", cfg.commutators_only,
                                                        "only the exact commutator and nilpotency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::string name;
  for (const auto& [n, s] : subs)
    if (s->parsed()) name = n;
  const auto given = [&](const std::string& flag) {
    const auto it = opts.find(name + flag);
    return it != opts.end() && it->second->count() > 0;
  };

  RunConfig run;
  try {
    if (!config_path.empty()) {
      run = load_config(config_path);
      if (to_string(run.command) != name) throw ConfigError("config is for '" + to_string(run.command) + "'");
    }
    run.command = command_names().at(name);
    if (config_path.empty() || given("mass")) run.mass = cfg.mass;
    if (config_path.empty() || given("hbar")) run.hbar = cfg.hbar;
    if (given("sigma")) {
      run.sigma = sigma;
    } else if (given("omega")) {
      run.sigma.reset();
      run.omega = cfg.omega;
    } else if (config_path.empty()) {
      run.omega = cfg.omega;
    }
    if (config_path.empty() || given("p0")) run.p0 = cfg.p0;
    if (config_path.empty() || given("x0")) run.x0 = cfg.x0;
    if (config_path.empty() || given("omega-t")) run.omega_t = cfg.omega_t;
    if (config_path.empty() || given("grid-points")) run.grid_points = cfg.grid_points;
    if (config_path.empty() || given("fock-n")) run.fock_n = cfg.fock_n;
    if (given("trunc-N")) run.trunc_n = trunc;
    if (config_path.empty() || given("tol")) run.tol = cfg.tol;
    if (config_path.empty() || given("seed")) run.seed = cfg.seed;
    if (config_path.empty() || given("samples")) run.samples = cfg.samples;
    if (given("format")) {
      run.format = format == "csv" ? Format::Csv : Format::Json;
    } else if (config_path.empty()) {
      run.format = (run.command == Command::Verify || run.command == Command::Tof) ? Format::Json : Format::Csv;
    }
    if (config_path.empty() || given("out")) run.out = cfg.out;
    if (given("k")) run.k = k;
    if (given("commutators")) run.commutators_only = cfg.commutators_only;

    const auto art = execute(run);
    if (run.out == "-") {
      out << art.body;
    } else {
      std::ofstream f(run.out, std::ios::binary);
      if (!f) throw ConfigError("cannot write " + run.out);
      f << art.body;
    }
    if (art.exit_code == kExitTolerance) err << "sqz: tolerance exceeded\n";
    return art.exit_code;
  } catch (const ConfigError& e) {
    err << "sqz: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace sqz::cli
