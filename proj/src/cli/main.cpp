#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "garouter/analysis.hpp"

namespace {

using garouter::AxisKind;
using garouter::Error;
using garouter::FormVariant;
using garouter::ModelParams;
using garouter::SolverChoice;
using garouter::SweepAxis;
using garouter::SweepResult;
using garouter::SweepSpec;
using nlohmann::json;

constexpr double kPi = std::numbers::pi;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Probability-scale columns: subnormal-range values are written as plain 0.
std::string fmt_prob(double v) {
  if (std::isnan(v)) return "nan";
  if (std::abs(v) < 1e-300) return "0";
  return fmt17(v);
}

std::string iso_utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out.good()) throw Error("write failed: " + path);
}

// Every option takes the last occurrence so config-file tokens (injected
// before the command-line tokens) lose to explicit flags.
CLI::Option* last(CLI::Option* opt) {
  return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

std::string trim(std::string s) {
  const auto from = s.find_first_not_of(" \t\r");
  const auto to = s.find_last_not_of(" \t\r");
  if (from == std::string::npos) return "";
  s = s.substr(from, to - from + 1);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    s = s.substr(1, s.size() - 2);
  return s;
}

// Flat key=value lines mirroring the long flag names; '#' starts a comment.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config line is not key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw Error("config line has an empty key: " + line);
    if (key == "config")
      throw Error("config files cannot chain further config files");
    tokens.push_back("--" + key);
    tokens.push_back(val);
  }
  return tokens;
}

struct Options {
  std::string config;
  double omega_0 = 0.0;
  double xi = 1.0;
  double omega_e = 0.0;
  double omega_s_prime = 0.0;
  double omega_big = 0.0;
  double j = 0.0;
  double g = 0.0;
  int n = 2;
  int m = 0;  // 0 -> follow n

  double e_min = -2.0;
  double e_max = 2.0;
  int steps = 801;
  std::string solver = "closed";
  std::string variant = "site-resolved";
  double fixed_k = kPi / 2.0;
  double pole_guard = garouter::kDefaultPoleGuard;
  double tol = 1e-8;
  std::string out;
  std::string format = "csv";

  std::string axis = "n";
  double axis_min = 2.0;
  double axis_max = 20.0;
  int axis_steps = 0;  // 0 -> one step per integer (n axis) or 101

  std::uint64_t seed = 42;
  int draws = 1000;
};

void add_config_flag(CLI::App* sub, Options& o) {
  last(sub->add_option("--config", o.config,
                       "flat key=value config file (flags win)"));
}

void add_model_flags(CLI::App* sub, Options& o) {
  last(sub->add_option("--n", o.n, "number of waveguide sites bridged (>= 2)"));
  last(sub->add_option("--m", o.m, "atom count (default: equal to --n)"));
  last(sub->add_option("--j", o.j, "atom-atom hopping J"));
  last(sub->add_option("--g", o.g, "atom-waveguide coupling g"));
  last(sub->add_option("--xi", o.xi, "waveguide hopping (> 0)"));
  last(sub->add_option("--omega-0", o.omega_0, "waveguide site frequency"));
  last(sub->add_option("--omega-e", o.omega_e,
                       "atom excited-state frequency"));
  last(sub->add_option("--omega-s-prime", o.omega_s_prime,
                       "third-state frequency (shifted)"));
  last(sub->add_option("--omega-big", o.omega_big,
                       "classical drive amplitude"));
}

CLI::Option* add_sweep_flags(CLI::App* sub, Options& o) {
  last(sub->add_option("--e-min", o.e_min, "sweep start energy"));
  last(sub->add_option("--e-max", o.e_max, "sweep end energy"));
  last(sub->add_option("--steps", o.steps, "energy grid points"));
  last(sub->add_option("--solver", o.solver, "closed | oracle | both")
           ->check(CLI::IsMember({"closed", "oracle", "both"})));
  last(sub->add_option("--variant", o.variant,
                       "closed-form variant: site-resolved | uniform-dressed")
           ->check(CLI::IsMember({"site-resolved", "uniform-dressed"})));
  last(sub->add_option("--pole-guard", o.pole_guard,
                       "minimum distance to collective-mode poles"));
  last(sub->add_option("--tol", o.tol,
                       "deviation tolerance (solver comparisons)"));
  last(sub->add_option("--out", o.out, "output file path"));
  last(sub->add_option("--format", o.format, "output format: csv | json")
           ->check(CLI::IsMember({"csv", "json"})));
  return last(sub->add_option(
      "--fixed-k", o.fixed_k,
      "pin the incident wavenumber (diagnostic, closed form only)"));
}

ModelParams to_params(const Options& o) {
  ModelParams p;
  p.omega_0 = o.omega_0;
  p.xi = o.xi;
  p.omega_e = o.omega_e;
  p.omega_s_prime = o.omega_s_prime;
  p.omega_big = o.omega_big;
  p.j_coupling = o.j;
  p.g = o.g;
  p.n_sites = o.n;
  p.m_atoms = o.m > 0 ? o.m : o.n;
  return p;
}

SolverChoice parse_solver(const std::string& s) {
  if (s == "oracle") return SolverChoice::Oracle;
  if (s == "both") return SolverChoice::Both;
  return SolverChoice::ClosedForm;
}

FormVariant parse_variant(const std::string& s) {
  return s == "uniform-dressed" ? FormVariant::UniformDressed
                                : FormVariant::SiteResolved;
}

json model_json(const ModelParams& p) {
  return json{{"omega_0", p.omega_0},
              {"xi", p.xi},
              {"omega_e", p.omega_e},
              {"omega_s_prime", p.omega_s_prime},
              {"omega_big", p.omega_big},
              {"j_coupling", p.j_coupling},
              {"g", p.g},
              {"n_sites", p.n_sites},
              {"m_atoms", p.m_atoms}};
}

json resolved_config(const std::string& subcommand, const Options& o,
                     const SweepSpec& spec, bool has_fixed_k) {
  json axis1{{"kind", "energy"},
             {"min", spec.axis1.min},
             {"max", spec.axis1.max},
             {"steps", spec.axis1.steps}};
  json cfg{{"subcommand", subcommand},
           {"model", model_json(spec.base)},
           {"axis1", axis1},
           {"solver", o.solver},
           {"variant", o.variant},
           {"fixed_k", has_fixed_k ? json(o.fixed_k) : json(nullptr)},
           {"diagnostic", has_fixed_k},
           {"pole_guard", spec.pole_guard},
           {"deviation_tolerance", spec.deviation_tolerance},
           {"output", o.out},
           {"format", o.format},
           {"thread_cap", garouter::thread_cap_from_env()}};
  if (spec.axis2) {
    cfg["axis2"] = json{{"kind", o.axis},
                        {"min", spec.axis2->min},
                        {"max", spec.axis2->max},
                        {"steps", spec.axis2->steps}};
  }
  return cfg;
}

void write_sidecar(const std::string& data_path, const json& cfg,
                   double wall_seconds) {
  json meta{{"tool", "garouter"},
            {"version", GAROUTER_VERSION},
            {"generated_at", iso_utc_now()},
            {"wall_time_seconds", wall_seconds},
            {"config", cfg}};
  write_file(data_path + ".meta.json", meta.dump(2) + "\n");
}

// Rows serialized in grid order; the sidecar carries the wall time so the
// data file itself is byte-identical across reruns of the same config.
void write_table(const std::string& path, const std::string& format,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows,
                 int prob_cols_from, const json& cfg) {
  if (format == "json") {
    json jrows = json::array();
    for (const auto& r : rows) {
      json jr = json::array();
      for (size_t c = 0; c < r.size(); ++c) {
        if (std::isnan(r[c]))
          jr.push_back(nullptr);
        else
          jr.push_back(r[c]);
      }
      jrows.push_back(std::move(jr));
    }
    json doc{{"columns", columns}, {"rows", jrows}, {"config", cfg}};
    write_file(path, doc.dump(2) + "\n");
    return;
  }
  std::string buf;
  buf.reserve(rows.size() * 140 + 128);
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c) buf += ',';
    buf += columns[c];
  }
  buf += '\n';
  for (const auto& r : rows) {
    for (size_t c = 0; c < r.size(); ++c) {
      if (c) buf += ',';
      buf += static_cast<int>(c) < prob_cols_from ? fmt17(r[c])
                                                  : fmt_prob(r[c]);
    }
    buf += '\n';
  }
  write_file(path, buf);
}

int run_grid_command(const std::string& name, const Options& o,
                     bool has_fixed_k, bool is_map) {
  ModelParams p = to_params(o);
  const SolverChoice solver = parse_solver(o.solver);
  garouter::validate(p, solver == SolverChoice::Oracle
                            ? garouter::ValidationContext::General
                            : garouter::ValidationContext::ClosedForm);
  if (o.steps < 1) throw Error("--steps must be at least 1");

  SweepSpec spec;
  spec.base = p;
  spec.axis1 = SweepAxis{AxisKind::Energy, o.e_min, o.e_max, o.steps, {}};
  spec.solver = solver;
  spec.variant = parse_variant(o.variant);
  spec.pole_guard = o.pole_guard;
  spec.deviation_tolerance = o.tol;
  if (has_fixed_k) spec.fixed_k = o.fixed_k;

  if (is_map) {
    AxisKind kind;
    if (o.axis == "n")
      kind = AxisKind::NSites;
    else if (o.axis == "j")
      kind = AxisKind::JCoupling;
    else if (o.axis == "g")
      kind = AxisKind::Coupling;
    else
      kind = AxisKind::OmegaBig;
    int steps = o.axis_steps;
    if (steps < 1)
      steps = kind == AxisKind::NSites
                  ? static_cast<int>(std::lround(o.axis_max - o.axis_min)) + 1
                  : 101;
    spec.axis2 = SweepAxis{kind, o.axis_min, o.axis_max, steps, {}};
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SweepResult res = garouter::run_sweep(spec, garouter::thread_cap_from_env());
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const bool dev_col = !is_map && solver == SolverChoice::Both;
  std::vector<std::string> columns;
  if (is_map)
    columns = {"axis1", "axis2", "R_A", "T_A", "T_B_back", "T_B_fwd",
               "residual"};
  else {
    columns = {"E", "R_A", "T_A", "T_B_back", "T_B_fwd", "residual"};
    if (dev_col) columns.push_back("dev");
  }

  std::vector<std::vector<double>> rows;
  rows.reserve(res.points.size());
  bool breach = false;
  for (const auto& pt : res.points) {
    std::vector<double> r;
    r.push_back(pt.axis1);
    if (is_map) r.push_back(pt.axis2);
    r.push_back(pt.probs.reflect_a);
    r.push_back(pt.probs.transmit_a);
    r.push_back(pt.probs.transfer_back);
    r.push_back(pt.probs.transfer_fwd);
    r.push_back(pt.probs.conservation_residual);
    if (dev_col) r.push_back(pt.deviation);
    rows.push_back(std::move(r));
    if (solver == SolverChoice::Both && pt.ok && pt.deviation > o.tol)
      breach = true;
  }

  std::string out = o.out;
  if (out.empty()) out = name + (o.format == "json" ? ".json" : ".csv");
  Options resolved = o;
  resolved.out = out;
  const json cfg = resolved_config(name, resolved, spec, has_fixed_k);
  write_table(out, o.format, columns, rows, is_map ? 2 : 1, cfg);
  write_sidecar(out, cfg, wall);

  if (breach) {
    std::cerr << "deviation tolerance exceeded (see " << out << ")\n";
    return 3;
  }
  return 0;
}

int cmd_verify(const Options& o) {
  if (o.draws < 1) throw Error("--draws must be at least 1");
  std::mt19937_64 rng(o.seed);
  // Fixed-width mantissa draw keeps the stream identical across platforms.
  auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

  double max_dev = 0.0;
  int failures = 0;
  std::vector<double> residuals;
  residuals.reserve(o.draws);
  std::vector<std::string> failed;

  for (int d = 0; d < o.draws; ++d) {
    ModelParams p;
    double energy = 0.0;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw Error("rejection sampling failed to converge");
      p = ModelParams{};
      p.omega_0 = 0.0;
      p.xi = 1.0;
      p.n_sites = p.m_atoms = 2 + static_cast<int>(uniform() * 9.0);
      p.j_coupling = 0.001 + 0.099 * uniform();
      p.g = 0.1 + 1.9 * uniform();
      p.omega_e = -0.5 + uniform();
      if (uniform() < 0.5) {
        p.omega_big = 0.0;
        p.omega_s_prime = 0.0;
      } else {
        p.omega_big = 0.05 + 0.45 * uniform();
        p.omega_s_prime = -1.0 + 2.0 * uniform();
      }
      energy = -1.9 + 3.8 * uniform();
      if (p.omega_big != 0.0 && std::abs(energy - p.omega_s_prime) < 0.1)
        continue;
      try {
        // Rejects draws within 1e-4 of a collective-mode pole, where both
        // solvers lose digits for different reasons.
        (void)garouter::gamma(energy, p, 1e-4);
      } catch (const Error&) {
        continue;
      }
      break;
    }

    try {
      const auto report = garouter::compare_with_closed_form(energy, p, o.tol);
      const auto probs = garouter::probabilities(
          garouter::physical_amplitudes(garouter::sa_amplitudes(energy, p)));
      residuals.push_back(probs.conservation_residual);
      max_dev = std::max(max_dev, report.max_deviation);
      if (!report.pass) {
        ++failures;
        if (failed.size() < 10)
          failed.push_back("draw " + std::to_string(d) + ": E=" +
                           fmt17(energy) + " N=" + std::to_string(p.n_sites) +
                           " J=" + fmt17(p.j_coupling) + " g=" + fmt17(p.g) +
                           " omega_e=" + fmt17(p.omega_e) + " omega_big=" +
                           fmt17(p.omega_big) + " dev=" +
                           fmt17(report.max_deviation));
      }
    } catch (const Error& e) {
      ++failures;
      if (failed.size() < 10)
        failed.push_back("draw " + std::to_string(d) + ": " + e.what());
    }
  }

  std::sort(residuals.begin(), residuals.end());
  std::string report;
  report += "randomized solver cross-check: " + std::to_string(o.draws) +
            " draws, seed " + std::to_string(o.seed) + "\n";
  report += "max deviation = " + fmt17(max_dev) + " (tolerance " +
            fmt17(o.tol) + ")\n";
  if (!residuals.empty()) {
    report += "conservation residual min/median/max = " +
              fmt17(residuals.front()) + " / " +
              fmt17(residuals[residuals.size() / 2]) + " / " +
              fmt17(residuals.back()) + "\n";
  }
  report += "failures: " + std::to_string(failures) + "\n";
  for (const auto& line : failed) report += "  " + line + "\n";
  report += failures == 0 ? "PASS\n" : "FAIL\n";

  std::cout << report;
  if (!o.out.empty()) write_file(o.out, report);
  return failures == 0 ? 0 : 3;
}

int cmd_period(const Options& o) {
  ModelParams p = to_params(o);
  garouter::validate(p, garouter::ValidationContext::ClosedForm);
  if (o.steps < 1) throw Error("--steps must be at least 1");

  SweepSpec spec;
  spec.base = p;
  spec.axis1 = SweepAxis{AxisKind::Energy, o.e_min, o.e_max, o.steps, {}};
  spec.fixed_k = o.fixed_k;
  spec.solver = SolverChoice::ClosedForm;
  spec.variant = parse_variant(o.variant);
  spec.pole_guard = o.pole_guard;

  const auto pa = garouter::estimate_period_numeric(spec);
  const int n = p.n_sites;

  std::string report;
  report += "spectral periodicity diagnostic (pinned incident wavenumber; "
            "not a physical spectrum)\n";
  report += "k_pinned = " + fmt17(o.fixed_k) + ", N = " + std::to_string(n) +
            ", energy grid [" + fmt17(o.e_min) + ", " + fmt17(o.e_max) +
            "] x " + std::to_string(o.steps) + "\n";
  report += "phi = k * (N - 1) = " + fmt17(pa.phi) + "\n";
  report += "Delta_E_exact  = ";
  report += std::isnan(pa.delta_e_exact)
                ? "n/a (shifted wavenumber leaves the band)"
                : fmt17(pa.delta_e_exact);
  report += "\n";
  report += "Delta_E_taylor = " + fmt17(pa.delta_e_taylor) + "\n";
  report += "candidate 4*pi/N = " + fmt17(pa.delta_e_leading) + "\n";
  report += "candidate 4/N    = " + fmt17(4.0 / n) + "\n";
  report += "candidate 4*N    = " + fmt17(4.0 * n) + "\n";
  if (pa.tau_estimate)
    report += "tau_estimate = " + fmt17(*pa.tau_estimate) +
              " (transfer-spectrum autocorrelation)\n";
  else
    report += "tau_estimate = none (no finite period detected)\n";

  std::cout << report;
  if (!o.out.empty()) write_file(o.out, report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-photon router: scattering spectra for an atom chain "
               "bridging two tight-binding waveguides"};
  app.require_subcommand(1);

  Options so;
  auto* spectrum = app.add_subcommand(
      "spectrum", "1D energy sweep of routing probabilities");
  add_config_flag(spectrum, so);
  add_model_flags(spectrum, so);
  auto* so_fk = add_sweep_flags(spectrum, so);

  Options mo;
  mo.steps = 401;
  auto* map = app.add_subcommand(
      "map", "2D sweep: energy x {n | j | g | omega-big}");
  add_config_flag(map, mo);
  add_model_flags(map, mo);
  auto* mo_fk = add_sweep_flags(map, mo);
  last(map->add_option("--axis", mo.axis, "second axis: n | j | g | omega-big")
           ->check(CLI::IsMember({"n", "j", "g", "omega-big"})));
  last(map->add_option("--axis-min", mo.axis_min, "second axis start"));
  last(map->add_option("--axis-max", mo.axis_max, "second axis end"));
  last(map->add_option("--axis-steps", mo.axis_steps,
                       "second axis grid points (0 = auto)"));

  Options vo;
  auto* verify = app.add_subcommand(
      "verify", "randomized closed-form vs direct-solver cross-check");
  add_config_flag(verify, vo);
  last(verify->add_option("--seed", vo.seed, "RNG seed"));
  last(verify->add_option("--draws", vo.draws, "number of random draws"));
  last(verify->add_option("--tol", vo.tol, "max allowed amplitude deviation"));
  last(verify->add_option("--pole-guard", vo.pole_guard,
                          "minimum distance to collective-mode poles"));
  last(verify->add_option("--out", vo.out,
                          "also write the report to this file"));

  Options po;
  po.e_min = -1.999;
  po.e_max = 1.999;
  po.steps = 4001;
  auto* period = app.add_subcommand(
      "period", "pinned-wavenumber spectral periodicity diagnostic");
  add_config_flag(period, po);
  add_model_flags(period, po);
  add_sweep_flags(period, po);

  const auto parse_once = [&](int ac, const char* const* av) -> int {
    try {
      app.parse(ac, av);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return 2;
    }
    return -1;  // parsed
  };

  if (const int rc = parse_once(argc, argv); rc >= 0) return rc;

  // A config file re-enters parsing with its tokens injected ahead of the
  // command line, so explicit flags override file values.
  const std::string cfg_path = spectrum->parsed() ? so.config
                               : map->parsed()    ? mo.config
                               : verify->parsed() ? vo.config
                                                  : po.config;
  if (!cfg_path.empty()) {
    std::vector<std::string> tokens;
    try {
      tokens = config_tokens(cfg_path);
    } catch (const Error& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    const std::string sub_name = app.get_subcommands().front()->get_name();
    std::vector<const char*> av;
    av.push_back(argv[0]);
    av.push_back(sub_name.c_str());
    for (const auto& t : tokens) av.push_back(t.c_str());
    for (int i = 2; i < argc; ++i) av.push_back(argv[i]);
    if (const int rc = parse_once(static_cast<int>(av.size()), av.data());
        rc >= 0)
      return rc;
  }

  try {
    if (spectrum->parsed())
      return run_grid_command("spectrum", so, so_fk->count() > 0, false);
    if (map->parsed())
      return run_grid_command("map", mo, mo_fk->count() > 0, true);
    if (verify->parsed()) return cmd_verify(vo);
    if (period->parsed()) return cmd_period(po);
  } catch (const garouter::InsufficientResolution& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const garouter::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
