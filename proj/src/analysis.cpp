#include "garouter/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace garouter {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string iso_utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double real_wavenumber(double E, const ModelParams& p) {
  return wavenumber_from_energy(E, p.omega_0, p.xi, Branch::RealBand).real();
}

}  // namespace

std::vector<double> SweepAxis::values() const {
  if (!explicit_values.empty()) return explicit_values;
  if (steps < 1) throw Error("axis needs at least one step");
  std::vector<double> out;
  out.reserve(steps);
  if (steps == 1) {
    out.push_back(min);
  } else {
    for (int i = 0; i < steps; ++i)
      out.push_back(min + (max - min) * i / (steps - 1));
  }
  if (kind == AxisKind::NSites)
    for (double& v : out) v = std::round(v);
  return out;
}

double effective_phase(double E, int n_sites, const ModelParams& p) {
  if (n_sites < 1) throw Error("n_sites must be positive");
  const double k = real_wavenumber(E, p);
  return k * (n_sites - 1);
}

double spectral_period_exact_k(double k_plus, int n_sites) {
  if (n_sites < 2) throw InvalidParams({ParamViolation::TooFewSites});
  const double shift = 2.0 * std::numbers::pi / n_sites;
  if (k_plus + shift > std::numbers::pi * (1.0 + 1e-15))
    throw BranchOverflow("k_plus + 2 pi/N = " + std::to_string(k_plus + shift) +
                         " leaves [0, pi]");
  return -2.0 * (std::cos(k_plus + shift) - std::cos(k_plus));
}

double spectral_period_exact(double E, int n_sites) {
  const double k =
      wavenumber_from_energy(E, 0.0, 1.0, Branch::RealBand).real();
  return spectral_period_exact_k(k, n_sites);
}

double spectral_period_taylor_k(double k_plus, int n_sites) {
  if (n_sites < 2) throw InvalidParams({ParamViolation::TooFewSites});
  const double pi = std::numbers::pi;
  return (4.0 * pi / n_sites) * std::sin(k_plus) +
         (4.0 * pi * pi / (n_sites * static_cast<double>(n_sites))) *
             std::cos(k_plus);
}

double spectral_period_taylor(double E, int n_sites) {
  const double k =
      wavenumber_from_energy(E, 0.0, 1.0, Branch::RealBand).real();
  return spectral_period_taylor_k(k, n_sites);
}

double spectral_period_leading(int n_sites) {
  if (n_sites < 2) throw InvalidParams({ParamViolation::TooFewSites});
  return 4.0 * std::numbers::pi / n_sites;
}

namespace {

void apply_axis(ModelParams& p, double& E, AxisKind kind, double v) {
  switch (kind) {
    case AxisKind::Energy: E = v; break;
    case AxisKind::NSites:
      p.n_sites = p.m_atoms = static_cast<int>(std::lround(v));
      break;
    case AxisKind::JCoupling: p.j_coupling = v; break;
    case AxisKind::OmegaBig: p.omega_big = v; break;
    case AxisKind::Coupling: p.g = v; break;
  }
}

ChannelProbabilities probabilities_of(const OracleSolution& sol) {
  ChannelProbabilities cp;
  cp.reflect_a = std::norm(sol.r_a);
  cp.transmit_a = std::norm(sol.t_a);
  cp.transfer_back = std::norm(sol.t_b_back);
  cp.transfer_fwd = std::norm(sol.t_b_fwd);
  cp.conservation_residual = std::abs(
      cp.reflect_a + cp.transmit_a + cp.transfer_back + cp.transfer_fwd - 1.0);
  return cp;
}

SweepPoint eval_point(const SweepSpec& spec, double a1, double a2,
                      bool has_axis2) {
  SweepPoint pt;
  pt.axis1 = a1;
  pt.axis2 = a2;
  ModelParams p = spec.base;
  double E = spec.energy;
  apply_axis(p, E, spec.axis1.kind, a1);
  if (has_axis2) apply_axis(p, E, spec.axis2->kind, a2);
  try {
    switch (spec.solver) {
      case SolverChoice::ClosedForm:
        pt.probs = probabilities(physical_amplitudes(
            sa_amplitudes(E, p, spec.fixed_k, spec.variant, spec.pole_guard)));
        break;
      case SolverChoice::Oracle:
        pt.probs = probabilities_of(solve_direct(E, from_symmetric(p)));
        break;
      case SolverChoice::Both: {
        const PhysicalAmplitudes closed = physical_amplitudes(
            sa_amplitudes(E, p, spec.fixed_k, spec.variant, spec.pole_guard));
        const OracleSolution direct = solve_direct(E, from_symmetric(p));
        pt.probs = probabilities(closed);
        pt.deviation = std::max({std::abs(closed.r_a - direct.r_a),
                                 std::abs(closed.t_a - direct.t_a),
                                 std::abs(closed.t_b_back - direct.t_b_back),
                                 std::abs(closed.t_b_fwd - direct.t_b_fwd)});
        break;
      }
    }
  } catch (const Error& e) {
    pt.ok = false;
    pt.error = e.what();
    pt.probs = {kNaN, kNaN, kNaN, kNaN, kNaN};
    pt.deviation = kNaN;
  }
  return pt;
}

SweepResult prepare_result(const SweepSpec& spec) {
  if (spec.fixed_k && spec.solver != SolverChoice::ClosedForm)
    throw Error("pinned-wavenumber diagnostics exist only for the closed form");
  SweepResult res;
  res.axis1_values = spec.axis1.values();
  res.axis2_values =
      spec.axis2 ? spec.axis2->values() : std::vector<double>{0.0};
  if (res.axis1_values.empty() || res.axis2_values.empty())
    throw Error("empty sweep axis");
  res.base = spec.base;
  res.base_energy = spec.energy;
  res.diagnostic = spec.fixed_k.has_value();
  res.code_version = GAROUTER_VERSION;
  res.timestamp = iso_utc_now();
  res.points.resize(res.axis1_values.size() * res.axis2_values.size());
  return res;
}

}  // namespace

SweepResult run_sweep_serial(const SweepSpec& spec) {
  SweepResult res = prepare_result(spec);
  const auto& a1 = res.axis1_values;
  const auto& a2 = res.axis2_values;
  const bool has2 = spec.axis2.has_value();
  for (size_t i1 = 0; i1 < a1.size(); ++i1)
    for (size_t i2 = 0; i2 < a2.size(); ++i2)
      res.points[i1 * a2.size() + i2] = eval_point(spec, a1[i1], a2[i2], has2);
  return res;
}

SweepResult run_sweep(const SweepSpec& spec, int max_threads) {
  SweepResult res = prepare_result(spec);
  const auto& a1 = res.axis1_values;
  const auto& a2 = res.axis2_values;
  const bool has2 = spec.axis2.has_value();
  const int n1 = static_cast<int>(a1.size());
  const int n2 = static_cast<int>(a2.size());
#ifdef _OPENMP
  int threads = max_threads > 0 ? max_threads : omp_get_max_threads();
#pragma omp parallel for collapse(2) schedule(static) num_threads(threads)
#else
  (void)max_threads;
#endif
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      res.points[static_cast<size_t>(i1) * n2 + i2] =
          eval_point(spec, a1[i1], a2[i2], has2);
  return res;
}

PhaseAnalysis estimate_period_numeric(const SweepSpec& spec) {
  if (!spec.fixed_k)
    throw Error("period estimation requires a pinned-wavenumber sweep");
  if (spec.axis2 || spec.axis1.kind != AxisKind::Energy)
    throw Error("period estimation requires a 1D energy sweep");

  const std::vector<double> grid = spec.axis1.values();
  const size_t n = grid.size();
  if (n < 3)
    throw InsufficientResolution("need at least 3 grid points");
  const double de = grid[1] - grid[0];
  for (size_t i = 1; i + 1 < n; ++i)
    if (std::abs((grid[i + 1] - grid[i]) - de) > 1e-9 * std::max(1.0, std::abs(de)))
      throw Error("period estimation requires a uniform energy grid");
  const int n_sites = spec.base.n_sites;
  const double expected = spectral_period_leading(n_sites);
  if (expected / std::abs(de) < 64.0)
    throw InsufficientResolution(
        "fewer than 64 grid points per expected period " +
        std::to_string(expected));

  PhaseAnalysis pa;
  pa.phi = *spec.fixed_k * (n_sites - 1);
  pa.delta_e_leading = spectral_period_leading(n_sites);
  pa.delta_e_taylor = spectral_period_taylor_k(*spec.fixed_k, n_sites);
  try {
    pa.delta_e_exact = spectral_period_exact_k(*spec.fixed_k, n_sites);
  } catch (const Error&) {
    pa.delta_e_exact = kNaN;
  }

  const SweepResult sweep = run_sweep(spec);
  std::vector<double> x(n);
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double v = sweep.points[i].probs.transfer_fwd;
    x[i] = std::isfinite(v) ? v : 0.0;
    mean += x[i];
  }
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (double& v : x) {
    v -= mean;
    spread = std::max(spread, std::abs(v));
  }
  if (spread <= 1e-14 * std::max(1.0, std::abs(mean))) {
    pa.tau_estimate = std::nullopt;  // flat spectrum: no finite period
    return pa;
  }

  // Autocorrelation over positive lags; candidate periods are its strict
  // interior local maxima away from the zero-lag peak.
  std::vector<double> ac(n, 0.0);
  for (size_t lag = 0; lag < n; ++lag) {
    double s = 0.0;
    for (size_t i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
    ac[lag] = s;
  }
  const size_t lag_min = 8, lag_max = n / 2;
  size_t best = 0;
  bool found = false;
  for (size_t l = lag_min; l + 1 < lag_max; ++l) {
    if (ac[l] >= ac[l - 1] && ac[l] >= ac[l + 1] &&
        (!found || ac[l] > ac[best])) {
      best = l;
      found = true;
    }
  }
  if (!found) {
    pa.tau_estimate = std::nullopt;  // no repeating structure detected
    return pa;
  }
  const double denom = ac[best - 1] - 2.0 * ac[best] + ac[best + 1];
  double frac = 0.0;
  if (denom != 0.0)
    frac = std::clamp(0.5 * (ac[best - 1] - ac[best + 1]) / denom, -0.5, 0.5);
  const double lag_star = static_cast<double>(best) + frac;
  if (lag_star < 64.0)
    throw InsufficientResolution("estimated period spans fewer than 64 grid "
                                 "points; refine the grid");
  pa.tau_estimate = lag_star * std::abs(de);
  return pa;
}

namespace {

// Transfer probability with in-search error suppression.
double transfer_or_negative(double E, const ModelParams& p) {
  try {
    return scatter(E, p).transfer_fwd;
  } catch (const Error&) {
    return -1.0;
  }
}

// In-band resolvent pole positions: solutions of E - omega_e_bar(E) = J*E_n.
std::vector<double> resolvent_poles(const ModelParams& p) {
  std::vector<double> poles;
  const ChainEigensystem sys = chain_eigensystem(p.m_atoms);
  for (double en : sys.eigenvalues) {
    const double c = p.omega_e + p.j_coupling * en;
    if (p.omega_big == 0.0) {
      poles.push_back(c);
    } else {
      // (E - c)(E - omega_s_prime) = Omega^2, two real roots.
      const double b = c + p.omega_s_prime;
      const double disc = (c - p.omega_s_prime) * (c - p.omega_s_prime) +
                          4.0 * p.omega_big * p.omega_big;
      const double root = std::sqrt(disc);
      poles.push_back(0.5 * (b - root));
      poles.push_back(0.5 * (b + root));
    }
  }
  std::sort(poles.begin(), poles.end());
  return poles;
}

struct Peak {
  double t = -1.0;
  double e = 0.0;
};

Peak golden_max(const ModelParams& p, double a, double b) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = transfer_or_negative(c, p), fd = transfer_or_negative(d, p);
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = transfer_or_negative(c, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = transfer_or_negative(d, p);
    }
  }
  const double mid = 0.5 * (a + b);
  return {transfer_or_negative(mid, p), mid};
}

Peak band_maximum(const ModelParams& p, int grid_points) {
  const double margin = 1e-3 * p.xi;
  const double lo = p.omega_0 - 2.0 * p.xi + margin;
  const double hi = p.omega_0 + 2.0 * p.xi - margin;

  std::vector<double> cand;
  cand.reserve(grid_points + 200000);
  for (int i = 0; i < grid_points; ++i)
    cand.push_back(lo + (hi - lo) * i / (grid_points - 1));

  // Transfer resonances live between neighbouring resolvent poles and can be
  // orders of magnitude narrower than any uniform grid: layer geometric
  // grids around each pole and a dense grid across the whole pole cluster.
  if (p.g != 0.0) {
    std::vector<double> centers = resolvent_poles(p);
    centers.push_back(p.omega_e);
    for (double c : centers) {
      const double smin = 1e-9, smax = 3e-2;
      for (int s = 0; s < 60; ++s) {
        const double scale =
            smin * std::pow(smax / smin, s / 59.0);
        for (int i = 0; i < 41; ++i)
          cand.push_back(c - scale + 2.0 * scale * i / 40.0);
      }
    }
    const auto [pmin_it, pmax_it] =
        std::minmax_element(centers.begin(), centers.end());
    const double pad = std::max(0.5 * (*pmax_it - *pmin_it), 1e-6);
    const double dlo = *pmin_it - pad, dhi = *pmax_it + pad;
    for (int i = 0; i < 120001; ++i)
      cand.push_back(dlo + (dhi - dlo) * i / 120000.0);
  }

  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::vector<double> in_band;
  in_band.reserve(cand.size());
  for (double e : cand)
    if (e > lo - 1e-300 && e < hi + 1e-300) in_band.push_back(e);

  const int nc = static_cast<int>(in_band.size());
  std::vector<double> t(nc);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < nc; ++i) t[i] = transfer_or_negative(in_band[i], p);

  Peak best;
  for (int i = 0; i < nc; ++i)
    if (t[i] > best.t) best = {t[i], in_band[i]};

  // Refine the strongest interior local maxima.
  std::vector<int> locs;
  for (int i = 1; i + 1 < nc; ++i)
    if (t[i] >= t[i - 1] && t[i] >= t[i + 1] && t[i] > 0.0) locs.push_back(i);
  std::sort(locs.begin(), locs.end(),
            [&](int a, int b) { return t[a] > t[b] || (t[a] == t[b] && a < b); });
  if (locs.size() > 200) locs.resize(200);
  for (int i : locs) {
    const Peak refined = golden_max(p, in_band[i - 1], in_band[i + 1]);
    if (refined.t > best.t) best = refined;
  }
  return best;
}

}  // namespace

std::vector<RoutingPeak> find_perfect_routing(const ModelParams& base,
                                              int n_min, int n_max,
                                              double threshold,
                                              int grid_points) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error("threshold must lie in (0, 1]");
  if (n_min < 2 || n_max < n_min) throw Error("invalid site-count range");
  if (grid_points < 2) throw Error("grid_points must be at least 2");
  std::vector<RoutingPeak> out;
  for (int n = n_min; n <= n_max; ++n) {
    ModelParams p = base;
    p.n_sites = p.m_atoms = n;
    const Peak peak = band_maximum(p, grid_points);
    if (peak.t >= threshold) out.push_back({n, peak.e, peak.t});
  }
  return out;
}

int thread_cap_from_env() {
  const char* raw = std::getenv("GAROUTER_THREADS");
  if (raw == nullptr) return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (end == raw || v <= 0 || v > 4096) return 0;
  return static_cast<int>(v);
}

}  // namespace garouter
