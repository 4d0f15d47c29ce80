#pragma once

#include <string>

#include "garouter/oracle.hpp"
#include "garouter/scattering.hpp"

namespace garouter {

enum class AxisKind { Energy, NSites, JCoupling, OmegaBig, Coupling };

// One sweep axis: either an explicit value list or a uniform range.
// NSites axes take integer values; the atom count is kept equal to the site
// count at every grid point.
struct SweepAxis {
  AxisKind kind = AxisKind::Energy;
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
  std::vector<double> explicit_values;

  std::vector<double> values() const;
};

enum class SolverChoice { ClosedForm, Oracle, Both };

struct SweepSpec {
  ModelParams base;
  double energy = 0.0;  // used when no axis varies E
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  std::optional<double> fixed_k;  // pins the incident wavenumber (diagnostic)
  SolverChoice solver = SolverChoice::ClosedForm;
  FormVariant variant = FormVariant::SiteResolved;
  double pole_guard = kDefaultPoleGuard;
  double deviation_tolerance = 1e-8;
};

// Per-point failures are recorded in-grid, never thrown: `ok` is false and
// `error` carries the error name while the numeric fields are NaN.
struct SweepPoint {
  double axis1 = 0.0;
  double axis2 = 0.0;
  ChannelProbabilities probs{};
  double deviation = 0.0;  // closed form vs direct solve, solver == Both
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<double> axis1_values;
  std::vector<double> axis2_values;     // {0} placeholder for 1D sweeps
  std::vector<SweepPoint> points;       // row-major, axis1 outermost
  ModelParams base;
  double base_energy = 0.0;
  bool diagnostic = false;              // true for fixed-k sweeps
  std::string code_version;
  std::string timestamp;                // ISO-8601 UTC, metadata only
};

// Spectral-period report for the pinned-wavenumber diagnostic spectrum.
// tau_estimate is empty when the spectrum has no finite period (flat signal
// or no autocorrelation peak).
struct PhaseAnalysis {
  double phi = 0.0;              // k_plus * (N - 1) at the pinned wavenumber
  double delta_e_exact = 0.0;    // NaN when the shifted wavenumber leaves [0, pi]
  double delta_e_taylor = 0.0;
  double delta_e_leading = 0.0;  // 4 pi / N
  std::optional<double> tau_estimate;
};

// Phase accumulated between the two taps: k_plus(E) * (N - 1), with
// k_plus = arccos(-(E - omega_0) / (2 xi)). Requires a real wavenumber.
double effective_phase(double E, int n_sites, const ModelParams& p);

// Energy shift that advances the tap-to-tap phase by one full turn:
// -2 [cos(k+ + 2 pi/N) - cos k+], with k+ = arccos(-E/2) in band units.
// Throws BranchOverflow when k+ + 2 pi/N > pi.
double spectral_period_exact(double E, int n_sites);
double spectral_period_exact_k(double k_plus, int n_sites);

// Second-order expansion of the same shift:
// (4 pi / N) sin k+ + (4 pi^2 / N^2) cos k+.
double spectral_period_taylor(double E, int n_sites);
double spectral_period_taylor_k(double k_plus, int n_sites);

// Leading term 4 pi / N (exact at k+ = pi/2).
double spectral_period_leading(int n_sites);

// Dominant period of the transfer_fwd diagnostic spectrum via the
// autocorrelation of the mean-subtracted series with three-point parabolic
// peak interpolation. Requires spec.fixed_k and a 1D energy axis with at
// least 64 grid points per expected leading period (else
// InsufficientResolution).
PhaseAnalysis estimate_period_numeric(const SweepSpec& spec);

// Grid evaluation. run_sweep dispatches grid points across OpenMP threads
// (max_threads = 0 lets the runtime decide); run_sweep_serial is the plain
// reference loop kept for equivalence testing. Both fill points in grid
// order, and their rows are bit-identical for the same spec.
SweepResult run_sweep(const SweepSpec& spec, int max_threads = 0);
SweepResult run_sweep_serial(const SweepSpec& spec);

struct RoutingPeak {
  int n_sites = 0;
  double e_star = 0.0;  // maximizing energy
  double t_max = 0.0;   // transfer_fwd at the maximum
};

// For each N in [n_min, n_max] (atom count kept equal), locates the global
// in-band maximum of transfer_fwd and returns entries with t_max >=
// threshold. Scans a uniform grid (grid_points, default 2001) densified
// around the chain resolvent poles — transfer resonances between
// neighbouring poles can be ~1e-5 wide — then refines the best bracket by
// golden-section search.
std::vector<RoutingPeak> find_perfect_routing(const ModelParams& base,
                                              int n_min, int n_max,
                                              double threshold,
                                              int grid_points = 2001);

// Thread cap from GAROUTER_THREADS (absent or invalid -> 0, meaning the
// implementation default).
int thread_cap_from_env();

}  // namespace garouter
