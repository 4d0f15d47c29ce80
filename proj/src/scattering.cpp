#include "garouter/scattering.hpp"

#include <cmath>

namespace garouter {

namespace {

// Integer power by repeated squaring: branch-cut-free and deterministic.
cplx ipow(cplx base, int n) {
  cplx acc(1.0, 0.0);
  while (n > 0) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

struct SegmentAmplitudes {
  cplx r, t;
  cplx chi, lambda, delta_big, lambda_big;
};

// Scattering off a two-tap segment on a tight-binding rail: sites 1..N carry
// on-site energy eps_int except the taps 1 and N, which carry an extra
// `delta` and a direct mutual coupling `cross`. The incident wave enters at
// wavenumber k_inc; the interior propagates at q (Im q >= 0 keeps all powers
// of w bounded, so the expressions stay stable arbitrarily deep into the
// evanescent regime).
SegmentAmplitudes segment_amplitudes(double k_inc, cplx q, int n_sites,
                                     double xi_lat, double delta,
                                     double cross) {
  const double xi = -xi_lat;  // hopping sign of the stationary equations
  const cplx iu(0.0, 1.0);
  const cplx u = std::exp(iu * k_inc);
  // Band edges carry no flux (zero group velocity): s below vanishes and the
  // amplitude ratios degenerate to 0/0.
  if (std::abs(std::sin(k_inc)) < 1e-12)
    throw SingularSystem("incident wavenumber at a band edge (zero group "
                         "velocity)");
  const cplx w = std::exp(iu * q);
  const cplx W = ipow(w, n_sites);
  const cplx U = ipow(u, n_sites);
  const cplx winv = 1.0 / w;

  const cplx s = xi * (u * u - 1.0);
  const cplx e2 = xi * (u - w) + delta;
  const cplx f2 = xi * (u - winv) + delta;

  SegmentAmplitudes out;
  out.chi = w * f2 - (W * W * winv) * e2;
  out.delta_big = w * f2 * f2 - (W * W * winv) * e2 * e2;
  out.lambda = 2.0 * cross * xi * W * (w - winv) +
               cross * cross * (W * W * winv - w);
  out.lambda_big = out.delta_big + out.lambda;
  out.t = s * (xi * (w - winv) * W + cross * (W * W * winv - w)) /
          (U * out.lambda_big);
  out.r = (u * s * out.chi - u * u * out.lambda_big) / out.lambda_big;
  return out;
}

}  // namespace

SAAmplitudes sa_amplitudes(double E, const ModelParams& p,
                           std::optional<double> fixed_k, FormVariant variant,
                           double pole_guard) {
  validate(p, ValidationContext::ClosedForm);

  double k;
  if (fixed_k.has_value())
    k = *fixed_k;  // pinned: no incident-band requirement
  else
    k = wavenumber_from_energy(E, p.omega_0, p.xi, Branch::RealBand).real();

  // Fold the chain into tap self-energies. g = 0 decouples it exactly, so
  // the resolvent (and its poles) never enters.
  double delta = 0.0, cross = 0.0, eps_int = p.omega_0;
  if (p.g != 0.0) {
    if (variant == FormVariant::SiteResolved) {
      const double g11 = green_element(E, p, 1, 1, pole_guard);
      const double g1m = green_element(E, p, 1, p.m_atoms, pole_guard);
      delta = 2.0 * p.g * p.g * g11;
      cross = 2.0 * p.g * p.g * g1m;
    } else {
      const GreenEvaluation ev = gamma(E, p, pole_guard);
      eps_int = p.omega_0 + ev.self_energy;
      cross = ev.self_energy;
    }
  }

  // g = 0 leaves the lattice free: the interior propagates at the incident
  // wavenumber itself (a pinned k then pins the whole lattice consistently)
  // and the lattice is exactly transparent, so the known solution replaces
  // the formula's 0/0-prone rounding noise.
  const bool free_lattice = p.g == 0.0;
  const cplx q =
      free_lattice ? cplx(k, 0.0) : wavenumber_auto(E, eps_int, p.xi);
  const SegmentAmplitudes seg =
      segment_amplitudes(k, q, p.n_sites, p.xi, delta, cross);

  SAAmplitudes sa;
  sa.k = k;
  sa.k_plus = q;
  sa.r_plus = free_lattice ? cplx(0.0, 0.0) : seg.r;
  sa.t_plus = free_lattice ? cplx(1.0, 0.0) : seg.t;
  sa.r_minus = cplx(0.0, 0.0);
  sa.t_minus = cplx(1.0, 0.0);
  sa.chi = seg.chi;
  sa.lambda = seg.lambda;
  sa.delta_big = seg.delta_big;
  sa.lambda_big = seg.lambda_big;
  return sa;
}

PhysicalAmplitudes physical_amplitudes(const SAAmplitudes& sa) {
  PhysicalAmplitudes pa;
  const cplx half_r = 0.5 * sa.r_plus;
  pa.r_a = half_r;
  pa.t_b_back = half_r;  // same expression: equality is exact by construction
  pa.t_a = 0.5 * (sa.t_plus + sa.t_minus);
  pa.t_b_fwd = 0.5 * (sa.t_plus - sa.t_minus);
  return pa;
}

ChannelProbabilities probabilities(const PhysicalAmplitudes& pa) {
  ChannelProbabilities cp;
  cp.reflect_a = std::norm(pa.r_a);
  cp.transmit_a = std::norm(pa.t_a);
  cp.transfer_back = std::norm(pa.t_b_back);
  cp.transfer_fwd = std::norm(pa.t_b_fwd);
  cp.conservation_residual = std::abs(
      cp.reflect_a + cp.transmit_a + cp.transfer_back + cp.transfer_fwd - 1.0);
  return cp;
}

ChannelProbabilities scatter(double E, const ModelParams& p,
                             FormVariant variant, double pole_guard) {
  return probabilities(
      physical_amplitudes(sa_amplitudes(E, p, std::nullopt, variant, pole_guard)));
}

}  // namespace garouter
