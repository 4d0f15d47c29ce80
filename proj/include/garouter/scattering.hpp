#pragma once

#include <optional>

#include "garouter/green.hpp"

namespace garouter {

// How the atom chain is folded into an effective two-tap rail segment.
//
// SiteResolved eliminates the chain exactly: the tap sites 1 and N each
// acquire the on-site self-energy 2 g^2 G(1,1) and a direct tap-to-tap
// coupling 2 g^2 G(1,M); interior sites stay free. This variant agrees with
// the direct solver to machine precision and is the default everywhere.
//
// UniformDressed instead spreads a uniform on-site shift g^2 Gamma(E) over
// the whole segment (tap-to-tap coupling g^2 Gamma as well), changing the
// interior wavenumber. It is an approximation — kept because the wide
// routing windows quoted for this device family are native to it — and is
// clearly reported as such wherever it is selected.
enum class FormVariant { SiteResolved, UniformDressed };

// Virtual-channel amplitudes. The antisymmetric channel never scatters
// (r_minus = 0, t_minus = 1 identically); the symmetric channel carries the
// full segment response.
//
// Intermediates expose the building blocks of the closed form, with
// w = e^{i k_plus}, W = w^N, u = e^{i k}:
//   chi        — tap/interior mixing factor  w*f2 - (W^2/w)*e2,
//   lambda     — tap-to-tap coupling part of the denominator,
//   delta_big  — coupling-free part of the denominator,
//   lambda_big — full denominator, delta_big + lambda.
struct SAAmplitudes {
  double k = 0.0;    // incident wavenumber actually used (pinned if fixed_k)
  cplx k_plus;       // wavenumber inside the segment (may be evanescent)
  cplx r_plus, t_plus;
  cplx r_minus, t_minus;  // always 0 and 1
  cplx chi, lambda, delta_big, lambda_big;
};

// Rail-basis amplitudes: reflection and transmission in the incident rail,
// backward and forward transfer into the other rail.
struct PhysicalAmplitudes {
  cplx r_a, t_a, t_b_back, t_b_fwd;
};

struct ChannelProbabilities {
  double reflect_a = 0.0;
  double transmit_a = 0.0;
  double transfer_back = 0.0;
  double transfer_fwd = 0.0;
  double conservation_residual = 0.0;  // |sum - 1|
};

// Closed-form symmetric-channel amplitudes.
//
// When fixed_k is supplied, every occurrence of the incident wavenumber is
// pinned to that value while k_plus and the self-energies still track E;
// the incident-band check is skipped (diagnostic mode). With g = 0 the
// lattice is free and exactly transparent — the interior then propagates at
// the incident wavenumber itself, pinned or not. Requires
// m_atoms == n_sites.
SAAmplitudes sa_amplitudes(double E, const ModelParams& p,
                           std::optional<double> fixed_k = std::nullopt,
                           FormVariant variant = FormVariant::SiteResolved,
                           double pole_guard = kDefaultPoleGuard);

// Channel recombination: r_a = t_b_back = r_plus / 2 (identical expression,
// not merely equal values), t_a = (t_plus + t_minus) / 2,
// t_b_fwd = (t_plus - t_minus) / 2.
//
// Conservation note: with |r_minus|^2 + |t_minus|^2 = 1 identically,
//   R_A + T_A + T_B<- + T_B-> =
//     2|r+/2|^2 + |t+ + 1|^2/4 + |t+ - 1|^2/4
//   = (|r+|^2 + |t+|^2)/2 + 1/2,
// so the probability sum equals 1 exactly when |r+|^2 + |t+|^2 = 1:
// rail-basis flow conservation and symmetric-channel unitarity are the same
// statement. Both are tested independently.
PhysicalAmplitudes physical_amplitudes(const SAAmplitudes& sa);

ChannelProbabilities probabilities(const PhysicalAmplitudes& pa);

// Composition of the three steps above at physical (unpinned) kinematics.
ChannelProbabilities scatter(double E, const ModelParams& p,
                             FormVariant variant = FormVariant::SiteResolved,
                             double pole_guard = kDefaultPoleGuard);

}  // namespace garouter
