#pragma once

#include <complex>
#include <vector>

#include "garouter/errors.hpp"

namespace garouter {

using cplx = std::complex<double>;

// All energies are measured in units of the rail hopping xi (default 1).
// The two rails are identical tight-binding chains with dispersion
// E = omega_0 - 2 xi cos k; an M-atom chain bridges them, tapping rail
// sites 1 and n_sites.
struct ModelParams {
  double omega_0 = 0.0;        // rail on-site frequency (both rails)
  double xi = 1.0;             // rail nearest-neighbour hopping, energy unit
  double omega_e = 0.0;        // excited-level frequency
  double omega_s_prime = 0.0;  // rotated third-level frequency
  double omega_big = 0.0;      // control-field Rabi frequency (>= 0)
  double j_coupling = 0.0;     // atom-atom hopping (>= 0)
  double g = 0.0;              // atom-rail coupling at the tap sites (>= 0)
  int n_sites = 2;             // rail sites spanned by the taps (site 1..N)
  int m_atoms = 2;             // atoms in the chain
};

// Rail-resolved generalization used by the direct solver only; the closed
// form requires the symmetric case.
struct AsymmetricParams {
  double omega_a = 0.0, omega_b = 0.0;
  double xi_a = 1.0, xi_b = 1.0;
  double g_a = 0.0, g_b = 0.0;
  double omega_e = 0.0;
  double omega_s_prime = 0.0;
  double omega_big = 0.0;
  double j_coupling = 0.0;
  int n_sites = 2;
  int m_atoms = 2;
};

AsymmetricParams from_symmetric(const ModelParams& p);

enum class Branch { RealBand, Evanescent };

// ClosedForm additionally requires m_atoms == n_sites.
enum class ValidationContext { General, ClosedForm };

// Returns every violated constraint; empty means valid.
std::vector<ParamViolation> check_params(
    const ModelParams& p, ValidationContext ctx = ValidationContext::General);
std::vector<ParamViolation> check_params(const AsymmetricParams& p);

struct ValidatedModel {
  ModelParams params;
};

// Throws InvalidParams listing all violations.
ValidatedModel validate(const ModelParams& p,
                        ValidationContext ctx = ValidationContext::General);
void validate(const AsymmetricParams& p);

// E = omega - 2 xi cos k. Monotone increasing on k in [0, pi].
double dispersion_energy(double k, double omega, double xi);

// Inverts the dispersion: cos k = -(E - omega) / (2 xi).
// RealBand returns k in [0, pi] and throws OutOfBand when |E - omega| > 2 xi;
// Evanescent returns the principal complex arccos with Im(k) >= 0, so that
// e^{ikj} stays bounded as j -> +inf.
cplx wavenumber_from_energy(double E, double omega, double xi, Branch branch);

// RealBand when in band, Evanescent otherwise.
cplx wavenumber_auto(double E, double omega, double xi);

}  // namespace garouter
