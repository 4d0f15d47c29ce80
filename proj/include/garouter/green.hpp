#pragma once

#include "garouter/model.hpp"

namespace garouter {

inline constexpr double kDefaultPoleGuard = 1e-9;

// Analytic eigensystem of the open M-site hopping chain (unit hopping):
// eigenvalues E_n = 2 cos(n pi / (M+1)), amplitudes
// <j|psi_n> = sqrt(2/(M+1)) sin(n j pi / (M+1)), n, j = 1..M.
struct ChainEigensystem {
  int m_atoms = 0;
  std::vector<double> eigenvalues;  // strictly decreasing, symmetric about 0

  double amplitude(int n, int j) const;
};

ChainEigensystem chain_eigensystem(int m_atoms);

// omega_e_bar = omega_e + Omega^2 / (E - omega_s_prime); omega_e exactly
// when Omega = 0. Throws PoleAtThirdState at E == omega_s_prime, Omega != 0.
double effective_excited_frequency(double E, const ModelParams& p);

// One energy's worth of chain-resolvent data for the symmetric channel.
struct GreenEvaluation {
  double energy = 0.0;
  double omega_e_bar = 0.0;
  double gamma = 0.0;              // G(1,1) + G(1,M)
  double self_energy = 0.0;        // g^2 * gamma
  double min_pole_distance = 0.0;  // min_n |E - omega_e_bar - J*E_n|
};

// Resolvent element G(j,j2) of (E - omega_e_bar - J*H_chain)^{-1} via the
// spectral sum, O(M) per element. No regularizer is added: evaluations
// closer than pole_guard to any pole throw AtResolventPole instead.
double green_element(double E, const ModelParams& p, int j, int j2,
                     double pole_guard = kDefaultPoleGuard);

// Populates GreenEvaluation with gamma = G(1,1) + G(1,M).
GreenEvaluation gamma(double E, const ModelParams& p,
                      double pole_guard = kDefaultPoleGuard);

}  // namespace garouter
