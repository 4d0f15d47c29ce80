#include "garouter/green.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace garouter {

double ChainEigensystem::amplitude(int n, int j) const {
  const double arg =
      static_cast<double>(n) * static_cast<double>(j) * std::numbers::pi /
      (m_atoms + 1);
  return std::sqrt(2.0 / (m_atoms + 1)) * std::sin(arg);
}

ChainEigensystem chain_eigensystem(int m_atoms) {
  if (m_atoms < 1) throw InvalidParams({ParamViolation::TooFewAtoms});
  ChainEigensystem sys;
  sys.m_atoms = m_atoms;
  sys.eigenvalues.resize(m_atoms);
  for (int n = 1; n <= m_atoms; ++n)
    sys.eigenvalues[n - 1] = 2.0 * std::cos(n * std::numbers::pi / (m_atoms + 1));
  return sys;
}

double effective_excited_frequency(double E, const ModelParams& p) {
  if (p.omega_big == 0.0) return p.omega_e;
  const double denom = E - p.omega_s_prime;
  if (denom == 0.0)
    throw PoleAtThirdState("E coincides with omega_s_prime = " +
                           std::to_string(p.omega_s_prime));
  return p.omega_e + p.omega_big * p.omega_big / denom;
}

namespace {

void check_site(int j, int m_atoms) {
  if (j < 1 || j > m_atoms)
    throw Error("site index " + std::to_string(j) + " outside 1.." +
                std::to_string(m_atoms));
}

double min_pole_distance_of(double E, double omega_e_bar, double j_coupling,
                            const ChainEigensystem& sys) {
  double dist = std::numeric_limits<double>::infinity();
  for (double en : sys.eigenvalues)
    dist = std::min(dist, std::abs(E - omega_e_bar - j_coupling * en));
  return dist;
}

}  // namespace

double green_element(double E, const ModelParams& p, int j, int j2,
                     double pole_guard) {
  check_site(j, p.m_atoms);
  check_site(j2, p.m_atoms);
  const double omega_e_bar = effective_excited_frequency(E, p);
  const ChainEigensystem sys = chain_eigensystem(p.m_atoms);
  if (min_pole_distance_of(E, omega_e_bar, p.j_coupling, sys) <= pole_guard)
    throw AtResolventPole("E = " + std::to_string(E) +
                          " within pole_guard of a chain pole");
  double sum = 0.0;
  for (int n = 1; n <= p.m_atoms; ++n) {
    const double denom =
        E - omega_e_bar - p.j_coupling * sys.eigenvalues[n - 1];
    sum += sys.amplitude(n, j) * sys.amplitude(n, j2) / denom;
  }
  return sum;
}

GreenEvaluation gamma(double E, const ModelParams& p, double pole_guard) {
  const double omega_e_bar = effective_excited_frequency(E, p);
  const ChainEigensystem sys = chain_eigensystem(p.m_atoms);
  const double dist = min_pole_distance_of(E, omega_e_bar, p.j_coupling, sys);
  if (dist <= pole_guard)
    throw AtResolventPole("E = " + std::to_string(E) +
                          " within pole_guard of a chain pole");
  double g11 = 0.0, g1m = 0.0;
  for (int n = 1; n <= p.m_atoms; ++n) {
    const double denom =
        E - omega_e_bar - p.j_coupling * sys.eigenvalues[n - 1];
    const double a1 = sys.amplitude(n, 1);
    g11 += a1 * a1 / denom;
    g1m += a1 * sys.amplitude(n, p.m_atoms) / denom;
  }
  GreenEvaluation ev;
  ev.energy = E;
  ev.omega_e_bar = omega_e_bar;
  ev.gamma = g11 + g1m;
  ev.self_energy = p.g * p.g * ev.gamma;
  ev.min_pole_distance = dist;
  return ev;
}

}  // namespace garouter
