#include "garouter/model.hpp"

#include <algorithm>
#include <cmath>

namespace garouter {

const char* to_string(ParamViolation v) {
  switch (v) {
    case ParamViolation::NonPositiveHopping: return "NonPositiveHopping";
    case ParamViolation::TooFewSites: return "TooFewSites";
    case ParamViolation::TooFewAtoms: return "TooFewAtoms";
    case ParamViolation::MismatchedAtomCount: return "MismatchedAtomCount";
  }
  return "UnknownViolation";
}

std::string InvalidParams::compose(
    const std::vector<ParamViolation>& violations) {
  std::string msg = "InvalidParams:";
  for (ParamViolation v : violations) {
    msg += ' ';
    msg += to_string(v);
  }
  return msg;
}

InvalidParams::InvalidParams(std::vector<ParamViolation> violations)
    : Error(compose(violations)), violations_(std::move(violations)) {}

AsymmetricParams from_symmetric(const ModelParams& p) {
  AsymmetricParams a;
  a.omega_a = a.omega_b = p.omega_0;
  a.xi_a = a.xi_b = p.xi;
  a.g_a = a.g_b = p.g;
  a.omega_e = p.omega_e;
  a.omega_s_prime = p.omega_s_prime;
  a.omega_big = p.omega_big;
  a.j_coupling = p.j_coupling;
  a.n_sites = p.n_sites;
  a.m_atoms = p.m_atoms;
  return a;
}

std::vector<ParamViolation> check_params(const ModelParams& p,
                                         ValidationContext ctx) {
  std::vector<ParamViolation> out;
  if (!(p.xi > 0.0)) out.push_back(ParamViolation::NonPositiveHopping);
  if (p.n_sites < 2) out.push_back(ParamViolation::TooFewSites);
  if (p.m_atoms < 2) out.push_back(ParamViolation::TooFewAtoms);
  if (ctx == ValidationContext::ClosedForm && p.m_atoms != p.n_sites)
    out.push_back(ParamViolation::MismatchedAtomCount);
  return out;
}

std::vector<ParamViolation> check_params(const AsymmetricParams& p) {
  std::vector<ParamViolation> out;
  if (!(p.xi_a > 0.0) || !(p.xi_b > 0.0))
    out.push_back(ParamViolation::NonPositiveHopping);
  if (p.n_sites < 2) out.push_back(ParamViolation::TooFewSites);
  if (p.m_atoms < 2) out.push_back(ParamViolation::TooFewAtoms);
  return out;
}

ValidatedModel validate(const ModelParams& p, ValidationContext ctx) {
  auto violations = check_params(p, ctx);
  if (!violations.empty()) throw InvalidParams(std::move(violations));
  return ValidatedModel{p};
}

void validate(const AsymmetricParams& p) {
  auto violations = check_params(p);
  if (!violations.empty()) throw InvalidParams(std::move(violations));
}

double dispersion_energy(double k, double omega, double xi) {
  return omega - 2.0 * xi * std::cos(k);
}

cplx wavenumber_from_energy(double E, double omega, double xi, Branch branch) {
  if (!(xi > 0.0))
    throw InvalidParams({ParamViolation::NonPositiveHopping});
  const double c = -(E - omega) / (2.0 * xi);
  if (branch == Branch::RealBand) {
    if (std::abs(c) > 1.0)
      throw OutOfBand("|E - omega| = " + std::to_string(std::abs(E - omega)) +
                      " exceeds the bandwidth 2 xi = " +
                      std::to_string(2.0 * xi));
    return cplx(std::acos(std::clamp(c, -1.0, 1.0)), 0.0);
  }
  cplx k = std::acos(cplx(c, 0.0));
  if (k.imag() < 0.0) k = std::conj(k);  // decaying continuation for j -> +inf
  return k;
}

cplx wavenumber_auto(double E, double omega, double xi) {
  const double c = -(E - omega) / (2.0 * xi);
  return wavenumber_from_energy(
      E, omega, xi, std::abs(c) <= 1.0 ? Branch::RealBand : Branch::Evanescent);
}

}  // namespace garouter
