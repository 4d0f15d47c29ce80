#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "garouter/model.hpp"

using namespace garouter;

namespace {
constexpr double kPi = std::numbers::pi;

bool has(const std::vector<ParamViolation>& v, ParamViolation x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}
}  // namespace

TEST_CASE("default parameters are valid in both contexts") {
  ModelParams p;
  CHECK(check_params(p).empty());
  CHECK(check_params(p, ValidationContext::ClosedForm).empty());
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("each violation is reported") {
  ModelParams p;
  p.xi = 0.0;
  CHECK(has(check_params(p), ParamViolation::NonPositiveHopping));
  p.xi = -1.0;
  CHECK(has(check_params(p), ParamViolation::NonPositiveHopping));

  p = ModelParams{};
  p.n_sites = 1;
  CHECK(has(check_params(p), ParamViolation::TooFewSites));

  p = ModelParams{};
  p.m_atoms = 1;
  CHECK(has(check_params(p), ParamViolation::TooFewAtoms));

  p = ModelParams{};
  p.n_sites = 8;
  p.m_atoms = 5;
  CHECK(check_params(p).empty());  // fine for the direct solver
  CHECK(has(check_params(p, ValidationContext::ClosedForm),
            ParamViolation::MismatchedAtomCount));
}

TEST_CASE("validate throws with every violation listed") {
  ModelParams p;
  p.xi = -2.0;
  p.n_sites = 0;
  try {
    validate(p, ValidationContext::ClosedForm);
    FAIL("expected InvalidParams");
  } catch (const InvalidParams& e) {
    const std::string msg = e.what();
    CHECK(msg.find("NonPositiveHopping") != std::string::npos);
    CHECK(msg.find("TooFewSites") != std::string::npos);
    CHECK(e.violations().size() >= 2);
  }
}

TEST_CASE("asymmetric params validate both rails") {
  AsymmetricParams p;
  CHECK(check_params(p).empty());
  p.xi_b = 0.0;
  CHECK(has(check_params(p), ParamViolation::NonPositiveHopping));
  CHECK_THROWS_AS(validate(p), InvalidParams);
}

TEST_CASE("from_symmetric copies every field onto both rails") {
  ModelParams p;
  p.omega_0 = 0.3;
  p.xi = 1.7;
  p.g = 0.9;
  p.omega_e = -0.2;
  p.omega_s_prime = 0.4;
  p.omega_big = 0.6;
  p.j_coupling = 0.05;
  p.n_sites = 7;
  p.m_atoms = 7;
  const AsymmetricParams a = from_symmetric(p);
  CHECK(a.omega_a == p.omega_0);
  CHECK(a.omega_b == p.omega_0);
  CHECK(a.xi_a == p.xi);
  CHECK(a.xi_b == p.xi);
  CHECK(a.g_a == p.g);
  CHECK(a.g_b == p.g);
  CHECK(a.omega_e == p.omega_e);
  CHECK(a.omega_s_prime == p.omega_s_prime);
  CHECK(a.omega_big == p.omega_big);
  CHECK(a.j_coupling == p.j_coupling);
  CHECK(a.n_sites == p.n_sites);
  CHECK(a.m_atoms == p.m_atoms);
}

TEST_CASE("dispersion fixed points") {
  CHECK(dispersion_energy(kPi / 2, 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(dispersion_energy(0.0, 0.0, 1.0) == doctest::Approx(-2.0));
  CHECK(dispersion_energy(kPi, 0.0, 1.0) == doctest::Approx(2.0));
  CHECK(dispersion_energy(0.0, 0.5, 0.75) == doctest::Approx(-1.0));
}

TEST_CASE("wavenumber inverts the dispersion on the real band") {
  CHECK(wavenumber_from_energy(0.0, 0.0, 1.0, Branch::RealBand).real() ==
        doctest::Approx(kPi / 2));
  for (int i = 0; i <= 100; ++i) {
    const double k = kPi * i / 100.0;
    const double e = dispersion_energy(k, 0.2, 1.3);
    const cplx kk = wavenumber_from_energy(e, 0.2, 1.3, Branch::RealBand);
    CHECK(kk.imag() == 0.0);
    CHECK(kk.real() == doctest::Approx(k).epsilon(1e-12));
  }
}

TEST_CASE("out-of-band energies are rejected on the real branch") {
  CHECK_THROWS_AS(wavenumber_from_energy(3.0, 0.0, 1.0, Branch::RealBand),
                  OutOfBand);
  CHECK_THROWS_AS(wavenumber_from_energy(-2.0001, 0.0, 1.0, Branch::RealBand),
                  OutOfBand);
  CHECK_NOTHROW(wavenumber_from_energy(2.0, 0.0, 1.0, Branch::RealBand));
}

TEST_CASE("evanescent branch decays toward +inf") {
  for (double e : {2.5, 3.0, 17.0, -2.1, -40.0}) {
    const cplx k = wavenumber_from_energy(e, 0.0, 1.0, Branch::Evanescent);
    CHECK(k.imag() > 0.0);
    // still a root of the dispersion relation
    const cplx lhs = -2.0 * std::cos(k);
    CHECK(std::abs(lhs - e) < 1e-10 * std::max(1.0, std::abs(e)));
    // e^{ikj} decays with j
    CHECK(std::abs(std::exp(cplx(0, 1) * k)) < 1.0);
  }
}

TEST_CASE("wavenumber_auto dispatches on the band") {
  CHECK(wavenumber_auto(0.7, 0.0, 1.0).imag() == 0.0);
  CHECK(wavenumber_auto(2.7, 0.0, 1.0).imag() > 0.0);
  CHECK(wavenumber_auto(-9.0, 0.0, 1.0).imag() > 0.0);
  // shifted/scaled band
  CHECK(wavenumber_auto(3.0, 1.0, 1.5).imag() == 0.0);
  CHECK(wavenumber_auto(4.5, 1.0, 1.5).imag() > 0.0);
}

TEST_CASE("error strings carry the error name") {
  try {
    wavenumber_from_energy(5.0, 0.0, 1.0, Branch::RealBand);
    FAIL("expected OutOfBand");
  } catch (const OutOfBand& e) {
    CHECK(std::string(e.what()).find("OutOfBand") == 0);
  }
}
