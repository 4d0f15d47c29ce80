#pragma once

#include <utility>

#include "garouter/model.hpp"

namespace garouter {

// Output of the direct dense solve of the stationary equations with the
// scattering ansatz. Derivation-independent of the closed form: no channel
// transform, no resolvent reduction.
struct OracleSolution {
  cplx r_a, t_a, t_b_back, t_b_fwd;
  std::pair<cplx, cplx> interior_a;  // rail-A interior coefficients (A, B)
  std::pair<cplx, cplx> interior_b;  // rail-B interior coefficients (C, D)
  std::vector<cplx> u_e;             // excited-level amplitudes, atoms 1..M
  std::vector<cplx> u_s;             // third-level amplitudes, atoms 1..M
  double residual_norm = 0.0;        // max |A x - b| over assembled equations
  double matrix_scale = 0.0;         // largest |entry| of the assembled matrix
  double condition_estimate = 0.0;   // SVD-based; meaningful when > 1e12
};

// Which side the unit-amplitude wave comes in from. Right incidence is the
// j -> N+1-j relabeling; for mirror-symmetric parameters the probabilities
// must match Left exactly.
enum class Incidence { Left, Right };

// Assembles the 2M+8 (M+8 when Omega = 0) complex linear system over the
// unknowns {r_A, A, B, t_A, t_B<-, C, D, t_B->, u_e 1..M, u_s 1..M}: rail
// equations at the matching sites j in {0, 1, N, N+1} for both rails, the
// open-chain atom equations (u_{e,0} = u_{e,M+1} = 0) with tap sources at
// atoms 1 and M, and the third-level rows. Dense partial-pivot solve.
OracleSolution solve_direct(double E, const AsymmetricParams& p,
                            Incidence side = Incidence::Left);

// Piecewise rail amplitudes evaluated on j in [j_min, j_max] from a Left-
// incidence solution: incoming + reflected wave for j <= 0, interior
// superposition for 1..N, outgoing wave beyond.
struct WaveguideField {
  int j_min = 0;
  std::vector<cplx> alpha;  // incident rail
  std::vector<cplx> beta;   // transfer rail
};

WaveguideField reconstruct_wavefunction(double E, const AsymmetricParams& p,
                                        const OracleSolution& sol, int j_min,
                                        int j_max);

// Closed form (SiteResolved) vs direct solve on the same symmetric input.
struct DeviationReport {
  double dev_r_a = 0.0;
  double dev_t_a = 0.0;
  double dev_t_b_back = 0.0;
  double dev_t_b_fwd = 0.0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

DeviationReport compare_with_closed_form(double E, const ModelParams& p,
                                         double tolerance = 1e-8);

}  // namespace garouter
