#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace garouter {

// Base type for every numerical-domain error thrown by this library.
// what() always starts with the concrete error name, so per-point error
// markers in sweep grids stay machine-readable.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GAROUTER_DEFINE_ERROR(Name)                          \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& msg)                    \
        : Error(std::string(#Name) + ": " + msg) {}          \
  }

// Requested energy has no propagating solution in the waveguide band.
GAROUTER_DEFINE_ERROR(OutOfBand);
// Evaluation requested within pole_guard of a chain resolvent pole.
GAROUTER_DEFINE_ERROR(AtResolventPole);
// E coincides with the rotated third-level frequency while the control
// field is on; the effective excited frequency diverges.
GAROUTER_DEFINE_ERROR(PoleAtThirdState);
// Direct linear system is singular (bound-state or band-edge degeneracy).
GAROUTER_DEFINE_ERROR(SingularSystem);
// The phase-shift formula left the principal wavenumber branch.
GAROUTER_DEFINE_ERROR(BranchOverflow);
// Sweep grid too coarse for the requested period estimate.
GAROUTER_DEFINE_ERROR(InsufficientResolution);

#undef GAROUTER_DEFINE_ERROR

enum class ParamViolation {
  NonPositiveHopping,
  TooFewSites,
  TooFewAtoms,
  MismatchedAtomCount,
};

const char* to_string(ParamViolation v);

// Parameter-validation failure carrying every violated constraint.
class InvalidParams : public Error {
 public:
  explicit InvalidParams(std::vector<ParamViolation> violations);
  const std::vector<ParamViolation>& violations() const { return violations_; }

 private:
  static std::string compose(const std::vector<ParamViolation>& violations);
  std::vector<ParamViolation> violations_;
};

}  // namespace garouter
