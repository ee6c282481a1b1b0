#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace er {

// ---------------------------------------------------------------------------
// Scalar parameters of the iteration.
//
// The scheme is driven by a super-exponential frequency ladder
//
//     lambda_q = ceil(lambda0^(b^q)),        q = 0, 1, 2, ...
//
// and a family of Hoelder-type amplitude exponents beta_j, j >= -1, defined by
// the recursion  b*(beta_{j+1} - beta_inf) = beta_j - beta_inf,  i.e.
//
//     beta_j  = beta0 / b^j + (1 - 1/b^j) * beta_inf        (j >= 0),
//     beta_-1 = b*beta0 + (1 - b)*beta_inf.
//
// beta0 is the exponent achieved everywhere at a given level; beta_j for
// large j is the exponent achieved on all but a small exceptional set, and
// beta_j -> beta_inf geometrically.  Derived scales (all powers of
// lambda_{q+1}, belonging to the step q -> q+1):
//
//     delta_{q,j}  = lambda_q^(-2 beta_j)                amplitude scale
//     mu_{q+1,j}   = lambda_{q+1}^(1 - beta_j)            j >= 2
//                  = lambda_{q+1}^((1-beta0)(b+1)/(2b)
//                                  + (b-1)*beta_inf/2)    j <= 1
//     eta_{q+1,j}  = lambda_{q+1}^(beta_-1 - beta_j)      overlap fraction
//     ell          = lambda_{q+1}^(eps0 - 1)              mollification length
//     tau          = lambda_{q+1}^(-1 + beta0)            time-kernel scale
//     omega        = (b-1)(1 - beta0 + b*beta_inf)/(2b)   decay exponent
//
// mu is an inverse time scale (intervals at index j have length ~ 1/mu), eta
// is the dimensionless fraction of an interval given to the overlap with its
// neighbour.
// ---------------------------------------------------------------------------
struct ParamSet {
  double eps = 0.0;       // Hoelder deficit: the target space is C^{1/3-eps}
  double b = 0.0;         // frequency growth base, > 1
  double beta0 = 0.0;     // uniform amplitude exponent
  double beta_inf = 0.0;  // limiting amplitude exponent
  double beta_m1 = 0.0;   // beta_-1 = b*beta0 + (1-b)*beta_inf, kept exact
  double eps0 = 0.0;      // mollification exponent, ell = lambda_{q+1}^{eps0-1}
  double lambda0 = 0.0;   // base frequency, integer-valued, >= 2
  double M = 3.0;         // constant in the inductive velocity estimates
  bool toy_mode = false;  // allow desk-scale sets that violate the constraints
};

// Derive a strict (non-toy) ParamSet from the Hoelder deficit alone:
//   beta_inf = 1/3 - eps/16,   beta_-1 = eps/32,
//   b maximizes the admissible mollification headroom
//       f(b) = (b-1)(1 - 3b(beta0(b)+beta_inf)) / (8b),
//   which after substituting beta0(b) = (beta_-1 + (b-1) beta_inf)/b becomes
//   a concave function with maximum at  b = sqrt((1-3beta_-1+3beta_inf) /
//   (6 beta_inf)),  and  eps0 = f(b)/2  keeps half the headroom in reserve.
// Throws er::Error unless 0 < eps < 1/3 and the result validates.
ParamSet derive_params(double eps, double lambda0, double M = 3.0);

// beta_j for j >= -1; throws for j < -2.  (j = -1 returns the stored beta_m1
// so that the defining identity holds exactly, not just to rounding.)
double beta(const ParamSet& P, int j);

// lambda_q = ceil(lambda0^(b^q)) as an exact integer.  Throws er::Error when
// the value exceeds what int64/double can represent faithfully.
std::int64_t lambda(const ParamSet& P, int q);

// lambda0^(b^q) without the integer rounding; used by the ordering checker.
double lambda_ideal(const ParamSet& P, int q);

// Derived scales.  The q argument always names the level being improved, so
// mu/eta/ell/tau are powers of lambda(P, q+1).
double delta(const ParamSet& P, int q, int j);
double mu(const ParamSet& P, int q, int j);
double eta(const ParamSet& P, int q, int j);
double ell(const ParamSet& P, int q);
double tau(const ParamSet& P, int q);
double omega(const ParamSet& P);

// Same scales as functions of an explicit frequency, for callers that work
// with a clamped or hypothetical lambda_{q+1}.
double delta_of_lambda(const ParamSet& P, double lam, int j);
double mu_of_lambda(const ParamSet& P, double lam, int j);
double eta_of_lambda(const ParamSet& P, double lam, int j);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// One admissibility inequality, evaluated with its margin (>= 0 means it
// holds; for strict inequalities a zero margin is a failure).
struct ConstraintCheck {
  std::string name;
  double margin = 0.0;
  bool strict = true;  // inequality must hold strictly
  bool pass = false;
};

struct ConstraintReport {
  std::vector<ConstraintCheck> checks;
  bool all_pass = false;
  // toy_mode downgrades failures to warnings; accepted == all_pass or toy.
  bool accepted = false;
  std::vector<std::string> warnings;
  std::string to_string() const;
};

// Evaluates every admissibility requirement on the exponents:
//   b > 1;  0 < beta_-1;  beta_-1 < beta0 < beta_inf < 1/3;
//   identity beta_-1 = b*beta0 + (1-b)*beta_inf;
//   1 - 3b(beta0 + beta_inf) > 0;
//   5*beta_inf - b(1 + 3*beta0) > 0;
//   0 < eps0 <= (b-1)(1 - 3b(beta_inf+beta0))/(8b);
//   lambda0 >= 2 and integer-valued.
ConstraintReport check_constraints(const ParamSet& P);

// Throws er::Error when the report is not accepted.
void validate(const ParamSet& P);

// ---------------------------------------------------------------------------
// Ordering checker
// ---------------------------------------------------------------------------

enum class LambdaMode {
  kInteger,  // materialize lambda_q = ceil(lambda0^(b^q)); limited q range
  kIdeal,    // work with log lambda_q = b^q log lambda0; any magnitude
};

// One ordering inequality, aggregated over all (q, i) instances.  Margins are
// logarithmic: margin = ln(rhs) - ln(lhs) for an inequality lhs <= rhs, so
// "holds" is margin >= 0 regardless of the absolute scale of the sides.
struct OrderingCheck {
  std::string name;
  double worst_margin = 0.0;
  int worst_q = -1;
  int worst_i = 0;
  bool equality = false;  // |margin| must be < tol instead of margin >= 0
  bool pass = false;
  // True when the inequality holds for every lambda0 >= 2 with these
  // exponents (margin is affine in ln lambda0 with the right slope and sign).
  bool lambda0_free = false;
  // For lambda0-dependent checks: smallest log10(lambda0) that makes every
  // instance pass.  +inf when no lambda0 helps (wrong exponent direction),
  // NaN when not applicable (lambda0-free, or integer mode).
  double min_log10_lambda0 = 0.0;
};

struct OrderingReport {
  std::vector<OrderingCheck> checks;
  bool all_pass = false;
  // Max of min_log10_lambda0 over the lambda0-dependent checks; the smallest
  // base frequency for which every ordering would hold at these exponents.
  double required_log10_lambda0 = 0.0;
  std::string to_string() const;
};

// Verifies, for 0 <= q <= q_max and 0 <= i <= i_max, the parameter orderings
// the construction relies on:
//   (a) delta_{q,i} >= delta_{q+1,i} >= delta_{q+1,i+1};
//   (b) mu_{q+1,i} >= mu_{q+1,i+1};
//   (c) mu/eta ratios increase in i and equal
//       sqrt(delta_{q+1,-1}) * lambda_{q+1} exactly for i >= 2;
//   (d) sqrt(delta_{q,i}) lambda_q <= sqrt(delta_{q+1,i+1}) lambda_{q+1};
//   the three-link chain
//       sqrt(delta_{q,i-1}) lambda_q / (sqrt(delta_{q+1,i}) lambda_{q+1})
//         <= 2 sqrt(delta_{q,(i-1)+}) lambda_q / mu_{q+1,i}
//         <= 4 lambda_{q+1}^{-omega}
//         <= delta_{q+2,i+1} / (delta_{q+1,i} lambda_{q+1}^{2 eps0});
//   sqrt(delta_{q,i-1}) lambda_q <= mu_{q+1,i};
//   2 delta_{q+2,0} lambda_{q+1}^{-2 eps0}
//         >= sqrt(delta_{q+1,i}) mu_{q+1,i} / (lambda_{q+1} eta_{q+1,i});
//   refinability of overlap and plateau windows:
//       eta_{q+1,j} mu_{q+2,0} / mu_{q+1,j} >= 4,
//       mu_{q+2,j+1} / mu_{q+1,j} >= 4;
//   and the base-frequency largeness conditions
//       2(q+1) <= lambda_{q+1}^{(b-1) eps/4},
//       eta_{q+1,0} <= 1/2,
//       (1/2) lambda_{q+1}^{beta_inf - 1} <= 2^{-q-3}.
//
// In kIdeal mode, log10_lambda0_override > 0 replaces log10(P.lambda0), which
// lets callers probe astronomically large bases without overflow.  Integer
// mode throws er::Error if lambda_{q_max+2} is not representable.
OrderingReport check_orderings(const ParamSet& P, int q_max, int i_max,
                               LambdaMode mode,
                               double log10_lambda0_override = 0.0);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// JSON round trip.  load accepts either beta0 or beta_m1 and derives the
// other from the identity; if both are present they must agree to 1e-12.
ParamSet load_params(const std::string& json_text);
ParamSet load_params_file(const std::string& path);
std::string save_params(const ParamSet& P);  // canonical formatting

// FNV-1a of the canonical serialization; tags snapshots and manifests.
std::uint64_t params_hash(const ParamSet& P);

}  // namespace er
