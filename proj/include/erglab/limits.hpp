#pragma once

// Closed-form limit laws: the generalized arc-sine law xi_alpha, the limits
// X_alpha and Y_alpha of the normalized Kac processes, U[0,1] and point masses.

#include <string>
#include <variant>

#include "erglab/rng.hpp"

namespace erglab {

/// Beta(alpha, 1 - alpha)
struct Xi {
  double alpha;
};
/// Distributed as xi_alpha^{1-alpha}.
struct KacX {
  double alpha;
};
/// Distributed as (1 - xi_alpha)^{1-alpha}.
struct KacY {
  double alpha;
};
struct Uniform01 {};
struct Dirac {
  double c;
};

using AlphaLaw = std::variant<Xi, KacX, KacY, Uniform01, Dirac>;

/// Replaces boundary parameters by their limits: Xi(0) = Dirac(0),
/// Xi(1) = Dirac(1), KacX(0) = Dirac(0), KacX(1) = Dirac(1),
/// KacY(0) = Dirac(1). KacY(1) is rejected (it only exists as a limit,
/// which is Uniform01). Throws std::domain_error for alpha outside [0, 1].
AlphaLaw canonical(const AlphaLaw& law);

/// Parses "xi:A", "kacx:A", "kacy:A", "uniform", "dirac:C" and returns the
/// canonical law.
AlphaLaw parse_law(const std::string& text);
std::string law_name(const AlphaLaw& law);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction, with
/// the symmetry switch at x > (a+1)/(a+b+2).
double reg_inc_beta(double a, double b, double x);

/// Density on (0, 1). Throws std::domain_error for point masses.
double pdf(const AlphaLaw& law, double x);

double cdf(const AlphaLaw& law, double x);

/// Generalized inverse of cdf, by bisection for the continuous laws.
double quantile(const AlphaLaw& law, double p);

/// One draw. Xi uses a two-gamma ratio; KacX and KacY transform that draw.
double sample(const AlphaLaw& law, Rng& rng);

}  // namespace erglab
