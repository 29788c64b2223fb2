#pragma once

// Regularly and slowly varying functions: evaluation, asymptotic inverses,
// Erickson scaling and the Karamata/Tauberian ratio diagnostics.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace erglab {

/// Piecewise-linear function on an increasing grid, constant beyond both ends.
class TabulatedFunction {
 public:
  TabulatedFunction() = default;
  TabulatedFunction(std::vector<double> grid, std::vector<double> values);
  static TabulatedFunction constant(double value);

  double operator()(double x) const;
  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

/// scale * x^beta * (ln x)^gamma * (ln ln x)^gamma2
struct PowerLog {
  double beta = 0.0;
  double gamma = 0.0;
  double gamma2 = 0.0;
  double scale = 1.0;
};

/// x^beta * psi(x) * exp(int_B^x zeta(t)/t dt), the Karamata representation
/// with tabulated psi and zeta. psi must stay positive and |zeta| < 1.
struct KaramataForm {
  double beta = 0.0;
  TabulatedFunction psi;
  TabulatedFunction zeta;
  double B = 1.0;
};

class RegVarSpec {
 public:
  using Form = std::variant<PowerLog, KaramataForm>;

  RegVarSpec(PowerLog form, double x0);
  RegVarSpec(KaramataForm form, double x0);

  static RegVarSpec power_log(double beta, double gamma, double x0 = 0.0);

  const Form& form() const { return form_; }
  double x0() const { return x0_; }
  double beta() const;

  /// ln F(x); x must be >= x0.
  double log_eval(double x) const;

 private:
  void validate() const;

  Form form_;
  double x0_;
  // Cumulative int_B^{grid_i} zeta(t)/t dt at the zeta grid nodes.
  std::vector<double> zeta_integral_;
  double zeta_integral(double x) const;
};

/// F(x). Throws std::domain_error for x < spec.x0().
double eval(const RegVarSpec& spec, double x);

/// F evaluated at max(x, x0); used where integer arguments such as Z_n can
/// fall below the domain floor.
double eval_clamped(const RegVarSpec& spec, double x);

/// inf{t >= x0 : F(t) > y} by bracket doubling from x0 and bisection to a
/// relative width of 1e-12. Throws std::range_error when F stays <= y over
/// the representable range.
double asymptotic_inverse(const RegVarSpec& spec, double y);

/// a_n(x) = L^{-1}(x L(n)) for slowly varying, increasing L.
double erickson_scale(const RegVarSpec& L, double n, double x);

struct RatioPoint {
  double at;     // n or s
  double ratio;
};

struct TauberianTable {
  std::vector<RatioPoint> partial_sums;  // per n
  std::vector<RatioPoint> laplace;       // per s
};

using Sequence = std::function<double(std::uint64_t)>;

/// Sum_{k>=0} b_k e^{-ks}, stopped once a term drops below 1e-15 of the
/// running sum (or after max_terms).
double laplace_sum(const Sequence& b, double s,
                   std::uint64_t max_terms = 400'000'000);

/// Karamata's Tauberian theorem as a numeric diagnostic. Per n:
/// sum_{k<n} b_k / (n^rho L(n) / Gamma(rho+1)); per s: B(s) / (s^-rho L(1/s)).
TauberianTable karamata_tauberian_ratio(const Sequence& b, double rho,
                                        const RegVarSpec& L,
                                        std::span<const std::uint64_t> n_grid,
                                        std::span<const double> s_grid);

/// Karamata's lemma: n^{p+1} a_n / sum_{k=1}^{n} k^p a_k, which tends to
/// p + rho + 1 for a regularly varying with exponent rho.
std::vector<RatioPoint> karamata_lemma_ratio(const Sequence& a, double p,
                                             double rho,
                                             std::span<const std::uint64_t> n_grid);

}  // namespace erglab
