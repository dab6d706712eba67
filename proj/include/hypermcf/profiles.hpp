#pragma once
// Scalar pinching functions.
//
//   alpha(n, |H|, c)  the sharp pinching bound on |h|^2
//   alpha_ring(y)     alpha(n, sqrt(y), c) - y/n, defined for y > -n^2 c
//   omega(y)          y + 4(n-1)c, the margin weight
//   beta(x)           the n = 5 replacement bound, beta_ring(x) = beta(x) - x/5
//
// plus the certification sweeps over log-spaced grids used by the lemma suites.

#include <optional>
#include <string>
#include <vector>

namespace hypermcf {

/// nc + n/(2(n-1)) |H|^2 - (n-2)/(2(n-1)) sqrt(|H|^4 + 4(n-1)c|H|^2).
/// Valid for any sign of c; throws DomainError on a negative radicand.
[[nodiscard]] double alpha(int n, double mean_curvature_norm, double c);

/// Dimension and ambient curvature of a hyperbolic space form H^{n+q}(c).
class PinchingProfile {
 public:
  PinchingProfile(int n, double c);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] double c() const { return c_; }

  /// Lower end -n^2 c of the mean-curvature regime.
  [[nodiscard]] double regime_boundary() const { return -static_cast<double>(n_) * n_ * c_; }

  [[nodiscard]] double alpha(double mean_curvature_norm) const { return hypermcf::alpha(n_, mean_curvature_norm, c_); }

  // The three functions below extend continuously to y = -n^2 c (alpha_ring = 0 there)
  // and throw DomainError for y < -n^2 c.
  [[nodiscard]] double alpha_ring(double y) const;
  [[nodiscard]] double alpha_ring_prime(double y) const;
  [[nodiscard]] double alpha_ring_second(double y) const;

  /// xi = y / sqrt(y^2 + 4(n-1)cy), mapping (-n^2 c, inf) onto (1, n/(n-2)).
  [[nodiscard]] double xi_of_y(double y) const;
  /// Inverse of xi_of_y: 4(n-1)c / (xi^-2 - 1).
  [[nodiscard]] double y_of_xi(double xi) const;

  [[nodiscard]] double omega(double y) const { return y + 4.0 * (n_ - 1) * c_; }

 private:
  void require_regime(double y, const char* who) const;

  int n_;
  double c_;
};

/// Exponent parameter of f_sigma = |ho|^2 / alpha_ring^(1 - sigma).
class SigmaConfig {
 public:
  explicit SigmaConfig(double sigma);
  [[nodiscard]] double sigma() const { return sigma_; }

 private:
  double sigma_;
};

/// Residuals (i), (ii) and strict-inequality margins (iii)-(vi) of the alpha_ring
/// property list. A margin is "bound - value", positive when the property holds.
struct Lemma32Margins {
  double identity_i = 0;    // y a'(a + y/n + nc) - a(a + y/n - nc)
  double identity_ii = 0;   // (n-2)/sqrt(n(n-1)) sqrt(y a) - (y/n - a + nc)
  double alpha_positive = 0;
  double alpha_upper = 0;   // (y + n^2 c)/(n(n-1)) - a
  double prime_positive = 0;
  double prime_upper = 0;   // 1/(n(n-1)) - a'
  double second_positive = 0;
  double gradient_iv = 0;   // sqrt(a) - 2 sqrt(y) a'
  double convexity_v = 0;   // y a' - a
  double bound_vi = 0;      // 2(n-1)/(n(n+2)) - (2 y a'' + a')
};

/// Evaluates every item of the property list at y. Any n >= 3 is accepted so that
/// the failure for n <= 5 can be exhibited; the properties are claimed for n >= 6.
[[nodiscard]] Lemma32Margins lemma32_margins(const PinchingProfile& p, double y);

// --- n = 5 replacement bound ------------------------------------------------

/// 5c/11 + 15x/88 + (sqrt 7/88) sqrt(7x^2 + 272cx + 4000c^2); defined for all x.
[[nodiscard]] double beta(double x, double c);
[[nodiscard]] double beta_ring(double x, double c);
[[nodiscard]] double beta_ring_prime(double x, double c);
[[nodiscard]] double beta_ring_second(double x, double c);

struct BetaMargins {
  double lower_i = 0;       // beta_ring - max(x/20 + 2c, 0)
  double upper_i = 0;       // alpha_ring(x) at n = 5 - beta_ring
  double reaction_ii = 0;   // x b'(b + x/5 + 5c) - b(b + x/5 - 5c)
  double gradient_iii = 0;  // sqrt(b) - 2 sqrt(x) b'
  double bound_iv = 0;      // 8/35 - (2x b'' + b')
  double comparison = 0;    // beta(x) - (x/4 + 2c)
};

/// Margins of the n = 5 property list; requires x > -25c.
[[nodiscard]] BetaMargins beta_suite(double x, double c);

// --- sweeps -------------------------------------------------------------------

/// Log-spaced grid with `points_per_decade` points per factor of ten on [lo, hi].
struct LogGrid {
  double lo = 0;
  double hi = 0;
  int points_per_decade = 512;

  [[nodiscard]] std::vector<double> points() const;
  [[nodiscard]] std::string describe() const;
};

/// Default certification grid: (boundary (1 + 1e-6), 1e8 |c|].
[[nodiscard]] LogGrid default_sweep_grid(double boundary, double c, int points_per_decade = 512);

/// Result for one property over a sweep.
struct PropertyCertificate {
  std::string name;
  double min_margin = 0;  // for identities: minus the largest normalised residual
  double argmin = 0;
  bool passed = false;
  std::string grid;
};

/// Certifies identities (i)-(ii) to |residual| < 1e-9 max(1, y^2) and strict
/// positivity of every inequality margin over the grid.
[[nodiscard]] std::vector<PropertyCertificate> certify_lemma32(const PinchingProfile& p, const LogGrid& grid);

/// Witness of a failed inequality from the (iii)-(vi) list.
struct ViolationWitness {
  int n = 0;
  double c = 0;
  double y = 0;
  std::string property;
  double margin = 0;
};

/// Grid search plus Brent refinement (in log y) of the most negative inequality margin.
/// Returns nothing when every margin stays positive on the grid.
[[nodiscard]] std::optional<ViolationWitness> find_lemma32_violation(const PinchingProfile& p, const LogGrid& grid);

/// Certifies the five n = 5 margins and the comparison with x/4 + 2c.
[[nodiscard]] std::vector<PropertyCertificate> certify_beta(double c, const LogGrid& grid);

}  // namespace hypermcf
