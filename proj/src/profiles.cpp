#include "hypermcf/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hypermcf/errors.hpp"

namespace hypermcf {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

using std::sqrt;
using boost::multiprecision::sqrt;

// alpha_ring and derivatives in a form without cancellation for large y:
//   alpha_ring  = y/(n(n-1)) + nc - B a y / (sqrt(R) + y)
//   alpha_ring' = 1/(n(n-1)) - B (a^2/4) / (sqrt(R) (y + a/2 + sqrt(R)))
//   alpha_ring''= 2(n-1)(n-2)c^2 / R^{3/2}
// with a = 4(n-1)c, B = (n-2)/(2(n-1)), R = y(y + a).
template <class Real>
struct AlphaRing {
  Real value, prime, second;
};

template <class Real>
AlphaRing<Real> alpha_ring_all(int n, Real c, Real y) {
  const Real nn = n;
  const Real a = 4 * (nn - 1) * c;
  const Real b = (nn - 2) / (2 * (nn - 1));
  const Real root = sqrt(y) * sqrt(y + a);
  const Real inv = 1 / (nn * (nn - 1));
  AlphaRing<Real> out;
  out.value = y * inv + nn * c - b * a * y / (root + y);
  out.prime = inv - b * (a * a / 4) / (root * (y + a / 2 + root));
  out.second = 2 * (nn - 1) * (nn - 2) * c * c / (root * root * root);
  return out;
}

template <class Real>
struct BetaRing {
  Real beta, value, prime, second;
};

template <class Real>
BetaRing<Real> beta_all(Real x, Real c) {
  const Real r7 = 7 * x * x + 272 * c * x + 4000 * c * c;
  const Real root = sqrt(r7);
  const Real s7 = sqrt(Real(7));
  BetaRing<Real> out;
  out.beta = 5 * c / 11 + 15 * x / 88 + s7 / 88 * root;
  out.value = out.beta - x / 5;
  out.prime = Real(15) / 88 - Real(1) / 5 + s7 / 88 * (14 * x + 272 * c) / (2 * root);
  out.second = 108 * s7 * c * c / (root * root * root);
  return out;
}

double to_double(const Wide& w) { return w.convert_to<double>(); }

bool identity_ok(double residual, double y) { return std::abs(residual) < 1e-9 * std::max(1.0, y * y); }

}  // namespace

double alpha(int n, double mean_curvature_norm, double c) {
  if (n < 2) throw ConfigError("alpha: n must be >= 2");
  const double y = mean_curvature_norm * mean_curvature_norm;
  const double radicand = y * (y + 4.0 * (n - 1) * c);
  if (radicand < 0.0) throw DomainError("alpha: negative radicand |H|^4 + 4(n-1)c|H|^2");
  return n * c + n / (2.0 * (n - 1)) * y - (n - 2) / (2.0 * (n - 1)) * std::sqrt(radicand);
}

PinchingProfile::PinchingProfile(int n, double c) : n_(n), c_(c) {
  if (n < 2) throw ConfigError("PinchingProfile: n must be >= 2");
  if (!(c < 0.0) || !std::isfinite(c)) throw ConfigError("PinchingProfile: c must be negative");
}

void PinchingProfile::require_regime(double y, const char* who) const {
  if (!(y >= regime_boundary())) {
    std::ostringstream os;
    os << who << ": y = " << y << " below -n^2 c = " << regime_boundary();
    throw DomainError(os.str());
  }
}

double PinchingProfile::alpha_ring(double y) const {
  require_regime(y, "alpha_ring");
  return alpha_ring_all<double>(n_, c_, y).value;
}

double PinchingProfile::alpha_ring_prime(double y) const {
  require_regime(y, "alpha_ring_prime");
  return alpha_ring_all<double>(n_, c_, y).prime;
}

double PinchingProfile::alpha_ring_second(double y) const {
  require_regime(y, "alpha_ring_second");
  return alpha_ring_all<double>(n_, c_, y).second;
}

double PinchingProfile::xi_of_y(double y) const {
  if (!(y > regime_boundary())) throw DomainError("xi_of_y: y must exceed -n^2 c");
  return std::sqrt(y / (y + 4.0 * (n_ - 1) * c_));
}

double PinchingProfile::y_of_xi(double xi) const {
  const double upper = n_ > 2 ? static_cast<double>(n_) / (n_ - 2) : std::numeric_limits<double>::infinity();
  if (!(xi > 1.0 && xi < upper)) throw DomainError("y_of_xi: xi outside (1, n/(n-2))");
  // xi^-2 - 1 written as (1 - xi)(1 + xi)/xi^2 so that 1 - xi is the only rounding-sensitive factor.
  return 4.0 * (n_ - 1) * c_ * xi * xi / ((1.0 - xi) * (1.0 + xi));
}

SigmaConfig::SigmaConfig(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0, 1)");
}

Lemma32Margins lemma32_margins(const PinchingProfile& p, double y) {
  if (!(y > p.regime_boundary())) throw DomainError("lemma32_margins: y outside the regime");
  const auto ar = alpha_ring_all<double>(p.n(), p.c(), y);
  const double n = p.n();
  const double c = p.c();
  const double a = ar.value;
  const double a1 = ar.prime;
  const double a2 = ar.second;

  Lemma32Margins m;
  m.identity_i = y * a1 * (a + y / n + n * c) - a * (a + y / n - n * c);
  m.identity_ii = (n - 2) / std::sqrt(n * (n - 1)) * std::sqrt(y * std::max(a, 0.0)) - (y / n - a + n * c);
  m.alpha_positive = a;
  m.alpha_upper = (y + n * n * c) / (n * (n - 1)) - a;
  m.prime_positive = a1;
  m.prime_upper = 1.0 / (n * (n - 1)) - a1;
  m.second_positive = a2;
  m.gradient_iv = std::sqrt(std::max(a, 0.0)) - 2.0 * std::sqrt(y) * a1;
  m.convexity_v = y * a1 - a;
  m.bound_vi = 2.0 * (n - 1) / (n * (n + 2)) - (2.0 * y * a2 + a1);
  return m;
}

double beta(double x, double c) { return beta_all<double>(x, c).beta; }
double beta_ring(double x, double c) { return beta_all<double>(x, c).value; }
double beta_ring_prime(double x, double c) { return beta_all<double>(x, c).prime; }
double beta_ring_second(double x, double c) { return beta_all<double>(x, c).second; }

BetaMargins beta_suite(double x, double c) {
  if (!(c < 0.0)) throw ConfigError("beta_suite: c must be negative");
  if (!(x > -25.0 * c)) throw DomainError("beta_suite: x must exceed -25c");
  // Margin (ii) vanishes to third order at x = -25c, below double resolution of
  // its two terms, so the whole list is evaluated in 50-digit arithmetic.
  const Wide wx = x;
  const Wide wc = c;
  const auto br = beta_all<Wide>(wx, wc);
  const auto ar = alpha_ring_all<Wide>(5, wc, wx);
  const Wide& b = br.value;
  const Wide& b1 = br.prime;
  const Wide& b2 = br.second;

  BetaMargins m;
  m.lower_i = to_double(b - std::max<Wide>(wx / 20 + 2 * wc, Wide(0)));
  m.upper_i = to_double(ar.value - b);
  m.reaction_ii = to_double(wx * b1 * (b + wx / 5 + 5 * wc) - b * (b + wx / 5 - 5 * wc));
  m.gradient_iii = to_double(sqrt(b) - 2 * sqrt(wx) * b1);
  m.bound_iv = to_double(Wide(8) / 35 - (2 * wx * b2 + b1));
  m.comparison = to_double(br.beta - (wx / 4 + 2 * wc));
  return m;
}

std::vector<double> LogGrid::points() const {
  if (!(lo > 0.0 && hi > lo) || points_per_decade < 1) throw ConfigError("LogGrid: need 0 < lo < hi");
  const double decades = std::log10(hi / lo);
  const auto count = static_cast<std::size_t>(std::ceil(decades * points_per_decade)) + 1;
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = lo * std::pow(10.0, decades * static_cast<double>(k) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::string LogGrid::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "log[" << lo << ", " << hi << "] x" << points_per_decade << "/decade";
  return os.str();
}

LogGrid default_sweep_grid(double boundary, double c, int points_per_decade) {
  return LogGrid{boundary * (1.0 + 1e-6), 1e8 * std::abs(c), points_per_decade};
}

namespace {

struct NamedMargin {
  const char* name;
  double Lemma32Margins::*field;
};

constexpr NamedMargin kLemma32Inequalities[] = {
    {"iii.alpha_positive", &Lemma32Margins::alpha_positive},
    {"iii.alpha_upper", &Lemma32Margins::alpha_upper},
    {"iii.prime_positive", &Lemma32Margins::prime_positive},
    {"iii.prime_upper", &Lemma32Margins::prime_upper},
    {"iii.second_positive", &Lemma32Margins::second_positive},
    {"iv.gradient", &Lemma32Margins::gradient_iv},
    {"v.convexity", &Lemma32Margins::convexity_v},
    {"vi.bound", &Lemma32Margins::bound_vi},
};

std::string lemma32_prefix(const PinchingProfile& p) {
  std::ostringstream os;
  os << "lemma32[n=" << p.n() << ",c=" << p.c() << "].";
  return os.str();
}

}  // namespace

std::vector<PropertyCertificate> certify_lemma32(const PinchingProfile& p, const LogGrid& grid) {
  const auto ys = grid.points();
  const std::string prefix = lemma32_prefix(p);
  const std::string gdesc = grid.describe();

  struct Acc {
    double worst = std::numeric_limits<double>::infinity();
    double arg = 0;
    bool ok = true;
  };
  Acc id_i, id_ii;
  std::vector<Acc> ineq(std::size(kLemma32Inequalities));

  for (double y : ys) {
    const auto m = lemma32_margins(p, y);
    const double scale = std::max(1.0, y * y);
    auto track_identity = [&](Acc& acc, double residual) {
      const double v = -std::abs(residual) / scale;
      if (v < acc.worst) {
        acc.worst = v;
        acc.arg = y;
      }
      acc.ok = acc.ok && identity_ok(residual, y);
    };
    track_identity(id_i, m.identity_i);
    track_identity(id_ii, m.identity_ii);
    for (std::size_t k = 0; k < ineq.size(); ++k) {
      const double v = m.*(kLemma32Inequalities[k].field);
      if (v < ineq[k].worst) {
        ineq[k].worst = v;
        ineq[k].arg = y;
      }
      ineq[k].ok = ineq[k].ok && v > 0.0;
    }
  }

  std::vector<PropertyCertificate> out;
  out.push_back({prefix + "i.identity", id_i.worst, id_i.arg, id_i.ok, gdesc});
  out.push_back({prefix + "ii.identity", id_ii.worst, id_ii.arg, id_ii.ok, gdesc});
  for (std::size_t k = 0; k < ineq.size(); ++k) {
    out.push_back({prefix + kLemma32Inequalities[k].name, ineq[k].worst, ineq[k].arg, ineq[k].ok, gdesc});
  }
  return out;
}

std::optional<ViolationWitness> find_lemma32_violation(const PinchingProfile& p, const LogGrid& grid) {
  const auto ys = grid.points();
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const auto m = lemma32_margins(p, ys[i]);
    for (std::size_t k = 0; k < std::size(kLemma32Inequalities); ++k) {
      const double v = m.*(kLemma32Inequalities[k].field);
      if (v < worst) {
        worst = v;
        worst_k = k;
        worst_i = i;
      }
    }
  }
  if (!(worst <= 0.0)) return std::nullopt;

  // Refine in log y between the neighbouring grid points.
  const auto field = kLemma32Inequalities[worst_k].field;
  const double lo = std::log(ys[worst_i == 0 ? 0 : worst_i - 1]);
  const double hi = std::log(ys[std::min(worst_i + 1, ys.size() - 1)]);
  auto margin_at = [&](double log_y) { return lemma32_margins(p, std::exp(log_y)).*field; };
  double best_log = std::log(ys[worst_i]);
  double best = worst;
  if (hi > lo) {
    const auto [arg, val] = boost::math::tools::brent_find_minima(margin_at, lo, hi, 40);
    if (val < best) {
      best = val;
      best_log = arg;
    }
  }
  ViolationWitness w;
  w.n = p.n();
  w.c = p.c();
  w.y = std::exp(best_log);
  w.property = kLemma32Inequalities[worst_k].name;
  w.margin = best;
  return w;
}

std::vector<PropertyCertificate> certify_beta(double c, const LogGrid& grid) {
  const auto xs = grid.points();
  std::ostringstream os;
  os << "beta[c=" << c << "].";
  const std::string prefix = os.str();
  const std::string gdesc = grid.describe();

  struct Item {
    const char* name;
    double BetaMargins::*field;
  };
  constexpr Item items[] = {
      {"i.lower", &BetaMargins::lower_i},         {"i.upper", &BetaMargins::upper_i},
      {"ii.reaction", &BetaMargins::reaction_ii}, {"iii.gradient", &BetaMargins::gradient_iii},
      {"iv.bound", &BetaMargins::bound_iv},       {"comparison", &BetaMargins::comparison},
  };
  std::vector<PropertyCertificate> out;
  for (const auto& it : items) out.push_back({prefix + it.name, std::numeric_limits<double>::infinity(), 0, true, gdesc});
  for (double x : xs) {
    const auto m = beta_suite(x, c);
    for (std::size_t k = 0; k < std::size(items); ++k) {
      const double v = m.*(items[k].field);
      if (v < out[k].min_margin) {
        out[k].min_margin = v;
        out[k].argmin = x;
      }
      out[k].passed = out[k].passed && v > 0.0;
    }
  }
  return out;
}

}  // namespace hypermcf
