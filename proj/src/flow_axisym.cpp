#include "hypermcf/flow_axisym.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/quintic_hermite.hpp>

#include "hypermcf/errors.hpp"

namespace hypermcf {

namespace {

using Vec = Eigen::Vector3d;

double mdot(const Vec& a, const Vec& b) { return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

std::vector<double> chords(const AxisymProfile& p) {
  const std::size_t N = p.size();
  if (N < 5) throw PreconditionError("axisymmetric profile needs at least 5 nodes");
  std::vector<double> h(N - 1);
  for (std::size_t i = 0; i + 1 < N; ++i) {
    const Vec d = p.points[i + 1].coords() - p.points[i].coords();
    const double q = mdot(d, d);
    if (!(q > 0.0)) throw RemeshError("profile chord is not spacelike");
    h[i] = std::sqrt(q);
  }
  return h;
}

// First and second arclength derivatives at every node. Interior nodes use the
// three-point nonuniform stencils; a pole uses X_s = +-e_rho and the even fit
// f(d) = f0 + A d^2 + B d^4 through its two nearest neighbours, X_ss = 2A.
struct Derivatives {
  std::vector<double> h;
  std::vector<Vec> xs;
  std::vector<Vec> xss;
};

Vec pole_second_derivative(const Vec& p0, const Vec& p1, const Vec& p2, double d1, double d2) {
  const double d1s = d1 * d1, d2s = d2 * d2;
  const Vec A = (d2s * d2s * (p1 - p0) - d1s * d1s * (p2 - p0)) / (d1s * d2s * (d2s - d1s));
  Vec out = 2.0 * A;
  out[2] = 0.0;
  return out;
}

Derivatives derivatives(const AxisymProfile& p) {
  Derivatives d;
  d.h = chords(p);
  const std::size_t N = p.size();
  d.xs.resize(N);
  d.xss.resize(N);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const Vec& a = p.points[i - 1].coords();
    const Vec& b = p.points[i].coords();
    const Vec& e = p.points[i + 1].coords();
    const double hm = d.h[i - 1], hp = d.h[i];
    d.xs[i] = (hm * hm * (e - b) + hp * hp * (b - a)) / (hm * hp * (hm + hp));
    d.xss[i] = 2.0 * ((e - b) / hp - (b - a) / hm) / (hm + hp);
  }
  d.xs[0] = Vec(0, 0, 1);
  d.xs[N - 1] = Vec(0, 0, -1);
  d.xss[0] = pole_second_derivative(p.points[0].coords(), p.points[1].coords(), p.points[2].coords(), d.h[0],
                                    d.h[0] + d.h[1]);
  d.xss[N - 1] = pole_second_derivative(p.points[N - 1].coords(), p.points[N - 2].coords(),
                                        p.points[N - 3].coords(), d.h[N - 2], d.h[N - 2] + d.h[N - 3]);
  return d;
}

// Same interior stencil for a scalar field; zero at the poles by symmetry.
std::vector<double> scalar_derivative(const std::vector<double>& f, const std::vector<double>& h) {
  const std::size_t N = f.size();
  std::vector<double> out(N, 0.0);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double hm = h[i - 1], hp = h[i];
    out[i] = (hm * hm * (f[i + 1] - f[i]) + hp * hp * (f[i] - f[i - 1])) / (hm * hp * (hm + hp));
  }
  return out;
}

std::vector<NodeCurvature> curvatures_from(const AxisymProfile& p, const Derivatives& d) {
  const std::size_t N = p.size();
  std::vector<Vec> nu(N);
  double orientation = 0;
  for (std::size_t i = 0; i < N; ++i) {
    Vec v = lorentz_cross(p.points[i], LorentzVector3(d.xs[i])).coords();
    const double q = mdot(v, v);
    if (!(q > 0.0)) throw RemeshError("degenerate profile normal");
    nu[i] = v / std::sqrt(q);
    if (i > 0 && i + 1 < N) orientation -= nu[i][2];
  }
  const double sign = orientation >= 0.0 ? 1.0 : -1.0;
  std::vector<NodeCurvature> out(N);
  for (std::size_t i = 0; i < N; ++i) {
    const Vec n = sign * nu[i];
    out[i].kappa_profile = mdot(d.xss[i], n) / mdot(d.xs[i], d.xs[i]);
    if (i == 0 || i + 1 == N) {
      out[i].kappa_orbit = out[i].kappa_profile;
    } else {
      out[i].kappa_orbit = -n[2] / p.points[i][2];
    }
  }
  return out;
}

LorentzVector3 to_lv(const Vec& v) { return LorentzVector3(v); }

}  // namespace

void AxisymProfile::validate() const {
  if (n < 2) throw ConfigError("axisymmetric profile: n must be >= 2");
  if (!(c < 0.0)) throw ConfigError("axisymmetric profile: c must be negative");
  const std::size_t N = size();
  if (N < 5) throw PreconditionError("axisymmetric profile needs at least 5 nodes");
  if (points.front()[2] != 0.0 || points.back()[2] != 0.0) {
    throw PreconditionError("axisymmetric profile: poles must lie on the axis (rho = 0)");
  }
  for (std::size_t i = 0; i < N; ++i) {
    const auto& v = points[i].coords();
    if (!v.allFinite()) throw PreconditionError("axisymmetric profile: non-finite node");
    if (std::abs(c * mdot(v, v) - 1.0) > 1e-10) throw PreconditionError("axisymmetric profile: node off the hyperboloid");
    if (!(v[0] > 0.0)) throw PreconditionError("axisymmetric profile: node on the lower sheet");
    if (i > 0 && i + 1 < N && !(v[2] > 0.0)) throw PreconditionError("axisymmetric profile: interior node on the axis");
  }
  (void)chords(*this);
}

std::vector<double> arclength(const AxisymProfile& p) {
  const auto h = chords(p);
  std::vector<double> s(p.size(), 0.0);
  for (std::size_t i = 0; i < h.size(); ++i) s[i + 1] = s[i] + h[i];
  return s;
}

std::vector<LorentzVector3> reduced_laplacian(const AxisymProfile& p) {
  const auto d = derivatives(p);
  const std::size_t N = p.size();
  const double n = p.n;
  std::vector<LorentzVector3> out(N, LorentzVector3(Vec::Zero()));
  for (std::size_t i = 1; i + 1 < N; ++i) {
    const double rho = p.points[i][2];
    const Vec& xs = d.xs[i];
    Vec L = d.xss[i];
    const double warp = (n - 1) * xs[2] / rho;
    L[0] += warp * xs[0];
    L[1] += warp * xs[1];
    L[2] += (n - 1) * (xs[0] * xs[0] - xs[1] * xs[1]) / rho;
    out[i] = to_lv(L);
  }
  out[0] = to_lv(n * d.xss[0]);
  out[N - 1] = to_lv(n * d.xss[N - 1]);
  return out;
}

std::vector<NodeCurvature> node_curvatures(const AxisymProfile& p) { return curvatures_from(p, derivatives(p)); }

SecondFundamentalForm second_fundamental_form_at(const AxisymProfile& p, std::size_t node) {
  if (node >= p.size()) throw ConfigError("second_fundamental_form_at: node out of range");
  const auto k = node_curvatures(p)[node];
  std::vector<double> diag(static_cast<std::size_t>(p.n), k.kappa_orbit);
  diag.back() = k.kappa_profile;
  return SecondFundamentalForm::diagonal(diag);
}

double max_stable_dt(const AxisymProfile& p) {
  const auto h = chords(p);
  const double m = *std::min_element(h.begin(), h.end());
  return 0.2 * m * m;
}

double spacing_ratio(const AxisymProfile& p) {
  const auto h = chords(p);
  const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
  return *hi / *lo;
}

AxisymProfile remesh(const AxisymProfile& p) {
  const auto s = arclength(p);
  const auto d = derivatives(p);
  const std::size_t N = p.size();
  const double total = s.back();
  AxisymProfile out = p;
  std::vector<Vec> resampled(N, Vec::Zero());
  for (int k = 0; k < 3; ++k) {
    std::vector<double> y(N), dy(N), d2y(N);
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = p.points[i][k];
      dy[i] = d.xs[i][k];
      d2y[i] = d.xss[i][k];
    }
    boost::math::interpolators::quintic_hermite<std::vector<double>> interp(std::vector<double>(s), std::move(y),
                                                                            std::move(dy), std::move(d2y));
    for (std::size_t i = 0; i < N; ++i) {
      const double si = i + 1 == N ? total : total * static_cast<double>(i) / static_cast<double>(N - 1);
      resampled[i][k] = interp(si);
    }
  }
  resampled.front() = p.points.front().coords();
  resampled.back() = p.points.back().coords();
  for (std::size_t i = 0; i < N; ++i) {
    if (i > 0 && i + 1 < N && !(resampled[i][2] > 0.0)) throw RemeshError("remesh put an interior node on the axis");
    out.points[i] = project_to_hyperboloid(to_lv(resampled[i]), p.c).vector();
  }
  return out;
}

namespace {

AxisymProfile explicit_update(const AxisymProfile& p, double dt) {
  if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("flow_step: dt must be finite and >= 0");
  if (dt == 0.0) return p;
  const double limit = max_stable_dt(p);
  if (dt > limit) {
    std::ostringstream os;
    os.precision(6);
    os << "flow_step: dt = " << dt << " exceeds the stability bound 0.2 min ds^2 = " << limit;
    throw ConfigError(os.str());
  }
  const auto L = reduced_laplacian(p);
  const double nc = p.n * p.c;
  AxisymProfile out = p;
  const std::size_t N = p.size();
  for (std::size_t i = 0; i < N; ++i) {
    Vec x = p.points[i].coords() + dt * (L[i].coords() + nc * p.points[i].coords());
    if (i == 0 || i + 1 == N) x[2] = 0.0;
    out.points[i] = project_to_hyperboloid(to_lv(x), p.c).vector();
    if (i > 0 && i + 1 < N && !(out.points[i][2] > 0.0)) throw RemeshError("interior node crossed the axis");
  }
  out.time = p.time + dt;
  return out;
}

}  // namespace

AxisymProfile flow_step(const AxisymProfile& p, double dt) {
  AxisymProfile out = explicit_update(p, dt);
  if (dt > 0.0 && spacing_ratio(out) > 2.0) out = remesh(out);
  return out;
}

void MonitorConfig::validate(int n) const {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("monitor: sigma must lie in (0, 1)");
  if (!(eta > 0.0 && eta < 1.0 / n)) throw ConfigError("monitor: eta must lie in (0, 1/n)");
  if (!(diam_tol > 0.0 && diam_tol < 1.0)) throw ConfigError("monitor: diam_tol must lie in (0, 1)");
  if (!(ratio_tol > 0.0 && ratio_tol < 1.0)) throw ConfigError("monitor: ratio_tol must lie in (0, 1)");
  if (!(ho_ratio_tol > 0.0)) throw ConfigError("monitor: ho_ratio_tol must be positive");
  if (!std::isnan(H_max_stop) && !(H_max_stop > 0.0)) throw ConfigError("monitor: H_max_stop must be positive");
  if (!std::isnan(eps) && !(eps >= 0.0)) throw ConfigError("monitor: eps must be >= 0");
}

namespace {

struct NodeScalars {
  std::vector<double> H, h_sq, ho_sq;
};

NodeScalars node_scalars(const AxisymProfile& p, const std::vector<NodeCurvature>& k) {
  const double n = p.n;
  NodeScalars s;
  for (const auto& kc : k) {
    const double H = kc.kappa_profile + (n - 1) * kc.kappa_orbit;
    const double diff = kc.kappa_profile - kc.kappa_orbit;
    s.H.push_back(H);
    s.h_sq.push_back(kc.kappa_profile * kc.kappa_profile + (n - 1) * kc.kappa_orbit * kc.kappa_orbit);
    s.ho_sq.push_back((n - 1) / n * diff * diff);
  }
  return s;
}

}  // namespace

MonitorValues monitor_row(const AxisymProfile& p, const MonitorConfig& mc, double eps, double x0_initial) {
  const auto d = derivatives(p);
  const auto k = curvatures_from(p, d);
  const auto sc = node_scalars(p, k);
  const std::size_t N = p.size();
  const double n = p.n;
  const PinchingProfile prof(p.n, p.c);
  constexpr double inf = std::numeric_limits<double>::infinity();

  MonitorValues m;
  TraceRow& r = m.row;
  r.t = p.time;
  r.H_min = inf;
  r.H_max = -inf;
  r.pinch_margin_min = inf;
  m.lemma21_i_min = inf;
  m.lemma21_ii_min = inf;
  m.thm51_excess_max = -inf;

  std::vector<double> kp(N), ko(N), H2(N);
  for (std::size_t i = 0; i < N; ++i) {
    kp[i] = k[i].kappa_profile;
    ko[i] = k[i].kappa_orbit;
    H2[i] = sc.H[i] * sc.H[i];
  }
  const auto dkp = scalar_derivative(kp, d.h);
  const auto dko = scalar_derivative(ko, d.h);
  const auto dH = scalar_derivative(sc.H, d.h);
  const auto dH2 = scalar_derivative(H2, d.h);

  std::size_t argmax_ho = 0;
  double x0_max = -inf, rho_max = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double H = sc.H[i];
    const double y = H * H;
    r.H_min = std::min(r.H_min, std::abs(H));
    r.H_max = std::max(r.H_max, std::abs(H));
    r.h_sq_max = std::max(r.h_sq_max, sc.h_sq[i]);
    if (sc.ho_sq[i] > r.ho_sq_max || i == 0) {
      r.ho_sq_max = sc.ho_sq[i];
      argmax_ho = i;
    }
    m.ho_ratio_max = std::max(m.ho_ratio_max, sc.ho_sq[i] / y);
    if (y > prof.regime_boundary()) {
      const double ar = prof.alpha_ring(y);
      r.pinch_margin_min = std::min(r.pinch_margin_min, ar - eps * prof.omega(y) - sc.ho_sq[i]);
      r.f_sigma_max = std::max(r.f_sigma_max, sc.ho_sq[i] * std::pow(ar, mc.sigma - 1.0));
    } else {
      r.pinch_margin_min = -inf;
      r.f_sigma_max = inf;
    }
    r.thm41_ratio_max = std::max(r.thm41_ratio_max, sc.ho_sq[i] / std::pow(y, 1.0 - mc.sigma));
    const double gradH = std::abs(dH[i]);
    r.grad_ratio_max = std::max(r.grad_ratio_max, gradH / (y + 1.0));
    m.thm51_excess_max = std::max(m.thm51_excess_max, gradH - mc.eta * mc.eta * y);

    const double scale = std::pow(std::max(1.0, sc.h_sq[i]), 2.0);
    const double grad_h = dkp[i] * dkp[i] + 3.0 * (n - 1) * dko[i] * dko[i];
    const double grad_H = (dkp[i] + (n - 1) * dko[i]) * (dkp[i] + (n - 1) * dko[i]);
    m.lemma21_i_min = std::min(m.lemma21_i_min, (grad_h - 3.0 / (n + 2) * grad_H) / scale);
    m.lemma21_ii_min = std::min(m.lemma21_ii_min, (2.0 * std::abs(H) * gradH - std::abs(dH2[i])) / scale);

    x0_max = std::max(x0_max, p.points[i][0]);
    rho_max = std::max(rho_max, p.points[i][2]);
  }
  double length = 0;
  for (double h : d.h) length += h;
  m.max_chord = *std::max_element(d.h.begin(), d.h.end());
  r.diam = std::max(length, std::numbers::pi * rho_max);
  r.x0_max = x0_max;
  const double x0_ref = x0_initial > 0.0 ? x0_initial : x0_max;
  r.x0_bound = x0_ref * std::exp(n * p.c * p.time);

  std::vector<double> diag(static_cast<std::size_t>(p.n), ko[argmax_ho]);
  diag.back() = kp[argmax_ho];
  m.ho_sq_argmax_reaction = reaction_terms(SecondFundamentalForm::diagonal(diag), p.c).r_ho;
  return m;
}

double profile_eps_star(const AxisymProfile& p) {
  const auto sc = node_scalars(p, node_curvatures(p));
  const PinchingProfile prof(p.n, p.c);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double y = sc.H[i] * sc.H[i];
    if (!(y > prof.regime_boundary())) return -std::numeric_limits<double>::infinity();
    best = std::min(best, (prof.alpha_ring(y) - sc.ho_sq[i]) / prof.omega(y));
  }
  return best;
}

namespace {

Vec polar_point(double k, double r, double theta) {
  return Vec(std::cosh(k * r) / k, std::sinh(k * r) / k * std::cos(theta), std::sinh(k * r) / k * std::sin(theta));
}

AxisymProfile finish_profile(int n, double c, std::vector<Vec> pts) {
  AxisymProfile p;
  p.n = n;
  p.c = c;
  pts.front()[2] = 0.0;
  pts.back()[2] = 0.0;
  for (auto& v : pts) p.points.push_back(project_to_hyperboloid(to_lv(v), c).vector());
  p.validate();
  return p;
}

AxisymProfile sphere_profile(int n, double c, int N, double r) {
  const double k = std::sqrt(-c);
  std::vector<Vec> pts;
  for (int i = 0; i < N; ++i) pts.push_back(polar_point(k, r, std::numbers::pi * i / (N - 1)));
  return finish_profile(n, c, std::move(pts));
}

AxisymProfile ellipsoid_profile(int n, double c, int N, double a, double b) {
  const double k = std::sqrt(-c);
  auto radius = [&](double th) {
    const double u = b * std::cos(th), v = a * std::sin(th);
    return a * b / std::sqrt(u * u + v * v);
  };
  // Arclength of the polar curve on a fine theta grid, then exact points at
  // theta(sigma) for uniformly spaced sigma.
  const int fine = 200 * N;
  std::vector<double> th(static_cast<std::size_t>(fine) + 1), sig(static_cast<std::size_t>(fine) + 1, 0.0);
  Vec prev = polar_point(k, radius(0.0), 0.0);
  for (int j = 0; j <= fine; ++j) {
    th[j] = std::numbers::pi * j / fine;
    const Vec cur = polar_point(k, radius(th[j]), th[j]);
    if (j > 0) {
      const Vec dd = cur - prev;
      sig[j] = sig[j - 1] + std::sqrt(mdot(dd, dd));
    }
    prev = cur;
  }
  std::vector<Vec> pts;
  std::size_t j = 0;
  for (int i = 0; i < N; ++i) {
    const double target = sig.back() * i / (N - 1);
    while (j + 1 < sig.size() - 1 && sig[j + 1] < target) ++j;
    const double w = (target - sig[j]) / (sig[j + 1] - sig[j]);
    const double t = i == N - 1 ? std::numbers::pi : th[j] + w * (th[j + 1] - th[j]);
    pts.push_back(polar_point(k, radius(t), t));
  }
  return finish_profile(n, c, std::move(pts));
}

// Tube of radius s about the geodesic gamma(tau) = (cosh k tau, sinh k tau, 0)/k,
// |tau| <= L, closed by half circles of geodesic radius s centred at gamma(+-L).
AxisymProfile capped_tube_profile(int n, double c, int N, double s, double L) {
  const double k = std::sqrt(-c);
  const double R = std::sinh(k * s) / k;  // intrinsic radius of the cap circle
  const double cap = 0.5 * std::numbers::pi * R;
  const double body = 2.0 * L * std::cosh(k * s);
  const double total = 2.0 * cap + body;
  auto gamma = [&](double tau) { return Vec(std::cosh(k * tau) / k, std::sinh(k * tau) / k, 0.0); };
  auto dgamma = [&](double tau) { return Vec(std::sinh(k * tau), std::cosh(k * tau), 0.0); };
  const Vec up(0, 0, 1);
  std::vector<Vec> pts;
  for (int i = 0; i < N; ++i) {
    const double sigma = total * i / (N - 1);
    if (sigma <= cap) {
      const double phi = sigma / R;  // angle from the left pole
      pts.push_back(std::cosh(k * s) * gamma(-L) + R * (-std::cos(phi) * dgamma(-L) + std::sin(phi) * up));
    } else if (sigma <= cap + body) {
      const double tau = -L + (sigma - cap) / std::cosh(k * s);
      pts.push_back(std::cosh(k * s) * gamma(tau) + R * up);
    } else {
      const double phi = std::numbers::pi / 2 + (sigma - cap - body) / R;
      pts.push_back(std::cosh(k * s) * gamma(L) + R * (-std::cos(phi) * dgamma(L) + std::sin(phi) * up));
    }
  }
  return finish_profile(n, c, std::move(pts));
}

}  // namespace

AxisymProfile make_initial_profile(const InitialShape& shape, int n, double c, int nodes, bool pinched) {
  if (n < 2) throw ConfigError("initial profile: n must be >= 2");
  if (!(c < 0.0)) throw ConfigError("initial profile: c must be negative");
  if (nodes < 9) throw ConfigError("initial profile: need at least 9 nodes");
  AxisymProfile p;
  switch (shape.kind) {
    case ShapeKind::sphere:
      if (!(shape.rho0 > 0.0)) throw ConfigError("sphere: rho0 must be positive");
      p = sphere_profile(n, c, nodes, shape.rho0);
      break;
    case ShapeKind::ellipsoid:
      if (!(shape.a > 0.0 && shape.b > 0.0)) throw ConfigError("ellipsoid: a and b must be positive");
      p = ellipsoid_profile(n, c, nodes, shape.a, shape.b);
      break;
    case ShapeKind::capped_tube:
      if (!(shape.s > 0.0 && shape.L > 0.0)) throw ConfigError("capped tube: s and L must be positive");
      p = capped_tube_profile(n, c, nodes, shape.s, shape.L);
      break;
  }
  if (pinched) {
    const double e = profile_eps_star(p);
    if (!(e > 0.0)) {
      const auto sc = node_scalars(p, node_curvatures(p));
      const PinchingProfile prof(n, c);
      std::size_t worst = 0;
      double worst_margin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double y = sc.H[i] * sc.H[i];
        const double m = y > prof.regime_boundary() ? prof.alpha_ring(y) - sc.ho_sq[i]
                                                    : -std::numeric_limits<double>::infinity();
        if (m < worst_margin) {
          worst_margin = m;
          worst = i;
        }
      }
      const auto rep = pinch_report(prof, second_fundamental_form_at(p, worst), 0.0);
      std::ostringstream os;
      os.precision(10);
      os << "initial profile is not pinched: node " << worst << " has |H|^2 = " << rep.H_sq
         << ", |ho|^2 = " << rep.ho_sq << ", alpha_ring = " << rep.alpha_ring << " (eps_star = " << e << ")";
      throw PreconditionError(os.str());
    }
  }
  return p;
}

AxisymRun run_axisym(const AxisymConfig& cfg) {
  cfg.monitor.validate(cfg.n);
  if (cfg.monitor_every < 1 || cfg.record_every < 1) throw ConfigError("run_axisym: cadences must be >= 1");
  if (cfg.max_steps < 1) throw ConfigError("run_axisym: max_steps must be >= 1");
  const double cfl = cfg.cfl == 0.0 ? 0.9 / (2.0 * cfg.n) : cfg.cfl;
  if (!(cfl > 0.0 && cfl <= 0.2)) throw ConfigError("run_axisym: cfl must lie in (0, 0.2]");
  const double k = std::sqrt(-cfg.c);
  const double H_stop = std::isnan(cfg.monitor.H_max_stop) ? 1e3 * k : cfg.monitor.H_max_stop;

  AxisymProfile prof = make_initial_profile(cfg.shape, cfg.n, cfg.c, cfg.nodes, cfg.require_pinched);
  AxisymRun run;
  auto& sum = run.summary;
  sum.eps_star0 = profile_eps_star(prof);
  sum.eps = std::isnan(cfg.monitor.eps) ? std::max(0.0, 0.9 * sum.eps_star0) : cfg.monitor.eps;

  MonitorValues m = monitor_row(prof, cfg.monitor, sum.eps, 0.0);
  const double x0_initial = m.row.x0_max;
  sum.H_max0 = m.row.H_max;
  sum.diam0 = m.row.diam;
  sum.margin0 = m.row.pinch_margin_min;
  sum.thm41_ratio0 = m.row.thm41_ratio_max;

  double prev_ho_max = m.row.ho_sq_max, prev_reaction = m.ho_sq_argmax_reaction, prev_t = 0.0;
  std::int64_t monitored = 0;
  // A remesh moves nodes without flowing them; the rate check skips that interval.
  bool remeshed = false;

  auto absorb = [&](const MonitorValues& mv, bool initial) {
    const auto& r = mv.row;
    if (r.H_max < 10.0 * sum.H_max0) {
      sum.margin_min_window = std::min(sum.margin_min_window, r.pinch_margin_min);
      sum.margin_positive_window = sum.margin_positive_window && r.pinch_margin_min > 0.0;
    }
    sum.margin_min = std::min(sum.margin_min, r.pinch_margin_min);
    sum.thm41_ratio_max = std::max(sum.thm41_ratio_max, r.thm41_ratio_max);
    sum.x0_rel_excess_max = std::max(sum.x0_rel_excess_max, (r.x0_max - r.x0_bound) / r.x0_bound);
    sum.lemma21_min = std::min({sum.lemma21_min, mv.lemma21_i_min, mv.lemma21_ii_min});
    if (!initial && !remeshed && r.t > prev_t) {
      const double rate = (r.ho_sq_max - prev_ho_max) / (r.t - prev_t);
      const double scale = std::pow(std::max(1.0, r.h_sq_max), 2.0);
      sum.lemma31_excess_max = std::max(sum.lemma31_excess_max, (rate - prev_reaction) / scale);
    }
    prev_ho_max = r.ho_sq_max;
    prev_reaction = mv.ho_sq_argmax_reaction;
    prev_t = r.t;
    for (const auto& pt : prof.points) {
      const auto& v = pt.coords();
      sum.constraint_residual_max = std::max(sum.constraint_residual_max, std::abs(cfg.c * mdot(v, v) - 1.0));
    }
    if (cfg.assert_pinched && !(r.pinch_margin_min > 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "pinching lost: pinch margin " << r.pinch_margin_min << " at t = " << r.t;
      throw InvariantViolation(os.str());
    }
    if (!sum.reached_small_diam && r.diam < cfg.monitor.diam_tol * sum.diam0) {
      sum.reached_small_diam = true;
      sum.t_small_diam = r.t;
      sum.H_ratio_small_diam = r.H_min / r.H_max;
      sum.ho_ratio_small_diam = mv.ho_ratio_max;
    }
  };
  absorb(m, true);
  run.trace.append(m.row);

  auto finish = [&](FlowStatus st, const MonitorValues& last) {
    const double H_mean = 0.5 * (last.row.H_min + last.row.H_max);
    double remaining = 0.0;
    if (H_mean > cfg.n * k) {
      const double r_eff = std::atanh(cfg.n * k / H_mean) / k;
      remaining = std::log(std::cosh(k * r_eff)) / (cfg.n * k * k);
    }
    sum.extinction_estimate = last.row.t + remaining;
    run.trace.finish(st, sum.extinction_estimate);
  };

  std::int64_t steps = 0;
  while (true) {
    const auto h = chords(prof);
    const double hmin = *std::min_element(h.begin(), h.end());
    const double dt = cfl * hmin * hmin;
    prof = explicit_update(prof, dt);
    if (spacing_ratio(prof) > 2.0) {
      prof = remesh(prof);
      ++sum.remeshes;
      remeshed = true;
    }
    ++steps;
    const bool last_allowed = steps >= cfg.max_steps;
    if (steps % cfg.monitor_every != 0 && !last_allowed) continue;
    m = monitor_row(prof, cfg.monitor, sum.eps, x0_initial);
    ++monitored;
    absorb(m, false);
    remeshed = false;
    const bool round = m.row.diam < cfg.monitor.diam_tol * sum.diam0 && m.row.H_min / m.row.H_max > cfg.monitor.ratio_tol &&
                       m.ho_ratio_max < cfg.monitor.ho_ratio_tol;
    const bool too_curved = m.row.H_max > H_stop;
    const bool stop = round || too_curved || last_allowed;
    if (stop || monitored % cfg.record_every == 0) run.trace.append(m.row);
    if (stop) {
      finish(round ? FlowStatus::round_point : FlowStatus::step_limit, m);
      break;
    }
  }
  sum.steps = steps;
  return run;
}

}  // namespace hypermcf
