#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hypermcf/errors.hpp"
#include "hypermcf/flow_axisym.hpp"
#include "hypermcf/flow_equivariant.hpp"

using namespace hypermcf;

namespace {

AxisymProfile sphere(int n, double c, int nodes, double r = 1.0) {
  InitialShape sh;
  sh.kind = ShapeKind::sphere;
  sh.rho0 = r;
  return make_initial_profile(sh, n, c, nodes, false);
}

// Max node deviation of |Delta X + ncX| from the closed-form |H| = nk coth(kr),
// plus the check that the vector is normal to the hyperboloid-tangent profile.
double sphere_laplacian_error(int n, double c, int nodes, double r) {
  const auto p = sphere(n, c, nodes, r);
  const auto L = reduced_laplacian(p);
  const double k = std::sqrt(-c);
  const double H = n * k / std::tanh(k * r);
  double err = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const LorentzVector3 v = L[i] + n * c * LorentzVector3(p.points[i]);
    err = std::max(err, std::abs(std::sqrt(lorentz_dot(v, v)) - H));
  }
  return err;
}

double sphere_radius(const AxisymProfile& p) {
  // x0 at the equator node is cosh(kr)/k for a sphere centred at the origin.
  const double k = std::sqrt(-p.c);
  return std::acosh(k * p.points[p.size() / 2][0]) / k;
}

}  // namespace

TEST_CASE("reduced Laplacian reproduces the sphere mean curvature vector at second order") {
  for (int n : {2, 6}) {
    for (double c : {-1.0, -4.0}) {
      const double e1 = sphere_laplacian_error(n, c, 101, 0.7);
      const double e2 = sphere_laplacian_error(n, c, 201, 0.7);
      const double e3 = sphere_laplacian_error(n, c, 401, 0.7);
      CHECK(e1 < 1e-2);
      CHECK(e1 / e2 >= 3.5);
      CHECK(e2 / e3 >= 3.5);
    }
  }
}

TEST_CASE("node curvatures on a sphere match k coth(kr)") {
  const auto p = sphere(6, -1.0, 401);
  const double kc = 1.0 / std::tanh(1.0);
  for (const auto& k : node_curvatures(p)) {
    CHECK(k.kappa_profile == doctest::Approx(kc).epsilon(1e-4));
    CHECK(k.kappa_orbit == doctest::Approx(kc).epsilon(1e-4));
  }
  const auto h = second_fundamental_form_at(p, 37);
  CHECK(h.n() == 6);
  CHECK(h.q() == 1);
  CHECK(h.mean_curvature()[0] == doctest::Approx(6 * kc).epsilon(1e-4));
  CHECK_THROWS_AS((void)second_fundamental_form_at(p, p.size()), ConfigError);
}

TEST_CASE("capped tube middle section has the tube curvatures") {
  InitialShape sh;
  sh.kind = ShapeKind::capped_tube;
  const auto p = make_initial_profile(sh, 6, -1.0, 801, false);
  const auto k = node_curvatures(p);
  const auto mid = k[p.size() / 2];
  // Oracle: tube about a geodesic with s = atanh(1/2): coth s = 2, tanh s = 1/2.
  CHECK(mid.kappa_orbit == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(mid.kappa_profile == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(profile_eps_star(p) <= 0.0);
  CHECK_THROWS_AS((void)make_initial_profile(sh, 6, -1.0, 400, true), PreconditionError);
}

TEST_CASE("reflection x1 -> -x1 leaves principal curvatures unchanged") {
  InitialShape sh;
  sh.kind = ShapeKind::ellipsoid;
  const auto p = make_initial_profile(sh, 6, -1.0, 200, false);
  auto q = p;
  for (auto& pt : q.points) pt = LorentzVector3(Eigen::Vector3d(pt[0], -pt[1], pt[2]));
  const auto a = node_curvatures(p);
  const auto b = node_curvatures(q);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].kappa_profile == doctest::Approx(b[i].kappa_profile).epsilon(1e-12));
    CHECK(a[i].kappa_orbit == doctest::Approx(b[i].kappa_orbit).epsilon(1e-12));
  }
}

TEST_CASE("initial shapes satisfy the profile invariants") {
  for (auto kind : {ShapeKind::sphere, ShapeKind::ellipsoid, ShapeKind::capped_tube}) {
    InitialShape sh;
    sh.kind = kind;
    const auto p = make_initial_profile(sh, 6, -1.0, 300, false);
    CHECK_NOTHROW(p.validate());
    CHECK(spacing_ratio(p) < 1.01);
  }
  InitialShape bad;
  bad.rho0 = -1;
  CHECK_THROWS_AS((void)make_initial_profile(bad, 6, -1.0, 300, false), ConfigError);
}

TEST_CASE("sphere eps_star equals the umbilic closed form") {
  const auto p = sphere(6, -1.0, 400);
  const PinchingProfile prof(6, -1.0);
  const double y = 36.0 / std::pow(std::tanh(1.0), 2);
  CHECK(profile_eps_star(p) == doctest::Approx(prof.alpha_ring(y) / prof.omega(y)).epsilon(1e-4));
}

TEST_CASE("ellipsoid(1, 1.1) is strictly pinched for n = 6 and 8") {
  InitialShape sh;
  sh.kind = ShapeKind::ellipsoid;
  for (int n : {6, 8}) {
    const auto p = make_initial_profile(sh, n, -1.0, 400, true);
    CHECK(profile_eps_star(p) > 0.0);
  }
}

TEST_CASE("flow_step contract") {
  const auto p = sphere(6, -1.0, 101);
  const auto same = flow_step(p, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(same.points[i].coords() == p.points[i].coords());
  CHECK(same.time == 0.0);
  CHECK_THROWS_AS((void)flow_step(p, 1.01 * max_stable_dt(p)), ConfigError);
  CHECK_THROWS_AS((void)flow_step(p, -1e-9), ConfigError);

  const double dt = 0.5 * max_stable_dt(p);
  const auto q = flow_step(p, dt);
  CHECK(q.time == doctest::Approx(dt));
  CHECK(q.points.front()[2] == 0.0);
  CHECK(q.points.back()[2] == 0.0);
  for (const auto& pt : q.points) CHECK(std::abs(-lorentz_dot(pt, pt) - 1.0) < 1e-10);
  // One explicit step moves the radius like an Euler step of dr/dt = -n coth r,
  // up to O(dt^2) from the projection and O(dt ds^2) from the stencil.
  const double r_euler = 1.0 - dt * 6.0 / std::tanh(1.0);
  CHECK(std::abs(sphere_radius(q) - r_euler) < 1e-2 * dt);
}

TEST_CASE("remesh restores uniform spacing and keeps the curve") {
  auto p = sphere(6, -1.0, 101);
  // Crowd nodes toward one pole by resampling theta non-uniformly.
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double u = static_cast<double>(i) / (p.size() - 1);
    const double th = std::numbers::pi * u * u;
    p.points[i] = LorentzVector3(Eigen::Vector3d(std::cosh(1.0), std::sinh(1.0) * std::cos(th), std::sinh(1.0) * std::sin(th)));
  }
  CHECK(spacing_ratio(p) > 2.0);
  const auto q = remesh(p);
  CHECK(spacing_ratio(q) < 1.05);
  // Interpolation error of the crowded input dominates; the curve stays within it.
  for (const auto& pt : q.points) CHECK(pt[0] == doctest::Approx(std::cosh(1.0)).epsilon(1e-3));
}

TEST_CASE("monitor config ranges") {
  MonitorConfig mc;
  CHECK_NOTHROW(mc.validate(6));
  mc.eta = 1.0 / 6.0;
  CHECK_THROWS_AS(mc.validate(6), ConfigError);
  mc = MonitorConfig{};
  mc.sigma = 1.0;
  CHECK_THROWS_AS(mc.validate(6), ConfigError);
}

TEST_CASE("umbilic profile monitors") {
  const auto p = sphere(6, -1.0, 200);
  const auto m = monitor_row(p, MonitorConfig{}, 0.0, 0.0);
  CHECK(m.row.f_sigma_max < 1e-6);
  CHECK(m.lemma21_i_min > -1e-6);
  CHECK(m.row.H_min / m.row.H_max == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(m.row.x0_max == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
  CHECK(m.row.diam == doctest::Approx(std::numbers::pi * std::sinh(1.0)).epsilon(1e-4));
}

TEST_CASE("sphere run reaches a round point at the ODE extinction time") {
  AxisymConfig cfg;
  cfg.shape.kind = ShapeKind::sphere;
  cfg.n = 6;
  cfg.c = -1.0;
  cfg.nodes = 160;
  cfg.monitor_every = 10;
  cfg.record_every = 100;
  const auto run = run_axisym(cfg);
  const double T = std::log(std::cosh(1.0)) / 6.0;
  CHECK(run.trace.status() == FlowStatus::round_point);
  CHECK(run.summary.extinction_estimate == doctest::Approx(T).epsilon(2e-3));
  CHECK(run.summary.constraint_residual_max < 1e-10);
  CHECK(run.summary.x0_rel_excess_max < 1e-3);
  CHECK(run.summary.margin_positive_window);
}

TEST_CASE("run configuration errors") {
  AxisymConfig cfg;
  cfg.cfl = 0.3;
  CHECK_THROWS_AS((void)run_axisym(cfg), ConfigError);
  cfg = AxisymConfig{};
  cfg.shape.kind = ShapeKind::capped_tube;
  cfg.require_pinched = true;
  CHECK_THROWS_AS((void)run_axisym(cfg), PreconditionError);
}
