#include <doctest.h>

#include <cmath>
#include <random>

#include "hypermcf/minkowski.hpp"

using namespace hypermcf;

namespace {

LorentzVector random_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g;
  auto v = LorentzVector::zero(m);
  for (int k = 0; k <= m; ++k) v[k] = g(rng);
  return v;
}

// Random point of H^m(c): boost of the origin along a random spatial direction.
HyperboloidPoint random_point(std::mt19937_64& rng, int m, double c) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> r(0.0, 2.0);
  Eigen::VectorXd dir(m);
  for (int k = 0; k < m; ++k) dir[k] = g(rng);
  dir.normalize();
  const double k = std::sqrt(-c);
  const double d = r(rng) / k;
  auto v = LorentzVector::zero(m);
  v[0] = std::cosh(k * d) / k;
  for (int i = 0; i < m; ++i) v[i + 1] = std::sinh(k * d) / k * dir[i];
  return project_to_hyperboloid(v, c);
}

void too_short() {
  const LorentzVector v{1.0, 2.0};
  (void)v;
}

}  // namespace

TEST_CASE("lorentz_dot values") {
  CHECK(lorentz_dot(LorentzVector{1, 0, 0}, LorentzVector{1, 0, 0}) == -1.0);
  CHECK(lorentz_dot(LorentzVector{2, 1, 0}, LorentzVector{3, 2, 0}) == -4.0);
  const auto o = LorentzVector::origin(4, -1.0);
  CHECK(lorentz_dot(o, o) == -1.0);
  CHECK_THROWS_AS((void)lorentz_dot(LorentzVector{1, 0, 0}, LorentzVector{1, 0, 0, 0}), ConfigError);
  CHECK_THROWS_AS(too_short(), ConfigError);
}

TEST_CASE("lorentz_dot is bilinear and symmetric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_vector(rng, 5), y = random_vector(rng, 5), z = random_vector(rng, 5);
    const double a = u(rng), b = u(rng);
    CHECK(lorentz_dot(x, y) == doctest::Approx(lorentz_dot(y, x)).epsilon(1e-15));
    const double lhs = lorentz_dot(a * x + b * y, z);
    const double rhs = a * lorentz_dot(x, z) + b * lorentz_dot(y, z);
    CHECK(std::abs(lhs - rhs) < 1e-13 * (1 + std::abs(lhs)));
  }
}

TEST_CASE("project_to_hyperboloid") {
  const auto p = project_to_hyperboloid(LorentzVector{2, 0, 0, 0}, -1.0);
  CHECK(p.vector()[0] == 1.0);
  CHECK(p.vector()[1] == 0.0);

  const auto q = project_to_hyperboloid(LorentzVector{std::cosh(1.0) + 1e-3, std::sinh(1.0), 0}, -1.0);
  CHECK(q.constraint_residual() < 1e-15);

  // Idempotent on points already on the hyperboloid.
  const auto r = project_to_hyperboloid(q.vector(), -1.0);
  CHECK((r.vector().coords() - q.vector().coords()).norm() == 0.0);

  CHECK_THROWS_AS((void)project_to_hyperboloid(LorentzVector{0, 1, 0}, -1.0), ChartError);
  CHECK_THROWS_AS((void)project_to_hyperboloid(LorentzVector{1, 1, 0}, -1.0), ChartError);
  CHECK_THROWS_AS((void)project_to_hyperboloid(LorentzVector{-2, 0, 0}, -1.0), ChartError);
  CHECK_THROWS_WITH((void)project_to_hyperboloid(LorentzVector{0, 1, 0}, -1.0),
                    doctest::Contains("left hyperboloid chart"));
}

TEST_CASE("HyperboloidPoint validates its constraint") {
  CHECK_NOTHROW(HyperboloidPoint(LorentzVector{1, 0, 0}, -1.0));
  CHECK_THROWS_AS(HyperboloidPoint(LorentzVector{1.1, 0, 0}, -1.0), PreconditionError);
  CHECK_THROWS_AS(HyperboloidPoint(LorentzVector{-1, 0, 0}, -1.0), PreconditionError);
  CHECK_THROWS_AS(HyperboloidPoint(LorentzVector{1, 0, 0}, 1.0), ConfigError);
}

TEST_CASE("project_tangent") {
  const HyperboloidPoint x(LorentzVector{1, 0, 0}, -1.0);
  const auto z = project_tangent(x, x.vector());
  CHECK(z.coords().norm() < 1e-15);

  const auto v = project_tangent(x, LorentzVector{1, 1, 0});
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == 1.0);
  CHECK(v[2] == 0.0);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double c = trial % 2 ? -1.0 : -4.0;
    const auto p = random_point(rng, 4, c);
    const auto w = random_vector(rng, 4);
    const auto t1 = project_tangent(p, w);
    const auto t2 = project_tangent(p, t1);
    const double scale = 1 + w.coords().norm() * p.vector().coords().squaredNorm();
    CHECK(std::abs(lorentz_dot(t1, p.vector())) < 1e-12 * scale);
    CHECK((t2 - t1).coords().norm() < 1e-12 * scale);
  }
}

TEST_CASE("geodesic_distance") {
  const HyperboloidPoint x(LorentzVector{1, 0, 0}, -1.0);
  const auto y = project_to_hyperboloid(LorentzVector{std::cosh(1.0), std::sinh(1.0), 0}, -1.0);
  CHECK(geodesic_distance(x, x) == 0.0);
  CHECK(geodesic_distance(x, y) == doctest::Approx(1.0).epsilon(1e-12));

  // Same pair on the c = -4 hyperboloid: coordinates halve, distance halves.
  const auto x4 = project_to_hyperboloid(LorentzVector{0.5, 0, 0}, -4.0);
  const auto y4 = project_to_hyperboloid(LorentzVector{0.5 * std::cosh(1.0), 0.5 * std::sinh(1.0), 0}, -4.0);
  CHECK(geodesic_distance(x4, y4) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS((void)geodesic_distance(x, x4), ConfigError);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_point(rng, 3, -1.0), b = random_point(rng, 3, -1.0), c = random_point(rng, 3, -1.0);
    CHECK(geodesic_distance(a, b) == doctest::Approx(geodesic_distance(b, a)).epsilon(1e-12));
    CHECK(geodesic_distance(a, b) + geodesic_distance(b, c) - geodesic_distance(a, c) >= -1e-10);
  }
}

TEST_CASE("lorentz_cross is orthogonal to its arguments") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const LorentzVector3 a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)};
    const auto n = lorentz_cross(a, b);
    CHECK(std::abs(lorentz_dot(n, a)) < 1e-13);
    CHECK(std::abs(lorentz_dot(n, b)) < 1e-13);
  }
}
