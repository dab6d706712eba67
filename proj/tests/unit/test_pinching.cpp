#include <doctest.h>

#include <cmath>

#include "hypermcf/errors.hpp"
#include "hypermcf/pinching.hpp"

using namespace hypermcf;

TEST_CASE("pinch margin, eps_star and f_sigma on the tube and umbilic tensors") {
  const PinchingProfile p(6, -1.0);
  const auto tube = SecondFundamentalForm::diagonal({2, 2, 2, 2, 2, 0.5});
  CHECK(std::abs(pinch_margin(p, tube, 0.0)) < 1e-12);
  CHECK_THROWS_AS((void)eps_star(p, tube), PreconditionError);
  CHECK(f_sigma(p, SigmaConfig(0.1), tube) == doctest::Approx(std::pow(1.875, 0.1)).epsilon(1e-12));
  CHECK(f_sigma(p, SigmaConfig(0.1), tube) == doctest::Approx(1.0649).epsilon(1e-4));

  Eigen::VectorXd H(1);
  H << 10.5;
  const auto umb = SecondFundamentalForm::umbilic(6, H);
  CHECK(pinch_margin(p, umb, 0.01) == doctest::Approx(0.9725).epsilon(1e-12));
  CHECK(eps_star(p, umb) == doctest::Approx(1.875 / 90.25).epsilon(1e-12));
  CHECK(pinch_margin(p, umb, 0.0) > 0.0);
  CHECK(f_sigma(p, SigmaConfig(0.5), umb) < 1e-28);

  // eps_star decreases as the traceless part is scaled up.
  const auto mixed = SecondFundamentalForm::diagonal({1.9, 1.8, 1.75, 1.7, 1.7, 1.65});
  const double base = mixed.mean_norm_sq();
  double prev = 1e300;
  for (int k = 0; k <= 10; ++k) {
    const double t = 0.1 * k;
    std::vector<double> d;
    for (int i = 0; i < 6; ++i) {
      const double v = mixed.block(0)(i, i);
      d.push_back(1.75 + t * (v - 1.75));
    }
    const auto hk = SecondFundamentalForm::diagonal(d);
    CHECK(hk.mean_norm_sq() == doctest::Approx(base));
    const double e = eps_star(p, hk);
    CHECK(e < prev);
    prev = e;
  }

  const auto low = SecondFundamentalForm::diagonal({1, 1, 1, 1, 1, 1});
  CHECK_THROWS_WITH((void)pinch_margin(p, low, 0.0), doctest::Contains("outside mean-curvature regime"));
}

TEST_CASE("pinch report invariants") {
  const PinchingProfile p(8, -1.0);
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto h = random_pinched_sample(8, 2, -1.0, 0.0, rng);
    const auto r = pinch_report(p, h, 0.0);
    CHECK(std::abs(r.ho_sq - (r.h_sq - r.H_sq / 8)) < 1e-10 * r.h_sq);
    CHECK(std::abs(r.P1 + r.P2 - r.ho_sq) < 1e-10 * r.h_sq);
    CHECK(std::abs(r.Q1 + r.Q2 - r.P2) < 1e-12 * r.h_sq);
    CHECK(r.eps_margin > 0.0);
    CHECK(r.alpha == doctest::Approx(r.alpha_ring + r.H_sq / 8).epsilon(1e-12));
  }
  const auto rz = pinch_report(p, SecondFundamentalForm(8, 1), 0.0);
  CHECK(std::isnan(rz.alpha_ring));
  CHECK(std::isnan(rz.P1));
  CHECK(rz.ricci_min == -7.0);
}
