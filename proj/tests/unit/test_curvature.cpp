#include <doctest.h>

#include <cmath>
#include <vector>

#include "hypermcf/curvature.hpp"
#include "hypermcf/errors.hpp"
#include "hypermcf/pinching.hpp"
#include "hypermcf/profiles.hpp"

using namespace hypermcf;

namespace {

SecondFundamentalForm tube_tensor() { return SecondFundamentalForm::diagonal({2, 2, 2, 2, 2, 0.5}); }

// Index-loop evaluation of R1, R2 and the cubic W term straight from their sums.
struct Brute {
  double R1 = 0, R2 = 0, W = 0;
};

Brute brute_force(const SecondFundamentalForm& h, double c) {
  const int n = h.n(), q = h.q();
  std::vector<double> H(static_cast<std::size_t>(q), 0.0);
  for (int a = 0; a < q; ++a)
    for (int i = 0; i < n; ++i) H[a] += h.block(a)(i, i);
  Brute b;
  for (int a = 0; a < q; ++a) {
    for (int be = 0; be < q; ++be) {
      double s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += h.block(a)(i, j) * h.block(be)(i, j);
      b.R1 += s * s;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double t = 0;
          for (int k = 0; k < n; ++k) t += h.block(a)(i, k) * h.block(be)(j, k) - h.block(be)(i, k) * h.block(a)(j, k);
          b.R1 += t * t;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double t = 0;
      for (int a = 0; a < q; ++a) t += H[a] * h.block(a)(i, j);
      b.R2 += t * t;
    }
  }
  double ho2 = 0, cubic = 0;
  for (int a = 0; a < q; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double e = h.block(a)(i, j) - (i == j ? H[a] / n : 0.0);
        ho2 += e * e;
      }
  for (int a = 0; a < q; ++a)
    for (int be = 0; be < q; ++be)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) cubic += H[a] * h.block(a)(i, k) * h.block(be)(i, j) * h.block(be)(j, k);
  b.W = n * c * ho2 - b.R1 + cubic;
  return b;
}

}  // namespace

TEST_CASE("construction symmetrises and validates") {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 0, 3;
  const SecondFundamentalForm h({m});
  CHECK(h.block(0)(0, 1) == 1.0);
  CHECK(h.block(0)(1, 0) == 1.0);
  CHECK_THROWS_AS(SecondFundamentalForm(1, 1), ConfigError);
  CHECK_THROWS_AS(SecondFundamentalForm(3, 0), ConfigError);
  CHECK_THROWS_AS(SecondFundamentalForm(std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(2, 2)}),
                  ConfigError);
}

TEST_CASE("tube tensor scalars") {
  const auto h = tube_tensor();
  CHECK(h.norm_sq() == doctest::Approx(20.25));
  CHECK(h.mean_norm_sq() == doctest::Approx(110.25));
  CHECK(h.traceless_norm_sq() == doctest::Approx(1.875));
  CHECK(gradient_invariant_R1(h) == doctest::Approx(410.0625).epsilon(1e-14));
  CHECK(gradient_invariant_R2(h) == doctest::Approx(2232.5625).epsilon(1e-14));
  CHECK(std::abs(gradient_invariant_W(h, -1.0)) < 1e-12);

  const auto d = special_frame(h);
  CHECK(d.mean_norm == doctest::Approx(10.5));
  for (int i = 0; i < 5; ++i) CHECK(d.lambda_ring[i] == doctest::Approx(0.25));
  CHECK(d.lambda_ring[5] == doctest::Approx(-1.25));
  const auto pq = pq_split(d);
  CHECK(pq.P1 == doctest::Approx(1.875));
  CHECK(pq.Q1 == 0.0);
  CHECK(pq.Q2 == 0.0);

  const auto ric = ricci_exact(h, -1.0);
  for (int i = 0; i < 5; ++i) CHECK(ric[i] == doctest::Approx(12.0));
  CHECK(std::abs(ric[5]) < 1e-12);

  const auto r = reaction_terms(h, -1.0);
  CHECK(r.r_h == doctest::Approx(622.125).epsilon(1e-14));
  CHECK(r.r_H == doctest::Approx(3142.125).epsilon(1e-14));
  CHECK(r.r_ho == doctest::Approx(98.4375).epsilon(1e-13));

  CHECK(std::abs(W_lower_bound_check(h, -1.0, 0.0)) < 1e-12);
  const auto rb = ricci_bound_check(h, -1.0, 0.0);
  CHECK(std::abs(rb.final_margin) < 1e-12);
  CHECK(std::abs(rb.bound_margin) < 1e-12);
}

TEST_CASE("umbilic and zero tensors") {
  Eigen::VectorXd H(3);
  H << 3.0, -1.0, 2.0;
  const int n = 6;
  const auto h = SecondFundamentalForm::umbilic(n, H);
  const double y = H.squaredNorm();
  CHECK(h.traceless_norm_sq() < 1e-28);
  CHECK(gradient_invariant_R1(h) == doctest::Approx(y * y / (n * n)).epsilon(1e-13));
  CHECK(gradient_invariant_R2(h) == doctest::Approx(y * y / n).epsilon(1e-13));
  CHECK(std::abs(gradient_invariant_W(h, -1.0)) < 1e-12);
  const auto d = special_frame(h);
  CHECK(d.lambda_ring.norm() < 1e-13);
  for (const auto& b : d.offdiag_blocks) CHECK(b.norm() < 1e-13);
  const auto ric = ricci_exact(h, -1.0);
  for (int i = 0; i < n; ++i) CHECK(ric[i] == doctest::Approx((n - 1) * (-1.0 + y / (n * n))).epsilon(1e-13));
  CHECK(inequality_suite_section2(h).r1_minus_r2 == doctest::Approx(0.0).scale(1e3));

  const SecondFundamentalForm zero(5, 2);
  CHECK_THROWS_AS((void)special_frame(zero), DegenerateFrameError);
  const auto rz = ricci_exact(zero, -1.0);
  for (int i = 0; i < 5; ++i) CHECK(rz[i] == -4.0);
  const auto rt = reaction_terms(zero, -1.0);
  CHECK(rt.r_h == 0.0);
  CHECK(rt.r_H == 0.0);
  CHECK(rt.r_ho == 0.0);
}

TEST_CASE("pq_split counts off-diagonal entries") {
  std::vector<Eigen::MatrixXd> blocks(2, Eigen::MatrixXd::Zero(4, 4));
  blocks[0].diagonal() << 3, 1, 1, 1;
  blocks[1](0, 1) = blocks[1](1, 0) = 1.0;
  // H is along nu_1 already and h^1 is diagonal, so the second block is kept up to a tangent rotation
  // inside the degenerate eigenspace of h^1; the Q split is invariant under it only when the
  // eigenvalues are distinct on the support, so use distinct entries.
  blocks[0].diagonal() << 3, 2, 1, 0.5;
  const auto pq = pq_split(special_frame(SecondFundamentalForm(blocks)));
  CHECK(pq.Q2 == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(std::abs(pq.Q1) < 1e-26);
}

TEST_CASE("random tensors: brute-force sums, identities and frame invariance") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 7;
    const int q = 1 + trial % 3;
    const auto h = random_tensor(n, q, rng);
    const double scale = tolerance_scale(h, 4);
    const auto b = brute_force(h, -1.0);
    CHECK(std::abs(gradient_invariant_R1(h) - b.R1) < 1e-12 * scale);
    CHECK(std::abs(gradient_invariant_R2(h) - b.R2) < 1e-12 * scale);
    CHECK(std::abs(gradient_invariant_W(h, -1.0) - b.W) < 1e-12 * scale);

    const auto d = special_frame(h);
    const double ho2 = h.traceless_norm_sq();
    CHECK(std::abs(d.lambda_ring.sum()) < 1e-10 * std::sqrt(ho2));
    const auto pq = pq_split(d);
    CHECK(std::abs(pq.P1 + pq.P2() - ho2) < 1e-10 * ho2);
    CHECK(std::abs(ho2 - (h.norm_sq() - h.mean_norm_sq() / n)) < 1e-10 * std::max(1.0, h.norm_sq()));
    for (int i = 1; i < n; ++i) CHECK(d.lambda_ring[i - 1] >= d.lambda_ring[i]);

    const auto m = inequality_suite_section2(h);
    CHECK(std::abs(m.r2_identity_residual) < 1e-10 * m.scale);
    CHECK(std::abs(m.r2_frame_residual) < 1e-10 * m.scale);
    CHECK(m.cauchy_schwarz_p1q1 >= -1e-9 * m.scale);
    CHECK(m.offdiag_2p1q2 >= -1e-9 * m.scale);
    CHECK(m.normal_block_p2 >= -1e-9 * m.scale);
    CHECK(m.r1_minus_r2 >= -1e-9 * m.scale);

    const auto r = reaction_terms(h, -0.7);
    CHECK(std::abs(r.r_ho - (r.r_h - r.r_H / n)) < 1e-10 * scale);

    const auto g = h.rotated(random_orthogonal(n, rng), random_orthogonal(q, rng));
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
    CHECK(rel(h.norm_sq(), g.norm_sq()) < 1e-10);
    CHECK(rel(h.mean_norm_sq(), g.mean_norm_sq()) < 1e-10);
    CHECK(rel(h.traceless_norm_sq(), g.traceless_norm_sq()) < 1e-10);
    CHECK(rel(gradient_invariant_R1(h), gradient_invariant_R1(g)) < 1e-10);
    CHECK(rel(gradient_invariant_R2(h), gradient_invariant_R2(g)) < 1e-10);
    CHECK(std::abs(gradient_invariant_W(h, -1.0) - gradient_invariant_W(g, -1.0)) < 1e-10 * scale);
  }
}

TEST_CASE("q = 1 tensors have vanishing normal-block margins") {
  Rng rng(9);
  const auto h = random_tensor(6, 1, rng);
  const auto m = inequality_suite_section2(h);
  CHECK(m.cauchy_schwarz_p1q1 == 0.0);
  CHECK(m.offdiag_2p1q2 == 0.0);
  CHECK(m.normal_block_p2 == 0.0);
  CHECK(std::abs(m.r2_identity_residual) < 1e-10 * m.scale);
}

TEST_CASE("cubic bound") {
  for (int n = 3; n <= 10; ++n) {
    std::vector<double> a(static_cast<std::size_t>(n), 1.0);
    a.back() = -(n - 1.0);
    const auto r = cubic_bound(a, a);
    CHECK(std::abs(r.margin) < 1e-10 * r.scale);
    CHECK(r.equality);

    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    std::vector<double> t(static_cast<std::size_t>(n), 0.0);
    t[0] = 1.0;
    t[1] = -3.0;
    t[2] = 2.0;
    const auto r0 = cubic_bound(t, z);
    CHECK(r0.margin == 0.0);
    CHECK(r0.equality);
  }

  Rng rng(77);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20000; ++trial) {
    const int n = 3 + trial % 8;
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    double sa = 0, sb = 0;
    for (int i = 0; i < n; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < n; ++i) {
      a[i] -= sa / n;
      b[i] -= sb / n;
    }
    const auto r = cubic_bound(a, b);
    CHECK(r.margin >= -1e-10 * r.scale);
  }

  const std::vector<double> bad{1.0, 1.0, 1.0};
  CHECK_THROWS_AS((void)cubic_bound(bad, bad), PreconditionError);
  const std::vector<double> two{1.0, -1.0};
  CHECK_THROWS_AS((void)cubic_bound(two, bad), PreconditionError);
}

TEST_CASE("pinched sampler") {
  const auto h1 = random_pinched_sampler(6, 3, -1.0, 0.005, 123);
  const auto h2 = random_pinched_sampler(6, 3, -1.0, 0.005, 123);
  for (int a = 0; a < 3; ++a) CHECK((h1.block(a) - h2.block(a)).norm() == 0.0);

  CHECK_THROWS_AS((void)random_pinched_sampler(6, 1, -1.0, 0.05, 1), SamplerError);
  CHECK_THROWS_AS((void)random_pinched_sampler(5, 1, -1.0, 0.0, 1), ConfigError);

  for (int n : {6, 8}) {
    for (int q : {1, 3}) {
      const PinchingProfile p(n, -1.0);
      Rng rng(shard_seed(99, static_cast<std::uint64_t>(n * 10 + q)));
      for (int k = 0; k < 300; ++k) {
        const double eps = 0.005;
        const auto h = random_pinched_sample(n, q, -1.0, eps, rng);
        CHECK(pinch_margin(p, h, eps) > 0.0);
        const double scale = tolerance_scale(h, 4);
        CHECK(W_lower_bound_check(h, -1.0, eps) >= -1e-9 * scale);
        const auto rb = ricci_bound_check(h, -1.0, eps);
        CHECK(rb.bound_margin >= -1e-9 * scale);
        CHECK(rb.final_margin >= -1e-9 * scale);
        CHECK(ricci_min(h, -1.0) > 0.0);
      }
    }
  }
}

TEST_CASE("pinched-regime preconditions") {
  // |ho|^2 too large for its |H|^2.
  const auto h = SecondFundamentalForm::diagonal({5, 5, 5, 5, 5, -10});
  CHECK_THROWS_AS((void)W_lower_bound_check(h, -1.0, 0.0), PreconditionError);
  CHECK_THROWS_WITH((void)ricci_bound_check(h, -1.0, 0.0), doctest::Contains("not in pinched regime"));
}
