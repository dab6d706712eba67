#include "hypermcf/pinching.hpp"

#include <cmath>
#include <limits>

#include "hypermcf/errors.hpp"

namespace hypermcf {

namespace {

double regime_H_sq(const PinchingProfile& p, const SecondFundamentalForm& h) {
  const double y = h.mean_norm_sq();
  if (!(y > p.regime_boundary())) throw DomainError("outside mean-curvature regime");
  return y;
}

}  // namespace

double pinch_margin(const PinchingProfile& p, const SecondFundamentalForm& h, double eps) {
  const double y = regime_H_sq(p, h);
  return p.alpha_ring(y) - eps * p.omega(y) - h.traceless_norm_sq();
}

double eps_star(const PinchingProfile& p, const SecondFundamentalForm& h) {
  const double y = regime_H_sq(p, h);
  const double slack = p.alpha_ring(y) - h.traceless_norm_sq();
  if (!(slack > 0.0)) throw PreconditionError("eps_star: point is not strictly pinched");
  return slack / p.omega(y);
}

double f_sigma(const PinchingProfile& p, const SigmaConfig& s, const SecondFundamentalForm& h) {
  const double y = regime_H_sq(p, h);
  return h.traceless_norm_sq() * std::pow(p.alpha_ring(y), s.sigma() - 1.0);
}

PinchReport pinch_report(const PinchingProfile& p, const SecondFundamentalForm& h, double eps) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  PinchReport r;
  r.h_sq = h.norm_sq();
  r.H_sq = h.mean_norm_sq();
  r.ho_sq = h.traceless_norm_sq();
  r.R1 = gradient_invariant_R1(h);
  r.R2 = gradient_invariant_R2(h);
  r.W = gradient_invariant_W(h, p.c());
  r.ricci_min = ricci_min(h, p.c());
  try {
    r.alpha = p.alpha(std::sqrt(r.H_sq));
  } catch (const DomainError&) {
    r.alpha = nan;
  }
  if (r.H_sq > 0.0) {
    const auto pq = pq_split(special_frame(h));
    r.P1 = pq.P1;
    r.P2 = pq.P2();
    r.Q1 = pq.Q1;
    r.Q2 = pq.Q2;
  } else {
    r.P1 = r.P2 = r.Q1 = r.Q2 = nan;
  }
  if (r.H_sq > p.regime_boundary()) {
    r.alpha_ring = p.alpha_ring(r.H_sq);
    r.omega = p.omega(r.H_sq);
    r.eps_margin = r.alpha_ring - eps * r.omega - r.ho_sq;
  } else {
    r.alpha_ring = r.omega = r.eps_margin = nan;
  }
  return r;
}

}  // namespace hypermcf
