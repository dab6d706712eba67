#pragma once
// Pinching margins of a pointwise tensor and the assembled PinchReport.

#include "hypermcf/curvature.hpp"
#include "hypermcf/profiles.hpp"

namespace hypermcf {

/// alpha_ring(|H|^2) - eps omega(|H|^2) - |ho|^2; positive means strictly pinched.
/// Throws DomainError when |H|^2 <= -n^2 c.
[[nodiscard]] double pinch_margin(const PinchingProfile& p, const SecondFundamentalForm& h, double eps);

/// (alpha_ring - |ho|^2) / omega, the largest admissible eps at this point.
/// Throws PreconditionError when the point is not strictly pinched for eps = 0.
[[nodiscard]] double eps_star(const PinchingProfile& p, const SecondFundamentalForm& h);

/// |ho|^2 alpha_ring^(sigma - 1).
[[nodiscard]] double f_sigma(const PinchingProfile& p, const SigmaConfig& s, const SecondFundamentalForm& h);

/// Every derived scalar at one point. Fields that need |H|^2 > -n^2 c (alpha_ring,
/// omega, eps_margin) or |H| > 0 (P and Q parts) are NaN when undefined.
struct PinchReport {
  double h_sq = 0;
  double H_sq = 0;
  double ho_sq = 0;
  double P1 = 0;
  double P2 = 0;
  double Q1 = 0;
  double Q2 = 0;
  double R1 = 0;
  double R2 = 0;
  double W = 0;
  double ricci_min = 0;
  double alpha = 0;
  double alpha_ring = 0;
  double omega = 0;
  double eps_margin = 0;
};

[[nodiscard]] PinchReport pinch_report(const PinchingProfile& p, const SecondFundamentalForm& h, double eps);

}  // namespace hypermcf
