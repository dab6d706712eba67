#pragma once
// Mean curvature flow of geodesic spheres and of geodesic tubes about a line in
// H^{n+1}(c), reduced to one scalar ODE each.
//
// Both radii are integrated in v = r^2: with k = sqrt(-c),
//   sphere  dv/dt = -2n (kr coth kr)
//   tube    dv/dt = -2((n-1) ks coth ks + ks tanh ks)
// whose right-hand sides are smooth in v up to and including v = 0, so the
// approach to extinction is a linear zero crossing.

#include <cstdint>

#include "hypermcf/curvature.hpp"
#include "hypermcf/flow_trace.hpp"
#include "hypermcf/pinching.hpp"

namespace hypermcf {

struct GeodesicSphereState {
  int n = 6;
  int q = 1;  // the sphere sits in a totally geodesic H^{n+1} inside H^{n+q}
  double c = -1;
  double radius = 1;
  double time = 0;
};

struct TubeState {
  int n = 6;
  int q = 1;
  double c = -1;
  double s = 1;  // distance to the core geodesic
  double time = 0;
};

/// diag(k coth kr) in the first normal direction.
[[nodiscard]] SecondFundamentalForm sphere_second_fundamental_form(const GeodesicSphereState& st);
/// diag(lambda x (n-1), mu) with lambda = k coth ks, mu = k tanh ks.
[[nodiscard]] SecondFundamentalForm tube_second_fundamental_form(const TubeState& st);

[[nodiscard]] PinchReport sphere_curvatures(const GeodesicSphereState& st, double eps = 0.0);
[[nodiscard]] PinchReport tube_curvatures(const TubeState& st, double eps = 0.0);

/// One classical RK4 step of size dt in v = r^2. Throws ConfigError for dt <= 0 and
/// PreconditionError when the step would cross r = 0 (callers halve dt).
[[nodiscard]] GeodesicSphereState flow_step(const GeodesicSphereState& st, double dt);
[[nodiscard]] TubeState flow_step(const TubeState& st, double dt);

enum class EquivariantFamily { sphere, tube };

struct EquivariantConfig {
  EquivariantFamily family = EquivariantFamily::sphere;
  int n = 6;
  int q = 1;
  double c = -1;
  double radius0 = 1;              // rho_0 for spheres, s_0 for tubes
  double dt = 0;                   // 0 selects 1e-3 radius0 / |H(0)|
  double eps = 0;                  // pinch-margin weight
  double sigma = 0.1;
  double window_half_length = 1;   // axial half-length of the tube window
  std::int64_t max_steps = 50'000'000;
  int record_every = 1;
  bool assert_invariants = true;
};

/// Extra per-run diagnostics that are not CSV columns.
struct EquivariantSummary {
  double boundary_residual_max = 0;   // tube: max | |h|^2 - alpha | / |h|^2
  double lambda_mu_residual_max = 0;  // tube: max |lambda mu + c| / |c|
  double ho_ratio_final = 0;          // |ho|^2 / |H|^2 at the last recorded step
  double delta0 = 0;                  // |H(0)|^2 + n^2 c
  double delta_min = 0;               // min over the run of |H|^2 + n^2 c
  std::int64_t steps = 0;
};

struct EquivariantRun {
  FlowTrace trace;
  EquivariantSummary summary;
};

/// Integrates to extinction (radius < 1e-8 radius0). The remaining time below
/// that radius is added from the linear behaviour of v. With assert_invariants,
/// throws InvariantViolation when the sphere loses strict pinching or the x0
/// bound, or when the tube leaves the pinching boundary.
[[nodiscard]] EquivariantRun run_flow(const EquivariantConfig& cfg);

}  // namespace hypermcf
