#pragma once
// Mean curvature flow of SO(n)-invariant hypersurfaces of H^{n+1}(c).
//
// The hypersurface is X(u, w) = (x0(u), x1(u), rho(u) w), w in S^{n-1}, and is
// represented by its profile curve P = (x0, x1, rho) on the hyperboloid
// H^2(c) in R^{1,2}, sampled pole to pole. The flow dX/dt = Delta X + ncX is
// stepped explicitly with
//   (Delta X)_{0,1} = X_ss + (n-1)(rho_s/rho) X_s
//   (Delta X)_rho   = rho_ss + (n-1)(x0_s^2 - x1_s^2)/rho
// (the last line is rho_ss + (n-1)(rho_s^2 - 1)/rho with the unit-speed
// identity substituted), and at a pole by n X_ss from an even fit.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hypermcf/curvature.hpp"
#include "hypermcf/flow_trace.hpp"
#include "hypermcf/minkowski.hpp"
#include "hypermcf/pinching.hpp"

namespace hypermcf {

struct AxisymProfile {
  int n = 6;
  double c = -1;
  std::vector<LorentzVector3> points;  // (x0, x1, rho), pole to pole
  double time = 0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  /// Checks the constraint (1e-10), pole placement and arclength ordering.
  /// Throws PreconditionError or RemeshError.
  void validate() const;
};

/// Cumulative chord arclength, starting at 0. Throws RemeshError on a
/// non-spacelike or zero-length chord.
[[nodiscard]] std::vector<double> arclength(const AxisymProfile& p);

[[nodiscard]] std::vector<LorentzVector3> reduced_laplacian(const AxisymProfile& p);

struct NodeCurvature {
  double kappa_profile = 0;
  double kappa_orbit = 0;
};

/// Principal curvatures along the profile and along the orbit spheres, with
/// the unit normal oriented towards the axis.
[[nodiscard]] std::vector<NodeCurvature> node_curvatures(const AxisymProfile& p);

/// diag(kappa_orbit x (n-1), kappa_profile) as a q = 1 tensor.
[[nodiscard]] SecondFundamentalForm second_fundamental_form_at(const AxisymProfile& p, std::size_t node);

/// 0.2 (min chord)^2, the largest dt flow_step accepts.
[[nodiscard]] double max_stable_dt(const AxisymProfile& p);

/// Max/min chord ratio.
[[nodiscard]] double spacing_ratio(const AxisymProfile& p);

/// Uniform-arclength resampling by quintic Hermite interpolation of the nodal
/// X, X_s, X_ss, followed by reprojection onto the hyperboloid. Node count is
/// preserved. Matching X_ss keeps curvature continuous across a remesh.
[[nodiscard]] AxisymProfile remesh(const AxisymProfile& p);

/// Explicit step X += dt (Delta X + ncX), reprojection, and a remesh when the
/// spacing ratio exceeds 2. dt = 0 returns the input. Throws ConfigError when
/// dt < 0 or dt > max_stable_dt, ChartError when a node leaves the hyperboloid.
[[nodiscard]] AxisymProfile flow_step(const AxisymProfile& p, double dt);

struct MonitorConfig {
  double sigma = 0.1;
  double eta = 0.1;          // in (0, 1/n)
  double diam_tol = 0.01;    // round point once diam < diam_tol diam(0) ...
  double ratio_tol = 0.95;   // ... with H_min/H_max > ratio_tol ...
  double ho_ratio_tol = 1e-3;  // ... and max |ho|^2/|H|^2 < ho_ratio_tol
  double H_max_stop = std::numeric_limits<double>::quiet_NaN();  // NaN selects 1e3 sqrt(-c)
  double eps = std::numeric_limits<double>::quiet_NaN();         // NaN selects 0.9 eps_star(M0)

  /// Throws ConfigError when a field is out of range for dimension n.
  void validate(int n) const;
};

/// Everything computed from one profile; `row` carries the CSV columns.
struct MonitorValues {
  TraceRow row;
  double ho_ratio_max = 0;        // max |ho|^2/|H|^2
  double lemma21_i_min = 0;       // min (|grad h|^2 - 3/(n+2)|grad H|^2) / scale
  double lemma21_ii_min = 0;      // min (2|H||grad H| - |grad |H|^2|) / scale
  double thm51_excess_max = 0;    // max |grad H| - eta^2 |H|^2
  double ho_sq_argmax_reaction = 0;  // r_ho at the node maximising |ho|^2
  double max_chord = 0;
};

/// x0_initial <= 0 uses the profile's own x0 maximum as the reference of x0_bound.
[[nodiscard]] MonitorValues monitor_row(const AxisymProfile& p, const MonitorConfig& mc, double eps,
                                        double x0_initial);

/// min over nodes of (alpha_ring - |ho|^2)/omega; -inf when a node has |H|^2 <= -n^2 c.
[[nodiscard]] double profile_eps_star(const AxisymProfile& p);

enum class ShapeKind { sphere, ellipsoid, capped_tube };

struct InitialShape {
  ShapeKind kind = ShapeKind::sphere;
  double rho0 = 1;  // sphere: geodesic radius
  double a = 1;     // ellipsoid: geodesic polar radius at the poles
  double b = 1.1;   //            and at the equator
  double s = 0.5493061443340549;  // capped tube: tube radius (atanh 1/2)
  double L = 3;                   //              axial half-length of the cylindrical part
};

/// Uniform-arclength profile with `nodes` nodes. With `pinched`, throws
/// PreconditionError (naming the worst node's pinch report) unless eps_star > 0.
[[nodiscard]] AxisymProfile make_initial_profile(const InitialShape& shape, int n, double c, int nodes, bool pinched);

struct AxisymConfig {
  InitialShape shape;
  int n = 6;
  double c = -1;
  int nodes = 400;
  double cfl = 0;  // dt = cfl (min chord)^2; 0 selects 0.9/(2n)
  MonitorConfig monitor;
  std::int64_t max_steps = 5'000'000;
  int monitor_every = 1;
  int record_every = 1;  // record every k-th monitored step
  bool require_pinched = false;  // initial eps_star must be positive
  bool assert_pinched = false;   // pinch margin must stay positive
};

struct AxisymSummary {
  double eps = 0;                      // eps used by the pinch monitor
  double eps_star0 = 0;
  double H_max0 = 0;
  double diam0 = 0;
  double margin0 = 0;
  double margin_min_window = std::numeric_limits<double>::infinity();  // while H_max < 10 H_max0
  bool margin_positive_window = true;
  double margin_min = std::numeric_limits<double>::infinity();
  double thm41_ratio0 = 0;
  double thm41_ratio_max = 0;
  double x0_rel_excess_max = -std::numeric_limits<double>::infinity();  // max (x0 - bound)/bound
  double lemma21_min = std::numeric_limits<double>::infinity();
  double lemma31_excess_max = -std::numeric_limits<double>::infinity();
  double constraint_residual_max = 0;
  bool reached_small_diam = false;     // diam < diam_tol diam0 at some monitored step
  double t_small_diam = 0;
  double H_ratio_small_diam = 0;
  double ho_ratio_small_diam = 0;
  double extinction_estimate = 0;      // t_end + remaining time of the round sphere with the same mean |H|
  std::int64_t steps = 0;
  std::int64_t remeshes = 0;
};

struct AxisymRun {
  FlowTrace trace;
  AxisymSummary summary;
};

[[nodiscard]] AxisymRun run_axisym(const AxisymConfig& cfg);

}  // namespace hypermcf
