#include "hypermcf/flow_equivariant.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hypermcf/errors.hpp"

namespace hypermcf {

namespace {

// x coth x and x tanh x, with the removable singularity of the first at 0.
double x_coth_x(double x) { return x < 1e-8 ? 1.0 + x * x / 3.0 : x / std::tanh(x); }
double x_tanh_x(double x) { return x * std::tanh(x); }

double sphere_rate(int n, double k, double v) { return -2.0 * n * x_coth_x(k * std::sqrt(v)); }

double tube_rate(int n, double k, double v) {
  const double x = k * std::sqrt(v);
  return -2.0 * ((n - 1) * x_coth_x(x) + x_tanh_x(x));
}

template <class Rate>
double rk4_in_square(double r, double dt, Rate rate) {
  if (!(dt > 0.0)) throw ConfigError("flow_step: dt must be positive");
  const double v = r * r;
  auto stage = [&](double w) {
    if (!(w >= 0.0)) throw PreconditionError("flow_step: step crosses r = 0");
    return rate(w);
  };
  const double k1 = stage(v);
  const double k2 = stage(v + 0.5 * dt * k1);
  const double k3 = stage(v + 0.5 * dt * k2);
  const double k4 = stage(v + dt * k3);
  const double vn = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!(vn > 0.0)) throw PreconditionError("flow_step: step crosses r = 0");
  return std::sqrt(vn);
}

void check_common(int n, int q, double c) {
  if (n < 2) throw ConfigError("equivariant flow: n must be >= 2");
  if (q < 1) throw ConfigError("equivariant flow: q must be >= 1");
  if (!(c < 0.0)) throw ConfigError("equivariant flow: c must be negative");
}

}  // namespace

SecondFundamentalForm sphere_second_fundamental_form(const GeodesicSphereState& st) {
  check_common(st.n, st.q, st.c);
  if (!(st.radius > 0.0)) throw ConfigError("sphere radius must be positive");
  const double k = std::sqrt(-st.c);
  return SecondFundamentalForm::diagonal(std::vector<double>(static_cast<std::size_t>(st.n), k / std::tanh(k * st.radius)),
                                         st.q);
}

SecondFundamentalForm tube_second_fundamental_form(const TubeState& st) {
  check_common(st.n, st.q, st.c);
  if (!(st.s > 0.0)) throw ConfigError("tube radius must be positive");
  const double k = std::sqrt(-st.c);
  std::vector<double> d(static_cast<std::size_t>(st.n), k / std::tanh(k * st.s));
  d.back() = k * std::tanh(k * st.s);
  return SecondFundamentalForm::diagonal(d, st.q);
}

PinchReport sphere_curvatures(const GeodesicSphereState& st, double eps) {
  return pinch_report(PinchingProfile(st.n, st.c), sphere_second_fundamental_form(st), eps);
}

PinchReport tube_curvatures(const TubeState& st, double eps) {
  return pinch_report(PinchingProfile(st.n, st.c), tube_second_fundamental_form(st), eps);
}

GeodesicSphereState flow_step(const GeodesicSphereState& st, double dt) {
  check_common(st.n, st.q, st.c);
  const double k = std::sqrt(-st.c);
  GeodesicSphereState out = st;
  out.radius = rk4_in_square(st.radius, dt, [&](double v) { return sphere_rate(st.n, k, v); });
  out.time = st.time + dt;
  return out;
}

TubeState flow_step(const TubeState& st, double dt) {
  check_common(st.n, st.q, st.c);
  const double k = std::sqrt(-st.c);
  TubeState out = st;
  out.s = rk4_in_square(st.s, dt, [&](double v) { return tube_rate(st.n, k, v); });
  out.time = st.time + dt;
  return out;
}

namespace {

struct Snapshot {
  TraceRow row;
  double boundary_residual = 0;
  double lambda_mu_residual = 0;
  double ho_ratio = 0;
  double delta = 0;
};

Snapshot observe(const EquivariantConfig& cfg, double r, double t, double x0_initial) {
  const double k = std::sqrt(-cfg.c);
  const PinchingProfile p(cfg.n, cfg.c);
  const SigmaConfig sigma(cfg.sigma);
  SecondFundamentalForm h = cfg.family == EquivariantFamily::sphere
                                ? sphere_second_fundamental_form({cfg.n, cfg.q, cfg.c, r, t})
                                : tube_second_fundamental_form({cfg.n, cfg.q, cfg.c, r, t});
  const double H2 = h.mean_norm_sq();
  const double h2 = h.norm_sq();
  const double ho2 = h.traceless_norm_sq();

  Snapshot s;
  TraceRow& row = s.row;
  row.t = t;
  row.H_min = row.H_max = std::sqrt(H2);
  row.h_sq_max = h2;
  row.ho_sq_max = ho2;
  row.pinch_margin_min = pinch_margin(p, h, cfg.eps);
  row.f_sigma_max = f_sigma(p, sigma, h);
  row.thm41_ratio_max = ho2 / std::pow(H2, 1.0 - cfg.sigma);
  row.grad_ratio_max = 0.0;
  if (cfg.family == EquivariantFamily::sphere) {
    row.diam = std::numbers::pi * std::sinh(k * r) / k;
    row.x0_max = std::cosh(k * r) / k;
  } else {
    const double L = cfg.window_half_length;
    const double axial = 2.0 * L * std::cosh(k * r);
    const double orbit = std::numbers::pi * std::sinh(k * r) / k;
    row.diam = std::hypot(axial, orbit);
    row.x0_max = std::cosh(k * r) * std::cosh(k * L) / k;
    const double lambda = h.block(0)(0, 0);
    const double mu = h.block(0)(cfg.n - 1, cfg.n - 1);
    s.lambda_mu_residual = std::abs(lambda * mu + cfg.c) / std::abs(cfg.c);
    s.boundary_residual = std::abs(h2 - p.alpha(std::sqrt(H2))) / h2;
  }
  const double x0_ref = x0_initial > 0.0 ? x0_initial : row.x0_max;
  row.x0_bound = x0_ref * std::exp(cfg.n * cfg.c * t);
  s.ho_ratio = ho2 / H2;
  s.delta = H2 + cfg.n * cfg.n * cfg.c;
  return s;
}

void violation(const std::string& what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t = " << t;
  throw InvariantViolation(os.str());
}

}  // namespace

EquivariantRun run_flow(const EquivariantConfig& cfg) {
  check_common(cfg.n, cfg.q, cfg.c);
  if (!(cfg.radius0 > 0.0)) throw ConfigError("run_flow: initial radius must be positive");
  if (cfg.record_every < 1) throw ConfigError("run_flow: record_every must be >= 1");
  if (cfg.max_steps < 1) throw ConfigError("run_flow: max_steps must be >= 1");
  const bool sphere = cfg.family == EquivariantFamily::sphere;
  const double k = std::sqrt(-cfg.c);
  auto rate = [&](double v) { return sphere ? sphere_rate(cfg.n, k, v) : tube_rate(cfg.n, k, v); };
  auto step = [&](double r, double dt) { return rk4_in_square(r, dt, rate); };

  EquivariantRun run;
  auto& sum = run.summary;

  Snapshot first = observe(cfg, cfg.radius0, 0.0, 0.0);
  const double x0_initial = first.row.x0_max;
  double dt = cfg.dt;
  if (dt == 0.0) dt = 1e-3 * cfg.radius0 / first.row.H_max;
  if (!(dt > 0.0)) throw ConfigError("run_flow: dt must be positive");

  sum.delta0 = first.delta;
  sum.delta_min = first.delta;

  auto check = [&](const Snapshot& s) {
    sum.boundary_residual_max = std::max(sum.boundary_residual_max, s.boundary_residual);
    sum.lambda_mu_residual_max = std::max(sum.lambda_mu_residual_max, s.lambda_mu_residual);
    sum.delta_min = std::min(sum.delta_min, s.delta);
    sum.ho_ratio_final = s.ho_ratio;
    if (!cfg.assert_invariants) return;
    if (sphere) {
      if (!(s.row.pinch_margin_min > 0.0)) violation("sphere lost strict pinching", s.row.t);
      if (s.row.x0_max > s.row.x0_bound * (1.0 + 1e-9)) violation("x0 exceeded x0(0) exp(nct)", s.row.t);
      if (s.delta < sum.delta0 * (1.0 - 1e-12)) violation("|H|^2 + n^2 c dropped below its initial value", s.row.t);
    } else {
      if (!(s.boundary_residual < 1e-9)) violation("tube left the pinching boundary", s.row.t);
      if (!(s.lambda_mu_residual < 1e-12)) violation("lambda mu != -c", s.row.t);
    }
  };
  check(first);
  run.trace.append(first.row);

  double r = cfg.radius0;
  double t = 0.0;
  const double r_stop = 1e-8 * cfg.radius0;
  std::int64_t steps = 0;
  bool recorded_last = true;
  while (true) {
    if (steps >= cfg.max_steps) {
      if (!recorded_last) {
        const auto s = observe(cfg, r, t, x0_initial);
        check(s);
        run.trace.append(s.row);
      }
      run.trace.finish(FlowStatus::step_limit, t);
      break;
    }
    double next;
    try {
      next = step(r, dt);
    } catch (const PreconditionError&) {
      dt *= 0.5;
      if (dt < std::numeric_limits<double>::min()) throw InvariantViolation("run_flow: step size underflow");
      continue;
    }
    r = next;
    t += dt;
    ++steps;
    recorded_last = false;
    const bool terminal = r < r_stop;
    if (terminal || steps % cfg.record_every == 0) {
      const auto s = observe(cfg, r, t, x0_initial);
      check(s);
      run.trace.append(s.row);
      recorded_last = true;
    }
    if (terminal) {
      // v = r^2 decreases at the nearly constant rate |dv/dt| over the last stretch.
      const double remaining = r * r / -rate(r * r);
      run.trace.finish(sphere ? FlowStatus::round_point : FlowStatus::collapse_to_geodesic, t + remaining);
      break;
    }
  }
  sum.steps = steps;
  return run;
}

}  // namespace hypermcf
