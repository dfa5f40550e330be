#include "chapball/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace chapball {

Multiplier Multiplier::unit() { return constant(1.0); }

Multiplier Multiplier::constant(double c) {
  Multiplier m(Kind::constant);
  m.coef_ = c;
  if (c == 0.0) throw std::invalid_argument("Multiplier: zero constant");
  return m;
}

Multiplier Multiplier::gamma_power(const BallConfig& cfg, double coef,
                                   double power) {
  Multiplier m(Kind::gamma_power);
  m.cfg_ = cfg;
  m.coef_ = coef;
  m.power_ = power;
  return m;
}

Multiplier Multiplier::x_power(const BallConfig& cfg, double coef,
                               double power) {
  Multiplier m(Kind::x_power);
  m.cfg_ = cfg;
  m.coef_ = coef;
  m.power_ = power;
  return m;
}

Multiplier Multiplier::geodesic_time(const BallConfig& cfg) {
  const double e = cfg.epsilon();
  return gamma_power(cfg, e, 0.5 / e - 1.0);
}

Multiplier Multiplier::natural_time(const BallConfig& cfg) {
  const double e = cfg.epsilon();
  return x_power(cfg, e, 1.0 + 0.5 / e);
}

Multiplier Multiplier::maupertuis_inverse(const BallConfig& cfg) {
  return x_power(cfg, 1.0, 1.0 / cfg.epsilon());
}

Multiplier Multiplier::field_nu(const FlatFieldConfig& fields) {
  Multiplier m(Kind::field_nu);
  m.fields_ = fields;
  return m;
}

Multiplier Multiplier::jacobi(const FlatFieldConfig& fields, double h) {
  Multiplier m(Kind::jacobi);
  m.fields_ = fields;
  m.h_ = h;
  return m;
}

double Multiplier::value(const Vec& q) const {
  switch (kind_) {
    case Kind::constant:
      return coef_;
    case Kind::gamma_power:
      return coef_ * std::pow(cfg_->a_form(q, q), power_);
    case Kind::x_power:
      return coef_ * std::pow(cfg_->a_inv_form(q, q), power_);
    case Kind::field_nu:
      return fields_->nu(q);
    case Kind::jacobi:
      return h_ - fields_->potential(q);
  }
  throw std::logic_error("Multiplier: unknown kind");
}

Vec Multiplier::grad(const Vec& q) const {
  switch (kind_) {
    case Kind::constant:
      return Vec::Zero(q.size());
    case Kind::gamma_power: {
      const double r = cfg_->a_form(q, q);
      return (2.0 * coef_ * power_ * std::pow(r, power_ - 1.0)) *
             cfg_->apply_a(q);
    }
    case Kind::x_power: {
      const double r = cfg_->a_inv_form(q, q);
      return (2.0 * coef_ * power_ * std::pow(r, power_ - 1.0)) *
             cfg_->apply_a_inv(q);
    }
    case Kind::field_nu:
      return fields_->grad_nu(q);
    case Kind::jacobi:
      return -fields_->grad_potential(q);
  }
  throw std::logic_error("Multiplier: unknown kind");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kHardConstraintLimit = 1e-6;

struct PhasePoint {
  Vec q, v;
};

struct StageDerivs {
  Vec dq, dv;  // dq = v, dv = accel
};

StageDerivs eval(const Flow& flow, const PhasePoint& y) {
  return {y.v, flow.acceleration(y.q, y.v)};
}

PhasePoint axpy(const PhasePoint& y, double h,
                std::initializer_list<std::pair<double, const StageDerivs*>> terms) {
  PhasePoint out{y.q, y.v};
  for (const auto& [w, k] : terms) {
    out.q += (h * w) * k->dq;
    out.v += (h * w) * k->dv;
  }
  return out;
}

double error_norm(const PhasePoint& y0, const PhasePoint& y1, const Vec& eq,
                  const Vec& ev, double rel, double abs) {
  double acc = 0.0;
  const auto n = y0.q.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sq = abs + rel * std::max(std::abs(y0.q[i]), std::abs(y1.q[i]));
    const double sv = abs + rel * std::max(std::abs(y0.v[i]), std::abs(y1.v[i]));
    acc += (eq[i] / sq) * (eq[i] / sq) + (ev[i] / sv) * (ev[i] / sv);
  }
  return std::sqrt(acc / (2.0 * n));
}

// Hairer's initial step-size heuristic, adapted to the second-order system.
double initial_step(const Flow& flow, const PhasePoint& y0,
                    const StageDerivs& f0, double dir, double h_max,
                    double rel, double abs) {
  auto weighted = [&](const Vec& vq, const Vec& vv, const PhasePoint& ref) {
    double acc = 0.0;
    const auto n = vq.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sq = abs + rel * std::abs(ref.q[i]);
      const double sv = abs + rel * std::abs(ref.v[i]);
      acc += (vq[i] / sq) * (vq[i] / sq) + (vv[i] / sv) * (vv[i] / sv);
    }
    return std::sqrt(acc / (2.0 * n));
  };
  const double d0 = weighted(y0.q, y0.v, y0);
  const double d1 = weighted(f0.dq, f0.dv, y0);
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min(h, h_max);
  PhasePoint y1{y0.q + (dir * h) * f0.dq, y0.v + (dir * h) * f0.dv};
  StageDerivs f1 = eval(flow, y1);
  const double d2 = weighted(f1.dq - f0.dq, f1.dv - f0.dv, y0) / h;
  const double d12 = std::max(d1, d2);
  const double h1 =
      d12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / d12, 0.2);
  return std::min({100.0 * h, h1, h_max});
}

}  // namespace

Trajectory integrate(const Flow& flow, const Vec& q0, const Vec& v0, double t0,
                     double t1, const IntegrateOptions& opts) {
  if (t1 == t0) throw std::invalid_argument("integrate: empty time span");
  if (!(opts.rel_tol >= 1e-13 && opts.rel_tol <= 1e-3) ||
      !(opts.abs_tol >= 1e-13 && opts.abs_tol <= 1e-3))
    throw std::invalid_argument("integrate: tolerances must lie in [1e-13, 1e-3]");

  const bool sphere = flow.on_sphere();
  PhasePoint y{q0, v0};
  if (sphere) {
    const SphereState s0 = project_state(q0, v0);
    y.q = s0.gamma();
    y.v = s0.gamma_dot();
  }

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);

  std::vector<double> times;
  std::vector<Vec> qs, vs, as;
  StageDerivs k1 = eval(flow, y);
  times.push_back(t0);
  qs.push_back(y.q);
  vs.push_back(y.v);
  as.push_back(k1.dv);

  double h = initial_step(flow, y, k1, dir, span, opts.rel_tol, opts.abs_tol);
  double t = t0;
  double err_old = 1e-4;
  bool rejected_last = false;
  long steps = 0;

  while (dir * (t1 - t) > 0.0) {
    if (++steps > opts.max_steps)
      throw std::runtime_error("integrate: step count exceeded");
    const double t_scale = std::max(std::abs(t), std::abs(t1));
    if (h < 1e4 * std::numeric_limits<double>::epsilon() * std::max(1.0, t_scale))
      throw std::runtime_error("integrate: step size underflow");
    if (dir * (t + dir * h - t1) > 0.0) h = std::abs(t1 - t);
    const double hs = dir * h;

    bool stage_failed = false;
    PhasePoint y5{y.q, y.v};
    StageDerivs k2, k3, k4, k5, k6, k7;
    try {
      k2 = eval(flow, axpy(y, hs, {{a21, &k1}}));
      k3 = eval(flow, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
      k4 = eval(flow, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      k5 = eval(flow, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      k6 = eval(flow, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      y5 = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      k7 = eval(flow, y5);
    } catch (const std::domain_error&) {
      // A trial stage left the field domain; retry shorter unless the step is
      // already minimal (then the trajectory itself is exiting).
      stage_failed = true;
    }

    double err = 2.0;
    Vec eq, ev;
    if (!stage_failed) {
      eq = hs * (e1 * k1.dq + e3 * k3.dq + e4 * k4.dq + e5 * k5.dq +
                 e6 * k6.dq + e7 * k7.dq);
      ev = hs * (e1 * k1.dv + e3 * k3.dv + e4 * k4.dv + e5 * k5.dv +
                 e6 * k6.dv + e7 * k7.dv);
      err = error_norm(y, y5, eq, ev, opts.rel_tol, opts.abs_tol);
    }

    bool constraint_reject = false;
    PhasePoint y_next = y5;
    StageDerivs k_next = k7;
    if (!stage_failed && err <= 1.0 && sphere) {
      const double norm_defect = std::abs(y5.q.norm() - 1.0);
      const double tang_defect =
          std::abs(y5.q.dot(y5.v)) / std::max(1.0, y5.v.norm());
      const double defect = std::max(norm_defect, tang_defect);
      if (defect > kHardConstraintLimit)
        throw std::runtime_error(
            "integrate: constraint violation beyond 1e-6; right-hand side is "
            "inconsistent with the sphere");
      if (defect > opts.projection_tol) {
        constraint_reject = true;
      } else {
        const SphereState proj = project_state(y5.q, y5.v);
        y_next.q = proj.gamma();
        y_next.v = proj.gamma_dot();
        k_next = eval(flow, y_next);  // derivative at the projected node
      }
    }

    if (!stage_failed && err <= 1.0 && !constraint_reject) {
      t = (std::abs(t + hs - t1) < 1e-14 * std::max(1.0, std::abs(t1))) ? t1
                                                                        : t + hs;
      y = y_next;
      k1 = k_next;
      times.push_back(t);
      qs.push_back(y.q);
      vs.push_back(y.v);
      as.push_back(k1.dv);

      const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                         std::pow(err_old, 0.4 / 5.0);
      double grow = std::clamp(fac, 0.2, 5.0);
      if (rejected_last) grow = std::min(grow, 1.0);
      h = std::min(h * grow, span);
      err_old = std::max(err, 1e-10);
      rejected_last = false;
    } else {
      if (stage_failed || constraint_reject) {
        h *= 0.5;
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
      }
      rejected_last = true;
    }
  }

  return Trajectory::from_nodes(std::move(times), std::move(qs), std::move(vs),
                                std::move(as),
                                sphere ? Chart::sphere : Chart::flat);
}

Trajectory integrate(const Flow& flow, const SphereState& state0, double t0,
                     double t1, const IntegrateOptions& opts) {
  if (!flow.on_sphere())
    throw std::invalid_argument("integrate: flat flow given a sphere state");
  return integrate(flow, state0.gamma(), state0.gamma_dot(), t0, t1, opts);
}

namespace {

// 5-node Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode1 = 0.53846931010568309;
constexpr double kGlNode2 = 0.90617984593866399;
constexpr double kGlW0 = 0.56888888888888889;
constexpr double kGlW1 = 0.47862867049936647;
constexpr double kGlW2 = 0.23692688505618909;

double gl5(const Trajectory& traj, const Multiplier& nu, double ta, double tb) {
  const double mid = 0.5 * (ta + tb);
  const double half = 0.5 * (tb - ta);
  auto f = [&](double t) { return nu.value(traj.position_at(t)); };
  return half * (kGlW0 * f(mid) +
                 kGlW1 * (f(mid - half * kGlNode1) + f(mid + half * kGlNode1)) +
                 kGlW2 * (f(mid - half * kGlNode2) + f(mid + half * kGlNode2)));
}

}  // namespace

ReparamMap time_map(const Trajectory& traj, const Multiplier& multiplier) {
  const std::size_t m = traj.size();
  std::vector<double> t_nodes(traj.times());
  std::vector<double> tau_nodes(m), nu_nodes(m);

  const double nu0 = multiplier.value(traj.position(0));
  if (nu0 == 0.0)
    throw std::runtime_error("time_map: multiplier vanishes at a node");
  const int sign = nu0 > 0.0 ? 1 : -1;
  for (std::size_t k = 0; k < m; ++k) {
    nu_nodes[k] = multiplier.value(traj.position(k));
    if (!(sign * nu_nodes[k] > 0.0))
      throw std::runtime_error("time_map: multiplier changes sign along the trajectory");
  }

  tau_nodes[0] = 0.0;
  double worst_rate = 0.0;
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double ta = t_nodes[k], tb = t_nodes[k + 1];
    const double whole = gl5(traj, multiplier, ta, tb);
    const double tm = 0.5 * (ta + tb);
    const double halves =
        gl5(traj, multiplier, ta, tm) + gl5(traj, multiplier, tm, tb);
    worst_rate =
        std::max(worst_rate, std::abs(whole - halves) / std::abs(tb - ta));
    tau_nodes[k + 1] = tau_nodes[k] + halves;
  }

  return ReparamMap(std::move(t_nodes), std::move(tau_nodes),
                    std::move(nu_nodes), sign, worst_rate);
}

Trajectory resample(const Trajectory& traj, const ReparamMap& map,
                    const Multiplier& multiplier, std::size_t samples) {
  if (samples == 0) samples = traj.size();
  if (samples < 2) throw std::invalid_argument("resample: need >= 2 samples");
  const double tau0 = map.tau_begin();
  const double tau1 = map.tau_end();

  std::vector<double> taus(samples);
  std::vector<Vec> qs(samples), vs(samples), as(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    const double tau =
        j + 1 == samples
            ? tau1
            : tau0 + (tau1 - tau0) * static_cast<double>(j) / (samples - 1);
    const double t = map.inverse(tau);
    Vec q = traj.position_at(t);
    Vec qd = traj.velocity_at(t);
    const double nu = multiplier.value(q);
    const Vec grad_nu = multiplier.grad(q);
    const double nu_dot = grad_nu.dot(qd);
    // Chain rule for the new-time acceleration:
    //   q'' = (q_ddot - (nu_dot/nu) q_dot) / nu^2.
    const Vec qdd_t = traj.acceleration_at(t);
    Vec v = qd / nu;
    Vec a = (qdd_t - (nu_dot / nu) * qd) / (nu * nu);
    if (traj.chart() == Chart::sphere) {
      const SphereState proj = project_state(q, v);
      q = proj.gamma();
      v = proj.gamma_dot();
    }
    taus[j] = tau;
    qs[j] = std::move(q);
    vs[j] = std::move(v);
    as[j] = std::move(a);
  }

  return Trajectory::from_nodes(std::move(taus), std::move(qs), std::move(vs),
                                std::move(as), traj.chart());
}

}  // namespace chapball
