#include "chapball/analysis.hpp"

#include <cmath>

#include "chapball/dynamics.hpp"
#include "chapball/geometry.hpp"

namespace chapball {

DriftReport make_drift_report(std::string quantity,
                              const std::vector<double>& values) {
  if (values.empty())
    throw std::invalid_argument("make_drift_report: no samples");
  DriftReport r;
  r.quantity = std::move(quantity);
  r.initial = values.front();
  for (double v : values)
    r.max_abs_dev = std::max(r.max_abs_dev, std::abs(v - r.initial));
  r.rel_dev = r.max_abs_dev / std::max(std::abs(r.initial), 1.0);
  return r;
}

double energy_g0(const BallConfig& cfg, const SphereState& state) {
  return 0.5 * inner(MetricKind::reduced_g0, cfg, state.gamma(),
                     state.gamma_dot(), state.gamma_dot());
}

double natural_energy(const BallConfig& cfg, const SphereState& state) {
  const double r = cfg.a_inv_form(state.gamma(), state.gamma());
  return 0.5 * state.gamma_dot().squaredNorm() -
         std::pow(r, -1.0 / cfg.epsilon());
}

double noether_phi(const BallConfig& cfg, int i, int j,
                   const SphereState& state) {
  if (i < 0 || j < 0 || i >= cfg.n() || j >= cfg.n())
    throw std::out_of_range("noether_phi: index out of range");
  const Vec& g = state.gamma();
  const Vec& gd = state.gamma_dot();
  const double r = cfg.a_form(g, g);
  const double e = cfg.epsilon();
  return cfg.a()[i] / e * std::pow(r, 0.5 / e) * (g[i] * gd[j] - g[j] * gd[i]);
}

double noether_phi_gstar(const BallConfig& cfg, int i, int j,
                         const SphereState& state) {
  if (i < 0 || j < 0 || i >= cfg.n() || j >= cfg.n())
    throw std::out_of_range("noether_phi_gstar: index out of range");
  const Vec& g = state.gamma();
  const Vec& gp = state.gamma_dot();
  const double r = cfg.a_form(g, g);
  const double p = cfg.a_form(g, gp);
  // dL*/dg' = (g,Ag)^{1/eps-2} ((Ag,g) A g' - (Ag,g') A g).
  const Vec momentum = std::pow(r, 1.0 / cfg.epsilon() - 2.0) *
                       (r * cfg.apply_a(gp) - p * cfg.apply_a(g));
  return g[i] * momentum[j] - g[j] * momentum[i];
}

double noether_phi_natural(int i, int j, const SphereState& state) {
  const Vec& x = state.gamma();
  const Vec& xd = state.gamma_dot();
  if (i < 0 || j < 0 || i >= x.size() || j >= x.size())
    throw std::out_of_range("noether_phi_natural: index out of range");
  return x[i] * xd[j] - x[j] * xd[i];
}

double quad_integral(const FlatFieldConfig& fields, const Vec& q,
                     const Vec& q_dot) {
  const double f = fields.f(q);
  const double nu = fields.nu(q);
  if (nu == 0.0) throw std::domain_error("quad_integral: nu vanishes");
  return f * f / (2.0 * nu * nu) * q_dot.squaredNorm();
}

SphereState normalize_unit_energy(const BallConfig& cfg,
                                  const SphereState& state) {
  const double e = energy_g0(cfg, state);
  if (!(e > 0.0))
    throw std::invalid_argument("normalize_unit_energy: zero velocity");
  return SphereState(state.gamma(), state.gamma_dot() / std::sqrt(e));
}

Trajectory map_to_x(const BallConfig& cfg, const Trajectory& gamma_traj) {
  const std::size_t m = gamma_traj.size();
  std::vector<double> times(gamma_traj.times());
  std::vector<Vec> xs(m), xds(m), xdds(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec& g = gamma_traj.position(k);
    const Vec& gd = gamma_traj.velocity(k);
    const Vec& gdd = gamma_traj.acceleration(k);
    const double r = cfg.a_form(g, g);
    const double p = cfg.a_form(g, gd);
    const double p_dot = cfg.a_form(gd, gd) + cfg.a_form(g, gdd);
    const double ir = 1.0 / std::sqrt(r);          // r^{-1/2}
    const double ir3 = ir / r;                     // r^{-3/2}
    const double ir5 = ir3 / r;                    // r^{-5/2}
    xs[k] = cfg.apply_a_sqrt(g) * ir;
    xds[k] = cfg.apply_a_sqrt(gd * ir - g * (p * ir3));
    xdds[k] = cfg.apply_a_sqrt(gdd * ir - gd * (2.0 * p * ir3) -
                               g * (p_dot * ir3) + g * (3.0 * p * p * ir5));
  }
  return Trajectory::from_nodes(std::move(times), std::move(xs), std::move(xds),
                                std::move(xdds), Chart::sphere);
}

namespace {

constexpr double kUnitEnergyTol = 1e-9;

ChainResult run_chain(const BallConfig& cfg, const Trajectory& reduced_traj,
                      std::size_t samples) {
  if (reduced_traj.chart() != Chart::sphere)
    throw std::invalid_argument("chaplygin_chain: expected a sphere trajectory");
  const double e0 = energy_g0(cfg, reduced_traj.sphere_state(0));
  if (std::abs(e0 - 1.0) > kUnitEnergyTol)
    throw std::invalid_argument(
        "chaplygin_chain: input trajectory must have unit reduced kinetic "
        "energy (use normalize_unit_energy)");

  const Trajectory x_in_t = map_to_x(cfg, reduced_traj);
  const Multiplier mult = Multiplier::natural_time(cfg);
  const ReparamMap map = time_map(x_in_t, mult);
  if (samples == 0) samples = std::max<std::size_t>(4 * x_in_t.size(), 512);
  Trajectory natural_traj = resample(x_in_t, map, mult, samples);

  ChainResult result{std::move(natural_traj), {}, 0.0, 0.0};
  const Trajectory& nt = result.natural_traj;

  std::vector<double> energies(nt.size());
  for (std::size_t k = 0; k < nt.size(); ++k) {
    energies[k] = natural_energy(cfg, nt.sphere_state(k));
    result.max_natural_energy =
        std::max(result.max_natural_energy, std::abs(energies[k]));
  }
  result.reports.push_back(make_drift_report("natural_energy", energies));

  // Equation residual at segment midpoints, x'' taken by finite differences
  // of the dense velocity output (independent of the mapped accelerations).
  const double arc = std::abs(nt.t_end() - nt.t_begin());
  const double fd =
      std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, arc);
  for (std::size_t k = 0; k + 1 < nt.size(); ++k) {
    const double sm = 0.5 * (nt.time(k) + nt.time(k + 1));
    const double half = std::min(fd, 0.25 * std::abs(nt.time(k + 1) - nt.time(k)));
    const Vec xdd =
        (nt.velocity_at(sm + half) - nt.velocity_at(sm - half)) / (2.0 * half);
    const Derivative want =
        natural_rhs_raw(cfg, nt.position_at(sm), nt.velocity_at(sm));
    result.max_equation_residual = std::max(
        result.max_equation_residual, (xdd - want.acceleration).norm());
  }
  result.reports.push_back(
      {"natural_rhs_residual", 0.0, result.max_equation_residual,
       result.max_equation_residual});
  return result;
}

}  // namespace

ChainResult chaplygin_chain(const BallConfig& cfg,
                            const Trajectory& reduced_traj,
                            std::size_t samples) {
  return run_chain(cfg, reduced_traj, samples);
}

double cross_check_chain(const BallConfig& cfg, const Trajectory& reduced_traj,
                         std::size_t samples) {
  const ChainResult chain = run_chain(cfg, reduced_traj, samples);
  const Trajectory& nt = chain.natural_traj;

  const SphereState start = nt.sphere_state(0);
  IntegrateOptions opts;
  opts.rel_tol = 1e-11;
  opts.abs_tol = 1e-11;
  const Trajectory indep = integrate(Flow::natural(cfg), start, nt.t_begin(),
                                     nt.t_end(), opts);

  double worst = 0.0;
  for (std::size_t k = 0; k < nt.size(); ++k) {
    const double s = nt.time(k);
    worst = std::max(worst, (nt.position(k) - indep.position_at(s)).norm());
  }
  return worst;
}

Trajectory maupertuis_map(const FlatFieldConfig& fields, const Trajectory& traj,
                          double h, std::size_t samples) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double v = fields.potential(traj.position(k));
    const double energy = 0.5 * traj.velocity(k).squaredNorm() + v;
    if (std::abs(energy - h) > 1e-8)
      throw std::invalid_argument(
          "maupertuis_map: trajectory does not lie on the energy level h");
    if (!(h - v > 0.0))
      throw std::domain_error("maupertuis_map: potential reaches h");
  }
  const Multiplier mult = Multiplier::jacobi(fields, h);
  const ReparamMap map = time_map(traj, mult);
  return resample(traj, map, mult, samples);
}

double great_circle_deviation(const Trajectory& traj) {
  if (traj.size() == 0)
    throw std::invalid_argument("great_circle_deviation: empty trajectory");
  const Vec g0 = traj.position(0);
  Vec e1 = g0 / g0.norm();
  Vec w = traj.velocity(0) - traj.velocity(0).dot(e1) * e1;
  if (w.norm() < 1e-12)
    throw std::invalid_argument("great_circle_deviation: degenerate initial frame");
  Vec e2 = w / w.norm();
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vec& g = traj.position(k);
    worst = std::max(worst, (g - g.dot(e1) * e1 - g.dot(e2) * e2).norm());
  }
  return worst;
}

}  // namespace chapball
