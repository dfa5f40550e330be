#include "chapball/dynamics.hpp"

#include <cmath>

#include "chapball/geometry.hpp"

namespace chapball {

Derivative reduced_rhs_raw(const BallConfig& cfg, const Vec& gamma,
                           const Vec& gamma_dot) {
  const int n = cfg.n();
  const double eps = cfg.epsilon();
  const Vec a_gamma = cfg.apply_a(gamma);
  const Vec a_dot = cfg.apply_a(gamma_dot);
  const double r = a_gamma.dot(gamma);        // (Ag, g)
  const double p = a_gamma.dot(gamma_dot);    // (Ag, g')
  const double k = a_dot.dot(gamma_dot);      // (Ag', g')

  // Unknowns w = (gamma_ddot, lambda):
  //   eps[(Ag,g'')Ag - (Ag,g)Ag''] - lambda g = (Ag,g')Ag' - (Ag',g')Ag
  //   (g, g'') = -(g', g')
  Mat m = Mat::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = eps * (a_gamma * a_gamma.transpose());
  m.topLeftCorner(n, n).diagonal() -= (eps * r) * cfg.a();
  m.topRightCorner(n, 1) = -gamma;
  m.bottomLeftCorner(1, n) = gamma.transpose();

  Vec rhs(n + 1);
  rhs.head(n) = p * a_dot - k * a_gamma;
  rhs[n] = -gamma_dot.squaredNorm();

  Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible())
    throw std::runtime_error("reduced_rhs: singular saddle system");
  const Vec w = lu.solve(rhs);

  Derivative d;
  d.acceleration = w.head(n);
  d.lagrange_multiplier = w[n];
  return d;
}

Derivative reduced_rhs(const BallConfig& cfg, const SphereState& state) {
  return reduced_rhs_raw(cfg, state.gamma(), state.gamma_dot());
}

double weak_form_residual(const BallConfig& cfg, const SphereState& state,
                          const Derivative& derivative) {
  const Vec& g = state.gamma();
  const Vec& gd = state.gamma_dot();
  const Vec& gdd = derivative.acceleration;
  const double eps = cfg.epsilon();

  const Vec a_g = cfg.apply_a(g);
  const Vec a_gd = cfg.apply_a(gd);
  const Vec a_gdd = cfg.apply_a(gdd);
  const double r = a_g.dot(g);
  const double p = a_g.dot(gd);
  const double k = a_gd.dot(gd);
  const double w = a_g.dot(gdd);  // (Ag, g'')

  // d/dt[I(g^g')g] with the supplied acceleration.
  const Vec dW = (k + w) * a_g - p * a_gd - r * a_gdd;
  // I(g^g')g'.
  const Vec G = k * a_g - p * a_gd;
  const Vec resid = eps * dW + (1.0 - eps) * G;

  const Mat basis = tangent_basis(g);
  double worst = 0.0;
  for (int a = 0; a < basis.cols(); ++a)
    worst = std::max(worst, std::abs(resid.dot(basis.col(a))));
  return worst;
}

Derivative natural_rhs_raw(const BallConfig& cfg, const Vec& x,
                           const Vec& x_dot) {
  const double eps = cfg.epsilon();
  const double r = cfg.a_inv_form(x, x);
  const double pot_pow = std::pow(r, -1.0 / eps);
  Derivative d;
  d.lagrange_multiplier = (2.0 / eps) * pot_pow - x_dot.squaredNorm();
  d.acceleration = -(2.0 / eps) * (pot_pow / r) * cfg.apply_a_inv(x) +
                   d.lagrange_multiplier * x;
  return d;
}

Derivative natural_rhs(const BallConfig& cfg, const SphereState& state) {
  return natural_rhs_raw(cfg, state.gamma(), state.gamma_dot());
}

Vec flat_newton_rhs(const FlatFieldConfig& fields, const Vec& q,
                    const Vec& q_dot) {
  fields.check_in_domain(q);
  const Vec gl_f = fields.grad_log_f(q);
  const Vec gl_nu = fields.grad_log_nu(q);
  return gl_nu.dot(q_dot) * q_dot - 2.0 * gl_f.dot(q_dot) * q_dot +
         q_dot.squaredNorm() * gl_f;
}

Vec conformal_geodesic_rhs(const FlatFieldConfig& fields, const Vec& q,
                           const Vec& q_prime) {
  fields.check_in_domain(q);
  const Vec gl_f = fields.grad_log_f(q);
  return -2.0 * gl_f.dot(q_prime) * q_prime + q_prime.squaredNorm() * gl_f;
}

Vec Flow::acceleration(const Vec& q, const Vec& v) const {
  switch (kind_) {
    case Kind::reduced:
      return reduced_rhs_raw(*ball_, q, v).acceleration;
    case Kind::natural:
      return natural_rhs_raw(*ball_, q, v).acceleration;
    case Kind::flat_newton:
      return flat_newton_rhs(*fields_, q, v);
    case Kind::conformal_geodesic:
      return conformal_geodesic_rhs(*fields_, q, v);
  }
  throw std::logic_error("Flow: unknown kind");
}

}  // namespace chapball
