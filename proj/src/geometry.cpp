#include "chapball/geometry.hpp"

#include <cmath>

namespace chapball {

namespace {

constexpr double kTangentTol = 1e-9;

void require_tangent(const Vec& base, const Vec& v, const char* what) {
  if (std::abs(v.dot(base)) > kTangentTol * std::max(1.0, v.norm()))
    throw std::invalid_argument(std::string("inner: ") + what +
                                " is not tangent at the base point");
}

void require_on_sphere(const Vec& base) {
  if (std::abs(base.squaredNorm() - 1.0) > kTangentTol)
    throw std::invalid_argument("inner: base point not on the unit sphere");
}

// (AX,Y)(Ag,g) - (Ag,X)(Ag,Y), the eps-free core of g_0 and g_*.
double core_form(const BallConfig& cfg, const Vec& gamma, const Vec& X,
                 const Vec& Y) {
  return cfg.a_form(X, Y) * cfg.a_form(gamma, gamma) -
         cfg.a_form(gamma, X) * cfg.a_form(gamma, Y);
}

}  // namespace

double inner(MetricKind metric, const BallConfig& cfg, const Vec& base,
             const Vec& X, const Vec& Y) {
  require_on_sphere(base);
  require_tangent(base, X, "X");
  require_tangent(base, Y, "Y");
  switch (metric) {
    case MetricKind::reduced_g0: {
      const double e = cfg.epsilon();
      return core_form(cfg, base, X, Y) / (e * e);
    }
    case MetricKind::chaplygin_gstar: {
      const double r = cfg.a_form(base, base);
      return std::pow(r, 1.0 / cfg.epsilon() - 2.0) * core_form(cfg, base, X, Y);
    }
    case MetricKind::conformal_x: {
      const double r = cfg.a_inv_form(base, base);
      return std::pow(r, -1.0 / cfg.epsilon()) * X.dot(Y);
    }
    case MetricKind::standard:
      return X.dot(Y);
  }
  throw std::logic_error("inner: unknown metric kind");
}

Vec gamma_to_x(const BallConfig& cfg, const Vec& gamma) {
  const double r = cfg.a_form(gamma, gamma);
  return cfg.apply_a_sqrt(gamma) / std::sqrt(r);
}

Vec x_to_gamma(const BallConfig& cfg, const Vec& x) {
  const double r = cfg.a_inv_form(x, x);
  return cfg.a_sqrt().cwiseInverse().cwiseProduct(x) / std::sqrt(r);
}

Vec gamma_to_x_velocity(const BallConfig& cfg, const Vec& gamma,
                        const Vec& gamma_dot) {
  const double r = cfg.a_form(gamma, gamma);
  const double p = cfg.a_form(gamma, gamma_dot);
  return cfg.apply_a_sqrt(gamma_dot) / std::sqrt(r) -
         cfg.apply_a_sqrt(gamma) * (p / std::pow(r, 1.5));
}

Vec wedge_apply(const Vec& a, const Vec& b, const Vec& c) {
  return a * b.dot(c) - b * a.dot(c);
}

Vec inertia_wedge_apply(const BallConfig& cfg, const Vec& a, const Vec& b,
                        const Vec& c) {
  return wedge_apply(cfg.apply_a(a), cfg.apply_a(b), c);
}

double sigma(const BallConfig& cfg, const Vec& gamma, const Vec& X,
             const Vec& Y, const Vec& Z) {
  require_on_sphere(gamma);
  require_tangent(gamma, X, "X");
  require_tangent(gamma, Y, "Y");
  require_tangent(gamma, Z, "Z");
  const double e = cfg.epsilon();
  const double coef = (2.0 * e - 1.0) / (e * e * e);
  return coef * inertia_wedge_apply(cfg, gamma, X, Y).dot(Z);
}

Mat tangent_basis(const Vec& base) {
  const int n = static_cast<int>(base.size());
  // Householder reflector sending e_1 to -sign(base_1) * base; its remaining
  // columns are an orthonormal basis of the complement of base.
  Vec v = base;
  const double s = v[0] >= 0.0 ? 1.0 : -1.0;
  v[0] += s;
  const double vtv = v.squaredNorm();
  Mat basis(n, n - 1);
  for (int j = 1; j < n; ++j) {
    Vec col = -2.0 * v[j] / vtv * v;
    col[j] += 1.0;
    basis.col(j - 1) = col;
  }
  return basis;
}

namespace {

// Shared solve for B and C: expresses a tangent covector (given by its values
// against the basis) through the g_0 Gram matrix.
Vec solve_against_g0(const BallConfig& cfg, const Vec& gamma,
                     const Vec& values, const Mat& basis) {
  const int m = static_cast<int>(basis.cols());
  Mat gram(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double g =
          inner(MetricKind::reduced_g0, cfg, gamma, basis.col(i), basis.col(j));
      gram(i, j) = g;
      gram(j, i) = g;
    }
  }
  Eigen::LLT<Mat> llt(gram);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("b_tensor/c_tensor: singular Gram matrix");
  return basis * llt.solve(values);
}

}  // namespace

Vec b_tensor(const BallConfig& cfg, const Vec& gamma, const Vec& X,
             const Vec& Y) {
  const Mat basis = tangent_basis(gamma);
  const int m = static_cast<int>(basis.cols());
  Vec rhs(m);
  for (int a = 0; a < m; ++a) rhs[a] = sigma(cfg, gamma, X, Y, basis.col(a));
  return solve_against_g0(cfg, gamma, rhs, basis);
}

Vec c_tensor(const BallConfig& cfg, const Vec& gamma, const Vec& Y,
             const Vec& Z) {
  const Mat basis = tangent_basis(gamma);
  const int m = static_cast<int>(basis.cols());
  Vec rhs(m);
  for (int a = 0; a < m; ++a) rhs[a] = sigma(cfg, gamma, basis.col(a), Y, Z);
  return solve_against_g0(cfg, gamma, rhs, basis);
}

}  // namespace chapball
