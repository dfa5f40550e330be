#include "chapball/coords.hpp"

#include <cmath>

namespace chapball {

namespace {

void require_strictly_decreasing(const BallConfig& cfg) {
  for (int i = 0; i + 1 < cfg.n(); ++i) {
    if (!(cfg.a()[i] > cfg.a()[i + 1]))
      throw std::invalid_argument(
          "coords: inertia parameters must be strictly decreasing");
  }
}

void require_interlacing(const BallConfig& cfg, const Vec& u) {
  const Vec& alpha = cfg.a_inv();
  if (u.size() != cfg.n() - 1)
    throw std::invalid_argument("coords: u has wrong length");
  for (int k = 0; k < u.size(); ++k) {
    if (!(alpha[k] < u[k] && u[k] < alpha[k + 1]))
      throw std::invalid_argument("coords: interlacing violation");
  }
}

}  // namespace

SpheroConical::SpheroConical(const BallConfig& cfg, Vec u) : u_(std::move(u)) {
  require_strictly_decreasing(cfg);
  require_interlacing(cfg, u_);
}

SpheroConical u_from_x(const BallConfig& cfg, const Vec& x) {
  require_strictly_decreasing(cfg);
  const int n = cfg.n();
  if (x.size() != n) throw std::invalid_argument("u_from_x: wrong dimension");
  for (int i = 0; i < n; ++i) {
    if (std::abs(x[i]) < 1e-13)
      throw std::invalid_argument(
          "u_from_x: coordinate vanishes (non-generic point)");
  }
  const Vec& alpha = cfg.a_inv();
  const Vec x2 = x.cwiseProduct(x);
  auto s = [&](double z) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x2[i] / (z - alpha[i]);
    return acc;
  };

  Vec u(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    const double gap = alpha[k + 1] - alpha[k];
    // S decreases from +inf to -inf across the gap; walk the endpoints toward
    // the poles until the signs bracket the root.
    double lo = alpha[k] + 1e-3 * gap;
    double hi = alpha[k + 1] - 1e-3 * gap;
    double off = 1e-3 * gap;
    while (s(lo) <= 0.0) {
      off *= 0.1;
      if (off < 1e-16 * gap)
        throw std::runtime_error("u_from_x: bracket collapse near a pole");
      lo = alpha[k] + off;
    }
    off = 1e-3 * gap;
    while (s(hi) >= 0.0) {
      off *= 0.1;
      if (off < 1e-16 * gap)
        throw std::runtime_error("u_from_x: bracket collapse near a pole");
      hi = alpha[k + 1] - off;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo) + std::abs(hi));
         ++it) {
      const double mid = 0.5 * (lo + hi);
      (s(mid) > 0.0 ? lo : hi) = mid;
    }
    u[k] = 0.5 * (lo + hi);
  }
  return SpheroConical(cfg, std::move(u));
}

Vec x_from_u(const BallConfig& cfg, const SpheroConical& u) {
  require_strictly_decreasing(cfg);
  const int n = cfg.n();
  const Vec& alpha = cfg.a_inv();
  const Vec& uu = u.u();
  Vec x2(n);
  for (int i = 0; i < n; ++i) {
    double num = 1.0, den = 1.0;
    for (int k = 0; k < n - 1; ++k) num *= alpha[i] - uu[k];
    for (int j = 0; j < n; ++j)
      if (j != i) den *= alpha[i] - alpha[j];
    x2[i] = num / den;
  }
  return x2;
}

Vec gamma_from_u(const BallConfig& cfg, const SpheroConical& u) {
  const Vec x2 = x_from_u(cfg, u);
  const double nu2 = cfg.a_inv().sum() - u.u().sum();
  Vec g2(cfg.n());
  for (int i = 0; i < cfg.n(); ++i) g2[i] = x2[i] / (cfg.a()[i] * nu2);
  return g2;
}

std::array<double, 3> bm_params(const BallConfig& cfg) {
  if (cfg.n() != 3) throw std::invalid_argument("bm_params: requires n = 3");
  const Vec& a = cfg.a();
  return {a[1] * a[2], a[0] * a[2], a[0] * a[1]};
}

double bm_correspondence_check(const BallConfig& cfg, const SpheroConical& u) {
  if (cfg.n() != 3)
    throw std::invalid_argument("bm_correspondence_check: requires n = 3");
  require_strictly_decreasing(cfg);
  const Vec g2 = gamma_from_u(cfg, u);
  const auto [j1, j2, j3] = bm_params(cfg);
  const double prod_a = cfg.a()[0] * cfg.a()[1] * cfg.a()[2];
  const double u_bm = prod_a * u.u()[0];
  const double v_bm = prod_a * u.u()[1];
  const double eta2 = 1.0 / (j1 + j2 + j3 - u_bm - v_bm);

  const std::array<double, 3> j{j1, j2, j3};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    double den = 1.0;
    for (int k = 0; k < 3; ++k)
      if (k != i) den *= j[i] - j[k];
    const double g2_bm = eta2 * j[i] * (j[i] - u_bm) * (j[i] - v_bm) / den;
    worst = std::max(worst, std::abs(g2_bm - g2[i]));
  }

  const double nu2 = cfg.a_inv().sum() - u.u().sum();
  worst = std::max(worst, std::abs(eta2 * prod_a * nu2 - 1.0));
  return worst;
}

double conic_residual(const BallConfig& cfg, const Vec& gamma, double z) {
  if (cfg.n() != 3)
    throw std::invalid_argument("conic_residual: requires n = 3");
  if (gamma.size() != 3)
    throw std::invalid_argument("conic_residual: wrong dimension");
  const auto j = bm_params(cfg);
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double den = j[i] - z;
    if (std::abs(den) < 1e-12 * std::max(1.0, std::abs(j[i])))
      throw std::domain_error("conic_residual: z hits a pencil pole");
    acc += cfg.a()[i] * gamma[i] * gamma[i] / den;
  }
  return acc;
}

Vec signed_from_squared(const Vec& squared, const Vec& reference) {
  if (squared.size() != reference.size())
    throw std::invalid_argument("signed_from_squared: dimension mismatch");
  Vec out(squared.size());
  for (int i = 0; i < squared.size(); ++i) {
    const double mag = std::sqrt(std::max(squared[i], 0.0));
    out[i] = reference[i] < 0.0 ? -mag : mag;
  }
  return out;
}

}  // namespace chapball
