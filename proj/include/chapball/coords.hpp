// chapball - sphero-conical coordinates and the n=3 correspondence
//
// Conventions: these operations assume a_1 > a_2 > ... > a_n > 0, so the
// pole parameters 1/a_i increase strictly. All formulas determine squared
// coordinates only; signs are the caller's (see signed_from_squared).
#ifndef CHAPBALL_COORDS_HPP_
#define CHAPBALL_COORDS_HPP_

#include <array>

#include "chapball/types.hpp"

namespace chapball {

/// Separation coordinates u_1 < ... < u_{n-1} interlacing the poles:
/// 1/a_1 < u_1 < 1/a_2 < ... < u_{n-1} < 1/a_n.
class SpheroConical {
 public:
  SpheroConical(const BallConfig& cfg, Vec u);
  const Vec& u() const { return u_; }

 private:
  Vec u_;
};

/// Roots of sum_i x_i^2 / (z - 1/a_i) = 0, one per pole gap, by bracketed
/// bisection. Requires a generic point (all x_i nonzero).
SpheroConical u_from_x(const BallConfig& cfg, const Vec& x);

/// Squared coordinates
///   x_i^2 = prod_k (1/a_i - u_k) / prod_{j != i} (1/a_i - 1/a_j);
/// positive and summing to 1 for interlaced u.
Vec x_from_u(const BallConfig& cfg, const SpheroConical& u);

/// Squared gamma-side coordinates: x_i^2 / (a_i nu2) with
/// nu2 = sum_j 1/a_j - sum_k u_k.
Vec gamma_from_u(const BallConfig& cfg, const SpheroConical& u);

/// (J_1, J_2, J_3) = (a_2 a_3, a_1 a_3, a_1 a_2); n = 3 only.
std::array<double, 3> bm_params(const BallConfig& cfg);

/// Compares gamma^2 computed two ways for n = 3: from the sphero-conical
/// formula and from the confocal-pencil normal form in the parameters
/// (J, u, v) with u = a_1 a_2 a_3 u_1, v = a_1 a_2 a_3 u_2 and
/// eta^2 = (J_1 + J_2 + J_3 - u - v)^{-1}. Returns the max entrywise
/// difference and also enforces eta^2 a_1 a_2 a_3 nu2 = 1. (Some published
/// statements of the defining pencil equation drop the eta^2 factor; the
/// normalized form used here is the one whose coordinate formulas close up.)
double bm_correspondence_check(const BallConfig& cfg, const SpheroConical& u);

/// Value of the gamma-side pencil equation
///   a_1 g_1^2/(a_2 a_3 - z) + a_2 g_2^2/(a_1 a_3 - z) + a_3 g_3^2/(a_1 a_2 - z)
/// for n = 3; vanishes exactly when z is one of the point's two deformed
/// separation parameters.
double conic_residual(const BallConfig& cfg, const Vec& gamma, double z);

/// Picks signs for square-rooted coordinates so they match a reference point.
Vec signed_from_squared(const Vec& squared, const Vec& reference);

}  // namespace chapball

#endif  // CHAPBALL_COORDS_HPP_
