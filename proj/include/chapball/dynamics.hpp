// chapball - right-hand sides: reduced rolling, natural Neumann/Braden,
// and the flat Newton / conformal-geodesic testbed
#ifndef CHAPBALL_DYNAMICS_HPP_
#define CHAPBALL_DYNAMICS_HPP_

#include "chapball/types.hpp"

namespace chapball {

/// Second-order data returned by the sphere flows. For sphere flows the
/// acceleration satisfies the differentiated constraint
/// (q_ddot, q) + (q_dot, q_dot) = 0.
struct Derivative {
  Vec acceleration;
  double lagrange_multiplier = 0.0;
};

/// Reduced rolling equation. Expanding the time derivative in
///   eps d/dt((Ag,g')Ag - (Ag,g)Ag') = (eps-1)((Ag',g')Ag - (Ag,g')Ag') + l g
/// and appending the twice-differentiated sphere constraint gives an
/// (n+1)-dimensional linear system for (g'', l), solved densely.
Derivative reduced_rhs(const BallConfig& cfg, const SphereState& state);

/// Same evaluation on raw (gamma, gamma_dot) data without state validation.
/// The formulas extend smoothly off the constraint surface, which is what
/// embedded integrator stages require.
Derivative reduced_rhs_raw(const BallConfig& cfg, const Vec& gamma,
                           const Vec& gamma_dot);

/// Max over an orthonormal tangent basis xi of
///   |(eps d/dt[I(g^g')g] + (1-eps) I(g^g')g', xi)|
/// with the time derivative expanded using the supplied acceleration. Zero iff
/// the derivative solves the reduced system.
double weak_form_residual(const BallConfig& cfg, const SphereState& state,
                          const Derivative& derivative);

/// Natural system on the sphere with potential -(A^{-1}x,x)^{-1/eps}:
///   x'' = -(2/eps)(A^{-1}x,x)^{-1/eps-1} A^{-1}x + l x,
///   l   =  (2/eps)(A^{-1}x,x)^{-1/eps} - (x',x').
/// Neumann at eps = -1, Braden at eps = +1.
Derivative natural_rhs(const BallConfig& cfg, const SphereState& state);
Derivative natural_rhs_raw(const BallConfig& cfg, const Vec& x,
                           const Vec& x_dot);

/// Velocity-dependent force on the flat chart:
///   F = <grad ln nu, v> v - 2 <grad ln f, v> v + (v,v) grad ln f.
/// Newton flow: q'' = F.
Vec flat_newton_rhs(const FlatFieldConfig& fields, const Vec& q,
                    const Vec& q_dot);

/// Geodesic acceleration of the conformal metric f^2 * Euclidean:
///   q'' = -2 <grad ln f, v> v + (v,v) grad ln f.
Vec conformal_geodesic_rhs(const FlatFieldConfig& fields, const Vec& q,
                           const Vec& q_prime);

/// A flow tag plus its configuration; the unit the integrator consumes.
class Flow {
 public:
  enum class Kind { reduced, natural, flat_newton, conformal_geodesic };

  static Flow reduced(BallConfig cfg) { return Flow(Kind::reduced, std::move(cfg)); }
  static Flow natural(BallConfig cfg) { return Flow(Kind::natural, std::move(cfg)); }
  static Flow flat_newton(FlatFieldConfig fields) {
    return Flow(Kind::flat_newton, std::move(fields));
  }
  static Flow conformal_geodesic(FlatFieldConfig fields) {
    return Flow(Kind::conformal_geodesic, std::move(fields));
  }

  Kind kind() const { return kind_; }
  bool on_sphere() const {
    return kind_ == Kind::reduced || kind_ == Kind::natural;
  }
  const BallConfig& ball() const { return *ball_; }
  const FlatFieldConfig& fields() const { return *fields_; }

  Vec acceleration(const Vec& q, const Vec& v) const;

 private:
  Flow(Kind kind, BallConfig cfg) : kind_(kind), ball_(std::move(cfg)) {}
  Flow(Kind kind, FlatFieldConfig fields)
      : kind_(kind), fields_(std::move(fields)) {}

  Kind kind_;
  std::optional<BallConfig> ball_;
  std::optional<FlatFieldConfig> fields_;
};

}  // namespace chapball

#endif  // CHAPBALL_DYNAMICS_HPP_
