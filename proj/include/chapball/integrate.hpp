// chapball - adaptive integration on the sphere and time reparametrization
#ifndef CHAPBALL_INTEGRATE_HPP_
#define CHAPBALL_INTEGRATE_HPP_

#include "chapball/dynamics.hpp"
#include "chapball/types.hpp"

namespace chapball {

/// Scalar time multipliers nu(q), tagged so maps stay serializable and their
/// gradients stay analytic:
///   unit / constant    nu = 1, nu = c
///   gamma_power        nu = c (A q, q)^p
///   x_power            nu = c (A^{-1} q, q)^p
///   field_nu           nu from a FlatFieldConfig
///   jacobi             nu = h - V(q)
class Multiplier {
 public:
  static Multiplier unit();
  static Multiplier constant(double c);
  static Multiplier gamma_power(const BallConfig& cfg, double coef, double power);
  static Multiplier x_power(const BallConfig& cfg, double coef, double power);
  /// d tau = eps (A g, g)^{1/(2 eps) - 1} dt, the Chaplygin multiplier of the
  /// reduced system.
  static Multiplier geodesic_time(const BallConfig& cfg);
  /// ds = eps (A^{-1} x, x)^{1 + 1/(2 eps)} dt, the combined multiplier that
  /// carries reduced trajectories to the natural systems.
  static Multiplier natural_time(const BallConfig& cfg);
  /// ds = (A^{-1} x, x)^{1/eps} d tau, the inverse Maupertuis step on the
  /// x-side sphere.
  static Multiplier maupertuis_inverse(const BallConfig& cfg);
  static Multiplier field_nu(const FlatFieldConfig& fields);
  static Multiplier jacobi(const FlatFieldConfig& fields, double h);

  double value(const Vec& q) const;
  Vec grad(const Vec& q) const;

 private:
  enum class Kind { constant, gamma_power, x_power, field_nu, jacobi };
  Multiplier(Kind kind) : kind_(kind) {}

  Kind kind_;
  double coef_ = 1.0;
  double power_ = 0.0;
  double h_ = 0.0;
  std::optional<BallConfig> cfg_;
  std::optional<FlatFieldConfig> fields_;
};

struct IntegrateOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  /// Per-step renormalization beyond this rejects the step (sphere flows).
  double projection_tol = 1e-8;
  long max_steps = 2'000'000;
};

/// Integrates the flow over [t0, t1] (either direction) with an embedded
/// Dormand-Prince 5(4) pair under PI step-size control. For sphere flows each
/// accepted state is projected back to the constraint surface; drift beyond
/// projection_tol rejects the step, and drift beyond 1e-6 aborts (a bug in the
/// supplied right-hand side). Every accepted node is stored together with its
/// derivative data for dense output.
Trajectory integrate(const Flow& flow, const Vec& q0, const Vec& v0, double t0,
                     double t1, const IntegrateOptions& opts = {});

Trajectory integrate(const Flow& flow, const SphereState& state0, double t0,
                     double t1, const IntegrateOptions& opts = {});

/// Builds tau(t) = integral of nu along the trajectory by per-step 5-node
/// Gauss-Legendre quadrature on the dense output. The multiplier must keep one
/// sign along the whole trajectory. tau(t_begin) = 0.
ReparamMap time_map(const Trajectory& traj, const Multiplier& multiplier);

/// Resamples the trajectory uniformly in the new time over the image of the
/// map. Velocities rescale as q' = q_dot / nu(q), accelerations by the chain
/// rule through grad nu. samples = 0 keeps the input node count.
Trajectory resample(const Trajectory& traj, const ReparamMap& map,
                    const Multiplier& multiplier, std::size_t samples = 0);

}  // namespace chapball

#endif  // CHAPBALL_INTEGRATE_HPP_
