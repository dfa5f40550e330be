// chapball - conserved quantities, verification chains, trajectory comparison
#ifndef CHAPBALL_ANALYSIS_HPP_
#define CHAPBALL_ANALYSIS_HPP_

#include "chapball/integrate.hpp"
#include "chapball/types.hpp"

namespace chapball {

/// Drift of a quantity that should be conserved along a trajectory.
struct DriftReport {
  std::string quantity;
  double initial = 0.0;
  double max_abs_dev = 0.0;
  /// max_abs_dev / max(|initial|, 1).
  double rel_dev = 0.0;
};

/// Builds a report from sampled values of the quantity.
DriftReport make_drift_report(std::string quantity,
                              const std::vector<double>& values);

/// Kinetic energy of the reduced metric, (1/2)<g', g'>_0. Coincides with the
/// reduced Lagrangian evaluated at the state.
double energy_g0(const BallConfig& cfg, const SphereState& state);

/// (1/2)(x', x') - (A^{-1}x, x)^{-1/eps}; vanishes on the invariant surface
/// the chain maps onto.
double natural_energy(const BallConfig& cfg, const SphereState& state);

/// Reduced-time Noether function
///   phi_ij = (a_i/eps)(Ag,g)^{1/(2 eps)}(g_i g'_j - g_j g'_i);
/// a first integral of the reduced flow whenever a_i = a_j.
double noether_phi(const BallConfig& cfg, int i, int j,
                   const SphereState& state);

/// The same function in geodesic time, through the g_* momentum:
///   Phi_ij = g_i dL*/dg'_j - g_j dL*/dg'_i  evaluated at (g, g').
double noether_phi_gstar(const BallConfig& cfg, int i, int j,
                         const SphereState& state);

/// x-side Noether function x_i x'_j - x_j x'_i of the natural systems.
double noether_phi_natural(int i, int j, const SphereState& state);

/// f^2/(2 nu^2) (q_dot, q_dot), the quadratic first integral of the flat
/// Newton flow.
double quad_integral(const FlatFieldConfig& fields, const Vec& q,
                     const Vec& q_dot);

/// Rescales the velocity so that (1/2)<g',g'>_0 = 1.
SphereState normalize_unit_energy(const BallConfig& cfg,
                                  const SphereState& state);

/// Pushes a gamma-side trajectory through the sphere map x = A^{1/2}g/|g|_A,
/// with velocities and accelerations mapped analytically. The time variable is
/// unchanged.
Trajectory map_to_x(const BallConfig& cfg, const Trajectory& gamma_traj);

struct ChainResult {
  Trajectory natural_traj;
  std::vector<DriftReport> reports;
  /// max_s |x'' - natural_rhs(x, x')| with x'' from dense-output
  /// differentiation at segment midpoints.
  double max_equation_residual = 0.0;
  /// max_s |natural_energy| along the mapped trajectory.
  double max_natural_energy = 0.0;
};

/// The full transformation chain: sphere map, then the time substitution
/// ds = eps (A^{-1}x,x)^{1+1/(2 eps)} dt, applied to a unit-energy reduced
/// trajectory. The image solves the natural system (Neumann at eps = -1,
/// Braden at eps = +1) on its zero-energy surface; the reports record how
/// well.
ChainResult chaplygin_chain(const BallConfig& cfg,
                            const Trajectory& reduced_traj,
                            std::size_t samples = 0);

/// Integrates the natural system independently from the chain's initial
/// condition and returns the max position deviation against the chain output
/// on the common s-grid.
double cross_check_chain(const BallConfig& cfg, const Trajectory& reduced_traj,
                         std::size_t samples = 0);

/// Maupertuis reparametrization d tau = (h - V) dt of a flat trajectory on
/// the energy level (1/2)|q_dot|^2 + V = h. The output has unit Jacobi
/// kinetic energy (1/2)(h - V)(q', q').
Trajectory maupertuis_map(const FlatFieldConfig& fields, const Trajectory& traj,
                          double h, std::size_t samples = 0);

/// Max distance of the stored samples from the plane spanned by the initial
/// position and velocity.
double great_circle_deviation(const Trajectory& traj);

}  // namespace chapball

#endif  // CHAPBALL_ANALYSIS_HPP_
