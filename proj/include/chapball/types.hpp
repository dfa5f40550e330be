// chapball - core domain types shared by all modules
#ifndef CHAPBALL_TYPES_HPP_
#define CHAPBALL_TYPES_HPP_

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chapball {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Parameters of the rolling-ball system: dimension n, the diagonal a_1..a_n
/// of the inertia matrix A, and the geometry ratio epsilon. The three rolling
/// configurations (outer/inner/shell) enter only through epsilon, so radii
/// never appear below the CLI boundary.
class BallConfig {
 public:
  BallConfig(int n, Vec a, double epsilon);

  int n() const { return n_; }
  const Vec& a() const { return a_; }
  double epsilon() const { return epsilon_; }

  /// Entrywise 1/a_i.
  const Vec& a_inv() const { return a_inv_; }
  /// Entrywise sqrt(a_i).
  const Vec& a_sqrt() const { return a_sqrt_; }

  /// A v (diagonal action).
  Vec apply_a(const Vec& v) const { return a_.cwiseProduct(v); }
  /// A^{-1} v.
  Vec apply_a_inv(const Vec& v) const { return a_inv_.cwiseProduct(v); }
  /// A^{1/2} v.
  Vec apply_a_sqrt(const Vec& v) const { return a_sqrt_.cwiseProduct(v); }

  /// (A u, v).
  double a_form(const Vec& u, const Vec& v) const {
    return u.dot(a_.cwiseProduct(v));
  }
  /// (A^{-1} u, v).
  double a_inv_form(const Vec& u, const Vec& v) const {
    return u.dot(a_inv_.cwiseProduct(v));
  }

 private:
  int n_;
  Vec a_, a_inv_, a_sqrt_;
  double epsilon_;
};

/// Validating constructor for BallConfig. Rejects n < 2, nonpositive a_i,
/// dimension mismatch, and epsilon = 0.
BallConfig make_ball_config(int n, const Vec& a, double epsilon);

/// A point of the reduced phase space: position gamma on the unit sphere and
/// a velocity tangent at gamma. Construction enforces |(gamma,gamma)-1| and
/// |(gamma,gamma_dot)| below 1e-12; instances are immutable. The same type
/// carries x-side states of the natural systems on the sphere.
class SphereState {
 public:
  SphereState(Vec gamma, Vec gamma_dot);

  const Vec& gamma() const { return gamma_; }
  const Vec& gamma_dot() const { return gamma_dot_; }
  int n() const { return static_cast<int>(gamma_.size()); }

  static constexpr double kConstructionTol = 1e-12;

 private:
  Vec gamma_, gamma_dot_;
};

/// Normalizes gamma_raw to the sphere and removes the normal component of
/// the velocity. Idempotent; rejects a zero position vector.
SphereState project_state(const Vec& gamma_raw, const Vec& gamma_dot_raw);

enum class Chart { sphere, flat };

/// Time-stamped flow samples with per-step cubic Hermite dense output.
/// Positions interpolate on (q, q_dot) node data, velocities on
/// (q_dot, q_ddot), so both lookups are C^1 inside a step. Times are strictly
/// monotone but may decrease (orientation-reversing reparametrizations).
class Trajectory {
 public:
  static Trajectory from_nodes(std::vector<double> times,
                               std::vector<Vec> positions,
                               std::vector<Vec> velocities,
                               std::vector<Vec> accelerations, Chart chart);

  std::size_t size() const { return times_.size(); }
  int dim() const { return positions_.empty() ? 0 : static_cast<int>(positions_[0].size()); }
  Chart chart() const { return chart_; }
  /// +1 for increasing times, -1 for decreasing.
  int direction() const { return direction_; }

  double time(std::size_t k) const { return times_[k]; }
  const Vec& position(std::size_t k) const { return positions_[k]; }
  const Vec& velocity(std::size_t k) const { return velocities_[k]; }
  const Vec& acceleration(std::size_t k) const { return accelerations_[k]; }
  const std::vector<double>& times() const { return times_; }

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  /// True if t lies in the (closed, possibly reversed) time range.
  bool covers(double t) const;

  /// Dense position lookup; exact at stored times.
  Vec position_at(double t) const;
  /// Dense velocity lookup; exact at stored times.
  Vec velocity_at(double t) const;
  /// Derivative of the velocity interpolant; exact at stored times.
  Vec acceleration_at(double t) const;

  SphereState sphere_state(std::size_t k) const {
    return SphereState(positions_[k], velocities_[k]);
  }

  static constexpr double kSphereNodeTol = 1e-9;

 private:
  Trajectory() = default;
  std::size_t segment_of(double t) const;

  std::vector<double> times_;
  std::vector<Vec> positions_, velocities_, accelerations_;
  Chart chart_ = Chart::sphere;
  int direction_ = 1;
};

/// Monotone correspondence tau(t) produced by quadrature of a multiplier
/// nu along a trajectory: d tau = nu(q) dt. Node slopes (the multiplier
/// values) make the forward map a C^1 monotone Hermite interpolant; the
/// inverse is a safeguarded Newton solve on the same interpolant, so
/// inverse-after-forward is the identity to solver tolerance.
class ReparamMap {
 public:
  ReparamMap(std::vector<double> t_nodes, std::vector<double> tau_nodes,
             std::vector<double> nu_nodes, int multiplier_sign,
             double quad_error_rate);

  int multiplier_sign() const { return sign_; }
  const std::vector<double>& t_nodes() const { return t_nodes_; }
  const std::vector<double>& tau_nodes() const { return tau_nodes_; }
  double tau_begin() const { return tau_nodes_.front(); }
  double tau_end() const { return tau_nodes_.back(); }
  /// Node-halving estimate of the quadrature error per unit time.
  double quad_error_rate() const { return quad_error_rate_; }

  double forward(double t) const;
  double inverse(double tau) const;

 private:
  std::size_t segment_of_t(double t) const;
  std::size_t segment_of_tau(double tau) const;

  std::vector<double> t_nodes_, tau_nodes_, nu_nodes_;
  int sign_ = 1;
  double quad_error_rate_ = 0.0;
};

/// Scalar field (c + (q, M q))^p with diagonal M; the building block of the
/// flat-space testbed family.
struct AffinePower {
  double c = 1.0;
  Vec m;
  double p = 1.0;

  double base(const Vec& q) const { return c + q.dot(m.cwiseProduct(q)); }
  double value(const Vec& q) const;
  Vec grad(const Vec& q) const;
  /// grad log value = grad / value.
  Vec grad_log(const Vec& q) const;
};

/// Axis-aligned domain box.
struct Box {
  Vec lo, hi;
  bool contains(const Vec& q, double slack = 0.0) const;
  Vec center() const { return 0.5 * (lo + hi); }
};

/// Scalar fields f and nu on a Euclidean chart, from the affine-power family,
/// plus an optional quadratic potential V(q) = 1/2 (q, K q). nu is either its
/// own affine-power field or linked as nu = f^alpha. Construction verifies
/// that f and nu are bounded away from zero at the box corners and center.
class FlatFieldConfig {
 public:
  FlatFieldConfig(int n, AffinePower f, AffinePower nu, Box domain,
                  std::optional<Vec> potential_k = std::nullopt);
  FlatFieldConfig(int n, AffinePower f, double alpha, Box domain,
                  std::optional<Vec> potential_k = std::nullopt);

  int n() const { return n_; }
  const Box& domain() const { return domain_; }
  bool has_potential() const { return potential_k_.has_value(); }
  std::optional<double> alpha() const { return alpha_; }

  double f(const Vec& q) const { return f_.value(q); }
  Vec grad_f(const Vec& q) const { return f_.grad(q); }
  Vec grad_log_f(const Vec& q) const { return f_.grad_log(q); }

  double nu(const Vec& q) const;
  Vec grad_nu(const Vec& q) const;
  Vec grad_log_nu(const Vec& q) const;

  /// V(q) = 1/2 (q, K q); zero when no potential is configured.
  double potential(const Vec& q) const;
  Vec grad_potential(const Vec& q) const;

  void check_in_domain(const Vec& q) const;

 private:
  void validate();

  int n_;
  AffinePower f_;
  std::optional<AffinePower> nu_field_;
  std::optional<double> alpha_;
  std::optional<Vec> potential_k_;
  Box domain_;
};

}  // namespace chapball

#endif  // CHAPBALL_TYPES_HPP_
