#include "chapball/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chapball {

namespace {

// Cubic Hermite basis on s in [0,1]; exact at the endpoints.
Vec hermite(double s, double h, const Vec& p0, const Vec& d0, const Vec& p1,
            const Vec& d1) {
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * p0 + (h10 * h) * d0 + h01 * p1 + (h11 * h) * d1;
}

double hermite1(double s, double h, double p0, double d0, double p1,
                double d1) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * d0 +
         (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * h * d1;
}

// d/dt of the scalar Hermite interpolant.
double hermite1_deriv(double s, double h, double p0, double d0, double p1,
                      double d1) {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * h * d0 +
          (-6 * s2 + 6 * s) * p1 + (3 * s2 - 2 * s) * h * d1) /
         h;
}

Vec hermite_deriv(double s, double h, const Vec& p0, const Vec& d0,
                  const Vec& p1, const Vec& d1) {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) / h) * p0 + (3 * s2 - 4 * s + 1) * d0 +
         ((-6 * s2 + 6 * s) / h) * p1 + (3 * s2 - 2 * s) * d1;
}

}  // namespace

BallConfig::BallConfig(int n, Vec a, double epsilon)
    : n_(n), a_(std::move(a)), epsilon_(epsilon) {
  if (n_ < 2) throw std::invalid_argument("BallConfig: dimension n must be >= 2");
  if (a_.size() != n_)
    throw std::invalid_argument("BallConfig: a has wrong length");
  for (int i = 0; i < n_; ++i) {
    if (!(a_[i] > 0.0))
      throw std::invalid_argument("BallConfig: inertia parameters must be positive");
  }
  if (epsilon_ == 0.0)
    throw std::invalid_argument("BallConfig: epsilon must be nonzero");
  a_inv_ = a_.cwiseInverse();
  a_sqrt_ = a_.cwiseSqrt();
}

BallConfig make_ball_config(int n, const Vec& a, double epsilon) {
  return BallConfig(n, a, epsilon);
}

SphereState::SphereState(Vec gamma, Vec gamma_dot)
    : gamma_(std::move(gamma)), gamma_dot_(std::move(gamma_dot)) {
  if (gamma_.size() != gamma_dot_.size())
    throw std::invalid_argument("SphereState: dimension mismatch");
  if (gamma_.size() < 2)
    throw std::invalid_argument("SphereState: dimension must be >= 2");
  const double norm_defect = std::abs(gamma_.squaredNorm() - 1.0);
  if (norm_defect > kConstructionTol)
    throw std::invalid_argument("SphereState: position not on the unit sphere");
  const double tangency = std::abs(gamma_.dot(gamma_dot_));
  if (tangency > kConstructionTol * std::max(1.0, gamma_dot_.norm()))
    throw std::invalid_argument("SphereState: velocity not tangent");
}

SphereState project_state(const Vec& gamma_raw, const Vec& gamma_dot_raw) {
  const double norm = gamma_raw.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument("project_state: zero position vector");
  Vec gamma = gamma_raw / norm;
  Vec dot = gamma_dot_raw - gamma_dot_raw.dot(gamma) * gamma;
  return SphereState(std::move(gamma), std::move(dot));
}

Trajectory Trajectory::from_nodes(std::vector<double> times,
                                  std::vector<Vec> positions,
                                  std::vector<Vec> velocities,
                                  std::vector<Vec> accelerations, Chart chart) {
  if (times.size() < 2)
    throw std::invalid_argument("Trajectory: need at least two samples");
  if (positions.size() != times.size() || velocities.size() != times.size() ||
      accelerations.size() != times.size())
    throw std::invalid_argument("Trajectory: node arrays of unequal length");
  const int dir = times[1] > times[0] ? 1 : -1;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (dir * (times[k + 1] - times[k]) <= 0.0)
      throw std::invalid_argument("Trajectory: times not strictly monotone");
  }
  if (chart == Chart::sphere) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double nd = std::abs(positions[k].squaredNorm() - 1.0);
      const double td = std::abs(positions[k].dot(velocities[k]));
      if (nd > kSphereNodeTol ||
          td > kSphereNodeTol * std::max(1.0, velocities[k].norm()))
        throw std::invalid_argument("Trajectory: sphere-state invariant violated");
    }
  }
  Trajectory traj;
  traj.times_ = std::move(times);
  traj.positions_ = std::move(positions);
  traj.velocities_ = std::move(velocities);
  traj.accelerations_ = std::move(accelerations);
  traj.chart_ = chart;
  traj.direction_ = dir;
  return traj;
}

bool Trajectory::covers(double t) const {
  const double lo = direction_ > 0 ? times_.front() : times_.back();
  const double hi = direction_ > 0 ? times_.back() : times_.front();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  return t >= lo - slack && t <= hi + slack;
}

std::size_t Trajectory::segment_of(double t) const {
  if (!covers(t))
    throw std::out_of_range("Trajectory: time outside the stored range");
  // Binary search in direction-adjusted order.
  std::size_t lo = 0, hi = times_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (direction_ * (t - times_[mid]) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

Vec Trajectory::position_at(double t) const {
  const std::size_t k = segment_of(t);
  if (t == times_[k]) return positions_[k];
  if (t == times_[k + 1]) return positions_[k + 1];
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  return hermite(s, h, positions_[k], velocities_[k], positions_[k + 1],
                 velocities_[k + 1]);
}

Vec Trajectory::velocity_at(double t) const {
  const std::size_t k = segment_of(t);
  if (t == times_[k]) return velocities_[k];
  if (t == times_[k + 1]) return velocities_[k + 1];
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  return hermite(s, h, velocities_[k], accelerations_[k], velocities_[k + 1],
                 accelerations_[k + 1]);
}

Vec Trajectory::acceleration_at(double t) const {
  const std::size_t k = segment_of(t);
  if (t == times_[k]) return accelerations_[k];
  if (t == times_[k + 1]) return accelerations_[k + 1];
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  return hermite_deriv(s, h, velocities_[k], accelerations_[k],
                       velocities_[k + 1], accelerations_[k + 1]);
}

ReparamMap::ReparamMap(std::vector<double> t_nodes,
                       std::vector<double> tau_nodes,
                       std::vector<double> nu_nodes, int multiplier_sign,
                       double quad_error_rate)
    : t_nodes_(std::move(t_nodes)),
      tau_nodes_(std::move(tau_nodes)),
      nu_nodes_(std::move(nu_nodes)),
      sign_(multiplier_sign),
      quad_error_rate_(quad_error_rate) {
  if (t_nodes_.size() < 2 || tau_nodes_.size() != t_nodes_.size() ||
      nu_nodes_.size() != t_nodes_.size())
    throw std::invalid_argument("ReparamMap: node arrays of unequal length");
  if (sign_ != 1 && sign_ != -1)
    throw std::invalid_argument("ReparamMap: multiplier_sign must be +1 or -1");
  const int t_dir = t_nodes_[1] > t_nodes_[0] ? 1 : -1;
  for (std::size_t k = 0; k + 1 < t_nodes_.size(); ++k) {
    if (t_dir * (t_nodes_[k + 1] - t_nodes_[k]) <= 0.0)
      throw std::invalid_argument("ReparamMap: t nodes not strictly monotone");
    if (t_dir * sign_ * (tau_nodes_[k + 1] - tau_nodes_[k]) <= 0.0)
      throw std::invalid_argument(
          "ReparamMap: tau nodes not strictly monotone with multiplier sign");
  }
}

std::size_t ReparamMap::segment_of_t(double t) const {
  const int dir = t_nodes_[1] > t_nodes_[0] ? 1 : -1;
  const double lo = dir > 0 ? t_nodes_.front() : t_nodes_.back();
  const double hi = dir > 0 ? t_nodes_.back() : t_nodes_.front();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (t < lo - slack || t > hi + slack)
    throw std::out_of_range("ReparamMap: t outside the map range");
  std::size_t a = 0, b = t_nodes_.size() - 1;
  while (b - a > 1) {
    const std::size_t mid = (a + b) / 2;
    if (dir * (t - t_nodes_[mid]) >= 0.0)
      a = mid;
    else
      b = mid;
  }
  return a;
}

std::size_t ReparamMap::segment_of_tau(double tau) const {
  const int dir = tau_nodes_[1] > tau_nodes_[0] ? 1 : -1;
  const double lo = dir > 0 ? tau_nodes_.front() : tau_nodes_.back();
  const double hi = dir > 0 ? tau_nodes_.back() : tau_nodes_.front();
  const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (tau < lo - slack || tau > hi + slack)
    throw std::out_of_range("ReparamMap: tau outside the map range");
  std::size_t a = 0, b = tau_nodes_.size() - 1;
  while (b - a > 1) {
    const std::size_t mid = (a + b) / 2;
    if (dir * (tau - tau_nodes_[mid]) >= 0.0)
      a = mid;
    else
      b = mid;
  }
  return a;
}

double ReparamMap::forward(double t) const {
  const std::size_t k = segment_of_t(t);
  if (t == t_nodes_[k]) return tau_nodes_[k];
  if (t == t_nodes_[k + 1]) return tau_nodes_[k + 1];
  const double h = t_nodes_[k + 1] - t_nodes_[k];
  const double s = (t - t_nodes_[k]) / h;
  return hermite1(s, h, tau_nodes_[k], nu_nodes_[k], tau_nodes_[k + 1],
                  nu_nodes_[k + 1]);
}

double ReparamMap::inverse(double tau) const {
  const std::size_t k = segment_of_tau(tau);
  if (tau == tau_nodes_[k]) return t_nodes_[k];
  if (tau == tau_nodes_[k + 1]) return t_nodes_[k + 1];
  double lo = t_nodes_[k], hi = t_nodes_[k + 1];
  if (lo > hi) std::swap(lo, hi);
  const double h = t_nodes_[k + 1] - t_nodes_[k];
  // Newton iteration on the Hermite segment, bisection-safeguarded; the
  // segment map is strictly monotone so the bracket never degenerates.
  double t = t_nodes_[k] +
             h * (tau - tau_nodes_[k]) / (tau_nodes_[k + 1] - tau_nodes_[k]);
  const double tau_scale =
      std::max({1.0, std::abs(tau_nodes_[k]), std::abs(tau_nodes_[k + 1])});
  for (int it = 0; it < 100; ++it) {
    const double s = (t - t_nodes_[k]) / h;
    const double val = hermite1(s, h, tau_nodes_[k], nu_nodes_[k],
                                tau_nodes_[k + 1], nu_nodes_[k + 1]) -
                       tau;
    if (std::abs(val) <= 1e-14 * tau_scale) return t;
    const double slope = hermite1_deriv(s, h, tau_nodes_[k], nu_nodes_[k],
                                        tau_nodes_[k + 1], nu_nodes_[k + 1]);
    double t_next = slope != 0.0 ? t - val / slope : 0.5 * (lo + hi);
    if (!(t_next > lo) || !(t_next < hi)) t_next = 0.5 * (lo + hi);
    // Maintain the bracket using monotonicity of the segment.
    const int seg_dir = (tau_nodes_[k + 1] - tau_nodes_[k]) *
                                (t_nodes_[k + 1] - t_nodes_[k]) >
                            0.0
                        ? 1
                        : -1;
    if (seg_dir * val > 0.0)
      (t_nodes_[k + 1] > t_nodes_[k] ? hi : lo) = t;
    else
      (t_nodes_[k + 1] > t_nodes_[k] ? lo : hi) = t;
    t = t_next;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(t))) break;
  }
  return t;
}

double AffinePower::value(const Vec& q) const {
  return std::pow(base(q), p);
}

Vec AffinePower::grad(const Vec& q) const {
  return (2.0 * p * std::pow(base(q), p - 1.0)) * m.cwiseProduct(q);
}

Vec AffinePower::grad_log(const Vec& q) const {
  return (2.0 * p / base(q)) * m.cwiseProduct(q);
}

bool Box::contains(const Vec& q, double slack) const {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] < lo[i] - slack || q[i] > hi[i] + slack) return false;
  }
  return true;
}

FlatFieldConfig::FlatFieldConfig(int n, AffinePower f, AffinePower nu,
                                 Box domain, std::optional<Vec> potential_k)
    : n_(n),
      f_(std::move(f)),
      nu_field_(std::move(nu)),
      potential_k_(std::move(potential_k)),
      domain_(std::move(domain)) {
  validate();
}

FlatFieldConfig::FlatFieldConfig(int n, AffinePower f, double alpha, Box domain,
                                 std::optional<Vec> potential_k)
    : n_(n),
      f_(std::move(f)),
      alpha_(alpha),
      potential_k_(std::move(potential_k)),
      domain_(std::move(domain)) {
  validate();
}

void FlatFieldConfig::validate() {
  if (n_ < 1) throw std::invalid_argument("FlatFieldConfig: n must be >= 1");
  if (f_.m.size() != n_)
    throw std::invalid_argument("FlatFieldConfig: f quadratic form has wrong size");
  if (nu_field_ && nu_field_->m.size() != n_)
    throw std::invalid_argument("FlatFieldConfig: nu quadratic form has wrong size");
  if (potential_k_ && potential_k_->size() != n_)
    throw std::invalid_argument("FlatFieldConfig: potential has wrong size");
  if (domain_.lo.size() != n_ || domain_.hi.size() != n_)
    throw std::invalid_argument("FlatFieldConfig: domain box has wrong size");
  for (int i = 0; i < n_; ++i) {
    if (!(domain_.lo[i] < domain_.hi[i]))
      throw std::invalid_argument("FlatFieldConfig: empty domain box");
  }

  // f and nu must stay away from zero on the box; the affine-power base is
  // monotone in each |q_i|, so corners plus center witness the extremes.
  std::vector<Vec> probes;
  probes.push_back(domain_.center());
  const int corners = 1 << n_;
  for (int mask = 0; mask < corners; ++mask) {
    Vec q(n_);
    for (int i = 0; i < n_; ++i)
      q[i] = (mask >> i) & 1 ? domain_.hi[i] : domain_.lo[i];
    probes.push_back(std::move(q));
  }
  constexpr double kMinField = 1e-10;
  for (const Vec& q : probes) {
    const double fb = f_.base(q);
    if (!(fb > kMinField))
      throw std::invalid_argument(
          "FlatFieldConfig: f vanishes (or loses sign) on the domain box");
    if (nu_field_) {
      const double nb = nu_field_->base(q);
      if (!(nb > kMinField))
        throw std::invalid_argument(
            "FlatFieldConfig: nu vanishes (or loses sign) on the domain box");
    }
    const double fv = std::abs(f_.value(q));
    const double nv = std::abs(nu(q));
    if (!(fv > kMinField) || !(nv > kMinField))
      throw std::invalid_argument(
          "FlatFieldConfig: field magnitude below threshold on the domain box");
  }
}

double FlatFieldConfig::nu(const Vec& q) const {
  if (nu_field_) return nu_field_->value(q);
  return std::pow(f_.value(q), *alpha_);
}

Vec FlatFieldConfig::grad_nu(const Vec& q) const {
  if (nu_field_) return nu_field_->grad(q);
  const double fv = f_.value(q);
  return (*alpha_ * std::pow(fv, *alpha_ - 1.0)) * f_.grad(q);
}

Vec FlatFieldConfig::grad_log_nu(const Vec& q) const {
  if (nu_field_) return nu_field_->grad_log(q);
  return *alpha_ * f_.grad_log(q);
}

double FlatFieldConfig::potential(const Vec& q) const {
  if (!potential_k_) return 0.0;
  return 0.5 * q.dot(potential_k_->cwiseProduct(q));
}

Vec FlatFieldConfig::grad_potential(const Vec& q) const {
  if (!potential_k_) return Vec::Zero(n_);
  return potential_k_->cwiseProduct(q);
}

void FlatFieldConfig::check_in_domain(const Vec& q) const {
  // Embedded trial steps may poke marginally past the box; allow a hair of
  // slack relative to the box size.
  const double scale = (domain_.hi - domain_.lo).cwiseAbs().maxCoeff();
  if (!domain_.contains(q, 1e-9 * scale))
    throw std::domain_error("FlatFieldConfig: point left the domain box");
}

}  // namespace chapball
