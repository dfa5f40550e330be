// chapball - metrics, sphere maps, and the reduction tensors Sigma, B, C
#ifndef CHAPBALL_GEOMETRY_HPP_
#define CHAPBALL_GEOMETRY_HPP_

#include "chapball/types.hpp"

namespace chapball {

/// The bilinear forms the library evaluates on sphere tangent spaces:
///   reduced_g0       <X,Y>_0 = (1/eps^2)((AX,Y)(Ag,g) - (Ag,X)(Ag,Y))
///   chaplygin_gstar  (g,Ag)^{1/eps-2}((AX,Y)(Ag,g) - (Ag,X)(Ag,Y))
///   conformal_x      (x,A^{-1}x)^{-1/eps}(X,Y)
///   standard         (X,Y)
/// Every kind except standard needs a BallConfig.
enum class MetricKind { reduced_g0, chaplygin_gstar, conformal_x, standard };

/// Evaluates the bilinear form at a base point on the unit sphere. Inputs must
/// be tangent at base to 1e-9.
double inner(MetricKind metric, const BallConfig& cfg, const Vec& base,
             const Vec& X, const Vec& Y);

/// x = A^{1/2} gamma / sqrt((A gamma, gamma)); maps the unit sphere to itself.
Vec gamma_to_x(const BallConfig& cfg, const Vec& gamma);

/// Algebraic inverse of gamma_to_x: gamma = A^{-1/2} x / sqrt((A^{-1}x, x)).
Vec x_to_gamma(const BallConfig& cfg, const Vec& x);

/// Differential of gamma_to_x at gamma applied to a velocity.
Vec gamma_to_x_velocity(const BallConfig& cfg, const Vec& gamma,
                        const Vec& gamma_dot);

/// (a ^ b) c = a (b,c) - b (a,c).
Vec wedge_apply(const Vec& a, const Vec& b, const Vec& c);

/// I(a ^ b) c = (Aa ^ Ab) c for the special inertia operator.
Vec inertia_wedge_apply(const BallConfig& cfg, const Vec& a, const Vec& b,
                        const Vec& c);

/// The (0,3) reduction tensor
///   Sigma_g(X,Y,Z) = ((2 eps - 1)/eps^3) (I(g ^ X) Y, Z),
/// antisymmetric in (Y,Z); identically zero iff eps = 1/2.
double sigma(const BallConfig& cfg, const Vec& gamma, const Vec& X,
             const Vec& Y, const Vec& Z);

/// B(X,Y): the tangent vector with <B(X,Y),Z>_0 = Sigma(X,Y,Z) for all
/// tangent Z, solved against a tangent basis through the g_0 Gram matrix.
Vec b_tensor(const BallConfig& cfg, const Vec& gamma, const Vec& X,
             const Vec& Y);

/// C(Y,Z): the tangent vector with <X,C(Y,Z)>_0 = Sigma(X,Y,Z); skew in (Y,Z).
Vec c_tensor(const BallConfig& cfg, const Vec& gamma, const Vec& Y,
             const Vec& Z);

/// Orthonormal basis of the Euclidean tangent space at a unit vector,
/// as the columns of an n x (n-1) matrix (Householder complement).
Mat tangent_basis(const Vec& base);

}  // namespace chapball

#endif  // CHAPBALL_GEOMETRY_HPP_
