// Power-law stress sigma(tau) = mu |tau|^{r-2} tau (Frobenius norm) for 2x2
// tensors and 2-vectors, with sigma(0) = 0 for every r > 1, and its
// directional derivative used by the Newton linearization:
//   dsigma(tau)[eta] = mu |tau|^{r-2} eta + mu (r-2) |tau|^{r-4} (tau : eta) tau.
// Only the derivative is regularized: for |tau| < eps_reg = 1e-10 the norm
// powers use |tau|_eps = sqrt(|tau|^2 + eps_reg^2); residual evaluations stay
// exact.

#ifndef HHO2D_POWER_LAW_HPP
#define HHO2D_POWER_LAW_HPP

#include "hho2d/types.hpp"

#include <Eigen/Dense>

namespace hho2d {

inline constexpr double kSigmaRegularization = 1e-10;

Mat2 sigma(const Mat2 &tau, double mu, double r);
Vec2 sigma(const Vec2 &tau, double mu, double r);

/// Coefficients (a, b) such that dsigma(tau)[eta] = a eta + b (tau : eta) tau.
struct SigmaDerivative {
  double a = 0.;
  double b = 0.;
};

SigmaDerivative dsigma_coefficients(double tau_norm, double mu, double r);

/// dsigma(tau) as a 4x4 matrix acting on row-major vectorized 2x2 tensors.
Eigen::Matrix4d dsigma_matrix(const Mat2 &tau, double mu, double r);
/// dsigma(tau) as a 2x2 matrix acting on 2-vectors.
Mat2 dsigma_matrix(const Vec2 &tau, double mu, double r);

} // namespace hho2d

#endif
