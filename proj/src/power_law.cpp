#include "hho2d/power_law.hpp"

#include <cmath>

namespace hho2d {

Mat2 sigma(const Mat2 &tau, double mu, double r)
{
  double n = tau.norm();
  if (n == 0.) {
    return Mat2::Zero();
  }
  return mu * std::pow(n, r - 2.) * tau;
}

Vec2 sigma(const Vec2 &tau, double mu, double r)
{
  double n = tau.norm();
  if (n == 0.) {
    return Vec2::Zero();
  }
  return mu * std::pow(n, r - 2.) * tau;
}

SigmaDerivative dsigma_coefficients(double tau_norm, double mu, double r)
{
  double n = tau_norm;
  if (n < kSigmaRegularization) {
    n = std::sqrt(n * n + kSigmaRegularization * kSigmaRegularization);
  }
  SigmaDerivative d;
  d.a = mu * std::pow(n, r - 2.);
  d.b = mu * (r - 2.) * std::pow(n, r - 4.);
  return d;
}

Eigen::Matrix4d dsigma_matrix(const Mat2 &tau, double mu, double r)
{
  SigmaDerivative d = dsigma_coefficients(tau.norm(), mu, r);
  Eigen::Vector4d t(tau(0, 0), tau(0, 1), tau(1, 0), tau(1, 1));
  return d.a * Eigen::Matrix4d::Identity() + d.b * t * t.transpose();
}

Mat2 dsigma_matrix(const Vec2 &tau, double mu, double r)
{
  SigmaDerivative d = dsigma_coefficients(tau.norm(), mu, r);
  return d.a * Mat2::Identity() + d.b * tau * tau.transpose();
}

} // namespace hho2d
