#include "hho2d/manufactured.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hho2d {

namespace {

constexpr double PI = 3.14159265358979323846;

} // namespace

ManufacturedCase build_case(double r, double mu, double nu)
{
  if (r <= 1.) {
    throw std::invalid_argument("manufactured case: r must exceed 1");
  }
  if (mu < 0. || nu < 0. || (mu == 0. && nu == 0.)) {
    throw std::invalid_argument("manufactured case: require mu, nu >= 0 and not both zero");
  }
  ManufacturedCase c;
  c.r = r;
  c.mu = mu;
  c.nu = nu;
  c.friction_global = (mu > 0.) ? nu / mu : std::numeric_limits<double>::infinity();
  c.chi_s = (mu > 0.) ? std::exp(-c.friction_global) : 0.;
  return c;
}

double ManufacturedCase::pressure(const Vec2 &x) const
{
  // The zero-mean representative: the pressure is only determined up to a
  // constant and the problem fixes int_Omega p = 0, so the trigonometric
  // profile is shifted by its mean 4/pi^2 over the unit square.
  return std::sin(PI * x.x()) * std::sin(PI * x.y()) - 4. / (PI * PI);
}

Vec2 ManufacturedCase::pressure_gradient(const Vec2 &x) const
{
  return PI * Vec2(std::cos(PI * x.x()) * std::sin(PI * x.y()),
                   std::sin(PI * x.x()) * std::cos(PI * x.y()));
}

Vec2 ManufacturedCase::velocity(const Vec2 &x) const
{
  const double sx = std::sin(PI * x.x()), cx = std::cos(PI * x.x());
  const double sy = std::sin(PI * x.y()), cy = std::cos(PI * x.y());
  Vec2 uS(sx * cy, -cx * sy);
  Vec2 uD = (nu > 0.) ? Vec2(-PI / nu * cx * sy, -PI / nu * sx * cy) : Vec2::Zero();
  return chi_s * uS + (1. - chi_s) * uD;
}

Mat2 ManufacturedCase::velocity_gradient(const Vec2 &x) const
{
  const double sx = std::sin(PI * x.x()), cx = std::cos(PI * x.x());
  const double sy = std::sin(PI * x.y()), cy = std::cos(PI * x.y());
  Mat2 GS;
  GS << PI * cx * cy, -PI * sx * sy, PI * sx * sy, -PI * cx * cy;
  Mat2 GD = Mat2::Zero();
  if (nu > 0.) {
    const double a = PI * PI / nu;
    GD << a * sx * sy, -a * cx * cy, -a * cx * cy, a * sx * sy;
  }
  return chi_s * GS + (1. - chi_s) * GD;
}

Mat2 ManufacturedCase::velocity_hessian(int component, const Vec2 &x) const
{
  const double sx = std::sin(PI * x.x()), cx = std::cos(PI * x.x());
  const double sy = std::sin(PI * x.y()), cy = std::cos(PI * x.y());
  const double p2 = PI * PI;
  Mat2 HS, HD = Mat2::Zero();
  if (component == 0) {
    // u_S1 = sin(pi x) cos(pi y)
    HS << -p2 * sx * cy, -p2 * cx * sy, -p2 * cx * sy, -p2 * sx * cy;
    if (nu > 0.) {
      // u_D1 = -(pi/nu) cos(pi x) sin(pi y)
      const double a = PI * p2 / nu;
      HD << a * cx * sy, a * sx * cy, a * sx * cy, a * cx * sy;
    }
  } else {
    // u_S2 = -cos(pi x) sin(pi y)
    HS << p2 * cx * sy, p2 * sx * cy, p2 * sx * cy, p2 * cx * sy;
    if (nu > 0.) {
      // u_D2 = -(pi/nu) sin(pi x) cos(pi y)
      const double a = PI * p2 / nu;
      HD << a * sx * cy, a * cx * sy, a * cx * sy, a * sx * cy;
    }
  }
  return chi_s * HS + (1. - chi_s) * HD;
}

Vec2 ManufacturedCase::stress_divergence(const Vec2 &x) const
{
  const Mat2 G = velocity_gradient(x);
  const double n = G.norm();
  if (n < 1e-12) {
    return Vec2::Zero();
  }
  const Mat2 H0 = velocity_hessian(0, x);
  const Mat2 H1 = velocity_hessian(1, x);
  const Vec2 lap(H0.trace(), H1.trace());
  // (d_j G)_{il} = d^2 u_i / (dx_l dx_j) = H_i(l, j)
  Vec2 s; // s_j = G : d_j G
  for (int j = 0; j < 2; ++j) {
    s(j) = G.row(0).dot(H0.col(j)) + G.row(1).dot(H1.col(j));
  }
  return mu * (std::pow(n, r - 2.) * lap + (r - 2.) * std::pow(n, r - 4.) * (G * s));
}

Vec2 ManufacturedCase::momentum_source(const Vec2 &x) const
{
  return -stress_divergence(x) + nu * velocity(x) + pressure_gradient(x);
}

double ManufacturedCase::mass_source(const Vec2 &x) const
{
  if (nu == 0.) {
    return 0.; // u = u_S is divergence-free
  }
  return (1. - chi_s) * 2. * PI * PI / nu * std::sin(PI * x.x()) * std::sin(PI * x.y());
}

} // namespace hho2d
