// Manufactured solution on the unit square for the power-law Brinkman problem.
//
// With the global friction coefficient C_f = nu / mu (+inf when mu = 0) and
// chi_S = exp(-C_f):
//   p        = sin(pi x) sin(pi y) - 4/pi^2   (zero-mean representative)
//   u        = chi_S u_S + (1 - chi_S) u_D
//   u_S      = ( sin(pi x) cos(pi y), -cos(pi x) sin(pi y) )   (divergence-free)
//   u_D      = -nu^{-1} grad p  (zero when nu = 0)             (nu u_D + grad p = 0)
//   g        = div u
//   f        = -div sigma(grad u) + nu u + grad p
// where div sigma(grad u) is assembled by the analytic chain rule
//   (div sigma)_i = mu ( |G|^{r-2} (lap u)_i
//                        + (r-2) |G|^{r-4} sum_j (G : d_j G) G_ij ),  G = grad u,
// returning a zero power-law contribution at points with |G| < 1e-12 (valid
// for r >= 2).

#ifndef HHO2D_MANUFACTURED_HPP
#define HHO2D_MANUFACTURED_HPP

#include "hho2d/types.hpp"

namespace hho2d {

struct ManufacturedCase {
  double r = 2.;
  double mu = 1.;
  double nu = 0.;
  double friction_global = 0.; ///< nu / mu, +inf when mu = 0
  double chi_s = 1.;           ///< exp(-friction_global)

  Vec2 velocity(const Vec2 &x) const;
  Mat2 velocity_gradient(const Vec2 &x) const; ///< (grad u)_ij = d_j u_i
  Mat2 velocity_hessian(int component, const Vec2 &x) const;
  double pressure(const Vec2 &x) const;
  Vec2 pressure_gradient(const Vec2 &x) const;

  /// div sigma(grad u), analytic chain rule.
  Vec2 stress_divergence(const Vec2 &x) const;
  /// f = -div sigma(grad u) + nu u + grad p.
  Vec2 momentum_source(const Vec2 &x) const;
  /// g = div u.
  double mass_source(const Vec2 &x) const;
};

/// Validates mu >= 0, nu >= 0, not both zero, r > 1.
ManufacturedCase build_case(double r, double mu, double nu);

} // namespace hho2d

#endif
