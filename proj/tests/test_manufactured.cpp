#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hho2d/manufactured.hpp"
#include "hho2d/power_law.hpp"

#include <cmath>
#include <random>

using namespace hho2d;

namespace {

// f assembled from central finite differences of sigma(grad u) plus the
// analytic Darcy and pressure terms; the independent oracle for the chain rule.
Vec2 momentum_source_fd(const ManufacturedCase &c, const Vec2 &x, double step)
{
  Vec2 div_sigma = Vec2::Zero();
  for (int j = 0; j < 2; ++j) {
    Vec2 e = Vec2::Zero();
    e(j) = step;
    Mat2 plus = sigma(c.velocity_gradient(x + e), c.mu, c.r);
    Mat2 minus = sigma(c.velocity_gradient(x - e), c.mu, c.r);
    div_sigma += (plus.col(j) - minus.col(j)) / (2. * step);
  }
  return -div_sigma + c.nu * c.velocity(x) + c.pressure_gradient(x);
}

} // namespace

TEST_CASE("case construction and limits")
{
  CHECK_THROWS_AS(build_case(0.9, 1., 1.), std::invalid_argument);
  CHECK_THROWS_AS(build_case(2., 0., 0.), std::invalid_argument);

  SUBCASE("pure Stokes: nu = 0")
  {
    ManufacturedCase c = build_case(2., 1., 0.);
    CHECK(c.chi_s == 1.);
    CHECK(c.velocity(Vec2(0.5, 0.5)).norm() < 1e-15);
    // trigonometric profile value 1 at the center, shifted to zero mean
    CHECK(c.pressure(Vec2(0.5, 0.5)) ==
          doctest::Approx(1. - 4. / (M_PI * M_PI)).epsilon(1e-14));
    CHECK(c.mass_source(Vec2(0.3, 0.7)) == 0.);
  }

  SUBCASE("large mu: u tends to u_S")
  {
    ManufacturedCase c = build_case(3., 1e8, 1.);
    Vec2 x(0.25, 0.4);
    ManufacturedCase stokes = build_case(3., 1., 0.);
    CHECK((c.velocity(x) - stokes.velocity(x)).norm() < 1e-6);
  }

  SUBCASE("mu = 0 gives the Darcy field")
  {
    ManufacturedCase c = build_case(2., 0., 2.);
    CHECK(c.chi_s == 0.);
    Vec2 x(0.3, 0.6);
    CHECK((c.nu * c.velocity(x) + c.pressure_gradient(x)).norm() < 1e-13);
  }
}

TEST_CASE("structural identities of the limit fields")
{
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.05, 0.95);

  SUBCASE("u_S is divergence-free")
  {
    ManufacturedCase c = build_case(3., 1., 0.); // u = u_S
    for (int t = 0; t < 25; ++t) {
      Vec2 x(unif(rng), unif(rng));
      CHECK(std::abs(c.velocity_gradient(x).trace()) < 1e-13);
    }
  }

  SUBCASE("nu u_D + grad p = 0")
  {
    ManufacturedCase c = build_case(3., 0., 0.7); // u = u_D
    for (int t = 0; t < 25; ++t) {
      Vec2 x(unif(rng), unif(rng));
      CHECK((c.nu * c.velocity(x) + c.pressure_gradient(x)).norm() < 1e-13);
    }
  }

  SUBCASE("gradient and hessian match finite differences")
  {
    ManufacturedCase c = build_case(3., 1., 1.);
    const double step = 1e-6;
    for (int t = 0; t < 10; ++t) {
      Vec2 x(unif(rng), unif(rng));
      for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e(j) = step;
        Vec2 fd_col = (c.velocity(x + e) - c.velocity(x - e)) / (2. * step);
        CHECK((c.velocity_gradient(x).col(j) - fd_col).norm() < 1e-8);
        Mat2 fd_hess_col = (c.velocity_gradient(x + e) - c.velocity_gradient(x - e)) / (2. * step);
        // (grad u)_ij = d_j u_i, so column j of the FD difference of grad u
        // stacks d_j of every first derivative.
        for (int comp = 0; comp < 2; ++comp) {
          for (int l = 0; l < 2; ++l) {
            CHECK(c.velocity_hessian(comp, x)(l, j) ==
                  doctest::Approx(fd_hess_col(comp, l)).epsilon(1e-6));
          }
        }
      }
    }
  }

  SUBCASE("mass source is the trace of the gradient")
  {
    for (auto [mu, nu] : {std::pair{1., 1.}, {1e-6, 1.}, {1., 0.}}) {
      ManufacturedCase c = build_case(3., mu, nu);
      for (int t = 0; t < 10; ++t) {
        Vec2 x(unif(rng), unif(rng));
        CHECK(c.mass_source(x) == doctest::Approx(c.velocity_gradient(x).trace()).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("analytic momentum source matches the finite-difference construction")
{
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  for (double r : {2., 3., 4.}) {
    for (auto [mu, nu] : {std::pair{1., 1.}, {1e-6, 1.}, {1., 0.}}) {
      ManufacturedCase c = build_case(r, mu, nu);
      for (int t = 0; t < 25; ++t) {
        Vec2 x(unif(rng), unif(rng));
        Vec2 analytic = c.momentum_source(x);
        Vec2 fd = momentum_source_fd(c, x, 1e-6);
        CHECK((analytic - fd).norm() <= 1e-6 * std::max(1., fd.norm()));
      }
    }
  }
}
