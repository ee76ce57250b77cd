#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hho2d/manufactured.hpp"
#include "hho2d/parallel.hpp"
#include "hho2d/system.hpp"

#include <random>

using namespace hho2d;

// The OpenMP path must produce bitwise-identical results to the serial
// reference: all reductions happen in fixed cell order.
TEST_CASE("parallel assembly is bitwise identical to the serial reference")
{
  Mesh m = Mesh::triangular(6);
  ManufacturedCase c = build_case(3., 1., 1.);
  BrinkmanProblem p;
  p.mu = c.mu;
  p.nu = c.nu;
  p.r = c.r;
  p.momentum_source = [&c](const Vec2 &x) { return c.momentum_source(x); };
  p.mass_source = [&c](const Vec2 &x) { return c.mass_source(x); };
  p.dirichlet = [&c](const Vec2 &x) { return c.velocity(x); };

  BrinkmanSystem serial(m, 1, p, /*parallel=*/false);
  BrinkmanSystem parallel(m, 1, p, /*parallel=*/true);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> unif(-0.3, 0.3);
  Eigen::VectorXd state(serial.state_size());
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    state(i) = unif(rng);
  }

  Eigen::VectorXd rs = serial.residual(state);
  Eigen::VectorXd rp = parallel.residual(state);
  CHECK((rs - rp).lpNorm<Eigen::Infinity>() == 0.);

  Eigen::MatrixXd Js = Eigen::MatrixXd(serial.jacobian(state));
  Eigen::MatrixXd Jp = Eigen::MatrixXd(parallel.jacobian(state));
  CHECK((Js - Jp).lpNorm<Eigen::Infinity>() == 0.);

  CHECK((serial.boundary_values() - parallel.boundary_values()).lpNorm<Eigen::Infinity>() == 0.);
}

TEST_CASE("parallel_for covers every index exactly once")
{
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, true);
  for (int h : hits) {
    CHECK(h == 1);
  }
  INFO("openmp available: ", openmp_available(), ", max threads: ", max_threads());
  CHECK(max_threads() >= 1);
}
