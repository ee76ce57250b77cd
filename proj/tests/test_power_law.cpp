#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hho2d/power_law.hpp"

#include <random>

using namespace hho2d;

TEST_CASE("sigma on tensors")
{
  CHECK((sigma(Mat2(Mat2::Identity()), 1., 2.) - Mat2::Identity()).norm() < 1e-15);

  Mat2 tau;
  tau << 2., 0., 0., 0.;
  Mat2 expected;
  expected << 4., 0., 0., 0.; // |tau| = 2, mu |tau|^{r-2} tau with r = 3
  CHECK((sigma(tau, 1., 3.) - expected).norm() < 1e-14);

  CHECK(sigma(Mat2(Mat2::Zero()), 1., 1.5).norm() == 0.);
  CHECK(sigma(Vec2(Vec2::Zero()), 2., 1.5).norm() == 0.);
}

TEST_CASE("dsigma special cases")
{
  SUBCASE("r = 2 is mu times the identity map")
  {
    Mat2 tau = Mat2::Random();
    Eigen::Matrix4d D = dsigma_matrix(tau, 3., 2.);
    CHECK((D - 3. * Eigen::Matrix4d::Identity()).norm() < 1e-14);
  }

  SUBCASE("tau = 0, r = 3 is the zero map")
  {
    Eigen::Matrix4d D = dsigma_matrix(Mat2(Mat2::Zero()), 1., 3.);
    CHECK(D.norm() < 1e-9);
  }
}

TEST_CASE("dsigma matches central finite differences of sigma")
{
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(-1., 1.);
  const double step = 1e-6;
  for (double r : {2., 2.5, 3., 4.}) {
    for (int trial = 0; trial < 10; ++trial) {
      Mat2 tau, eta;
      tau << unif(rng), unif(rng), unif(rng), unif(rng);
      eta << unif(rng), unif(rng), unif(rng), unif(rng);
      Mat2 fd = (sigma(Mat2(tau + step * eta), 1., r) - sigma(Mat2(tau - step * eta), 1., r)) /
                (2. * step);
      Eigen::Matrix4d D = dsigma_matrix(tau, 1., r);
      Eigen::Vector4d e(eta(0, 0), eta(0, 1), eta(1, 0), eta(1, 1));
      Eigen::Vector4d de = D * e;
      Mat2 an;
      an << de(0), de(1), de(2), de(3);
      CHECK((an - fd).norm() <= 1e-5 * std::max(1., fd.norm()));
    }
  }
}

TEST_CASE("dsigma on vectors matches finite differences")
{
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> unif(-1., 1.);
  const double step = 1e-6;
  for (double r : {2., 3., 4.}) {
    Vec2 tau(unif(rng), unif(rng)), eta(unif(rng), unif(rng));
    Vec2 fd =
        (sigma(Vec2(tau + step * eta), 1., r) - sigma(Vec2(tau - step * eta), 1., r)) / (2. * step);
    Vec2 an = dsigma_matrix(tau, 1., r) * eta;
    CHECK((an - fd).norm() <= 1e-5 * std::max(1., fd.norm()));
  }
}
