// Acceptance suite: end-to-end checks of the solver against the predicted
// convergence rates and the structural solver invariants. Prints one
// PASS/FAIL line per criterion and exits nonzero when any criterion fails.

#include "hho2d/manufactured.hpp"
#include "hho2d/power_law.hpp"
#include "hho2d/norms.hpp"
#include "hho2d/study.hpp"
#include "hho2d/system.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hho2d;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string &)> run;
};

StudyConfig base_config(double r, double mu, double nu, int k, int levels)
{
  StudyConfig cfg;
  cfg.family = MeshFamily::Triangular;
  cfg.levels = levels;
  cfg.k = k;
  cfg.r = r;
  cfg.mu = mu;
  cfg.nu = nu;
  cfg.solver.continuation = (r > 2.); // warm starts through lower exponents
  return cfg;
}

std::vector<double> monitored_rates(const StudyReport &report)
{
  std::vector<std::pair<double, double>> levels;
  for (const auto &rec : report.levels) {
    if (rec.solved) {
      levels.emplace_back(rec.h, rec.err_monitored);
    }
  }
  return convergence_rates(levels);
}

std::string format_rates(const std::vector<double> &rates)
{
  std::ostringstream os;
  os.precision(3);
  os << "rates:";
  for (double r : rates) {
    os << ' ' << r;
  }
  return os.str();
}

BrinkmanProblem problem_from_case(const ManufacturedCase &c)
{
  BrinkmanProblem p;
  p.mu = c.mu;
  p.nu = c.nu;
  p.r = c.r;
  p.momentum_source = [c](const Vec2 &x) { return c.momentum_source(x); };
  p.mass_source = [c](const Vec2 &x) { return c.mass_source(x); };
  p.dirichlet = [c](const Vec2 &x) { return c.velocity(x); };
  return p;
}

//------------------------------------------------------------------------------
// 1. Linear Brinkman rates: slope >= 2(k+1) - 0.3, levels to n = 32.
//------------------------------------------------------------------------------
bool criterion_linear_rates(std::string &detail)
{
  bool ok = true;
  std::ostringstream os;
  for (int k : {0, 1, 2}) {
    StudyReport report = run_study(base_config(2., 1., 1., k, 4));
    std::vector<double> rates = monitored_rates(report);
    double last = rates.back();
    bool pass = report.all_solved && last >= 2. * (k + 1) - 0.3;
    ok = ok && pass;
    os << "k=" << k << " slope " << last << (pass ? " " : " [below target] ");
  }
  detail = os.str();
  return ok;
}

//------------------------------------------------------------------------------
// 2. Stokes-dominated power law, r = 3, mu = nu = 1.
//------------------------------------------------------------------------------
bool criterion_stokes_dominated(std::string &detail)
{
  std::ostringstream os;
  bool ok = true;

  StudyReport rep1 = run_study(base_config(3., 1., 1., 1, 4));
  std::vector<double> rates1 = monitored_rates(rep1);
  bool pass1 = rep1.all_solved;
  for (std::size_t i = rates1.size() - 2; i < rates1.size(); ++i) {
    pass1 = pass1 && std::abs(rates1[i] - 3.0) <= 0.35;
  }
  os << "k=1 " << format_rates(rates1) << (pass1 ? "" : " [outside 3.0+-0.35]") << "; ";

  StudyReport rep2 = run_study(base_config(3., 1., 1., 2, 4));
  std::vector<double> rates2 = monitored_rates(rep2);
  bool pass2 = rep2.all_solved && std::abs(rates2.back() - 4.5) <= 0.5;
  os << "k=2 " << format_rates(rates2) << (pass2 ? "" : " [outside 4.5+-0.5]") << "; ";

  StudyReport rep0 = run_study(base_config(3., 1., 1., 0, 4));
  std::vector<double> rates0 = monitored_rates(rep0);
  bool pass0 = rep0.all_solved && rates0.back() >= 1.5;
  os << "k=0 " << format_rates(rates0) << (pass0 ? "" : " [below 1.5]");

  detail = os.str();
  return pass0 && pass1 && pass2;
}

//------------------------------------------------------------------------------
// 3. Darcy-dominated, r = 3, mu = 1e-6: slopes 2/4/6 +- 0.4, >= 90% Darcy cells.
//------------------------------------------------------------------------------
bool criterion_darcy_dominated(std::string &detail)
{
  std::ostringstream os;
  bool ok = true;
  for (int k : {0, 1, 2}) {
    StudyReport report = run_study(base_config(3., 1e-6, 1., k, 4));
    std::vector<double> rates = monitored_rates(report);
    double target = 2. * (k + 1);
    bool pass = report.all_solved && std::abs(rates.back() - target) <= 0.4;
    for (const auto &rec : report.levels) {
      pass = pass && rec.darcy_fraction >= 0.9;
    }
    ok = ok && pass;
    os << "k=" << k << " slope " << rates.back() << " darcy% "
       << 100. * report.levels.back().darcy_fraction << (pass ? "; " : " [fail]; ");
  }
  detail = os.str();
  return ok;
}

//------------------------------------------------------------------------------
// 4. Regime crossing, r = 3, mu = 1e-4: median friction dips below 1 and the
//    slope changes between the first and the last level pair.
//------------------------------------------------------------------------------
bool criterion_regime_crossing(std::string &detail)
{
  StudyReport report = run_study(base_config(3., 1e-4, 1., 1, 5));
  std::vector<double> rates = monitored_rates(report);
  bool median_crosses = false;
  std::ostringstream os;
  os << "medians:";
  for (const auto &rec : report.levels) {
    os.precision(3);
    os << ' ' << rec.median_friction;
    median_crosses = median_crosses || rec.median_friction < 1.;
  }
  os << "; " << format_rates(rates);
  bool slope_changes = rates.back() > rates.front();
  os << (median_crosses ? "" : " [median never < 1]")
     << (slope_changes ? "" : " [last slope not above first]");
  detail = os.str();
  return report.all_solved && median_crosses && slope_changes;
}

//------------------------------------------------------------------------------
// 5. Operator identities on every generated and shipped mesh, k in {0,1,2}.
//------------------------------------------------------------------------------
bool criterion_operator_identities(std::string &detail)
{
  const double tol = 1e-11;
  const int quad_degree = 20;
  double worst = 0.;
  std::string worst_what = "none";

  auto record = [&](double value, const std::string &what) {
    if (value > worst) {
      worst = value;
      worst_what = what;
    }
  };

  auto w = [](const Vec2 &x) {
    return Vec2(std::sin(1.3 * x.x()) * std::cos(0.7 * x.y()) + x.x() * x.y(),
                std::cos(1.1 * x.x() * x.y()) - 0.5 * x.y());
  };
  auto grad_w = [](const Vec2 &x) {
    Mat2 G;
    G(0, 0) = 1.3 * std::cos(1.3 * x.x()) * std::cos(0.7 * x.y()) + x.y();
    G(0, 1) = -0.7 * std::sin(1.3 * x.x()) * std::sin(0.7 * x.y()) + x.x();
    G(1, 0) = -1.1 * x.y() * std::sin(1.1 * x.x() * x.y());
    G(1, 1) = -1.1 * x.x() * std::sin(1.1 * x.x() * x.y()) - 0.5;
    return G;
  };

  std::vector<Mesh> meshes;
  meshes.push_back(Mesh::triangular(2));
  meshes.push_back(Mesh::triangular(4));
  meshes.push_back(Mesh::cartesian(2));
  meshes.push_back(Mesh::cartesian(4));
  meshes.push_back(Mesh::load(std::string(HHO2D_MESH_DIR) + "/hexagonal/hex_1.json"));
  meshes.push_back(Mesh::load(std::string(HHO2D_MESH_DIR) + "/hexagonal/hex_2.json"));

  std::mt19937 rng(77);
  for (const Mesh &m : meshes) {
    for (int k : {0, 1, 2}) {
      for (std::size_t iT = 0; iT < m.n_cells(); ++iT) {
        LocalOperators ops = build_local_operators(m, iT, k);
        const Eigen::Index Nk = static_cast<Eigen::Index>(ops.basis_k.dim());
        Eigen::VectorXd dofs = interpolate_local(w, m, iT, k, quad_degree);
        QuadratureRule quad = cell_quadrature(m, iT, quad_degree);

        // G o I = pi grad, compared pointwise as reconstructed fields
        Eigen::MatrixXd V = ops.basis_k.values_at(quad.points);
        Eigen::VectorXd g = ops.gradient * dofs;
        for (int c = 0; c < 4; ++c) {
          Eigen::VectorXd proj = l2_project(
              ScalarField([&](const Vec2 &x) { return grad_w(x)(c / 2, c % 2); }), ops.basis_k,
              quad);
          record((V * (g.segment(c * Nk, Nk) - proj)).lpNorm<Eigen::Infinity>(), "commutation");
        }

        // D o I = pi div
        Eigen::VectorXd d = ops.divergence * dofs;
        Eigen::VectorXd pdiv = l2_project(
            ScalarField([&](const Vec2 &x) { return grad_w(x).trace(); }), ops.basis_k, quad);
        record((V * (d - pdiv)).lpNorm<Eigen::Infinity>(), "divergence commutation");

        // D = tr G
        record((ops.gradient.topRows(Nk) + ops.gradient.bottomRows(Nk) - ops.divergence)
                   .lpNorm<Eigen::Infinity>(),
               "trace identity");

        // Delta o I annihilates interpolants of P^{k+1} fields
        auto poly = [&](const Vec2 &x) {
          Vec2 y = x - m.geometry(iT).centroid;
          double v = 1. + y.x() - 0.5 * y.y();
          for (int d = 2; d <= k + 1; ++d) {
            v += std::pow(y.x(), d) - 0.7 * std::pow(y.y(), d - 1) * y.x();
          }
          return Vec2(v, -2. * v + y.y());
        };
        Eigen::VectorXd pdofs = interpolate_local(poly, m, iT, k, quad_degree);
        for (std::size_t i = 0; i < ops.layout.n_faces; ++i) {
          record((ops.boundary_difference[i] * pdofs).lpNorm<Eigen::Infinity>(),
                 "boundary difference annihilation");
        }

        // P_d orthogonality and constant reproduction
        Eigen::VectorXd rnd(static_cast<Eigen::Index>(ops.layout.total()));
        std::uniform_real_distribution<double> unif(-1., 1.);
        for (Eigen::Index i = 0; i < rnd.size(); ++i) {
          rnd(i) = unif(rng);
        }
        record(darcy_orthogonality_residual(ops, rnd), "darcy orthogonality");

        Eigen::VectorXd cdofs = interpolate_local(
            [](const Vec2 &) { return Vec2(0.4, -0.9); }, m, iT, k, quad_degree);
        Eigen::VectorXd pd = ops.darcy_velocity * cdofs;
        pd(0) -= 0.4;
        pd(Nk) -= -0.9;
        record(pd.lpNorm<Eigen::Infinity>(), "darcy constant reproduction");
      }
    }
  }
  std::ostringstream os;
  os << "max residual " << worst << " (" << worst_what << ")";
  detail = os.str();
  return worst <= tol;
}

//------------------------------------------------------------------------------
// 6. Solver invariants.
//------------------------------------------------------------------------------
bool criterion_solver_invariants(std::string &detail)
{
  std::ostringstream os;
  bool ok = true;

  // r = 2 converges in one Newton iteration.
  {
    Mesh m = Mesh::triangular(8);
    ManufacturedCase c = build_case(2., 1., 1.);
    BrinkmanSystem sys(m, 1, problem_from_case(c));
    Eigen::VectorXd state = sys.zero_state();
    NewtonReport rep = sys.newton_solve(state);
    bool pass = rep.converged && rep.iterations == 1;
    ok = ok && pass;
    os << "newton(r=2): " << rep.iterations << " iteration(s)" << (pass ? "; " : " [fail]; ");

    // post-solve mass identity and pressure mean
    double worst_mass = 0.;
    const Eigen::VectorXd u = sys.velocity(state);
    for (std::size_t iT = 0; iT < m.n_cells(); ++iT) {
      const LocalOperators &ops = sys.local_operators()[iT];
      Eigen::VectorXd u_loc = gather_local_dofs(m, sys.dofs(), iT, u, sys.boundary_values());
      Eigen::VectorXd div = ops.divergence * u_loc;
      Eigen::VectorXd pig =
          l2_project(ScalarField([&c](const Vec2 &x) { return c.mass_source(x); }), ops.basis_k,
                     cell_quadrature(m, iT, nonpoly_quadrature_degree(1)));
      worst_mass = std::max(worst_mass, (div - pig).lpNorm<Eigen::Infinity>());
    }
    bool mass_ok = worst_mass < 1e-9;
    double pmean = std::abs(sys.pressure_integral(state));
    bool pmean_ok = pmean <= 1e-10;
    ok = ok && mass_ok && pmean_ok;
    os << "mass defect " << worst_mass << (mass_ok ? "; " : " [fail]; ");
    os << "|int p| " << pmean << (pmean_ok ? "; " : " [fail]; ");
  }

  // Jacobian vs finite differences at random states for r in {2, 3, 4}.
  {
    Mesh m = Mesh::triangular(2);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    double worst = 0.;
    for (double r : {2., 3., 4.}) {
      ManufacturedCase c = build_case(r, 1., 1.);
      BrinkmanSystem sys(m, 1, problem_from_case(c));
      for (int s = 0; s < 5; ++s) {
        Eigen::VectorXd x(sys.state_size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          x(i) = unif(rng);
        }
        Eigen::SparseMatrix<double> J = sys.jacobian(x);
        Eigen::VectorXd dvec(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          dvec(i) = unif(rng);
        }
        dvec /= dvec.norm();
        const double step = 1e-7;
        Eigen::VectorXd fd =
            (sys.residual(x + step * dvec) - sys.residual(x - step * dvec)) / (2. * step);
        worst = std::max(worst, ((J * dvec - fd).norm()) / std::max(1., fd.norm()));
      }
    }
    bool pass = worst <= 1e-5;
    ok = ok && pass;
    os << "max FD deviation " << worst << (pass ? "" : " [fail]");
  }

  detail = os.str();
  return ok;
}

//------------------------------------------------------------------------------
// 7. Manufactured-data oracle.
//------------------------------------------------------------------------------
bool criterion_manufactured_oracle(std::string &detail)
{
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  double worst = 0.;
  for (double r : {2., 3., 4.}) {
    for (auto [mu, nu] : {std::pair{1., 1.}, {1e-6, 1.}, {1., 0.}}) {
      ManufacturedCase c = build_case(r, mu, nu);
      for (int t = 0; t < 25; ++t) {
        Vec2 x(unif(rng), unif(rng));
        Vec2 div_sigma = Vec2::Zero();
        const double step = 1e-6;
        for (int j = 0; j < 2; ++j) {
          Vec2 e = Vec2::Zero();
          e(j) = step;
          Mat2 plus = sigma(c.velocity_gradient(x + e), c.mu, c.r);
          Mat2 minus = sigma(c.velocity_gradient(x - e), c.mu, c.r);
          div_sigma += (plus.col(j) - minus.col(j)) / (2. * step);
        }
        Vec2 fd = -div_sigma + c.nu * c.velocity(x) + c.pressure_gradient(x);
        Vec2 an = c.momentum_source(x);
        worst = std::max(worst, (an - fd).norm() / std::max(1., fd.norm()));
      }
    }
  }
  std::ostringstream os;
  os << "max relative deviation " << worst;
  detail = os.str();
  return worst <= 1e-6;
}

//------------------------------------------------------------------------------
// 8. Hexagonal family run, r = 3, mu = 1e-2, k = 1.
//------------------------------------------------------------------------------
bool criterion_hexagonal(std::string &detail)
{
  StudyConfig cfg;
  cfg.family = MeshFamily::File;
  cfg.mesh_dir = std::string(HHO2D_MESH_DIR) + "/hexagonal";
  cfg.levels = 4;
  cfg.k = 1;
  cfg.r = 3.;
  cfg.mu = 1e-2;
  cfg.nu = 1.;
  cfg.solver.continuation = true;
  StudyReport report = run_study(cfg);
  std::vector<double> rates = monitored_rates(report);
  std::ostringstream os;
  os << format_rates(rates);
  detail = os.str();
  return report.all_solved && std::abs(rates.back() - 3.0) <= 0.5;
}

} // namespace

int main()
{
  std::vector<Criterion> criteria = {
      {1, "linear Brinkman rates (r=2, k=0..2)", criterion_linear_rates},
      {2, "Stokes-dominated rates (r=3, mu=nu=1)", criterion_stokes_dominated},
      {3, "Darcy-dominated rates (r=3, mu=1e-6)", criterion_darcy_dominated},
      {4, "regime crossing (r=3, mu=1e-4)", criterion_regime_crossing},
      {5, "operator identities on all mesh families", criterion_operator_identities},
      {6, "solver invariants", criterion_solver_invariants},
      {7, "manufactured-data oracle", criterion_manufactured_oracle},
      {8, "hexagonal family rates (r=3, mu=1e-2, k=1)", criterion_hexagonal},
  };

  int failures = 0;
  for (const Criterion &c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      pass = c.run(detail);
    } catch (const std::exception &e) {
      detail = std::string("exception: ") + e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%s; %.1fs)\n", pass ? "PASS" : "FAIL", c.number,
                c.name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) {
      ++failures;
    }
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
  } else {
    std::printf("all criteria passed\n");
  }
  return failures == 0 ? 0 : 1;
}
