#include "hho2d/study.hpp"

#include "hho2d/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace hho2d {

namespace {

const double nan_value = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

std::size_t level_subdivisions(int level)
{
  return static_cast<std::size_t>(1) << (level + 1);
}

void StudyConfig::validate() const
{
  if (r <= 1.) {
    throw std::invalid_argument("r must exceed 1");
  }
  if (k < 0 || k > 2) {
    throw std::invalid_argument("k must be 0, 1 or 2");
  }
  if (levels < 1) {
    throw std::invalid_argument("levels must be >= 1");
  }
  if (mu < 0. || nu < 0. || (mu == 0. && nu == 0.)) {
    throw std::invalid_argument("require mu >= 0, nu >= 0 and not both zero");
  }
  if (mu == 0.) {
    throw std::invalid_argument("runs require mu > 0 (the pure Darcy limit needs "
                                "different boundary conditions)");
  }
  if (solver.tolerance <= 0.) {
    throw std::invalid_argument("tolerance must be positive");
  }
  if (family == MeshFamily::File) {
    if (mesh_dir.empty()) {
      throw std::invalid_argument("the file mesh family requires --mesh-dir");
    }
  } else {
    std::size_t n = level_subdivisions(levels);
    std::size_t cells = (family == MeshFamily::Triangular) ? 2 * n * n : n * n;
    if (cells > kMaxStudyCells) {
      throw std::invalid_argument("finest level would have " + std::to_string(cells) +
                                  " cells; the cap is " + std::to_string(kMaxStudyCells));
    }
  }
}

std::vector<std::string> list_mesh_files(const std::string &dir)
{
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (!fs::is_directory(dir)) {
    throw std::invalid_argument("mesh directory '" + dir + "' does not exist");
  }
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::invalid_argument("mesh directory '" + dir + "' contains no .json files");
  }
  return files;
}

Mesh build_level_mesh(const StudyConfig &config, int level)
{
  switch (config.family) {
  case MeshFamily::Triangular:
    return Mesh::triangular(level_subdivisions(level));
  case MeshFamily::Cartesian:
    return Mesh::cartesian(level_subdivisions(level));
  case MeshFamily::File: {
    std::vector<std::string> files = list_mesh_files(config.mesh_dir);
    if (static_cast<std::size_t>(level) > files.size()) {
      throw std::invalid_argument("mesh directory '" + config.mesh_dir + "' has only " +
                                  std::to_string(files.size()) + " files; level " +
                                  std::to_string(level) + " requested");
    }
    return Mesh::load(files[static_cast<std::size_t>(level - 1)]);
  }
  }
  throw std::logic_error("unknown mesh family");
}

StudyReport run_study(const StudyConfig &config, std::ostream *log)
{
  config.validate();
  ManufacturedCase mcase = build_case(config.r, config.mu, config.nu);

  StudyReport report;
  double prev_h = 0., prev_err = 0.;
  bool have_prev = false;

  for (int level = 1; level <= config.levels; ++level) {
    Mesh mesh = build_level_mesh(config, level);
    if (mesh.n_cells() > kMaxStudyCells) {
      throw std::invalid_argument("level " + std::to_string(level) + " mesh has " +
                                  std::to_string(mesh.n_cells()) + " cells; the cap is " +
                                  std::to_string(kMaxStudyCells));
    }

    // Data compatibility: int_Omega g equals the boundary outflow of u.
    // High-degree quadrature so the check measures the data, not the rule.
    {
      const int check_degree = 20;
      double g_integral = 0.;
      for (std::size_t iT = 0; iT < mesh.n_cells(); ++iT) {
        QuadratureRule quad = cell_quadrature(mesh, iT, check_degree);
        for (std::size_t q = 0; q < quad.size(); ++q) {
          g_integral += quad.weights[q] * mcase.mass_source(quad.points[q]);
        }
      }
      double outflow = 0.;
      for (std::size_t iT = 0; iT < mesh.n_cells(); ++iT) {
        const auto &faces = mesh.cell_faces(iT);
        const CellGeometry &geo = mesh.geometry(iT);
        for (std::size_t i = 0; i < faces.size(); ++i) {
          if (!mesh.face(faces[i]).boundary) {
            continue;
          }
          QuadratureRule fq = face_quadrature(mesh, faces[i], check_degree);
          for (std::size_t q = 0; q < fq.size(); ++q) {
            outflow += fq.weights[q] * mcase.velocity(fq.points[q]).dot(geo.face_normal[i]);
          }
        }
      }
      if (std::abs(g_integral - outflow) > 1e-10) {
        throw std::runtime_error("manufactured data incompatible: int g = " +
                                 std::to_string(g_integral) + " but boundary outflow = " +
                                 std::to_string(outflow));
      }
    }

    BrinkmanProblem problem;
    problem.mu = config.mu;
    problem.nu = config.nu;
    problem.r = config.r;
    problem.momentum_source = [&mcase](const Vec2 &x) { return mcase.momentum_source(x); };
    problem.mass_source = [&mcase](const Vec2 &x) { return mcase.mass_source(x); };
    problem.dirichlet = [&mcase](const Vec2 &x) { return mcase.velocity(x); };

    BrinkmanSystem system(mesh, config.k, problem, config.parallel);

    LevelRecord rec;
    rec.level = level;
    rec.h = mesh.h_max();
    rec.ndof_velocity = system.dofs().n_velocity_reduced();
    rec.ndof_pressure = system.dofs().n_pressure();

    Eigen::VectorXd state = system.zero_state();
    NewtonReport newton = system.newton_solve(state, config.solver);
    rec.newton_iters = newton.iterations;
    rec.solved = newton.converged;

    RegimeClassification regimes =
        classify_regimes(mesh, config.r, config.mu, config.nu,
                         [&mcase](const Vec2 &x) { return mcase.velocity_gradient(x); });
    rec.friction = regimes.friction;
    rec.darcy = regimes.darcy;
    rec.median_friction = regimes.median_friction;
    rec.darcy_fraction = regimes.darcy_fraction;
    rec.cell_diameters.resize(mesh.n_cells());
    for (std::size_t iT = 0; iT < mesh.n_cells(); ++iT) {
      rec.cell_diameters[iT] = mesh.geometry(iT).diameter;
    }

    if (rec.solved) {
      GlobalInterpolant interp = interpolate_global(
          [&mcase](const Vec2 &x) { return mcase.velocity(x); }, mesh, system.dofs());
      Eigen::VectorXd error = system.velocity(state) - interp.reduced;
      rec.err_mu_r =
          norm_mu_r(mesh, system.dofs(), system.local_operators(), error, config.mu, config.r);
      rec.err_nu = norm_nu(mesh, system.dofs(), system.local_operators(), error, config.nu);
      rec.err_monitored = alpha_mu(config.mu, config.r) * std::pow(rec.err_mu_r, q_exponent(config.r)) +
                          rec.err_nu * rec.err_nu;
      rec.err_pressure_lr = pressure_error_lr(
          mesh, system.dofs(), system.local_operators(), system.pressure(state),
          [&mcase](const Vec2 &x) { return mcase.pressure(x); }, config.r);
      if (have_prev) {
        rec.rate_monitored =
            std::log(prev_err / rec.err_monitored) / std::log(prev_h / rec.h);
      } else {
        rec.rate_monitored = nan_value;
      }
      prev_h = rec.h;
      prev_err = rec.err_monitored;
      have_prev = true;
    } else {
      report.all_solved = false;
      rec.err_mu_r = rec.err_nu = rec.err_monitored = rec.err_pressure_lr = nan_value;
      rec.rate_monitored = nan_value;
      have_prev = false; // gap marker: no rate across a failed level
    }

    if (log) {
      *log << "level " << level << ": h = " << rec.h << ", velocity dofs = " << rec.ndof_velocity
           << ", newton iterations = " << rec.newton_iters
           << (rec.solved ? "" : " (solver failed)");
      if (rec.solved) {
        *log << ", monitored error = " << rec.err_monitored;
        if (!std::isnan(rec.rate_monitored)) {
          *log << ", rate = " << rec.rate_monitored;
        }
      }
      *log << std::endl;
    }

    report.levels.push_back(std::move(rec));
  }

  if (!config.output_path.empty()) {
    std::ofstream out(config.output_path);
    if (!out) {
      throw std::runtime_error("cannot write '" + config.output_path + "'");
    }
    write_errors_csv(report, out);
    std::string friction_path = config.output_path;
    std::size_t dot = friction_path.rfind('.');
    friction_path.insert(dot == std::string::npos ? friction_path.size() : dot, "_friction");
    std::ofstream fout(friction_path);
    if (!fout) {
      throw std::runtime_error("cannot write '" + friction_path + "'");
    }
    write_friction_csv(report, fout);
  }
  return report;
}

void write_errors_csv(const StudyReport &report, std::ostream &out)
{
  out << "level,h,ndof_velocity,ndof_pressure,newton_iters,err_mu_r,err_nu,err_monitored,"
         "err_pressure_lr,rate_monitored\n";
  for (const LevelRecord &rec : report.levels) {
    out << rec.level << ',' << format_double(rec.h) << ',' << rec.ndof_velocity << ','
        << rec.ndof_pressure << ',' << rec.newton_iters << ',' << format_double(rec.err_mu_r)
        << ',' << format_double(rec.err_nu) << ',' << format_double(rec.err_monitored) << ','
        << format_double(rec.err_pressure_lr) << ',' << format_double(rec.rate_monitored) << '\n';
  }
}

void write_friction_csv(const StudyReport &report, std::ostream &out)
{
  out << "level,cell_id,h_T,C_f_T,regime\n";
  for (const LevelRecord &rec : report.levels) {
    for (std::size_t iT = 0; iT < rec.friction.size(); ++iT) {
      out << rec.level << ',' << iT << ',' << format_double(rec.cell_diameters[iT]) << ','
          << format_double(rec.friction[iT]) << ',' << (rec.darcy[iT] ? "darcy" : "stokes")
          << '\n';
    }
  }
}

} // namespace hho2d
