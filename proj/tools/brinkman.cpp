// Command-line driver for manufactured-solution convergence studies of the
// power-law Brinkman solver. Prints a rate table and writes the error and
// friction CSV files.

#include "hho2d/norms.hpp"
#include "hho2d/parallel.hpp"
#include "hho2d/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

int main(int argc, char **argv)
{
  CLI::App app{"2D polytopal HHO solver for the power-law Brinkman problem"};
  app.set_config("--config", "", "Config file mirroring all flags (key=value); flags override");

  hho2d::StudyConfig config;
  std::string family = "triangular";
  std::string continuation = "off";
  std::string threads = "on";

  app.add_option("--family", family, "Mesh family: triangular, cartesian or file")
      ->check(CLI::IsMember({"triangular", "cartesian", "file"}));
  app.add_option("--mesh-dir", config.mesh_dir, "Directory of json-poly meshes (family file)");
  app.add_option("--levels", config.levels, "Number of refinement levels");
  app.add_option("--k", config.k, "Polynomial degree (0, 1 or 2)");
  app.add_option("--r", config.r, "Power-law exponent (> 1)");
  app.add_option("--mu", config.mu, "Viscosity coefficient");
  app.add_option("--nu", config.nu, "Friction coefficient");
  app.add_option("--tol", config.solver.tolerance, "Newton stopping tolerance")
      ->default_val(1e-10);
  app.add_option("--max-iterations", config.solver.max_iterations, "Newton iteration cap");
  app.add_option("--max-halvings", config.solver.max_halvings, "Damping halvings cap");
  app.add_option("--continuation", continuation, "Warm-start through exponents 2, 2.5, ..., r")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--out", config.output_path, "Errors CSV path (friction CSV gets _friction)");
  app.add_option("--threads", threads, "Cell-parallel assembly")
      ->check(CLI::IsMember({"on", "off"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  const std::map<std::string, hho2d::MeshFamily> families = {
      {"triangular", hho2d::MeshFamily::Triangular},
      {"cartesian", hho2d::MeshFamily::Cartesian},
      {"file", hho2d::MeshFamily::File}};
  config.family = families.at(family);
  config.solver.continuation = (continuation == "on");
  config.parallel = (threads == "on");

  try {
    config.validate();
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }

  std::cout << "family=" << family << " levels=" << config.levels << " k=" << config.k
            << " r=" << config.r << " mu=" << config.mu << " nu=" << config.nu
            << " tol=" << config.solver.tolerance
            << (config.parallel && hho2d::openmp_available()
                    ? " threads=" + std::to_string(hho2d::max_threads())
                    : " threads=1")
            << std::endl;

  hho2d::StudyReport report;
  try {
    report = hho2d::run_study(config, &std::cout);
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }

  std::printf("\n%-6s %-12s %-10s %-14s %-14s %-8s %-10s\n", "level", "h", "dofs", "monitored",
              "pressure", "rate", "darcy%");
  for (const auto &rec : report.levels) {
    std::printf("%-6d %-12.5g %-10zu %-14.6g %-14.6g %-8.3g %-10.3g\n", rec.level, rec.h,
                rec.ndof_velocity + rec.ndof_pressure, rec.err_monitored, rec.err_pressure_lr,
                rec.rate_monitored, 100. * rec.darcy_fraction);
  }

  if (!config.output_path.empty()) {
    std::cout << "\nwrote " << config.output_path << std::endl;
  }
  return report.all_solved ? 0 : 1;
}
