// Batch convergence studies over h-refined mesh families: build the mesh,
// assemble and Newton-solve each level against the manufactured solution,
// measure the monitored error quantity against the interpolant, classify the
// Stokes/Darcy regimes, and emit CSV records.
//
// Triangular and Cartesian level ell (1-based) uses n = 2^{ell+1} subdivisions;
// the file family consumes the lexicographically sorted *.json files of
// mesh_dir. The finest level is capped at 32768 cells.

#ifndef HHO2D_STUDY_HPP
#define HHO2D_STUDY_HPP

#include "hho2d/manufactured.hpp"
#include "hho2d/mesh.hpp"
#include "hho2d/system.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hho2d {

enum class MeshFamily { Triangular, Cartesian, File };

struct StudyConfig {
  MeshFamily family = MeshFamily::Triangular;
  std::string mesh_dir; ///< for MeshFamily::File
  int levels = 3;
  int k = 1;
  double r = 2.;
  double mu = 1.;
  double nu = 1.;
  NewtonOptions solver;
  std::string output_path; ///< errors CSV; friction CSV gets a _friction suffix
  bool parallel = true;

  /// Throws std::invalid_argument with a user-facing message on bad values.
  void validate() const;
};

inline constexpr std::size_t kMaxStudyCells = 32768;

/// Subdivision count of a generated level: n = 2^{level+1}.
std::size_t level_subdivisions(int level);

/// Builds or loads the mesh of one level (1-based).
Mesh build_level_mesh(const StudyConfig &config, int level);

/// Sorted *.json files of a directory; throws when none are found.
std::vector<std::string> list_mesh_files(const std::string &dir);

struct LevelRecord {
  int level = 0;
  double h = 0.;
  std::size_t ndof_velocity = 0;
  std::size_t ndof_pressure = 0;
  int newton_iters = 0;
  bool solved = false;
  double err_mu_r = 0.;
  double err_nu = 0.;
  double err_monitored = 0.;
  double err_pressure_lr = 0.;
  double rate_monitored = 0.; ///< NaN on the first level or after a gap
  // Friction data (per cell).
  std::vector<double> friction;
  std::vector<double> cell_diameters;
  std::vector<bool> darcy;
  double median_friction = 0.;
  double darcy_fraction = 0.;
};

struct StudyReport {
  std::vector<LevelRecord> levels;
  bool all_solved = true;
};

/// Runs every level; a failed solve is recorded as a gap and the study moves
/// on. Writes the CSV files when output_path is set.
StudyReport run_study(const StudyConfig &config, std::ostream *log = nullptr);

/// Error CSV, header:
/// level,h,ndof_velocity,ndof_pressure,newton_iters,err_mu_r,err_nu,err_monitored,err_pressure_lr,rate_monitored
void write_errors_csv(const StudyReport &report, std::ostream &out);
/// Friction CSV, header: level,cell_id,h_T,C_f_T,regime
void write_friction_csv(const StudyReport &report, std::ostream &out);

} // namespace hho2d

#endif
