// Global dof numbering, nonlinear residual/Jacobian assembly and the damped
// Newton solver for the discrete power-law Brinkman problem
//
//   a_mu(u, v) + a_nu(u, v) + b(v, p) = int_Omega f . P_d v     for all v,
//   -b(u, q) = int_Omega g q                                    for all q,
//
// with a_mu the power-law Stokes form (volume stress sigma(G_T u) : G_T v plus
// the h_T^{1-r}-weighted boundary-difference stabilization), a_nu = nu a_d the
// Darcy form, and b(v, q) = -sum_T int_T (D_T v) q. Face unknowns on the
// domain boundary are eliminated and carry prescribed trace projections; the
// zero-mean pressure constraint is enforced through one scalar Lagrange
// multiplier, keeping the linearized system square and symmetric.
//
// The assembled state vector is [velocity unknowns | pressure | multiplier].
// Assembly is cell-parallel with a fixed-order reduction, so results are
// bitwise independent of the thread count.

#ifndef HHO2D_SYSTEM_HPP
#define HHO2D_SYSTEM_HPP

#include "hho2d/local_operators.hpp"
#include "hho2d/mesh.hpp"
#include "hho2d/types.hpp"

#include <Eigen/Sparse>

#include <cstddef>
#include <string>
#include <vector>

namespace hho2d {

/// Global numbering of the hybrid velocity unknowns and the pressure.
/// Velocity coefficients exist in two coordinate systems: the "full" vector
/// (element blocks, then blocks for every face) used to gather cell-local
/// dofs, and the "reduced" vector (element blocks, then interior-face blocks
/// only) holding the actual unknowns after strong elimination of boundary
/// faces.
class DofMap {
public:
  DofMap(const Mesh &mesh, int k);

  int degree() const { return m_k; }
  std::size_t element_block_size() const { return m_dim_element; }
  std::size_t face_block_size() const { return m_dim_face; }

  std::size_t n_velocity_reduced() const { return m_n_velocity_reduced; }
  std::size_t n_pressure() const { return m_n_pressure; }
  /// Velocity unknowns + pressure + the zero-mean multiplier.
  std::size_t system_size() const { return m_n_velocity_reduced + m_n_pressure + 1; }

  std::size_t element_offset(std::size_t iT) const { return iT * m_dim_element; }
  /// Offset of face iF in the reduced velocity vector; -1 for boundary faces.
  std::ptrdiff_t face_offset_reduced(std::size_t iF) const { return m_face_reduced[iF]; }
  /// Ordinal of a boundary face among boundary faces; -1 for interior faces.
  std::ptrdiff_t boundary_ordinal(std::size_t iF) const { return m_boundary_ordinal[iF]; }
  std::size_t n_boundary_values() const { return m_n_boundary * m_dim_face; }

  std::size_t pressure_block_size() const { return m_pressure_block; }
  std::size_t pressure_offset(std::size_t iT) const
  {
    return m_n_velocity_reduced + iT * m_pressure_block;
  }
  std::size_t multiplier_index() const { return m_n_velocity_reduced + m_n_pressure; }

private:
  int m_k;
  std::size_t m_dim_element, m_dim_face, m_pressure_block;
  std::size_t m_n_velocity_reduced, m_n_pressure, m_n_boundary;
  std::vector<std::ptrdiff_t> m_face_reduced;
  std::vector<std::ptrdiff_t> m_boundary_ordinal;
};

/// Gathers the cell-local dof vector of cell iT from the reduced velocity
/// vector and the prescribed boundary values (indexed by boundary ordinal).
Eigen::VectorXd gather_local_dofs(const Mesh &mesh, const DofMap &dofs, std::size_t iT,
                                  const Eigen::VectorXd &velocity_reduced,
                                  const Eigen::VectorXd &boundary_values);

/// Physical data of one run. momentum_source and mass_source are f and g;
/// dirichlet is the exact velocity trace used to prescribe boundary faces
/// (identically zero for the homogeneous problem).
struct BrinkmanProblem {
  double mu = 1.;
  double nu = 0.;
  double r = 2.;
  VectorField momentum_source;
  ScalarField mass_source;
  VectorField dirichlet;
};

struct NewtonOptions {
  double tolerance = 1e-10; ///< on the Euclidean norm of the residual
  int max_iterations = 100;
  int max_halvings = 30;
  bool continuation = false;    ///< warm-start through exponents 2, 2.5, ..., r
  double continuation_step = 0.5;
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_norms; ///< includes the initial residual
  std::vector<int> halvings_per_iteration;
  std::vector<double> exponent_path; ///< continuation path, {r} when disabled
  std::size_t system_size = 0;
  std::size_t jacobian_nonzeros = 0;
  int factorizations = 0;
  /// The stopping tolerance is measured in the Euclidean norm of the
  /// assembled residual; flagged here since other norms are defensible.
  std::string residual_norm_kind = "euclidean";
};

class BrinkmanSystem {
public:
  BrinkmanSystem(const Mesh &mesh, int k, BrinkmanProblem problem, bool parallel = true);

  const Mesh &mesh() const { return m_mesh; }
  const DofMap &dofs() const { return m_dofs; }
  const BrinkmanProblem &problem() const { return m_problem; }
  const std::vector<LocalOperators> &local_operators() const { return m_ops; }
  /// Prescribed boundary-face coefficients (face projections of dirichlet).
  const Eigen::VectorXd &boundary_values() const { return m_boundary_values; }

  Eigen::Index state_size() const { return static_cast<Eigen::Index>(m_dofs.system_size()); }
  Eigen::VectorXd zero_state() const { return Eigen::VectorXd::Zero(state_size()); }

  Eigen::VectorXd velocity(const Eigen::VectorXd &state) const
  {
    return state.head(static_cast<Eigen::Index>(m_dofs.n_velocity_reduced()));
  }
  Eigen::VectorXd pressure(const Eigen::VectorXd &state) const
  {
    return state.segment(static_cast<Eigen::Index>(m_dofs.n_velocity_reduced()),
                         static_cast<Eigen::Index>(m_dofs.n_pressure()));
  }
  double multiplier(const Eigen::VectorXd &state) const
  {
    return state(static_cast<Eigen::Index>(m_dofs.multiplier_index()));
  }

  Eigen::VectorXd residual(const Eigen::VectorXd &state) const
  {
    return residual_with_exponent(state, m_problem.r);
  }
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd &state) const
  {
    return jacobian_with_exponent(state, m_problem.r);
  }

  /// Damped Newton iteration from the given state (modified in place).
  /// Throws on a singular linear solve; non-convergence is reported, not thrown.
  NewtonReport newton_solve(Eigen::VectorXd &state, const NewtonOptions &opts = {}) const;

  /// Integral of the discrete pressure (zero-mean constraint value).
  double pressure_integral(const Eigen::VectorXd &state) const;

  Eigen::VectorXd residual_with_exponent(const Eigen::VectorXd &state, double r) const;
  Eigen::SparseMatrix<double> jacobian_with_exponent(const Eigen::VectorXd &state, double r) const;

private:
  void newton_single(Eigen::VectorXd &state, double r, const NewtonOptions &opts,
                     NewtonReport &report) const;

  const Mesh &m_mesh;
  DofMap m_dofs;
  BrinkmanProblem m_problem;
  bool m_parallel;
  std::vector<LocalOperators> m_ops;
  Eigen::VectorXd m_boundary_values;
  std::vector<Eigen::VectorXd> m_rhs_momentum; ///< per cell, P_d^T moments of f
  std::vector<Eigen::VectorXd> m_rhs_mass;     ///< per cell, moments of g
};

} // namespace hho2d

#endif
