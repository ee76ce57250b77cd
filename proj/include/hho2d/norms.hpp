// Discrete norms, the coefficient of friction and the Stokes/Darcy regime
// partition, the global interpolator, the monitored error quantity and
// convergence-rate computation.
//
// Norms of hybrid vectors:
//   ||v||_{1,q,T}^q = ||grad v_T||_{L^q(T)}^q + h_T^{1-q} ||v_dT - v_T||_{L^q(dT)}^q
//   ||v||_{mu,q,h}  = (sum_T mu_T ||v||_{1,q,T}^q)^{1/q}
//   ||v||_{d,T}     = a_{d,T}(v, v)^{1/2},   ||v||_{nu,h}^2 = sum_T nu_T ||v||_{d,T}^2
//   ||v||_{0,2,T}^2 = ||v_T||_{L^2(T)}^2 + h_T ||v_dT - v_T||_{L^2(dT)}^2
//
// The monitored error quantity is alpha_mu ||e||_{mu,r,h}^{q_r} + ||e||_{nu,h}^2
// with q_r = 2 and alpha_mu = mu_min^{(2-r)/(r(r-1))} for 1 < r < 2, and
// q_r = r, alpha_mu = 1 for r >= 2.

#ifndef HHO2D_NORMS_HPP
#define HHO2D_NORMS_HPP

#include "hho2d/local_operators.hpp"
#include "hho2d/system.hpp"
#include "hho2d/types.hpp"

#include <vector>

namespace hho2d {

double q_exponent(double r);
double alpha_mu(double mu_min, double r);

//------------------------------------------------------------------------------
// Local norm helpers
//------------------------------------------------------------------------------

/// W^{1,q}-like local seminorm of a cell-local dof vector.
double norm_1q_T(const Mesh &mesh, std::size_t iT, const LocalOperators &ops,
                 const Eigen::VectorXd &u_loc, double q);

/// Discrete local L2 norm.
double norm_02_T(const Mesh &mesh, std::size_t iT, const LocalOperators &ops,
                 const Eigen::VectorXd &u_loc);

/// Local Darcy norm a_{d,T}(v, v)^{1/2}.
double norm_d_T(const LocalOperators &ops, const Eigen::VectorXd &u_loc);

//------------------------------------------------------------------------------
// Global norms on reduced hybrid vectors (boundary faces at zero)
//------------------------------------------------------------------------------

double norm_mu_r(const Mesh &mesh, const DofMap &dofs, const std::vector<LocalOperators> &ops,
                 const Eigen::VectorXd &velocity_reduced, double mu, double r);

double norm_nu(const Mesh &mesh, const DofMap &dofs, const std::vector<LocalOperators> &ops,
               const Eigen::VectorXd &velocity_reduced, double nu);

double monitored_error(const Mesh &mesh, const DofMap &dofs,
                       const std::vector<LocalOperators> &ops, const Eigen::VectorXd &error,
                       double mu, double nu, double r);

//------------------------------------------------------------------------------
// Global interpolator
//------------------------------------------------------------------------------

struct GlobalInterpolant {
  Eigen::VectorXd reduced;         ///< element + interior-face coefficients
  Eigen::VectorXd boundary_values; ///< boundary-face coefficients (trace projections)
  double max_boundary_trace = 0.;  ///< max face-L2 density of the boundary trace
};

/// Applies the local interpolator cellwise and the face projections facewise.
/// Boundary-face projections are kept in boundary_values; max_boundary_trace
/// records how far u is from satisfying the homogeneous boundary condition
/// (callers imposing v_F = 0 should warn when it exceeds 1e-8).
GlobalInterpolant interpolate_global(const VectorField &u, const Mesh &mesh, const DofMap &dofs,
                                     int quad_degree = -1);

//------------------------------------------------------------------------------
// Coefficient of friction and regime partition
//------------------------------------------------------------------------------

struct RegimeClassification {
  std::vector<double> friction;  ///< C_{f,T} = nu_T h_T^2 / kappa_T per cell
  std::vector<bool> darcy;       ///< C_{f,T} >= 1
  double darcy_fraction = 0.;
  double median_friction = 0.;
};

/// kappa_T = mu_T ||  |grad u|^{r-2} ||_{Linf(T)}, approximated by sampling at
/// quadrature points and vertices. Conventions: C_{f,T} = +inf when
/// kappa_T = 0; C_{f,T} = 0 when r < 2, mu_T > 0 and the sampled sup exceeds
/// 1e12 (unbounded |grad u|^{r-2}).
RegimeClassification classify_regimes(const Mesh &mesh, double r, double mu, double nu,
                                      const TensorField &grad_u);

//------------------------------------------------------------------------------
// Pressure diagnostic and rates
//------------------------------------------------------------------------------

/// || p_h - pi_h^k p ||_{L^{r'}(Omega)} with r' the conjugate exponent of r.
double pressure_error_lr(const Mesh &mesh, const DofMap &dofs,
                         const std::vector<LocalOperators> &ops,
                         const Eigen::VectorXd &pressure_coeffs, const ScalarField &p_exact,
                         double r);

/// Slopes log(e_i / e_{i+1}) / log(h_i / h_{i+1}) between consecutive levels.
std::vector<double> convergence_rates(const std::vector<std::pair<double, double>> &levels);

} // namespace hho2d

#endif
