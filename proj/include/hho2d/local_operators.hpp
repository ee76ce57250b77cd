// Per-element operator reconstructions for the hybrid velocity space with
// element unknowns in the Nedelec space N^k(T) and face unknowns in P^k(F)^2:
//
//   gradient          G_T : local dofs -> P^k(T)^{2x2}
//     int_T G_T v : tau = -int_T v_T . (div tau) + int_dT v_dT . (tau n_TF)
//   Stokes velocity   P_s : local dofs -> P^{k+1}(T)^2
//     int_T grad P_s v : grad w + beta_T (int_T P_s v).(int_T w)
//       = int_T G_T v : grad w + beta_T (int_T v_T).(int_T w),
//     beta_T = 1 / (h_T^2 |T|)
//   divergence        D_T = tr G_T (assembled from its own variational form)
//   Darcy velocity    P_d : local dofs -> P^k(T)^2
//     int_T P_d v . (grad phi + w) = -int_T D_T v phi + int_dT (v_dT . n) phi
//       + int_T v_T . w    for (phi, w) in P^{k+1}(T) x (x - x_T)^perp P^{k-1}(T)
//   boundary difference, per face:
//     Delta_F v = pi^k_F(P_s v - v_F) - (pi^N_T(P_s v - v_T))|_F
//   Darcy stabilization ingredients pi^N_T(P_d v - v_T) and (P_d v - v_F),
//   with lambda_T = h_T^2 card(F_T) / |T|.
//
// For k = 0 the element space is trivial; wherever v_T appears it is replaced
// by the weighted face average (1/|T|) sum_F varpi_TF |F| v_F with
// varpi_TF = d_TF / 2 (so that sum_F |F| varpi_TF = |T|), which reproduces
// linear fields when x_T is the center of mass.
//
// Construction is element-local and side-effect free; results are immutable.

#ifndef HHO2D_LOCAL_OPERATORS_HPP
#define HHO2D_LOCAL_OPERATORS_HPP

#include "hho2d/basis.hpp"
#include "hho2d/mesh.hpp"
#include "hho2d/quadrature.hpp"
#include "hho2d/types.hpp"

#include <vector>

namespace hho2d {

/// Quadrature degree used for non-polynomial integrands (power-law stress,
/// manufactured data, error norms) at velocity degree k.
inline int nonpoly_quadrature_degree(int k) { return 2 * (k + 1) + 4; }

/// Layout of the local dof vector: element block (dim N^k(T)) followed by one
/// block of size 2(k+1) per face, in the order of Mesh::cell_faces.
struct LocalDofLayout {
  int degree = 0;
  std::size_t dim_element = 0;
  std::size_t n_faces = 0;
  std::size_t dim_face = 0;

  std::size_t total() const { return dim_element + n_faces * dim_face; }
  std::size_t face_offset(std::size_t local_face) const
  {
    return dim_element + local_face * dim_face;
  }
};

struct LocalOperators {
  LocalDofLayout layout;
  double beta = 0.;   ///< beta_T = 1 / (h_T^2 |T|)
  double lambda = 0.; ///< lambda_T = h_T^2 card(F_T) / |T|

  // Bases the matrices are expressed in.
  ScalarBasis basis_k;        ///< P^k(T)
  ScalarBasis basis_k1;       ///< P^{k+1}(T)
  NedelecBasis nedelec;       ///< N^k(T)
  std::vector<FaceVectorBasis> face_bases;
  std::vector<bool> face_is_boundary;

  /// v_T as coefficients in the component-major vector monomial basis of
  /// P^k(T)^2 (embedding of the element unknown; weighted face average for k=0).
  Eigen::MatrixXd element_value;
  Eigen::MatrixXd gradient;         ///< 4 N_k x ndof, tensor entry-major blocks
  Eigen::MatrixXd divergence;       ///< N_k x ndof
  Eigen::MatrixXd stokes_potential; ///< 2 N_{k+1} x ndof
  Eigen::MatrixXd darcy_velocity;   ///< 2 N_k x ndof
  std::vector<Eigen::MatrixXd> boundary_difference; ///< per face, 2(k+1) x ndof, face basis coeffs
  Eigen::MatrixXd darcy_stab_element;               ///< dim N^k x ndof, Nedelec coeffs
  std::vector<Eigen::MatrixXd> darcy_stab_face;     ///< per face, 2(k+1) x ndof

  /// a_{d,T} without the nu_T factor:
  /// int_T P_d w . P_d v + lambda_T int_T pi^N(P_d w - w_T) . pi^N(P_d v - v_T)
  ///   + h_T sum_{F interior} int_F (P_d w - w_F) . (P_d v - v_F).
  Eigen::MatrixXd darcy_form;

  /// b_T(v, q) = q^T pressure_coupling v = -int_T (D_T v) q.
  Eigen::MatrixXd pressure_coupling;
  Eigen::VectorXd pressure_moments; ///< int_T q_j for the zero-mean constraint

  // Mass/Gram matrices reused by the assembly and the norms.
  Eigen::MatrixXd mass_k;
  Eigen::MatrixXd mass_k1;
  Eigen::MatrixXd gram_nedelec;
  std::vector<Eigen::MatrixXd> face_mass; ///< scalar (k+1) x (k+1) per face
};

/// Assembles every local matrix from exact-polynomial quadrature.
/// k must be in {0, 1, 2}; throws naming the cell on singular local systems.
LocalOperators build_local_operators(const Mesh &mesh, std::size_t iT, int k);

/// Local interpolator: element block = Nedelec projection of u, face blocks =
/// face L2 projections. quad_degree < 0 selects the non-polynomial policy.
Eigen::VectorXd interpolate_local(const VectorField &u, const Mesh &mesh, std::size_t iT, int k,
                                  int quad_degree = -1);

/// max over a monomial basis Psi of P^{k-1}(T)^2 of |int_T (P_d v - v_T) . Psi|;
/// vanishes identically by construction of P_d (0 for k = 0).
double darcy_orthogonality_residual(const LocalOperators &ops, const Eigen::VectorXd &v);

} // namespace hho2d

#endif
