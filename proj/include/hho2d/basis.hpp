// Polynomial bases on cells and faces, and L2-orthogonal projections.
//
// Cell bases are scaled monomials ((x - x_T)/h_T)^a ((y - y_T)/h_T)^b in graded
// order, so that the basis of P^{m-1} is a prefix of the basis of P^m. Vector
// (resp. tensor) bases are component-major (resp. entry-major, row-wise)
// blocks over the scalar basis. The Nedelec space
//   N^k(T) = grad P^k(T) + (x - x_T)^perp P^{k-1}(T)
// is represented through its exact expansion in the vector monomial basis;
// (y1, y2)^perp = (y2, -y1) is the rotation of -pi/2. Face bases are scaled
// monomials in the arclength coordinate ((x - x_F) . t_F) / |F|.

#ifndef HHO2D_BASIS_HPP
#define HHO2D_BASIS_HPP

#include "hho2d/mesh.hpp"
#include "hho2d/quadrature.hpp"
#include "hho2d/types.hpp"

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace hho2d {

class ScalarBasis {
public:
  ScalarBasis() : ScalarBasis(Vec2::Zero(), 1., -1) {}
  ScalarBasis(const Vec2 &center, double scale, int degree);

  /// dim P^m in 2D: (m+1)(m+2)/2 (0 for m = -1).
  static std::size_t dimension(int degree);

  std::size_t dim() const { return m_exponents.size(); }
  int degree() const { return m_degree; }
  const Vec2 &center() const { return m_center; }
  double scale() const { return m_scale; }
  const std::array<int, 2> &exponents(std::size_t i) const { return m_exponents[i]; }

  /// Index of the member with exponents (a, b).
  std::size_t index_of(int a, int b) const;

  double value(std::size_t i, const Vec2 &x) const;
  Vec2 gradient(std::size_t i, const Vec2 &x) const;

  /// Values of all members at all points, (npts x dim).
  Eigen::MatrixXd values_at(const std::vector<Vec2> &points) const;
  /// x- and y-derivatives of all members at all points.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gradients_at(const std::vector<Vec2> &points) const;

private:
  Vec2 m_center;
  double m_scale;
  int m_degree;
  std::vector<std::array<int, 2>> m_exponents;
};

/// Component-major vector-valued view: members i < N are (phi_i, 0), members
/// i >= N are (0, phi_{i-N}).
class VectorBasis {
public:
  explicit VectorBasis(ScalarBasis scalar) : m_scalar(std::move(scalar)) {}
  const ScalarBasis &scalar() const { return m_scalar; }
  std::size_t dim() const { return 2 * m_scalar.dim(); }
  Vec2 value(std::size_t i, const Vec2 &x) const;
  Mat2 gradient(std::size_t i, const Vec2 &x) const; ///< Jacobian, (grad v)_ij = d_j v_i
  double divergence(std::size_t i, const Vec2 &x) const;

private:
  ScalarBasis m_scalar;
};

/// Entry-major 2x2 tensor-valued view: member i covers entry (c / 2, c % 2)
/// with c = i / N.
class TensorBasis {
public:
  explicit TensorBasis(ScalarBasis scalar) : m_scalar(std::move(scalar)) {}
  const ScalarBasis &scalar() const { return m_scalar; }
  std::size_t dim() const { return 4 * m_scalar.dim(); }
  Mat2 value(std::size_t i, const Vec2 &x) const;
  Vec2 divergence(std::size_t i, const Vec2 &x) const; ///< row-wise divergence

private:
  ScalarBasis m_scalar;
};

/// Basis of N^k(T). Members are stored through their exact coefficient
/// expansion in the component-major vector monomial basis of P^k(T)^2:
/// h_T grad m for the non-constant monomials m of P^k, followed by
/// ((x - x_T)/h_T)^perp m for the monomials m of P^{k-1}. N^0(T) = {0}.
class NedelecBasis {
public:
  NedelecBasis() : NedelecBasis(Vec2::Zero(), 1., 0) {}
  NedelecBasis(const Vec2 &center, double scale, int degree);

  static std::size_t dimension(int degree);

  std::size_t dim() const { return static_cast<std::size_t>(m_embedding.cols()); }
  int degree() const { return m_degree; }
  const ScalarBasis &scalar() const { return m_scalar; }
  /// (2 N_k x dim) expansion in the vector monomial basis.
  const Eigen::MatrixXd &embedding() const { return m_embedding; }

  Vec2 value(std::size_t i, const Vec2 &x) const;
  Mat2 gradient(std::size_t i, const Vec2 &x) const;

private:
  ScalarBasis m_scalar;
  int m_degree;
  Eigen::MatrixXd m_embedding;
};

class FaceScalarBasis {
public:
  FaceScalarBasis(const Face &face, int degree);

  std::size_t dim() const { return static_cast<std::size_t>(m_degree) + 1; }
  int degree() const { return m_degree; }

  double value(std::size_t i, const Vec2 &x) const;
  Eigen::MatrixXd values_at(const std::vector<Vec2> &points) const;

private:
  Vec2 m_midpoint;
  Vec2 m_tangent;
  double m_length;
  int m_degree;
};

/// Component-major vector face basis of P^k(F)^2, dimension 2(k+1).
class FaceVectorBasis {
public:
  FaceVectorBasis(const Face &face, int degree) : m_scalar(face, degree) {}
  const FaceScalarBasis &scalar() const { return m_scalar; }
  std::size_t dim() const { return 2 * m_scalar.dim(); }
  Vec2 value(std::size_t i, const Vec2 &x) const;

private:
  FaceScalarBasis m_scalar;
};

//------------------------------------------------------------------------------
// Gram matrices and L2 projections
//------------------------------------------------------------------------------

Eigen::MatrixXd gram_matrix(const ScalarBasis &basis, const QuadratureRule &quad);
Eigen::MatrixXd gram_matrix(const FaceScalarBasis &basis, const QuadratureRule &quad);
/// Gram of the Nedelec basis (vector-valued L2 products).
Eigen::MatrixXd gram_matrix(const NedelecBasis &basis, const QuadratureRule &quad);

/// Solves the SPD system M x = b and checks the solve residual; throws with
/// the given context (plus a conditioning report) when the residual exceeds
/// 1e-11 relative.
Eigen::VectorXd solve_gram(const Eigen::MatrixXd &M, const Eigen::VectorXd &b,
                           const std::string &context);
Eigen::MatrixXd solve_gram(const Eigen::MatrixXd &M, const Eigen::MatrixXd &B,
                           const std::string &context);

/// L2-orthogonal projection of a scalar field; coefficients in the basis.
Eigen::VectorXd l2_project(const ScalarField &f, const ScalarBasis &basis,
                           const QuadratureRule &quad);
/// Componentwise projection of a vector field, component-major coefficients.
Eigen::VectorXd l2_project(const VectorField &f, const ScalarBasis &basis,
                           const QuadratureRule &quad);
/// Face projections (scalar and componentwise vector).
Eigen::VectorXd l2_project(const ScalarField &f, const FaceScalarBasis &basis,
                           const QuadratureRule &quad);
Eigen::VectorXd l2_project(const VectorField &f, const FaceScalarBasis &basis,
                           const QuadratureRule &quad);

/// L2-orthogonal projection on N^k(T); empty vector for k = 0.
Eigen::VectorXd nedelec_project(const VectorField &f, const NedelecBasis &basis,
                                const QuadratureRule &quad);

} // namespace hho2d

#endif
