// Quadrature on polygonal cells and straight faces.
//
// Cells are integrated by fan-triangulating from the centroid (triangles are
// used directly) and composing triangle rules of the requested exactness.
// Low degrees use classical symmetric positive rules; higher degrees fall back
// to a collapsed tensor Gauss-Legendre rule, which is positive and exact for
// any requested degree. Faces use mapped Gauss-Legendre points.

#ifndef HHO2D_QUADRATURE_HPP
#define HHO2D_QUADRATURE_HPP

#include "hho2d/mesh.hpp"
#include "hho2d/types.hpp"

#include <vector>

namespace hho2d {

/// Largest supported exactness degree for cell rules.
inline constexpr int kMaxQuadratureDegree = 30;

struct QuadratureRule {
  std::vector<Vec2> points;    ///< physical coordinates
  std::vector<double> weights; ///< include the Jacobian; sum to the measure
  int exactness = 0;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

/// Rule exact on polynomials of total degree <= degree over cell iT.
QuadratureRule cell_quadrature(const Mesh &mesh, std::size_t iT, int degree);

/// Rule exact on polynomials of degree <= degree along face iF; weights sum
/// to the face length.
QuadratureRule face_quadrature(const Mesh &mesh, std::size_t iF, int degree);

/// Rule over an arbitrary physical triangle (p0, p1, p2).
QuadratureRule triangle_quadrature(const Vec2 &p0, const Vec2 &p1, const Vec2 &p2, int degree);

/// Gauss-Legendre nodes/weights on [0, 1], exact to degree 2n - 1.
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

} // namespace hho2d

#endif
