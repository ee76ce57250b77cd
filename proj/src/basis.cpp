#include "hho2d/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace hho2d {

namespace {

inline double ipow(double x, int n)
{
  double p = 1.;
  for (int i = 0; i < n; ++i) {
    p *= x;
  }
  return p;
}

} // namespace

//------------------------------------------------------------------------------
// ScalarBasis
//------------------------------------------------------------------------------

ScalarBasis::ScalarBasis(const Vec2 &center, double scale, int degree)
    : m_center(center), m_scale(scale), m_degree(degree)
{
  if (degree >= 0) {
    m_exponents.reserve(dimension(degree));
    for (int d = 0; d <= degree; ++d) {
      for (int a = d; a >= 0; --a) {
        m_exponents.push_back({a, d - a});
      }
    }
  }
}

std::size_t ScalarBasis::dimension(int degree)
{
  if (degree < 0) {
    return 0;
  }
  return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
}

std::size_t ScalarBasis::index_of(int a, int b) const
{
  int d = a + b;
  return static_cast<std::size_t>(d * (d + 1) / 2 + (d - a));
}

double ScalarBasis::value(std::size_t i, const Vec2 &x) const
{
  const auto &e = m_exponents[i];
  double X = (x.x() - m_center.x()) / m_scale;
  double Y = (x.y() - m_center.y()) / m_scale;
  return ipow(X, e[0]) * ipow(Y, e[1]);
}

Vec2 ScalarBasis::gradient(std::size_t i, const Vec2 &x) const
{
  const auto &e = m_exponents[i];
  double X = (x.x() - m_center.x()) / m_scale;
  double Y = (x.y() - m_center.y()) / m_scale;
  Vec2 g = Vec2::Zero();
  if (e[0] > 0) {
    g.x() = e[0] / m_scale * ipow(X, e[0] - 1) * ipow(Y, e[1]);
  }
  if (e[1] > 0) {
    g.y() = e[1] / m_scale * ipow(X, e[0]) * ipow(Y, e[1] - 1);
  }
  return g;
}

Eigen::MatrixXd ScalarBasis::values_at(const std::vector<Vec2> &points) const
{
  Eigen::MatrixXd V(points.size(), dim());
  for (std::size_t q = 0; q < points.size(); ++q) {
    for (std::size_t i = 0; i < dim(); ++i) {
      V(q, i) = value(i, points[q]);
    }
  }
  return V;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
ScalarBasis::gradients_at(const std::vector<Vec2> &points) const
{
  Eigen::MatrixXd Dx(points.size(), dim());
  Eigen::MatrixXd Dy(points.size(), dim());
  for (std::size_t q = 0; q < points.size(); ++q) {
    for (std::size_t i = 0; i < dim(); ++i) {
      Vec2 g = gradient(i, points[q]);
      Dx(q, i) = g.x();
      Dy(q, i) = g.y();
    }
  }
  return {Dx, Dy};
}

//------------------------------------------------------------------------------
// VectorBasis / TensorBasis
//------------------------------------------------------------------------------

Vec2 VectorBasis::value(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  Vec2 v = Vec2::Zero();
  v(static_cast<Eigen::Index>(i / n)) = m_scalar.value(i % n, x);
  return v;
}

Mat2 VectorBasis::gradient(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  Mat2 g = Mat2::Zero();
  g.row(static_cast<Eigen::Index>(i / n)) = m_scalar.gradient(i % n, x).transpose();
  return g;
}

double VectorBasis::divergence(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  return m_scalar.gradient(i % n, x)(static_cast<Eigen::Index>(i / n));
}

Mat2 TensorBasis::value(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  std::size_t c = i / n;
  Mat2 m = Mat2::Zero();
  m(static_cast<Eigen::Index>(c / 2), static_cast<Eigen::Index>(c % 2)) = m_scalar.value(i % n, x);
  return m;
}

Vec2 TensorBasis::divergence(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  std::size_t c = i / n;
  Vec2 v = Vec2::Zero();
  v(static_cast<Eigen::Index>(c / 2)) = m_scalar.gradient(i % n, x)(static_cast<Eigen::Index>(c % 2));
  return v;
}

//------------------------------------------------------------------------------
// NedelecBasis
//------------------------------------------------------------------------------

NedelecBasis::NedelecBasis(const Vec2 &center, double scale, int degree)
    : m_scalar(center, scale, degree), m_degree(degree)
{
  std::size_t n = m_scalar.dim();
  m_embedding = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * n),
                                      static_cast<Eigen::Index>(dimension(degree)));
  if (degree == 0) {
    return;
  }
  Eigen::Index col = 0;
  // h_T grad m for every non-constant monomial m = X^a Y^b of P^k:
  // h grad (X^a Y^b) = (a X^{a-1} Y^b, b X^a Y^{b-1}).
  for (std::size_t j = 1; j < n; ++j, ++col) {
    const auto &e = m_scalar.exponents(j);
    if (e[0] > 0) {
      m_embedding(static_cast<Eigen::Index>(m_scalar.index_of(e[0] - 1, e[1])), col) = e[0];
    }
    if (e[1] > 0) {
      m_embedding(static_cast<Eigen::Index>(n + m_scalar.index_of(e[0], e[1] - 1)), col) = e[1];
    }
  }
  // ((x - x_T)/h)^perp m = (X^a Y^{b+1}, -X^{a+1} Y^b) for m of P^{k-1}.
  std::size_t n_low = ScalarBasis::dimension(degree - 1);
  for (std::size_t j = 0; j < n_low; ++j, ++col) {
    const auto &e = m_scalar.exponents(j);
    m_embedding(static_cast<Eigen::Index>(m_scalar.index_of(e[0], e[1] + 1)), col) = 1.;
    m_embedding(static_cast<Eigen::Index>(n + m_scalar.index_of(e[0] + 1, e[1])), col) = -1.;
  }
}

std::size_t NedelecBasis::dimension(int degree)
{
  if (degree <= 0) {
    return 0;
  }
  return ScalarBasis::dimension(degree) - 1 + ScalarBasis::dimension(degree - 1);
}

Vec2 NedelecBasis::value(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  Vec2 v = Vec2::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    double c0 = m_embedding(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    double c1 = m_embedding(static_cast<Eigen::Index>(n + j), static_cast<Eigen::Index>(i));
    if (c0 != 0. || c1 != 0.) {
      double phi = m_scalar.value(j, x);
      v.x() += c0 * phi;
      v.y() += c1 * phi;
    }
  }
  return v;
}

Mat2 NedelecBasis::gradient(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  Mat2 g = Mat2::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    double c0 = m_embedding(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    double c1 = m_embedding(static_cast<Eigen::Index>(n + j), static_cast<Eigen::Index>(i));
    if (c0 != 0. || c1 != 0.) {
      Vec2 grad = m_scalar.gradient(j, x);
      g.row(0) += c0 * grad.transpose();
      g.row(1) += c1 * grad.transpose();
    }
  }
  return g;
}

//------------------------------------------------------------------------------
// Face bases
//------------------------------------------------------------------------------

FaceScalarBasis::FaceScalarBasis(const Face &face, int degree)
    : m_midpoint(face.midpoint), m_tangent(face.tangent), m_length(face.length), m_degree(degree)
{
}

double FaceScalarBasis::value(std::size_t i, const Vec2 &x) const
{
  double s = (x - m_midpoint).dot(m_tangent) / m_length;
  return ipow(s, static_cast<int>(i));
}

Eigen::MatrixXd FaceScalarBasis::values_at(const std::vector<Vec2> &points) const
{
  Eigen::MatrixXd V(points.size(), dim());
  for (std::size_t q = 0; q < points.size(); ++q) {
    double s = (points[q] - m_midpoint).dot(m_tangent) / m_length;
    double p = 1.;
    for (std::size_t i = 0; i < dim(); ++i) {
      V(q, i) = p;
      p *= s;
    }
  }
  return V;
}

Vec2 FaceVectorBasis::value(std::size_t i, const Vec2 &x) const
{
  std::size_t n = m_scalar.dim();
  Vec2 v = Vec2::Zero();
  v(static_cast<Eigen::Index>(i / n)) = m_scalar.value(i % n, x);
  return v;
}

//------------------------------------------------------------------------------
// Gram matrices and projections
//------------------------------------------------------------------------------

Eigen::MatrixXd gram_matrix(const ScalarBasis &basis, const QuadratureRule &quad)
{
  Eigen::MatrixXd V = basis.values_at(quad.points);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(quad.weights.data(),
                                                        static_cast<Eigen::Index>(quad.size()));
  return V.transpose() * w.asDiagonal() * V;
}

Eigen::MatrixXd gram_matrix(const FaceScalarBasis &basis, const QuadratureRule &quad)
{
  Eigen::MatrixXd V = basis.values_at(quad.points);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(quad.weights.data(),
                                                        static_cast<Eigen::Index>(quad.size()));
  return V.transpose() * w.asDiagonal() * V;
}

Eigen::MatrixXd gram_matrix(const NedelecBasis &basis, const QuadratureRule &quad)
{
  // Vector-monomial Gram is block-diagonal with two scalar blocks; conjugate
  // by the exact embedding.
  Eigen::MatrixXd Ms = gram_matrix(basis.scalar(), quad);
  const Eigen::MatrixXd &E = basis.embedding();
  std::size_t n = basis.scalar().dim();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.dim()),
                                            static_cast<Eigen::Index>(basis.dim()));
  for (int c = 0; c < 2; ++c) {
    Eigen::MatrixXd Ec = E.middleRows(c * static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    G += Ec.transpose() * Ms * Ec;
  }
  return G;
}

Eigen::VectorXd solve_gram(const Eigen::MatrixXd &M, const Eigen::VectorXd &b,
                           const std::string &context)
{
  Eigen::MatrixXd B = b;
  return solve_gram(M, B, context).col(0);
}

Eigen::MatrixXd solve_gram(const Eigen::MatrixXd &M, const Eigen::MatrixXd &B,
                           const std::string &context)
{
  if (M.rows() == 0) {
    return Eigen::MatrixXd::Zero(0, B.cols());
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  Eigen::MatrixXd X = ldlt.solve(B);
  X += ldlt.solve(Eigen::MatrixXd(B - M * X)); // one step of iterative refinement
  double residual = (M * X - B).norm();
  double scale = std::max(1., B.norm());
  if (ldlt.info() != Eigen::Success || !X.allFinite() || residual > 1e-11 * scale) {
    Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    throw std::runtime_error(context + ": Gram solve failed (residual " + std::to_string(residual) +
                             ", pivot range [" + std::to_string(d.minCoeff()) + ", " +
                             std::to_string(d.maxCoeff()) + "])");
  }
  return X;
}

namespace {

Eigen::VectorXd weighted_moments(const Eigen::MatrixXd &V, const QuadratureRule &quad,
                                 const std::vector<double> &fvals)
{
  Eigen::VectorXd m = Eigen::VectorXd::Zero(V.cols());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    m += (quad.weights[q] * fvals[q]) * V.row(static_cast<Eigen::Index>(q)).transpose();
  }
  return m;
}

} // namespace

Eigen::VectorXd l2_project(const ScalarField &f, const ScalarBasis &basis,
                           const QuadratureRule &quad)
{
  Eigen::MatrixXd V = basis.values_at(quad.points);
  std::vector<double> fv(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    fv[q] = f(quad.points[q]);
  }
  return solve_gram(gram_matrix(basis, quad), weighted_moments(V, quad, fv), "cell projection");
}

Eigen::VectorXd l2_project(const VectorField &f, const ScalarBasis &basis,
                           const QuadratureRule &quad)
{
  Eigen::MatrixXd V = basis.values_at(quad.points);
  Eigen::MatrixXd M = gram_matrix(basis, quad);
  Eigen::MatrixXd rhs(basis.dim(), 2);
  std::vector<double> fv0(quad.size()), fv1(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    Vec2 v = f(quad.points[q]);
    fv0[q] = v.x();
    fv1[q] = v.y();
  }
  rhs.col(0) = weighted_moments(V, quad, fv0);
  rhs.col(1) = weighted_moments(V, quad, fv1);
  Eigen::MatrixXd X = solve_gram(M, rhs, "cell vector projection");
  Eigen::VectorXd out(2 * basis.dim());
  out.head(basis.dim()) = X.col(0);
  out.tail(basis.dim()) = X.col(1);
  return out;
}

Eigen::VectorXd l2_project(const ScalarField &f, const FaceScalarBasis &basis,
                           const QuadratureRule &quad)
{
  Eigen::MatrixXd V = basis.values_at(quad.points);
  std::vector<double> fv(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    fv[q] = f(quad.points[q]);
  }
  return solve_gram(gram_matrix(basis, quad), weighted_moments(V, quad, fv), "face projection");
}

Eigen::VectorXd l2_project(const VectorField &f, const FaceScalarBasis &basis,
                           const QuadratureRule &quad)
{
  Eigen::MatrixXd V = basis.values_at(quad.points);
  Eigen::MatrixXd M = gram_matrix(basis, quad);
  Eigen::MatrixXd rhs(basis.dim(), 2);
  std::vector<double> fv0(quad.size()), fv1(quad.size());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    Vec2 v = f(quad.points[q]);
    fv0[q] = v.x();
    fv1[q] = v.y();
  }
  rhs.col(0) = weighted_moments(V, quad, fv0);
  rhs.col(1) = weighted_moments(V, quad, fv1);
  Eigen::MatrixXd X = solve_gram(M, rhs, "face vector projection");
  Eigen::VectorXd out(2 * basis.dim());
  out.head(basis.dim()) = X.col(0);
  out.tail(basis.dim()) = X.col(1);
  return out;
}

Eigen::VectorXd nedelec_project(const VectorField &f, const NedelecBasis &basis,
                                const QuadratureRule &quad)
{
  if (basis.dim() == 0) {
    return Eigen::VectorXd(0);
  }
  Eigen::MatrixXd G = gram_matrix(basis, quad);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t q = 0; q < quad.size(); ++q) {
    Vec2 v = f(quad.points[q]);
    for (std::size_t i = 0; i < basis.dim(); ++i) {
      rhs(static_cast<Eigen::Index>(i)) += quad.weights[q] * v.dot(basis.value(i, quad.points[q]));
    }
  }
  return solve_gram(G, rhs, "Nedelec projection");
}

} // namespace hho2d
