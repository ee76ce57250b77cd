#include "hho2d/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace hho2d {

double QuadratureRule::total_weight() const
{
  double s = 0.;
  for (double w : weights) {
    s += w;
  }
  return s;
}

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights)
{
  nodes.resize(n);
  weights.resize(n);
  // Newton iteration on P_n over [-1, 1], then map to [0, 1].
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1., p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2. * k - 1.) * x * p1 - (k - 1.) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    nodes[i] = 0.5 * (1. + x);
    weights[i] = 1. / ((1. - x * x) * pp * pp);
  }
}

namespace {

struct BarycentricRule {
  // Each entry: barycentric coordinates and weight (weights sum to 1).
  std::vector<std::array<double, 4>> rows;
};

// Appends the 1, 3 or 6 permutations of (a, b, c).
void add_orbit(BarycentricRule &rule, double a, double b, double c, double w)
{
  const double coords[3] = {a, b, c};
  std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<double, 3>> seen;
  for (const auto &p : perms) {
    std::array<double, 3> cand = {coords[p[0]], coords[p[1]], coords[p[2]]};
    bool dup = false;
    for (const auto &s : seen) {
      if (std::abs(s[0] - cand[0]) < 1e-14 && std::abs(s[1] - cand[1]) < 1e-14) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      seen.push_back(cand);
      rule.rows.push_back({cand[0], cand[1], cand[2], w});
    }
  }
}

// Symmetric positive rules for low degrees (closed-form coefficients), and a
// collapsed Gauss-Legendre rule for anything higher.
BarycentricRule reference_triangle_rule(int degree)
{
  if (degree > kMaxQuadratureDegree) {
    throw std::invalid_argument("quadrature: requested cell degree " + std::to_string(degree) +
                                " exceeds the maximum supported degree " +
                                std::to_string(kMaxQuadratureDegree));
  }
  BarycentricRule rule;
  if (degree <= 1) {
    add_orbit(rule, 1. / 3., 1. / 3., 1. / 3., 1.);
    return rule;
  }
  if (degree == 2) {
    add_orbit(rule, 2. / 3., 1. / 6., 1. / 6., 1. / 3.);
    return rule;
  }
  if (degree <= 5) {
    // 7-point degree-5 rule.
    const double s15 = std::sqrt(15.);
    add_orbit(rule, 1. / 3., 1. / 3., 1. / 3., 9. / 40.);
    double a = (6. + s15) / 21.;
    add_orbit(rule, 1. - 2. * a, a, a, (155. + s15) / 1200.);
    double b = (6. - s15) / 21.;
    add_orbit(rule, 1. - 2. * b, b, b, (155. - s15) / 1200.);
    return rule;
  }
  // Collapsed tensor rule: x = s, y = t (1 - s) with Jacobian (1 - s).
  // A monomial x^a y^b becomes degree a + b + 1 in s and b in t.
  int n = (degree + 3) / 2;
  std::vector<double> gs, gw;
  gauss_legendre(n, gs, gw);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = gs[i], t = gs[j];
      double x = s, y = t * (1. - s);
      // weight relative to the reference area 1/2
      double w = 2. * gw[i] * gw[j] * (1. - s);
      rule.rows.push_back({1. - x - y, x, y, w});
    }
  }
  return rule;
}

} // namespace

QuadratureRule triangle_quadrature(const Vec2 &p0, const Vec2 &p1, const Vec2 &p2, int degree)
{
  BarycentricRule ref = reference_triangle_rule(degree);
  double area2 = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
  double area = 0.5 * std::abs(area2);
  QuadratureRule rule;
  rule.exactness = degree;
  rule.points.reserve(ref.rows.size());
  rule.weights.reserve(ref.rows.size());
  for (const auto &row : ref.rows) {
    rule.points.push_back(row[0] * p0 + row[1] * p1 + row[2] * p2);
    rule.weights.push_back(row[3] * area);
  }
  return rule;
}

QuadratureRule cell_quadrature(const Mesh &mesh, std::size_t iT, int degree)
{
  if (degree < 0) {
    throw std::invalid_argument("quadrature: degree must be >= 0");
  }
  const auto &loop = mesh.cell_vertices(iT);
  if (loop.size() == 3) {
    QuadratureRule rule =
        triangle_quadrature(mesh.vertex(loop[0]), mesh.vertex(loop[1]), mesh.vertex(loop[2]), degree);
    return rule;
  }
  const Vec2 center = mesh.geometry(iT).centroid;
  QuadratureRule rule;
  rule.exactness = degree;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 &p = mesh.vertex(loop[i]);
    const Vec2 &q = mesh.vertex(loop[(i + 1) % loop.size()]);
    QuadratureRule tri = triangle_quadrature(center, p, q, degree);
    rule.points.insert(rule.points.end(), tri.points.begin(), tri.points.end());
    rule.weights.insert(rule.weights.end(), tri.weights.begin(), tri.weights.end());
  }
  return rule;
}

QuadratureRule face_quadrature(const Mesh &mesh, std::size_t iF, int degree)
{
  if (degree < 0) {
    throw std::invalid_argument("quadrature: degree must be >= 0");
  }
  const Face &F = mesh.face(iF);
  int n = degree / 2 + 1; // exact to 2n - 1 >= degree
  std::vector<double> gs, gw;
  gauss_legendre(n, gs, gw);
  const Vec2 a = mesh.vertex(F.vertices[0]);
  const Vec2 b = mesh.vertex(F.vertices[1]);
  QuadratureRule rule;
  rule.exactness = degree;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.points[i] = a + gs[i] * (b - a);
    rule.weights[i] = gw[i] * F.length;
  }
  return rule;
}

} // namespace hho2d
