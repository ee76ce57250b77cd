#include "hho2d/norms.hpp"

#include "hho2d/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hho2d {

double q_exponent(double r) { return (r < 2.) ? 2. : r; }

double alpha_mu(double mu_min, double r)
{
  if (r < 2.) {
    return std::pow(mu_min, (2. - r) / (r * (r - 1.)));
  }
  return 1.;
}

//------------------------------------------------------------------------------
// Local norms
//------------------------------------------------------------------------------

double norm_1q_T(const Mesh &mesh, std::size_t iT, const LocalOperators &ops,
                 const Eigen::VectorXd &u_loc, double q)
{
  const int k = ops.layout.degree;
  const Eigen::Index Nk = static_cast<Eigen::Index>(ops.basis_k.dim());
  const double h = mesh.geometry(iT).diameter;

  // Element field coefficients in the vector monomial basis.
  Eigen::VectorXd vT = ops.element_value * u_loc;

  double vol = 0.;
  QuadratureRule quad = cell_quadrature(mesh, iT, nonpoly_quadrature_degree(k));
  auto [Dx, Dy] = ops.basis_k.gradients_at(quad.points);
  for (std::size_t iq = 0; iq < quad.size(); ++iq) {
    Eigen::Index qi = static_cast<Eigen::Index>(iq);
    Mat2 G;
    G(0, 0) = Dx.row(qi).dot(vT.head(Nk));
    G(0, 1) = Dy.row(qi).dot(vT.head(Nk));
    G(1, 0) = Dx.row(qi).dot(vT.tail(Nk));
    G(1, 1) = Dy.row(qi).dot(vT.tail(Nk));
    vol += quad.weights[iq] * std::pow(G.norm(), q);
  }

  double face_sum = 0.;
  for (std::size_t i = 0; i < ops.layout.n_faces; ++i) {
    QuadratureRule fq = face_quadrature(mesh, mesh.cell_faces(iT)[i], nonpoly_quadrature_degree(k));
    Eigen::MatrixXd Fvals = ops.face_bases[i].scalar().values_at(fq.points);
    Eigen::MatrixXd Cvals = ops.basis_k.values_at(fq.points);
    Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i));
    for (std::size_t iq = 0; iq < fq.size(); ++iq) {
      Eigen::Index qi = static_cast<Eigen::Index>(iq);
      Vec2 vF(Fvals.row(qi).dot(u_loc.segment(off, k + 1)),
              Fvals.row(qi).dot(u_loc.segment(off + k + 1, k + 1)));
      Vec2 vTx(Cvals.row(qi).dot(vT.head(Nk)), Cvals.row(qi).dot(vT.tail(Nk)));
      face_sum += fq.weights[iq] * std::pow((vF - vTx).norm(), q);
    }
  }
  return std::pow(vol + std::pow(h, 1. - q) * face_sum, 1. / q);
}

double norm_02_T(const Mesh &mesh, std::size_t iT, const LocalOperators &ops,
                 const Eigen::VectorXd &u_loc)
{
  const int k = ops.layout.degree;
  const Eigen::Index Nk = static_cast<Eigen::Index>(ops.basis_k.dim());
  const double h = mesh.geometry(iT).diameter;

  Eigen::VectorXd vT = ops.element_value * u_loc;
  double vol = vT.head(Nk).dot(ops.mass_k * vT.head(Nk)) + vT.tail(Nk).dot(ops.mass_k * vT.tail(Nk));

  double face_sum = 0.;
  for (std::size_t i = 0; i < ops.layout.n_faces; ++i) {
    QuadratureRule fq = face_quadrature(mesh, mesh.cell_faces(iT)[i], 2 * (k + 1));
    Eigen::MatrixXd Fvals = ops.face_bases[i].scalar().values_at(fq.points);
    Eigen::MatrixXd Cvals = ops.basis_k.values_at(fq.points);
    Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i));
    for (std::size_t iq = 0; iq < fq.size(); ++iq) {
      Eigen::Index qi = static_cast<Eigen::Index>(iq);
      Vec2 vF(Fvals.row(qi).dot(u_loc.segment(off, k + 1)),
              Fvals.row(qi).dot(u_loc.segment(off + k + 1, k + 1)));
      Vec2 vTx(Cvals.row(qi).dot(vT.head(Nk)), Cvals.row(qi).dot(vT.tail(Nk)));
      face_sum += fq.weights[iq] * (vF - vTx).squaredNorm();
    }
  }
  return std::sqrt(vol + h * face_sum);
}

double norm_d_T(const LocalOperators &ops, const Eigen::VectorXd &u_loc)
{
  return std::sqrt(u_loc.dot(ops.darcy_form * u_loc));
}

//------------------------------------------------------------------------------
// Global norms
//------------------------------------------------------------------------------

namespace {

Eigen::VectorXd zero_boundary(const Mesh &mesh, const DofMap &dofs)
{
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.n_boundary_values()));
}

} // namespace

double norm_mu_r(const Mesh &mesh, const DofMap &dofs, const std::vector<LocalOperators> &ops,
                 const Eigen::VectorXd &velocity_reduced, double mu, double r)
{
  Eigen::VectorXd bc = zero_boundary(mesh, dofs);
  std::vector<double> contributions(mesh.n_cells());
  parallel_for(mesh.n_cells(), [&](std::size_t iT) {
    Eigen::VectorXd u_loc = gather_local_dofs(mesh, dofs, iT, velocity_reduced, bc);
    contributions[iT] = mu * std::pow(norm_1q_T(mesh, iT, ops[iT], u_loc, r), r);
  });
  double total = 0.;
  for (double c : contributions) {
    total += c;
  }
  return std::pow(total, 1. / r);
}

double norm_nu(const Mesh &mesh, const DofMap &dofs, const std::vector<LocalOperators> &ops,
               const Eigen::VectorXd &velocity_reduced, double nu)
{
  if (nu == 0.) {
    return 0.;
  }
  Eigen::VectorXd bc = zero_boundary(mesh, dofs);
  std::vector<double> contributions(mesh.n_cells());
  parallel_for(mesh.n_cells(), [&](std::size_t iT) {
    Eigen::VectorXd u_loc = gather_local_dofs(mesh, dofs, iT, velocity_reduced, bc);
    contributions[iT] = nu * u_loc.dot(ops[iT].darcy_form * u_loc);
  });
  double total = 0.;
  for (double c : contributions) {
    total += c;
  }
  return std::sqrt(total);
}

double monitored_error(const Mesh &mesh, const DofMap &dofs,
                       const std::vector<LocalOperators> &ops, const Eigen::VectorXd &error,
                       double mu, double nu, double r)
{
  double e_mu = norm_mu_r(mesh, dofs, ops, error, mu, r);
  double e_nu = norm_nu(mesh, dofs, ops, error, nu);
  return alpha_mu(mu, r) * std::pow(e_mu, q_exponent(r)) + e_nu * e_nu;
}

//------------------------------------------------------------------------------
// Global interpolator
//------------------------------------------------------------------------------

GlobalInterpolant interpolate_global(const VectorField &u, const Mesh &mesh, const DofMap &dofs,
                                     int quad_degree)
{
  const int k = dofs.degree();
  if (quad_degree < 0) {
    quad_degree = nonpoly_quadrature_degree(k);
  }
  GlobalInterpolant I;
  I.reduced = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.n_velocity_reduced()));
  I.boundary_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.n_boundary_values()));
  const Eigen::Index ne = static_cast<Eigen::Index>(dofs.element_block_size());
  const Eigen::Index nf = static_cast<Eigen::Index>(dofs.face_block_size());

  if (ne > 0) {
    std::vector<Eigen::VectorXd> elem(mesh.n_cells());
    parallel_for(mesh.n_cells(), [&](std::size_t iT) {
      const CellGeometry &geo = mesh.geometry(iT);
      NedelecBasis ned(geo.centroid, geo.diameter, k);
      elem[iT] = nedelec_project(u, ned, cell_quadrature(mesh, iT, quad_degree));
    });
    for (std::size_t iT = 0; iT < mesh.n_cells(); ++iT) {
      I.reduced.segment(static_cast<Eigen::Index>(dofs.element_offset(iT)), ne) = elem[iT];
    }
  }

  std::vector<Eigen::VectorXd> face(mesh.n_faces());
  parallel_for(mesh.n_faces(), [&](std::size_t iF) {
    FaceScalarBasis fb(mesh.face(iF), k);
    face[iF] = l2_project(u, fb, face_quadrature(mesh, iF, quad_degree));
  });
  for (std::size_t iF = 0; iF < mesh.n_faces(); ++iF) {
    std::ptrdiff_t off = dofs.face_offset_reduced(iF);
    if (off >= 0) {
      I.reduced.segment(static_cast<Eigen::Index>(off), nf) = face[iF];
    } else {
      Eigen::Index bo = static_cast<Eigen::Index>(dofs.boundary_ordinal(iF));
      I.boundary_values.segment(bo * nf, nf) = face[iF];
      // Face-averaged L2 density of the trace, ( |F|^{-1} int_F |u|^2 )^{1/2}.
      QuadratureRule fq = face_quadrature(mesh, iF, quad_degree);
      double t = 0.;
      for (std::size_t q = 0; q < fq.size(); ++q) {
        t += fq.weights[q] * u(fq.points[q]).squaredNorm();
      }
      I.max_boundary_trace = std::max(I.max_boundary_trace, std::sqrt(t / mesh.face(iF).length));
    }
  }
  // When u satisfies the homogeneous boundary condition, pin the boundary
  // blocks to exact zeros so the interpolant is a genuine member of the
  // strongly constrained space.
  if (I.max_boundary_trace <= 1e-10) {
    I.boundary_values.setZero();
  }
  return I;
}

//------------------------------------------------------------------------------
// Coefficient of friction
//------------------------------------------------------------------------------

RegimeClassification classify_regimes(const Mesh &mesh, double r, double mu, double nu,
                                      const TensorField &grad_u)
{
  RegimeClassification out;
  out.friction.resize(mesh.n_cells());
  out.darcy.resize(mesh.n_cells());
  const double inf = std::numeric_limits<double>::infinity();

  parallel_for(mesh.n_cells(), [&](std::size_t iT) {
    const CellGeometry &geo = mesh.geometry(iT);
    double sup = 0.;
    if (r == 2.) {
      sup = 1.; // |grad u|^0
    } else {
      QuadratureRule quad = cell_quadrature(mesh, iT, nonpoly_quadrature_degree(2));
      std::vector<Vec2> samples = quad.points;
      for (std::size_t iv : mesh.cell_vertices(iT)) {
        samples.push_back(mesh.vertex(iv));
      }
      for (const Vec2 &x : samples) {
        sup = std::max(sup, std::pow(grad_u(x).norm(), r - 2.));
      }
    }
    double kappa = mu * sup;
    double Cf;
    if (kappa == 0.) {
      Cf = inf;
    } else if (r < 2. && mu > 0. && sup > 1e12) {
      Cf = 0.;
    } else {
      Cf = nu * geo.diameter * geo.diameter / kappa;
    }
    out.friction[iT] = Cf;
    out.darcy[iT] = (Cf >= 1.);
  });

  std::size_t n_darcy = 0;
  for (bool d : out.darcy) {
    n_darcy += d ? 1 : 0;
  }
  out.darcy_fraction = static_cast<double>(n_darcy) / static_cast<double>(mesh.n_cells());
  std::vector<double> sorted = out.friction;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  out.median_friction = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return out;
}

//------------------------------------------------------------------------------
// Pressure diagnostic and rates
//------------------------------------------------------------------------------

double pressure_error_lr(const Mesh &mesh, const DofMap &dofs,
                         const std::vector<LocalOperators> &ops,
                         const Eigen::VectorXd &pressure_coeffs, const ScalarField &p_exact,
                         double r)
{
  const double rp = r / (r - 1.); // conjugate exponent
  const Eigen::Index np = static_cast<Eigen::Index>(dofs.pressure_block_size());
  std::vector<double> contributions(mesh.n_cells());
  parallel_for(mesh.n_cells(), [&](std::size_t iT) {
    const LocalOperators &op = ops[iT];
    QuadratureRule quad = cell_quadrature(mesh, iT, nonpoly_quadrature_degree(op.layout.degree));
    Eigen::VectorXd pi_p = l2_project(p_exact, op.basis_k, quad);
    Eigen::VectorXd ph = pressure_coeffs.segment(
        static_cast<Eigen::Index>(dofs.pressure_offset(iT) - dofs.n_velocity_reduced()), np);
    Eigen::MatrixXd V = op.basis_k.values_at(quad.points);
    double cell = 0.;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      double diff = V.row(static_cast<Eigen::Index>(q)).dot(ph - pi_p);
      cell += quad.weights[q] * std::pow(std::abs(diff), rp);
    }
    contributions[iT] = cell;
  });
  double total = 0.;
  for (double c : contributions) {
    total += c;
  }
  return std::pow(total, 1. / rp);
}

std::vector<double> convergence_rates(const std::vector<std::pair<double, double>> &levels)
{
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    auto [h0, e0] = levels[i];
    auto [h1, e1] = levels[i + 1];
    rates.push_back(std::log(e0 / e1) / std::log(h0 / h1));
  }
  return rates;
}

} // namespace hho2d
