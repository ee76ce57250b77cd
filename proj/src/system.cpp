#include "hho2d/system.hpp"

#include "hho2d/parallel.hpp"
#include "hho2d/power_law.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace hho2d {

//------------------------------------------------------------------------------
// DofMap
//------------------------------------------------------------------------------

DofMap::DofMap(const Mesh &mesh, int k)
    : m_k(k), m_dim_element(NedelecBasis::dimension(k)),
      m_dim_face(2 * static_cast<std::size_t>(k + 1)),
      m_pressure_block(ScalarBasis::dimension(k))
{
  m_face_reduced.resize(mesh.n_faces(), -1);
  m_boundary_ordinal.resize(mesh.n_faces(), -1);
  std::size_t offset = mesh.n_cells() * m_dim_element;
  m_n_boundary = 0;
  for (std::size_t iF = 0; iF < mesh.n_faces(); ++iF) {
    if (mesh.face(iF).boundary) {
      m_boundary_ordinal[iF] = static_cast<std::ptrdiff_t>(m_n_boundary++);
    } else {
      m_face_reduced[iF] = static_cast<std::ptrdiff_t>(offset);
      offset += m_dim_face;
    }
  }
  m_n_velocity_reduced = offset;
  m_n_pressure = mesh.n_cells() * m_pressure_block;
}

Eigen::VectorXd gather_local_dofs(const Mesh &mesh, const DofMap &dofs, std::size_t iT,
                                  const Eigen::VectorXd &velocity_reduced,
                                  const Eigen::VectorXd &boundary_values)
{
  const auto &faces = mesh.cell_faces(iT);
  const Eigen::Index ne = static_cast<Eigen::Index>(dofs.element_block_size());
  const Eigen::Index nf = static_cast<Eigen::Index>(dofs.face_block_size());
  Eigen::VectorXd loc(ne + static_cast<Eigen::Index>(faces.size()) * nf);
  loc.head(ne) = velocity_reduced.segment(static_cast<Eigen::Index>(dofs.element_offset(iT)), ne);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    std::ptrdiff_t off = dofs.face_offset_reduced(faces[i]);
    if (off >= 0) {
      loc.segment(ne + static_cast<Eigen::Index>(i) * nf, nf) =
          velocity_reduced.segment(static_cast<Eigen::Index>(off), nf);
    } else {
      std::ptrdiff_t bo = dofs.boundary_ordinal(faces[i]);
      loc.segment(ne + static_cast<Eigen::Index>(i) * nf, nf) =
          boundary_values.segment(static_cast<Eigen::Index>(bo) * nf, nf);
    }
  }
  return loc;
}

//------------------------------------------------------------------------------
// BrinkmanSystem
//------------------------------------------------------------------------------

BrinkmanSystem::BrinkmanSystem(const Mesh &mesh, int k, BrinkmanProblem problem, bool parallel)
    : m_mesh(mesh), m_dofs(mesh, k), m_problem(std::move(problem)), m_parallel(parallel)
{
  if (m_problem.r <= 1.) {
    throw std::invalid_argument("system: the power-law exponent r must exceed 1");
  }
  if (m_problem.nu < 0. || m_problem.mu < 0. || (m_problem.mu == 0. && m_problem.nu == 0.)) {
    throw std::invalid_argument("system: require mu, nu >= 0 and not both zero");
  }

  m_ops.resize(mesh.n_cells(), LocalOperators{});
  parallel_for(
      mesh.n_cells(), [&](std::size_t iT) { m_ops[iT] = build_local_operators(mesh, iT, k); },
      m_parallel);

  // Prescribed boundary-face coefficients.
  const Eigen::Index nf = static_cast<Eigen::Index>(m_dofs.face_block_size());
  m_boundary_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_dofs.n_boundary_values()));
  if (m_problem.dirichlet) {
    for (std::size_t iF = 0; iF < mesh.n_faces(); ++iF) {
      std::ptrdiff_t bo = m_dofs.boundary_ordinal(iF);
      if (bo < 0) {
        continue;
      }
      FaceScalarBasis fb(mesh.face(iF), k);
      m_boundary_values.segment(static_cast<Eigen::Index>(bo) * nf, nf) = l2_project(
          m_problem.dirichlet, fb, face_quadrature(mesh, iF, nonpoly_quadrature_degree(k)));
    }
  }

  // Source moments: per cell P_d^T (f-moments in the vector monomial basis)
  // and plain g-moments against the pressure basis.
  m_rhs_momentum.resize(mesh.n_cells());
  m_rhs_mass.resize(mesh.n_cells());
  parallel_for(
      mesh.n_cells(),
      [&](std::size_t iT) {
        const LocalOperators &ops = m_ops[iT];
        const Eigen::Index Nk = static_cast<Eigen::Index>(ops.basis_k.dim());
        QuadratureRule quad = cell_quadrature(mesh, iT, nonpoly_quadrature_degree(k));
        Eigen::MatrixXd V = ops.basis_k.values_at(quad.points);
        Eigen::VectorXd fmom = Eigen::VectorXd::Zero(2 * Nk);
        Eigen::VectorXd gmom = Eigen::VectorXd::Zero(Nk);
        for (std::size_t q = 0; q < quad.size(); ++q) {
          const Vec2 x = quad.points[q];
          const double w = quad.weights[q];
          const Vec2 f = m_problem.momentum_source ? m_problem.momentum_source(x) : Vec2::Zero();
          const double g = m_problem.mass_source ? m_problem.mass_source(x) : 0.;
          fmom.head(Nk) += (w * f.x()) * V.row(static_cast<Eigen::Index>(q)).transpose();
          fmom.tail(Nk) += (w * f.y()) * V.row(static_cast<Eigen::Index>(q)).transpose();
          gmom += (w * g) * V.row(static_cast<Eigen::Index>(q)).transpose();
        }
        m_rhs_momentum[iT] = ops.darcy_velocity.transpose() * fmom;
        m_rhs_mass[iT] = gmom;
      },
      m_parallel);
}

namespace {

struct CellResidual {
  Eigen::VectorXd momentum; // per local velocity dof
  Eigen::VectorXd mass;     // per local pressure dof
};

// Power-law Stokes contribution of one cell: residual vector and, when
// jacobian != nullptr, the local tangent matrix. Uses the non-polynomial
// quadrature policy; exact for r = 2.
void stokes_contribution(const Mesh &mesh, std::size_t iT, const LocalOperators &ops,
                         const Eigen::VectorXd &u_loc, double mu, double r,
                         Eigen::VectorXd &residual, Eigen::MatrixXd *jacobian)
{
  const int k = ops.layout.degree;
  const Eigen::Index Nk = static_cast<Eigen::Index>(ops.basis_k.dim());
  const Eigen::Index ndof = static_cast<Eigen::Index>(ops.layout.total());
  const double h = mesh.geometry(iT).diameter;

  QuadratureRule quad = cell_quadrature(mesh, iT, nonpoly_quadrature_degree(k));
  const Eigen::Index nq = static_cast<Eigen::Index>(quad.size());
  Eigen::MatrixXd V = ops.basis_k.values_at(quad.points);

  // Values of the reconstructed gradient basis at the quadrature points,
  // one (nq x ndof) block per tensor entry.
  std::array<Eigen::MatrixXd, 4> Bg;
  std::array<Eigen::VectorXd, 4> tau;
  for (int c = 0; c < 4; ++c) {
    Bg[c] = V * ops.gradient.middleRows(c * Nk, Nk);
    tau[c] = Bg[c] * u_loc;
  }
  Eigen::VectorXd wa(nq), wb(nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    Mat2 G;
    G << tau[0](q), tau[1](q), tau[2](q), tau[3](q);
    const double wq = quad.weights[static_cast<std::size_t>(q)];
    Mat2 s = sigma(G, mu, r);
    residual += wq * (s(0, 0) * Bg[0].row(q) + s(0, 1) * Bg[1].row(q) + s(1, 0) * Bg[2].row(q) +
                      s(1, 1) * Bg[3].row(q))
                    .transpose();
    if (jacobian) {
      SigmaDerivative d = dsigma_coefficients(G.norm(), mu, r);
      wa(q) = wq * d.a;
      wb(q) = wq * d.b;
    }
  }
  if (jacobian) {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(nq, ndof);
    for (int c = 0; c < 4; ++c) {
      *jacobian += Bg[c].transpose() * wa.asDiagonal() * Bg[c];
      Z += tau[c].asDiagonal() * Bg[c];
    }
    *jacobian += Z.transpose() * wb.asDiagonal() * Z;
  }

  // Boundary-difference stabilization, h_T^{1-r} int_dT sigma(Delta u).Delta v.
  const double stab_weight = std::pow(h, 1. - r);
  for (std::size_t i = 0; i < ops.layout.n_faces; ++i) {
    QuadratureRule fq = face_quadrature(mesh, mesh.cell_faces(iT)[i], nonpoly_quadrature_degree(k));
    const Eigen::Index nqf = static_cast<Eigen::Index>(fq.size());
    Eigen::MatrixXd Fvals = ops.face_bases[i].scalar().values_at(fq.points);
    std::array<Eigen::MatrixXd, 2> Bd;
    std::array<Eigen::VectorXd, 2> dval;
    for (int c = 0; c < 2; ++c) {
      Bd[c] = Fvals * ops.boundary_difference[i].middleRows(c * (k + 1), k + 1);
      dval[c] = Bd[c] * u_loc;
    }
    Eigen::VectorXd fwa(nqf), fwb(nqf);
    for (Eigen::Index q = 0; q < nqf; ++q) {
      Vec2 dv(dval[0](q), dval[1](q));
      const double wq = stab_weight * fq.weights[static_cast<std::size_t>(q)];
      Vec2 s = sigma(dv, mu, r);
      residual += wq * (s.x() * Bd[0].row(q) + s.y() * Bd[1].row(q)).transpose();
      if (jacobian) {
        SigmaDerivative d = dsigma_coefficients(dv.norm(), mu, r);
        fwa(q) = wq * d.a;
        fwb(q) = wq * d.b;
      }
    }
    if (jacobian) {
      Eigen::MatrixXd Zf = Eigen::MatrixXd::Zero(nqf, ndof);
      for (int c = 0; c < 2; ++c) {
        *jacobian += Bd[c].transpose() * fwa.asDiagonal() * Bd[c];
        Zf += dval[c].asDiagonal() * Bd[c];
      }
      *jacobian += Zf.transpose() * fwb.asDiagonal() * Zf;
    }
  }
}

} // namespace

Eigen::VectorXd BrinkmanSystem::residual_with_exponent(const Eigen::VectorXd &state, double r) const
{
  const Eigen::Index n = state_size();
  if (state.size() != n) {
    throw std::invalid_argument("system: state vector has the wrong size");
  }
  const Eigen::VectorXd u = velocity(state);
  const Eigen::VectorXd p = pressure(state);
  const double lambda = multiplier(state);

  std::vector<CellResidual> local(m_mesh.n_cells());
  parallel_for(
      m_mesh.n_cells(),
      [&](std::size_t iT) {
        const LocalOperators &ops = m_ops[iT];
        Eigen::VectorXd u_loc = gather_local_dofs(m_mesh, m_dofs, iT, u, m_boundary_values);
        Eigen::VectorXd p_loc = p.segment(
            static_cast<Eigen::Index>(m_dofs.pressure_offset(iT) - m_dofs.n_velocity_reduced()),
            static_cast<Eigen::Index>(m_dofs.pressure_block_size()));

        Eigen::VectorXd mom = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ops.layout.total()));
        stokes_contribution(m_mesh, iT, ops, u_loc, m_problem.mu, r, mom, nullptr);
        mom += m_problem.nu * (ops.darcy_form * u_loc);
        mom += ops.pressure_coupling.transpose() * p_loc;
        mom -= m_rhs_momentum[iT];

        Eigen::VectorXd mass =
            ops.pressure_coupling * u_loc + m_rhs_mass[iT] - lambda * ops.pressure_moments;
        local[iT] = CellResidual{std::move(mom), std::move(mass)};
      },
      m_parallel);

  // Fixed-order reduction.
  Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
  const Eigen::Index ne = static_cast<Eigen::Index>(m_dofs.element_block_size());
  const Eigen::Index nf = static_cast<Eigen::Index>(m_dofs.face_block_size());
  for (std::size_t iT = 0; iT < m_mesh.n_cells(); ++iT) {
    const auto &faces = m_mesh.cell_faces(iT);
    F.segment(static_cast<Eigen::Index>(m_dofs.element_offset(iT)), ne) +=
        local[iT].momentum.head(ne);
    for (std::size_t i = 0; i < faces.size(); ++i) {
      std::ptrdiff_t off = m_dofs.face_offset_reduced(faces[i]);
      if (off >= 0) {
        F.segment(static_cast<Eigen::Index>(off), nf) +=
            local[iT].momentum.segment(ne + static_cast<Eigen::Index>(i) * nf, nf);
      }
    }
    F.segment(static_cast<Eigen::Index>(m_dofs.pressure_offset(iT)),
              static_cast<Eigen::Index>(m_dofs.pressure_block_size())) += local[iT].mass;
    F(static_cast<Eigen::Index>(m_dofs.multiplier_index())) -=
        m_ops[iT].pressure_moments.dot(p.segment(
            static_cast<Eigen::Index>(m_dofs.pressure_offset(iT) - m_dofs.n_velocity_reduced()),
            static_cast<Eigen::Index>(m_dofs.pressure_block_size())));
  }
  return F;
}

Eigen::SparseMatrix<double> BrinkmanSystem::jacobian_with_exponent(const Eigen::VectorXd &state,
                                                                   double r) const
{
  const Eigen::VectorXd u = velocity(state);

  struct CellBlocks {
    Eigen::MatrixXd velocity; // ndof x ndof
  };
  std::vector<CellBlocks> local(m_mesh.n_cells());
  parallel_for(
      m_mesh.n_cells(),
      [&](std::size_t iT) {
        const LocalOperators &ops = m_ops[iT];
        const Eigen::Index ndof = static_cast<Eigen::Index>(ops.layout.total());
        Eigen::VectorXd u_loc = gather_local_dofs(m_mesh, m_dofs, iT, u, m_boundary_values);
        Eigen::MatrixXd K = m_problem.nu * ops.darcy_form;
        Eigen::VectorXd dummy = Eigen::VectorXd::Zero(ndof);
        stokes_contribution(m_mesh, iT, ops, u_loc, m_problem.mu, r, dummy, &K);
        local[iT] = CellBlocks{std::move(K)};
      },
      m_parallel);

  const Eigen::Index n = state_size();
  const Eigen::Index ne = static_cast<Eigen::Index>(m_dofs.element_block_size());
  const Eigen::Index nf = static_cast<Eigen::Index>(m_dofs.face_block_size());
  const Eigen::Index np = static_cast<Eigen::Index>(m_dofs.pressure_block_size());
  const Eigen::Index mult = static_cast<Eigen::Index>(m_dofs.multiplier_index());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m_mesh.n_cells() * 600);
  for (std::size_t iT = 0; iT < m_mesh.n_cells(); ++iT) {
    const LocalOperators &ops = m_ops[iT];
    const auto &faces = m_mesh.cell_faces(iT);
    const Eigen::Index ndof = static_cast<Eigen::Index>(ops.layout.total());

    // Local velocity dof -> reduced global index (-1 for eliminated dofs).
    std::vector<Eigen::Index> vmap(static_cast<std::size_t>(ndof), -1);
    for (Eigen::Index j = 0; j < ne; ++j) {
      vmap[static_cast<std::size_t>(j)] =
          static_cast<Eigen::Index>(m_dofs.element_offset(iT)) + j;
    }
    for (std::size_t i = 0; i < faces.size(); ++i) {
      std::ptrdiff_t off = m_dofs.face_offset_reduced(faces[i]);
      if (off < 0) {
        continue;
      }
      for (Eigen::Index j = 0; j < nf; ++j) {
        vmap[static_cast<std::size_t>(ne + static_cast<Eigen::Index>(i) * nf + j)] =
            static_cast<Eigen::Index>(off) + j;
      }
    }
    const Eigen::Index poff = static_cast<Eigen::Index>(m_dofs.pressure_offset(iT));

    const Eigen::MatrixXd &K = local[iT].velocity;
    for (Eigen::Index a = 0; a < ndof; ++a) {
      if (vmap[static_cast<std::size_t>(a)] < 0) {
        continue;
      }
      for (Eigen::Index b = 0; b < ndof; ++b) {
        if (vmap[static_cast<std::size_t>(b)] < 0) {
          continue;
        }
        triplets.emplace_back(vmap[static_cast<std::size_t>(a)], vmap[static_cast<std::size_t>(b)],
                              K(a, b));
      }
    }
    for (Eigen::Index q = 0; q < np; ++q) {
      for (Eigen::Index b = 0; b < ndof; ++b) {
        if (vmap[static_cast<std::size_t>(b)] < 0) {
          continue;
        }
        double val = ops.pressure_coupling(q, b);
        triplets.emplace_back(poff + q, vmap[static_cast<std::size_t>(b)], val);
        triplets.emplace_back(vmap[static_cast<std::size_t>(b)], poff + q, val);
      }
      triplets.emplace_back(poff + q, mult, -ops.pressure_moments(q));
      triplets.emplace_back(mult, poff + q, -ops.pressure_moments(q));
    }
  }

  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(triplets.begin(), triplets.end());
  return J;
}

double BrinkmanSystem::pressure_integral(const Eigen::VectorXd &state) const
{
  const Eigen::VectorXd p = pressure(state);
  double integral = 0.;
  for (std::size_t iT = 0; iT < m_mesh.n_cells(); ++iT) {
    integral += m_ops[iT].pressure_moments.dot(
        p.segment(static_cast<Eigen::Index>(m_dofs.pressure_offset(iT) - m_dofs.n_velocity_reduced()),
                  static_cast<Eigen::Index>(m_dofs.pressure_block_size())));
  }
  return integral;
}

void BrinkmanSystem::newton_single(Eigen::VectorXd &state, double r, const NewtonOptions &opts,
                                   NewtonReport &report) const
{
  report.exponent_path.push_back(r);
  report.iterations = 0;
  Eigen::VectorXd F = residual_with_exponent(state, r);
  double norm = F.norm();
  report.residual_norms.push_back(norm);
  if (norm <= opts.tolerance) {
    report.converged = true;
    return;
  }
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::SparseMatrix<double> J = jacobian_with_exponent(state, r);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("newton: singular linear system (factorization failed)");
    }
    ++report.factorizations;
    report.system_size = static_cast<std::size_t>(J.rows());
    report.jacobian_nonzeros = static_cast<std::size_t>(J.nonZeros());
    Eigen::VectorXd delta = lu.solve(-F);
    if (lu.info() != Eigen::Success) {
      throw std::runtime_error("newton: linear solve failed");
    }

    double step = 1.;
    int halvings = 0;
    Eigen::VectorXd trial, Ft;
    double trial_norm = 0.;
    while (true) {
      trial = state + step * delta;
      Ft = residual_with_exponent(trial, r);
      trial_norm = Ft.norm();
      if (trial_norm < norm || halvings >= opts.max_halvings) {
        break;
      }
      step *= 0.5;
      ++halvings;
    }
    state = trial;
    F = Ft;
    norm = trial_norm;
    report.iterations = it;
    report.halvings_per_iteration.push_back(halvings);
    report.residual_norms.push_back(norm);
    if (!std::isfinite(norm)) {
      report.converged = false;
      return;
    }
    if (norm <= opts.tolerance) {
      report.converged = true;
      return;
    }
  }
  report.converged = false;
}

NewtonReport BrinkmanSystem::newton_solve(Eigen::VectorXd &state, const NewtonOptions &opts) const
{
  NewtonReport report;
  if (opts.continuation && m_problem.r > 2.) {
    // Warm starts through intermediate exponents; only the final solve with
    // the target exponent decides convergence.
    double step = (opts.continuation_step > 0.) ? opts.continuation_step : 0.5;
    for (double rc = 2.; rc < m_problem.r - 1e-12; rc += step) {
      newton_single(state, rc, opts, report);
    }
  }
  report.converged = false;
  newton_single(state, m_problem.r, opts, report);
  return report;
}

} // namespace hho2d
