#include "hho2d/local_operators.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace hho2d {

namespace {

Eigen::VectorXd weights_vector(const QuadratureRule &quad)
{
  return Eigen::Map<const Eigen::VectorXd>(quad.weights.data(),
                                           static_cast<Eigen::Index>(quad.size()));
}

// LDLT solve with one step of iterative refinement; keeps the operator
// identities near machine precision on badly shaped (clipped) cells.
Eigen::MatrixXd refined_solve(const Eigen::MatrixXd &M, const Eigen::LDLT<Eigen::MatrixXd> &ldlt,
                              const Eigen::MatrixXd &B)
{
  Eigen::MatrixXd X = ldlt.solve(B);
  X += ldlt.solve(Eigen::MatrixXd(B - M * X));
  return X;
}

} // namespace

LocalOperators build_local_operators(const Mesh &mesh, std::size_t iT, int k)
{
  if (k < 0 || k > 2) {
    throw std::invalid_argument("local operators: degree must be in {0, 1, 2}");
  }
  const CellGeometry &geo = mesh.geometry(iT);
  const auto &faces = mesh.cell_faces(iT);
  const std::string cell_tag = "cell " + std::to_string(iT);

  const double h = geo.diameter;
  const std::size_t n_faces = faces.size();
  const Eigen::Index Nk = static_cast<Eigen::Index>(ScalarBasis::dimension(k));
  const Eigen::Index Nk1 = static_cast<Eigen::Index>(ScalarBasis::dimension(k + 1));
  const Eigen::Index Nlow = static_cast<Eigen::Index>(ScalarBasis::dimension(k - 1));
  const Eigen::Index nface_dofs = 2 * (k + 1);

  LocalOperators ops{
      LocalDofLayout{k, NedelecBasis::dimension(k), n_faces, static_cast<std::size_t>(nface_dofs)},
      1. / (h * h * geo.area),
      h * h * static_cast<double>(n_faces) / geo.area,
      ScalarBasis(geo.centroid, h, k),
      ScalarBasis(geo.centroid, h, k + 1),
      NedelecBasis(geo.centroid, h, k),
      {},
      {}};
  const Eigen::Index ndof = static_cast<Eigen::Index>(ops.layout.total());
  const Eigen::Index Nned = static_cast<Eigen::Index>(ops.layout.dim_element);

  // Cell quadrature exact for every polynomial integrand below (max degree
  // 2(k+1) from the P^{k+1} mass matrix).
  QuadratureRule quad = cell_quadrature(mesh, iT, 2 * (k + 1));
  Eigen::VectorXd w = weights_vector(quad);
  Eigen::MatrixXd Vk = ops.basis_k.values_at(quad.points);
  Eigen::MatrixXd Vk1 = ops.basis_k1.values_at(quad.points);
  auto [Dxk, Dyk] = ops.basis_k.gradients_at(quad.points);
  auto [Dxk1, Dyk1] = ops.basis_k1.gradients_at(quad.points);

  ops.mass_k = Vk.transpose() * w.asDiagonal() * Vk;
  ops.mass_k1 = Vk1.transpose() * w.asDiagonal() * Vk1;
  ops.gram_nedelec = gram_matrix(ops.nedelec, quad);

  Eigen::LDLT<Eigen::MatrixXd> mass_k_ldlt(ops.mass_k);
  if (mass_k_ldlt.info() != Eigen::Success) {
    throw std::runtime_error(cell_tag + ": singular P^k mass matrix");
  }

  // Face bases, quadratures and evaluation tables.
  std::vector<QuadratureRule> fquad;
  std::vector<Eigen::MatrixXd> Fv;        // face basis at face points
  std::vector<Eigen::MatrixXd> Vk_on_f;   // cell P^k basis at face points
  std::vector<Eigen::MatrixXd> Vk1_on_f;  // cell P^{k+1} basis at face points
  std::vector<Eigen::VectorXd> wf;
  ops.face_bases.reserve(n_faces);
  for (std::size_t i = 0; i < n_faces; ++i) {
    const Face &F = mesh.face(faces[i]);
    ops.face_bases.emplace_back(F, k);
    ops.face_is_boundary.push_back(F.boundary);
    fquad.push_back(face_quadrature(mesh, faces[i], 2 * (k + 1)));
    wf.push_back(weights_vector(fquad.back()));
    Fv.push_back(ops.face_bases.back().scalar().values_at(fquad.back().points));
    Vk_on_f.push_back(ops.basis_k.values_at(fquad.back().points));
    Vk1_on_f.push_back(ops.basis_k1.values_at(fquad.back().points));
    ops.face_mass.push_back(Fv.back().transpose() * wf.back().asDiagonal() * Fv.back());
  }

  //----------------------------------------------------------------------------
  // Element value map E: local dofs -> vector monomial coefficients of v_T
  //----------------------------------------------------------------------------
  ops.element_value = Eigen::MatrixXd::Zero(2 * Nk, ndof);
  if (k >= 1) {
    ops.element_value.leftCols(Nned) = ops.nedelec.embedding();
  } else {
    for (std::size_t i = 0; i < n_faces; ++i) {
      // varpi_TF |F| / |T| with varpi_TF = d_TF / 2
      double coeff = 0.5 * geo.face_distance[i] * geo.face_length[i] / geo.area;
      Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i));
      ops.element_value(0, off + 0) = coeff;
      ops.element_value(1, off + k + 1) = coeff;
    }
  }
  const auto E_comp = [&](int c) { return ops.element_value.middleRows(c * Nk, Nk); };

  //----------------------------------------------------------------------------
  // Gradient reconstruction
  //----------------------------------------------------------------------------
  Eigen::MatrixXd Rg = Eigen::MatrixXd::Zero(4 * Nk, ndof);
  for (int ri = 0; ri < 2; ++ri) {
    for (int cj = 0; cj < 2; ++cj) {
      Eigen::Index block = (2 * ri + cj) * Nk;
      const Eigen::MatrixXd &Dc = (cj == 0) ? Dxk : Dyk;
      Rg.middleRows(block, Nk) -= Dc.transpose() * w.asDiagonal() * Vk * E_comp(ri);
      for (std::size_t i = 0; i < n_faces; ++i) {
        double n_cj = geo.face_normal[i](cj);
        Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i)) + ri * (k + 1);
        Rg.block(block, off, Nk, k + 1) +=
            n_cj * Vk_on_f[i].transpose() * wf[i].asDiagonal() * Fv[i];
      }
    }
  }
  ops.gradient = Eigen::MatrixXd(4 * Nk, ndof);
  for (int c = 0; c < 4; ++c) {
    ops.gradient.middleRows(c * Nk, Nk) =
        refined_solve(ops.mass_k, mass_k_ldlt, Rg.middleRows(c * Nk, Nk));
  }

  //----------------------------------------------------------------------------
  // Divergence
  //----------------------------------------------------------------------------
  Eigen::MatrixXd Rd = Vk.transpose() * w.asDiagonal() * (Dxk * E_comp(0) + Dyk * E_comp(1));
  for (std::size_t i = 0; i < n_faces; ++i) {
    const Vec2 &n = geo.face_normal[i];
    Eigen::MatrixXd face_term = Vk_on_f[i].transpose() * wf[i].asDiagonal() * Fv[i];
    Eigen::MatrixXd cell_on_face = Vk_on_f[i].transpose() * wf[i].asDiagonal() * Vk_on_f[i];
    for (int ri = 0; ri < 2; ++ri) {
      Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i)) + ri * (k + 1);
      Rd.block(0, off, Nk, k + 1) += n(ri) * face_term;
      Rd -= n(ri) * cell_on_face * E_comp(ri);
    }
  }
  ops.divergence = refined_solve(ops.mass_k, mass_k_ldlt, Rd);

  //----------------------------------------------------------------------------
  // Stokes velocity reconstruction
  //----------------------------------------------------------------------------
  Eigen::MatrixXd stiff_k1 =
      Dxk1.transpose() * w.asDiagonal() * Dxk1 + Dyk1.transpose() * w.asDiagonal() * Dyk1;
  Eigen::VectorXd mom_k1 = Vk1.transpose() * w; // int_T of the P^{k+1} basis
  Eigen::VectorXd mom_k = Vk.transpose() * w;
  Eigen::MatrixXd Ks = Eigen::MatrixXd::Zero(2 * Nk1, 2 * Nk1);
  Eigen::MatrixXd Rs = Eigen::MatrixXd::Zero(2 * Nk1, ndof);
  for (int a = 0; a < 2; ++a) {
    Ks.block(a * Nk1, a * Nk1, Nk1, Nk1) = stiff_k1 + ops.beta * mom_k1 * mom_k1.transpose();
    Rs.middleRows(a * Nk1, Nk1) =
        Dxk1.transpose() * w.asDiagonal() * Vk * ops.gradient.middleRows((2 * a + 0) * Nk, Nk) +
        Dyk1.transpose() * w.asDiagonal() * Vk * ops.gradient.middleRows((2 * a + 1) * Nk, Nk) +
        ops.beta * mom_k1 * (mom_k.transpose() * E_comp(a));
  }
  Eigen::LDLT<Eigen::MatrixXd> Ks_ldlt(Ks);
  ops.stokes_potential = refined_solve(Ks, Ks_ldlt, Rs);
  if (Ks_ldlt.info() != Eigen::Success || !ops.stokes_potential.allFinite()) {
    throw std::runtime_error(cell_tag + ": singular Stokes reconstruction system");
  }

  //----------------------------------------------------------------------------
  // Nedelec projections (of P^k and P^{k+1} vector fields) and face traces
  //----------------------------------------------------------------------------
  Eigen::MatrixXd ned_proj_k(Nned, 2 * Nk);   // pi^N of a P^k vector field
  Eigen::MatrixXd ned_proj_k1(Nned, 2 * Nk1); // pi^N of a P^{k+1} vector field
  if (k >= 1) {
    Eigen::MatrixXd Mkk1 = Vk.transpose() * w.asDiagonal() * Vk1;
    const Eigen::MatrixXd &Emb = ops.nedelec.embedding();
    Eigen::MatrixXd Ck(Nned, 2 * Nk), Ck1(Nned, 2 * Nk1);
    for (int c = 0; c < 2; ++c) {
      Ck.middleCols(c * Nk, Nk) = Emb.middleRows(c * Nk, Nk).transpose() * ops.mass_k;
      Ck1.middleCols(c * Nk1, Nk1) = Emb.middleRows(c * Nk, Nk).transpose() * Mkk1;
    }
    ned_proj_k = solve_gram(ops.gram_nedelec, Ck, cell_tag + ": Nedelec Gram");
    ned_proj_k1 = solve_gram(ops.gram_nedelec, Ck1, cell_tag + ": Nedelec Gram");
  }

  ops.boundary_difference.resize(n_faces);
  ops.darcy_stab_face.resize(n_faces);
  std::vector<Eigen::MatrixXd> trace_k(n_faces);  // P^k cell field -> face basis
  std::vector<Eigen::MatrixXd> trace_k1(n_faces); // P^{k+1} cell field -> face basis
  for (std::size_t i = 0; i < n_faces; ++i) {
    Eigen::LDLT<Eigen::MatrixXd> fm_ldlt(ops.face_mass[i]);
    trace_k[i] = refined_solve(ops.face_mass[i], fm_ldlt,
                               Fv[i].transpose() * wf[i].asDiagonal() * Vk_on_f[i]);
    trace_k1[i] = refined_solve(ops.face_mass[i], fm_ldlt,
                                Fv[i].transpose() * wf[i].asDiagonal() * Vk1_on_f[i]);
  }

  //----------------------------------------------------------------------------
  // Boundary difference Delta_F
  //----------------------------------------------------------------------------
  // Nedelec correction pi^N(P_s v - v_T), expressed as a P^k vector field.
  Eigen::MatrixXd ned_corr = Eigen::MatrixXd::Zero(2 * Nk, ndof);
  if (k >= 1) {
    Eigen::MatrixXd corr = ned_proj_k1 * ops.stokes_potential;
    corr.leftCols(Nned) -= Eigen::MatrixXd::Identity(Nned, Nned);
    ned_corr = ops.nedelec.embedding() * corr;
  }
  for (std::size_t i = 0; i < n_faces; ++i) {
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(nface_dofs, ndof);
    for (int c = 0; c < 2; ++c) {
      delta.middleRows(c * (k + 1), k + 1) =
          trace_k1[i] * ops.stokes_potential.middleRows(c * Nk1, Nk1) -
          trace_k[i] * ned_corr.middleRows(c * Nk, Nk);
    }
    Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i));
    delta.block(0, off, nface_dofs, nface_dofs) -=
        Eigen::MatrixXd::Identity(nface_dofs, nface_dofs);
    ops.boundary_difference[i] = std::move(delta);
  }

  //----------------------------------------------------------------------------
  // Darcy velocity reconstruction
  //----------------------------------------------------------------------------
  // Test space: gradients of the non-constant members of P^{k+1}, then the
  // (x - x_T)^perp P^{k-1} members (the trailing columns of the Nedelec
  // embedding); together they span P^k(T)^2.
  Eigen::MatrixXd Mpd = Eigen::MatrixXd::Zero(2 * Nk, 2 * Nk);
  Eigen::MatrixXd Rpd = Eigen::MatrixXd::Zero(2 * Nk, ndof);
  Eigen::MatrixXd Mk1k = Vk1.transpose() * w.asDiagonal() * Vk;
  for (Eigen::Index i = 1; i < Nk1; ++i) {
    Eigen::Index row = i - 1;
    for (int a = 0; a < 2; ++a) {
      const Eigen::MatrixXd &Da = (a == 0) ? Dxk1 : Dyk1;
      Mpd.block(row, a * Nk, 1, Nk) = (Vk.transpose() * w.asDiagonal() * Da.col(i)).transpose();
    }
    Rpd.row(row) = -(Mk1k * ops.divergence).row(i);
    for (std::size_t f = 0; f < n_faces; ++f) {
      const Vec2 &n = geo.face_normal[f];
      Eigen::RowVectorXd phi_face =
          (Fv[f].transpose() * wf[f].asDiagonal() * Vk1_on_f[f].col(i)).transpose();
      for (int ri = 0; ri < 2; ++ri) {
        Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(f)) + ri * (k + 1);
        Rpd.block(row, off, 1, k + 1) += n(ri) * phi_face;
      }
    }
  }
  if (k >= 1) {
    const Eigen::MatrixXd &Emb = ops.nedelec.embedding();
    for (Eigen::Index j = 0; j < Nlow; ++j) {
      Eigen::Index row = Nk1 - 1 + j;
      Eigen::Index col = Nned - Nlow + j; // cross members sit at the end
      for (int c = 0; c < 2; ++c) {
        Mpd.block(row, c * Nk, 1, Nk) +=
            Emb.block(c * Nk, col, Nk, 1).transpose() * ops.mass_k;
        Rpd.row(row) += Emb.block(c * Nk, col, Nk, 1).transpose() * ops.mass_k * E_comp(c);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> pd_lu(Mpd);
  if (!pd_lu.isInvertible()) {
    throw std::runtime_error(cell_tag + ": singular Darcy velocity system");
  }
  ops.darcy_velocity = pd_lu.solve(Rpd);
  ops.darcy_velocity += pd_lu.solve(Eigen::MatrixXd(Rpd - Mpd * ops.darcy_velocity));

  //----------------------------------------------------------------------------
  // Darcy stabilization and local Darcy bilinear form
  //----------------------------------------------------------------------------
  ops.darcy_stab_element = Eigen::MatrixXd::Zero(Nned, ndof);
  if (k >= 1) {
    ops.darcy_stab_element = ned_proj_k * ops.darcy_velocity;
    ops.darcy_stab_element.leftCols(Nned) -= Eigen::MatrixXd::Identity(Nned, Nned);
  }
  for (std::size_t i = 0; i < n_faces; ++i) {
    Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(nface_dofs, ndof);
    for (int c = 0; c < 2; ++c) {
      diff.middleRows(c * (k + 1), k + 1) =
          trace_k[i] * ops.darcy_velocity.middleRows(c * Nk, Nk);
    }
    Eigen::Index off = static_cast<Eigen::Index>(ops.layout.face_offset(i));
    diff.block(0, off, nface_dofs, nface_dofs) -=
        Eigen::MatrixXd::Identity(nface_dofs, nface_dofs);
    ops.darcy_stab_face[i] = std::move(diff);
  }

  ops.darcy_form = Eigen::MatrixXd::Zero(ndof, ndof);
  for (int c = 0; c < 2; ++c) {
    ops.darcy_form += ops.darcy_velocity.middleRows(c * Nk, Nk).transpose() * ops.mass_k *
                      ops.darcy_velocity.middleRows(c * Nk, Nk);
  }
  if (k >= 1) {
    ops.darcy_form +=
        ops.lambda * ops.darcy_stab_element.transpose() * ops.gram_nedelec * ops.darcy_stab_element;
  }
  for (std::size_t i = 0; i < n_faces; ++i) {
    if (ops.face_is_boundary[i]) {
      continue;
    }
    for (int c = 0; c < 2; ++c) {
      ops.darcy_form += h *
                        ops.darcy_stab_face[i].middleRows(c * (k + 1), k + 1).transpose() *
                        ops.face_mass[i] * ops.darcy_stab_face[i].middleRows(c * (k + 1), k + 1);
    }
  }

  ops.pressure_coupling = -ops.mass_k * ops.divergence;
  ops.pressure_moments = mom_k;

  return ops;
}

Eigen::VectorXd interpolate_local(const VectorField &u, const Mesh &mesh, std::size_t iT, int k,
                                  int quad_degree)
{
  const CellGeometry &geo = mesh.geometry(iT);
  const auto &faces = mesh.cell_faces(iT);
  if (quad_degree < 0) {
    quad_degree = nonpoly_quadrature_degree(k);
  }
  LocalDofLayout layout{k, NedelecBasis::dimension(k), faces.size(),
                        static_cast<std::size_t>(2 * (k + 1))};
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.total()));
  if (k >= 1) {
    NedelecBasis ned(geo.centroid, geo.diameter, k);
    dofs.head(static_cast<Eigen::Index>(layout.dim_element)) =
        nedelec_project(u, ned, cell_quadrature(mesh, iT, quad_degree));
  }
  for (std::size_t i = 0; i < faces.size(); ++i) {
    FaceScalarBasis fb(mesh.face(faces[i]), k);
    dofs.segment(static_cast<Eigen::Index>(layout.face_offset(i)), 2 * (k + 1)) =
        l2_project(u, fb, face_quadrature(mesh, faces[i], quad_degree));
  }
  return dofs;
}

double darcy_orthogonality_residual(const LocalOperators &ops, const Eigen::VectorXd &v)
{
  int k = ops.layout.degree;
  Eigen::Index Nk = static_cast<Eigen::Index>(ScalarBasis::dimension(k));
  Eigen::Index Nlow = static_cast<Eigen::Index>(ScalarBasis::dimension(k - 1));
  if (Nlow == 0) {
    return 0.;
  }
  double res = 0.;
  Eigen::MatrixXd diff = ops.darcy_velocity - ops.element_value;
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd moments = ops.mass_k * diff.middleRows(c * Nk, Nk) * v;
    res = std::max(res, moments.head(Nlow).cwiseAbs().maxCoeff());
  }
  return res;
}

} // namespace hho2d
