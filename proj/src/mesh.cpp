#include "hho2d/mesh.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hho2d {

namespace {

std::runtime_error mesh_error(const std::string &what)
{
  return std::runtime_error("mesh: " + what);
}

double signed_area(const std::vector<Vec2> &vertices, const std::vector<std::size_t> &loop)
{
  double a = 0.;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Vec2 &p = vertices[loop[i]];
    const Vec2 &q = vertices[loop[(i + 1) % loop.size()]];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

} // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::vector<std::size_t>> cells)
    : m_vertices(std::move(vertices)), m_cells(std::move(cells))
{
  for (std::size_t iT = 0; iT < m_cells.size(); ++iT) {
    if (m_cells[iT].size() < 3) {
      throw mesh_error("cell " + std::to_string(iT) + " has fewer than 3 vertices");
    }
    for (std::size_t iv : m_cells[iT]) {
      if (iv >= m_vertices.size()) {
        throw mesh_error("cell " + std::to_string(iT) + " references vertex " + std::to_string(iv) +
                         " out of range");
      }
    }
  }
  build_faces();
  compute_geometry();
  validate();
}

void Mesh::build_faces()
{
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> face_of_pair;
  m_cell_faces.resize(m_cells.size());
  m_cell_face_orientation.resize(m_cells.size());

  for (std::size_t iT = 0; iT < m_cells.size(); ++iT) {
    const auto &loop = m_cells[iT];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      std::size_t a = loop[i];
      std::size_t b = loop[(i + 1) % loop.size()];
      if (a == b) {
        throw mesh_error("cell " + std::to_string(iT) + " has a zero-length edge");
      }
      auto key = std::minmax(a, b);
      auto it = face_of_pair.find(key);
      std::size_t iF;
      if (it == face_of_pair.end()) {
        iF = m_faces.size();
        face_of_pair.emplace(key, iF);
        Face F;
        F.vertices = {key.first, key.second};
        F.cells[0] = static_cast<int>(iT);
        m_faces.push_back(F);
      } else {
        iF = it->second;
        Face &F = m_faces[iF];
        if (F.cells[1] >= 0) {
          throw mesh_error("face between vertices " + std::to_string(key.first) + " and " +
                           std::to_string(key.second) + " is shared by more than two cells");
        }
        F.cells[1] = static_cast<int>(iT);
      }
      m_cell_faces[iT].push_back(iF);
      // Tangent runs from the lower to the higher vertex id; the cell loop
      // traverses (a, b), so the orientation sign compares a with b.
      m_cell_face_orientation[iT].push_back(a < b ? +1 : -1);
    }
  }

  m_n_boundary_faces = 0;
  for (Face &F : m_faces) {
    F.boundary = (F.cells[1] < 0);
    if (F.boundary) {
      ++m_n_boundary_faces;
    }
    const Vec2 &p = m_vertices[F.vertices[0]];
    const Vec2 &q = m_vertices[F.vertices[1]];
    F.length = (q - p).norm();
    F.midpoint = 0.5 * (p + q);
    F.tangent = (q - p) / F.length;
  }
}

void Mesh::compute_geometry()
{
  m_geometry.resize(m_cells.size());
  m_h_max = 0.;
  for (std::size_t iT = 0; iT < m_cells.size(); ++iT) {
    const auto &loop = m_cells[iT];
    CellGeometry &geo = m_geometry[iT];

    double area = signed_area(m_vertices, loop);
    if (area <= 0.) {
      throw mesh_error("cell " + std::to_string(iT) +
                       " has non-positive signed area (loop must be counter-clockwise)");
    }
    geo.area = area;

    // Center of mass of the polygon (shoelace moments).
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec2 &p = m_vertices[loop[i]];
      const Vec2 &q = m_vertices[loop[(i + 1) % loop.size()]];
      double w = p.x() * q.y() - q.x() * p.y();
      c += w * (p + q);
    }
    geo.centroid = c / (6. * area);

    geo.diameter = 0.;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      for (std::size_t j = i + 1; j < loop.size(); ++j) {
        geo.diameter = std::max(geo.diameter, (m_vertices[loop[i]] - m_vertices[loop[j]]).norm());
      }
    }
    m_h_max = std::max(m_h_max, geo.diameter);

    const auto &faces = m_cell_faces[iT];
    geo.face_length.resize(faces.size());
    geo.face_midpoint.resize(faces.size());
    geo.face_normal.resize(faces.size());
    geo.face_distance.resize(faces.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const Face &F = m_faces[faces[i]];
      geo.face_length[i] = F.length;
      geo.face_midpoint[i] = F.midpoint;
      // Rotation of -pi/2 of the CCW-ordered edge direction points outward.
      Vec2 t = static_cast<double>(m_cell_face_orientation[iT][i]) * F.tangent;
      geo.face_normal[i] = Vec2(t.y(), -t.x());
      geo.face_distance[i] = (F.midpoint - geo.centroid).dot(geo.face_normal[i]);
    }
  }
}

void Mesh::validate() const
{
  // Cell areas must sum to the area enclosed by the boundary faces
  // (2 |Omega| = sum over boundary faces of |F| x_F . n_F by the divergence
  // theorem); overlapping or missing cells break this identity.
  double total_area = 0.;
  for (const auto &geo : m_geometry) {
    total_area += geo.area;
  }
  double boundary_area = 0.;
  for (std::size_t iT = 0; iT < m_cells.size(); ++iT) {
    const CellGeometry &geo = m_geometry[iT];
    for (std::size_t i = 0; i < m_cell_faces[iT].size(); ++i) {
      const Face &F = m_faces[m_cell_faces[iT][i]];
      if (F.boundary) {
        boundary_area += 0.5 * F.length * F.midpoint.dot(geo.face_normal[i]);
      }
    }
  }
  if (std::abs(total_area - boundary_area) > 1e-12 * total_area) {
    throw mesh_error("cell areas sum to " + std::to_string(total_area) +
                     " but the boundary encloses an area of " + std::to_string(boundary_area));
  }

  for (std::size_t iF = 0; iF < m_faces.size(); ++iF) {
    if (m_faces[iF].cells[0] < 0) {
      throw mesh_error("face " + std::to_string(iF) + " is dangling");
    }
  }

  // Interior faces must be traversed in opposite directions by their two cells.
  for (std::size_t iF = 0; iF < m_faces.size(); ++iF) {
    const Face &F = m_faces[iF];
    if (F.boundary) {
      continue;
    }
    int sign_product = 1;
    for (int side = 0; side < 2; ++side) {
      std::size_t iT = static_cast<std::size_t>(F.cells[side]);
      const auto &faces = m_cell_faces[iT];
      auto it = std::find(faces.begin(), faces.end(), iF);
      sign_product *= m_cell_face_orientation[iT][static_cast<std::size_t>(it - faces.begin())];
    }
    if (sign_product != -1) {
      throw mesh_error("face " + std::to_string(iF) +
                       " is traversed in the same direction by both of its cells");
    }
  }

  for (std::size_t iT = 0; iT < m_cells.size(); ++iT) {
    const CellGeometry &geo = m_geometry[iT];
    Vec2 closure = Vec2::Zero();
    double dist_sum = 0.;
    for (std::size_t i = 0; i < geo.face_length.size(); ++i) {
      if (std::abs(geo.face_normal[i].norm() - 1.) > 1e-14) {
        throw mesh_error("cell " + std::to_string(iT) + " has a non-unit face normal");
      }
      closure += geo.face_length[i] * geo.face_normal[i];
      dist_sum += geo.face_length[i] * geo.face_distance[i];
    }
    if (closure.norm() > 1e-12 * geo.diameter * geo.face_length.size()) {
      throw mesh_error("cell " + std::to_string(iT) + " fails the closed-polygon identity");
    }
    // sum_F |F| d_TF = 2 |T| (divergence of x - x_T over the cell)
    if (std::abs(dist_sum - 2. * geo.area) > 1e-12 * 2. * geo.area) {
      throw mesh_error("cell " + std::to_string(iT) + " fails the face-distance identity");
    }
  }
}

Mesh Mesh::triangular(std::size_t n)
{
  if (n == 0) {
    throw std::invalid_argument("mesh: triangular subdivision count must be >= 1");
  }
  std::vector<Vec2> vertices((n + 1) * (n + 1));
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      vertices[j * (n + 1) + i] = Vec2(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(2 * n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t v00 = j * (n + 1) + i;
      std::size_t v10 = v00 + 1;
      std::size_t v01 = v00 + (n + 1);
      std::size_t v11 = v01 + 1;
      cells.push_back({v00, v10, v11});
      cells.push_back({v00, v11, v01});
    }
  }
  return Mesh(std::move(vertices), std::move(cells));
}

Mesh Mesh::cartesian(std::size_t n)
{
  if (n == 0) {
    throw std::invalid_argument("mesh: cartesian subdivision count must be >= 1");
  }
  std::vector<Vec2> vertices((n + 1) * (n + 1));
  for (std::size_t j = 0; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      vertices[j * (n + 1) + i] = Vec2(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
  }
  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t v00 = j * (n + 1) + i;
      cells.push_back({v00, v00 + 1, v00 + n + 2, v00 + n + 1});
    }
  }
  return Mesh(std::move(vertices), std::move(cells));
}

Mesh Mesh::load(const std::string &path)
{
  std::ifstream in(path);
  if (!in) {
    throw mesh_error("cannot open file '" + path + "'");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw mesh_error("parse error in '" + path + "': " + e.what());
  }
  if (!j.contains("vertices") || !j["vertices"].is_array()) {
    throw mesh_error("file '" + path + "': missing or invalid field \"vertices\"");
  }
  if (!j.contains("cells") || !j["cells"].is_array()) {
    throw mesh_error("file '" + path + "': missing or invalid field \"cells\"");
  }

  std::vector<Vec2> vertices;
  vertices.reserve(j["vertices"].size());
  for (std::size_t i = 0; i < j["vertices"].size(); ++i) {
    const auto &v = j["vertices"][i];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw mesh_error("file '" + path + "': vertex " + std::to_string(i) +
                       " is not a pair of numbers");
    }
    vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
  }

  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(j["cells"].size());
  for (std::size_t i = 0; i < j["cells"].size(); ++i) {
    const auto &c = j["cells"][i];
    if (!c.is_array() || c.size() < 3) {
      throw mesh_error("file '" + path + "': cell " + std::to_string(i) +
                       " is not a list of at least 3 vertex indices");
    }
    std::vector<std::size_t> loop;
    loop.reserve(c.size());
    for (const auto &e : c) {
      if (!e.is_number_unsigned()) {
        throw mesh_error("file '" + path + "': cell " + std::to_string(i) +
                         " contains a non-integer vertex index");
      }
      loop.push_back(e.get<std::size_t>());
    }
    cells.push_back(std::move(loop));
  }

  return Mesh(std::move(vertices), std::move(cells));
}

} // namespace hho2d
