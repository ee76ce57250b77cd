// Polytopal mesh data model for 2D domains: vertices, counter-clockwise cell
// loops, derived faces with cell incidence, and per-cell geometric quantities
// (diameter, area, centroid, face normals and centroid-face distances).
//
// Meshes are immutable after construction and can be read concurrently.

#ifndef HHO2D_MESH_HPP
#define HHO2D_MESH_HPP

#include "hho2d/types.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace hho2d {

/// A face is a straight segment between two vertices, shared by one (boundary)
/// or two (interior) cells. Tangent/midpoint/length are global quantities so
/// that face polynomial bases are single-valued across the two sides.
struct Face {
  std::array<std::size_t, 2> vertices; ///< endpoint vertex ids
  std::array<int, 2> cells{-1, -1};    ///< adjacent cell ids, cells[1] = -1 on the boundary
  bool boundary = false;
  Vec2 midpoint = Vec2::Zero();
  Vec2 tangent = Vec2::Zero(); ///< unit, oriented from vertices[0] to vertices[1]
  double length = 0.;
};

/// Geometry of one cell, precomputed at mesh construction.
struct CellGeometry {
  double diameter = 0.;        ///< h_T, max pairwise vertex distance
  double area = 0.;            ///< |T|
  Vec2 centroid = Vec2::Zero(); ///< center of mass x_T
  // Per local face, in the order of Mesh::cell_faces:
  std::vector<double> face_length;
  std::vector<Vec2> face_midpoint;
  std::vector<Vec2> face_normal;   ///< unit outward normal n_TF
  std::vector<double> face_distance; ///< signed distance from x_T to the face line, along n_TF
};

class Mesh {
public:
  /// Builds a mesh from raw vertex coordinates and counter-clockwise cell
  /// loops; derives faces and incidence, computes geometry, and validates all
  /// structural invariants. Throws std::runtime_error naming the offending
  /// cell/face on any inconsistency.
  Mesh(std::vector<Vec2> vertices, std::vector<std::vector<std::size_t>> cells);

  /// Unit square split into n x n sub-squares, each cut into two triangles
  /// along the same (bottom-left to top-right) diagonal. 2n^2 cells.
  static Mesh triangular(std::size_t n);

  /// Unit square split into n x n square cells.
  static Mesh cartesian(std::size_t n);

  /// Reads a json-poly file: {"vertices": [[x,y],...], "cells": [[i0,i1,...],...]}
  /// with counter-clockwise, 0-based cell loops. Faces and incidence are
  /// derived, not stored in the file.
  static Mesh load(const std::string &path);

  std::size_t n_vertices() const { return m_vertices.size(); }
  std::size_t n_cells() const { return m_cells.size(); }
  std::size_t n_faces() const { return m_faces.size(); }
  std::size_t n_boundary_faces() const { return m_n_boundary_faces; }
  std::size_t n_interior_faces() const { return m_faces.size() - m_n_boundary_faces; }

  const Vec2 &vertex(std::size_t i) const { return m_vertices[i]; }
  const Face &face(std::size_t i) const { return m_faces[i]; }
  const std::vector<std::size_t> &cell_vertices(std::size_t iT) const { return m_cells[iT]; }
  const std::vector<std::size_t> &cell_faces(std::size_t iT) const { return m_cell_faces[iT]; }

  /// Orientation sign of face iF within cell iT: +1 when the face tangent
  /// agrees with the cell's counter-clockwise loop, -1 otherwise.
  int face_orientation(std::size_t iT, std::size_t local_face) const
  {
    return m_cell_face_orientation[iT][local_face];
  }

  const CellGeometry &geometry(std::size_t iT) const { return m_geometry[iT]; }

  double h_max() const { return m_h_max; }

private:
  void build_faces();
  void compute_geometry();
  void validate() const;

  std::vector<Vec2> m_vertices;
  std::vector<std::vector<std::size_t>> m_cells; // CCW vertex loops
  std::vector<Face> m_faces;
  std::vector<std::vector<std::size_t>> m_cell_faces;
  std::vector<std::vector<int>> m_cell_face_orientation;
  std::vector<CellGeometry> m_geometry;
  std::size_t m_n_boundary_faces = 0;
  double m_h_max = 0.;
};

} // namespace hho2d

#endif
