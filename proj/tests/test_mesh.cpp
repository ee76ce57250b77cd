#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hho2d/mesh.hpp"

#include <cmath>
#include <fstream>
#include <set>

using namespace hho2d;

TEST_CASE("triangular generator counts")
{
  Mesh m1 = Mesh::triangular(1);
  CHECK(m1.n_cells() == 2);
  CHECK(m1.n_faces() == 5);
  CHECK(m1.n_vertices() == 4);

  Mesh m2 = Mesh::triangular(2);
  CHECK(m2.n_cells() == 8);

  Mesh m4 = Mesh::triangular(4);
  CHECK(m4.h_max() == doctest::Approx(std::sqrt(2.) / 4.).epsilon(1e-14));

  CHECK_THROWS(Mesh::triangular(0));
}

TEST_CASE("cartesian generator")
{
  Mesh m = Mesh::cartesian(3);
  CHECK(m.n_cells() == 9);
  CHECK(m.n_faces() == 24);
  CHECK(m.h_max() == doctest::Approx(std::sqrt(2.) / 3.));
  CHECK_THROWS(Mesh::cartesian(0));
}

TEST_CASE("cell geometry of the unit right triangle")
{
  Mesh m({{0., 0.}, {1., 0.}, {0., 1.}}, {{0, 1, 2}});
  const CellGeometry &geo = m.geometry(0);
  CHECK(geo.area == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(geo.diameter == doctest::Approx(std::sqrt(2.)).epsilon(1e-14));
  CHECK(geo.centroid.x() == doctest::Approx(1. / 3.).epsilon(1e-14));

  // Hypotenuse is the local face between vertices 1 and 2.
  bool found = false;
  for (std::size_t i = 0; i < 3; ++i) {
    if (geo.face_length[i] == doctest::Approx(std::sqrt(2.))) {
      found = true;
      CHECK(geo.face_normal[i].x() == doctest::Approx(1. / std::sqrt(2.)).epsilon(1e-14));
      CHECK(geo.face_normal[i].y() == doctest::Approx(1. / std::sqrt(2.)).epsilon(1e-14));
    }
  }
  CHECK(found);
}

TEST_CASE("geometric identities on every cell")
{
  for (const Mesh &m : {Mesh::triangular(3), Mesh::cartesian(4)}) {
    for (std::size_t iT = 0; iT < m.n_cells(); ++iT) {
      const CellGeometry &geo = m.geometry(iT);
      Vec2 closure = Vec2::Zero();
      double dsum = 0.;
      for (std::size_t i = 0; i < geo.face_length.size(); ++i) {
        CHECK(std::abs(geo.face_normal[i].norm() - 1.) < 1e-14);
        // outward: normal points from centroid to face midpoint
        CHECK(geo.face_normal[i].dot(geo.face_midpoint[i] - geo.centroid) > 0.);
        closure += geo.face_length[i] * geo.face_normal[i];
        dsum += geo.face_length[i] * geo.face_distance[i];
      }
      CHECK(closure.norm() < 1e-13);
      CHECK(dsum == doctest::Approx(2. * geo.area).epsilon(1e-12));
    }
  }
}

TEST_CASE("interior faces have two cells with opposite orientations")
{
  Mesh m = Mesh::triangular(3);
  std::size_t interior = 0;
  for (std::size_t iF = 0; iF < m.n_faces(); ++iF) {
    const Face &F = m.face(iF);
    if (F.boundary) {
      CHECK(F.cells[1] == -1);
      continue;
    }
    ++interior;
    int signs = 1;
    for (int side = 0; side < 2; ++side) {
      std::size_t iT = static_cast<std::size_t>(F.cells[side]);
      const auto &faces = m.cell_faces(iT);
      for (std::size_t i = 0; i < faces.size(); ++i) {
        if (faces[i] == iF) {
          signs *= m.face_orientation(iT, i);
        }
      }
    }
    CHECK(signs == -1);
  }
  CHECK(interior == m.n_interior_faces());
}

TEST_CASE("refinement monotonicity of the generated families")
{
  for (bool tri : {true, false}) {
    double prev = 0.;
    for (int level = 1; level <= 4; ++level) {
      std::size_t n = static_cast<std::size_t>(1) << (level + 1);
      Mesh m = tri ? Mesh::triangular(n) : Mesh::cartesian(n);
      if (level > 1) {
        CHECK(m.h_max() <= 0.6 * prev);
      }
      prev = m.h_max();
    }
  }
}

TEST_CASE("json loading")
{
  SUBCASE("minimal unit square file")
  {
    std::string path = "minimal_square.json";
    {
      std::ofstream out(path);
      out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "cells": [[0,1,2,3]]})";
    }
    Mesh m = Mesh::load(path);
    CHECK(m.n_cells() == 1);
    CHECK(m.n_faces() == 4);
    CHECK(m.n_boundary_faces() == 4);
    CHECK(m.geometry(0).area == doctest::Approx(1.).epsilon(1e-14));
  }

  SUBCASE("clockwise loop rejected")
  {
    std::string path = "clockwise.json";
    {
      std::ofstream out(path);
      out << R"({"vertices": [[0,0],[1,0],[1,1],[0,1]], "cells": [[0,3,2,1]]})";
    }
    CHECK_THROWS_WITH_AS(Mesh::load(path), doctest::Contains("cell 0"), std::runtime_error);
  }

  SUBCASE("malformed file names the problem")
  {
    std::string path = "broken.json";
    {
      std::ofstream out(path);
      out << R"({"vertices": [[0,0],)";
    }
    CHECK_THROWS_WITH_AS(Mesh::load(path), doctest::Contains("parse error"), std::runtime_error);
  }

  SUBCASE("missing field")
  {
    std::string path = "nofield.json";
    {
      std::ofstream out(path);
      out << R"({"vertices": [[0,0],[1,0],[0,1]]})";
    }
    CHECK_THROWS_WITH_AS(Mesh::load(path), doctest::Contains("cells"), std::runtime_error);
  }
}

TEST_CASE("shipped hexagonal meshes pass the validator")
{
  // Loading runs all structural invariants; also check the refinement ratio.
  double prev = 0.;
  for (int level = 1; level <= 3; ++level) {
    std::string path = std::string(HHO2D_MESH_DIR) + "/hexagonal/hex_" + std::to_string(level) +
                       ".json";
    Mesh m = Mesh::load(path);
    CHECK(m.n_cells() > 0);
    if (level > 1) {
      CHECK(m.h_max() <= 0.6 * prev);
    }
    prev = m.h_max();
  }
}
