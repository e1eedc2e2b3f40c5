#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "stfem/mesh.hpp"

using namespace stfem;

namespace {

SpaceTimeMesh unit_square_two_triangles() { return build_structured_mesh(1, 1, 1.0); }

std::vector<Index> random_marks(const SpaceTimeMesh& mesh, std::mt19937& rng, double fraction) {
  std::bernoulli_distribution pick(fraction);
  std::vector<Index> marked;
  for (Index c = 0; c < mesh.num_cells(); ++c)
    if (pick(rng)) marked.push_back(c);
  return marked;
}

}  // namespace

TEST_CASE("structured mesh counts") {
  const auto m11 = build_structured_mesh(1, 1, 1.0);
  CHECK(m11.num_vertices() == 4);
  CHECK(m11.num_cells() == 2);

  const auto m12 = build_structured_mesh(1, 2, 1.0);
  CHECK(m12.num_vertices() == 9);
  CHECK(m12.num_cells() == 8);

  const auto m21 = build_structured_mesh(2, 1, 1.0);
  CHECK(m21.num_vertices() == 8);
  CHECK(m21.num_cells() == 6);

  const auto m23 = build_structured_mesh(2, 3, 2.0);
  CHECK(m23.num_vertices() == 64);
  CHECK(m23.num_cells() == 6 * 27);
  CHECK(audit(m23).ok());
  CHECK(audit(m23).total_volume == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("structured mesh rejects bad arguments") {
  CHECK_THROWS_AS(build_structured_mesh(1, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_structured_mesh(2, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_structured_mesh(2, 2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_structured_mesh(3, 2, 1.0), std::invalid_argument);
}

TEST_CASE("face tags follow vertex coordinates") {
  for (int d : {1, 2}) {
    const auto mesh = build_structured_mesh(d, 2, 1.5);
    int zero = 0, top = 0, lateral = 0;
    for (const Face& f : mesh.faces()) {
      const int nfv = d + 1;
      bool all0 = true, allT = true;
      for (int i = 0; i < nfv; ++i) {
        all0 = all0 && mesh.on_initial_plane(f.vertices[i]);
        allT = allT && mesh.on_final_plane(f.vertices[i]);
      }
      if (f.cells[1] >= 0) {
        CHECK(f.tag == FaceTag::Interior);
        continue;
      }
      if (all0) {
        CHECK(f.tag == FaceTag::SigmaZero);
        ++zero;
      } else if (allT) {
        CHECK(f.tag == FaceTag::SigmaT);
        ++top;
      } else {
        CHECK(f.tag == FaceTag::SigmaLateral);
        ++lateral;
      }
    }
    // the bottom and top planes carry 2 n^d faces (d=2) resp. n segments (d=1)
    CHECK(zero == (d == 1 ? 2 : 8));
    CHECK(top == zero);
    CHECK(lateral == (d == 1 ? 4 : 32));
  }
}

TEST_CASE("refine both triangles of the unit square") {
  const auto mesh = unit_square_two_triangles();
  const std::vector<Index> all{0, 1};
  const auto fine = refine(mesh, all);
  CHECK(fine.num_cells() == 4);
  CHECK(audit(fine).ok());
}

TEST_CASE("refine one triangle closes without hanging nodes") {
  const auto mesh = unit_square_two_triangles();
  for (Index c : {0, 1}) {
    const std::vector<Index> one{c};
    const auto fine = refine(mesh, one);
    CHECK(fine.num_cells() >= 3);
    CHECK(fine.num_cells() <= 4);
    CHECK(audit(fine).ok());
  }
}

TEST_CASE("refine with no marks is the identity") {
  const auto mesh = build_structured_mesh(2, 2, 1.0);
  const auto same = refine(mesh, {});
  REQUIRE(same.num_cells() == mesh.num_cells());
  REQUIRE(same.num_vertices() == mesh.num_vertices());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const auto a = mesh.cell_vertices(c);
    const auto b = same.cell_vertices(c);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("refine rejects indices out of range") {
  const auto mesh = unit_square_two_triangles();
  const std::vector<Index> bad{2};
  CHECK_THROWS_AS(refine(mesh, bad), std::invalid_argument);
}

TEST_CASE("marked cells are bisected and lineage is recorded") {
  const auto mesh = build_structured_mesh(2, 1, 1.0);
  const std::vector<Index> marked{3};
  const auto fine = refine(mesh, marked);
  REQUIRE(static_cast<Index>(fine.origin().size()) == fine.num_cells());
  int children_of_3 = 0;
  for (Index parent : fine.origin()) {
    CHECK(parent >= 0);
    CHECK(parent < mesh.num_cells());
    if (parent == 3) ++children_of_3;
  }
  CHECK(children_of_3 >= 2);
  double child_volume = 0.0;
  for (Index c = 0; c < fine.num_cells(); ++c)
    if (fine.origin()[c] == 3) child_volume += fine.cell_volume(c);
  CHECK(child_volume == doctest::Approx(mesh.cell_volume(3)).epsilon(1e-13));
}

TEST_CASE("mesh size") {
  const auto mesh = unit_square_two_triangles();
  CHECK(mesh_size(mesh) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(mesh_size(refine_uniform(mesh)) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));

  const std::vector<Point> vertices{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  Cell cell;
  cell.bisection_order = {0, 1, 2, -1};
  const SpaceTimeMesh reference(1, 1.0, vertices, {cell});
  CHECK(mesh_size(reference) == doctest::Approx(std::sqrt(2.0)));

  const auto cube = build_structured_mesh(2, 1, 1.0);
  CHECK(mesh_size(cube) == doctest::Approx(std::sqrt(3.0)));
  CHECK(mesh_size(refine_uniform(cube)) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
  const auto h = cube.cell_diameters();
  CHECK(static_cast<Index>(h.size()) == cube.num_cells());
}

TEST_CASE("uniform refinement matches the finer structured mesh") {
  for (int d : {1, 2}) {
    const auto coarse = refine_uniform(build_structured_mesh(d, 2, 1.0));
    const auto direct = build_structured_mesh(d, 4, 1.0);
    CHECK(coarse.num_cells() == direct.num_cells());
    CHECK(coarse.num_vertices() == direct.num_vertices());
    CHECK(audit(coarse).ok());
  }
}

TEST_CASE("degenerate cells are rejected") {
  const std::vector<Point> vertices{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  Cell cell;
  cell.bisection_order = {0, 1, 2, -1};
  CHECK_THROWS_AS(SpaceTimeMesh(1, 1.0, vertices, {cell}), MeshError);
}

TEST_CASE("random local refinement keeps every invariant") {
  std::mt19937 rng(7);
  for (int d : {1, 2}) {
    SpaceTimeMesh mesh = build_structured_mesh(d, 2, 1.0);
    for (int step = 0; step < (d == 1 ? 8 : 5); ++step) {
      mesh = refine(mesh, random_marks(mesh, rng, 0.2));
      const MeshAudit a = audit(mesh);
      INFO("d = " << d << ", step " << step << ": " << a.message);
      CHECK(a.positive_volumes);
      CHECK(a.conforming);
      CHECK(a.tags_consistent);
      CHECK(a.total_volume == doctest::Approx(1.0).epsilon(1e-12));
      for (Index c = 0; c < mesh.num_cells(); ++c) CHECK(mesh.cell_volume(c) > 0.0);
    }
  }
}

TEST_CASE("boundary vertices only touch compatible faces") {
  std::mt19937 rng(11);
  SpaceTimeMesh mesh = build_structured_mesh(2, 2, 1.0);
  for (int step = 0; step < 3; ++step) mesh = refine(mesh, random_marks(mesh, rng, 0.3));
  for (const Face& f : mesh.faces()) {
    for (int i = 0; i < 3; ++i) {
      const Index v = f.vertices[i];
      if (mesh.on_initial_plane(v)) CHECK(f.tag != FaceTag::SigmaT);
      if (mesh.on_final_plane(v)) CHECK(f.tag != FaceTag::SigmaZero);
    }
  }
}

TEST_CASE("vtk export") {
  const auto mesh = build_structured_mesh(2, 1, 1.0);
  std::vector<double> values(mesh.num_vertices());
  for (Index v = 0; v < mesh.num_vertices(); ++v) values[v] = v;
  const std::vector<PointData> data{{"state", values}};
  std::ostringstream out;
  write_vtk(out, mesh, data);
  const std::string s = out.str();
  CHECK(s.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
  CHECK(s.find("POINTS 8 double") != std::string::npos);
  CHECK(s.find("CELLS 6 30") != std::string::npos);
  CHECK(s.find("CELL_TYPES 6\n10\n") != std::string::npos);
  CHECK(s.find("SCALARS state double 1") != std::string::npos);

  std::ostringstream tri;
  write_vtk(tri, build_structured_mesh(1, 1, 1.0));
  CHECK(tri.str().find("CELL_TYPES 2\n5\n5\n") != std::string::npos);

  const std::vector<PointData> bad{{"short", {1.0}}};
  std::ostringstream sink;
  CHECK_THROWS_AS(write_vtk(sink, mesh, bad), std::invalid_argument);
}
