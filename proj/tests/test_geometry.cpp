#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "cflow/mesh.hpp"

using namespace cflow;

namespace {

std::vector<DomainSpec> test_domains() {
  return {DomainSpec::disc(1.0), DomainSpec::ellipse(1.5, 1.0), DomainSpec::rectangle(1.0, 1.0),
          DomainSpec::radial_fourier(1.0, {0.0, 0.1, 0.05})};
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("closed-form areas") {
    CHECK(DomainSpec::disc(2.0).area() == doctest::Approx(4.0 * M_PI));
    CHECK(DomainSpec::ellipse(1.5, 1.0).area() == doctest::Approx(1.5 * M_PI));
    CHECK(DomainSpec::rectangle(2.0, 0.5).area() == doctest::Approx(1.0));
    // pi R^2 (1 + sum c_k^2 / 2)
    CHECK(DomainSpec::radial_fourier(1.0, {0.0, 0.1, 0.05}).area() ==
          doctest::Approx(M_PI * (1.0 + 0.5 * (0.01 + 0.0025))));
  }

  TEST_CASE("boundary parametrisation is counterclockwise and closed") {
    for (const auto& d : test_domains()) {
      CAPTURE(d.id());
      const int n = 4000;
      double twice_area = 0.0;
      for (int i = 0; i < n; ++i) {
        const Point a = d.boundary_point(d.period() * i / n), b = d.boundary_point(d.period() * (i + 1) / n);
        twice_area += cross(a, b);
      }
      CHECK(0.5 * twice_area == doctest::Approx(d.area()).epsilon(1e-4));
      CHECK(norm(d.boundary_point(0.0) - d.boundary_point(d.period())) < 1e-12);
    }
  }

  TEST_CASE("invalid domains are rejected") {
    CHECK_THROWS_AS(DomainSpec::disc(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::ellipse(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::radial_fourier(1.0, {0.0, 0.9, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::parse("hexagon", {}), std::invalid_argument);
    CHECK_THROWS_AS(DomainSpec::parse("disc", {1.0, 2.0}), std::invalid_argument);
  }

  TEST_CASE("DomainSpec JSON round trip") {
    for (const auto& d : test_domains()) {
      const DomainSpec back = DomainSpec::from_json(d.to_json());
      CHECK(back.id() == d.id());
      CHECK(back.to_json() == d.to_json());
    }
    const DomainSpec r = DomainSpec::ellipse(1.3, 1.0).rotated(0.4);
    CHECK(DomainSpec::from_json(r.to_json()).rotation() == doctest::Approx(0.4));
  }

  TEST_CASE("meshes satisfy the size bound and cover the domain") {
    for (const auto& d : test_domains()) {
      CAPTURE(d.id());
      const MeshPtr m = build_mesh(d, 0.1);
      CHECK(m->h() <= 0.15 + 1e-12);
      for (int t = 0; t < m->triangle_count(); ++t) CHECK(m->triangle_area(t) > 0.0);
      CHECK(m->total_area() <= d.area() * (1.0 + 1e-12) + (d.is_polygonal() ? 1e-12 : 0.0));
      CHECK(m->total_area() == doctest::Approx(d.area()).epsilon(0.02));
    }
  }

  TEST_CASE("boundary loop lies on the exact curve") {
    for (const auto& d : test_domains()) {
      const MeshPtr m = refine(*build_mesh(d, 0.2));
      const auto& loop = m->boundary();
      const auto& param = m->boundary_param();
      REQUIRE(loop.size() == param.size());
      for (std::size_t i = 0; i < loop.size(); ++i)
        CHECK(norm(m->vertices()[loop[i]] - d.boundary_point(param[i])) < 1e-12);
      // Euler characteristic of a disc: V - E + T = 1.
      CHECK(m->vertex_count() - m->edge_count() + m->triangle_count() == 1);
      std::set<int> unique(loop.begin(), loop.end());
      CHECK(unique.size() == loop.size());
    }
  }

  TEST_CASE("red refinement quadruples triangles and halves h") {
    const MeshPtr coarse = build_mesh(DomainSpec::disc(1.0), 0.2);
    const MeshPtr fine = refine(*coarse);
    CHECK(fine->triangle_count() == 4 * coarse->triangle_count());
    CHECK(fine->vertex_count() == coarse->vertex_count() + coarse->edge_count());
    CHECK(fine->h() == doctest::Approx(coarse->h() / 2.0).epsilon(0.15));
  }

  TEST_CASE("area defect of curved domains is second order") {
    for (const auto& d : {DomainSpec::disc(1.0), DomainSpec::ellipse(1.5, 1.0)}) {
      const auto levels = mesh_hierarchy(d, 0.2, 3);
      const double e0 = d.area() - levels[1]->total_area(), e1 = d.area() - levels[2]->total_area();
      CHECK(std::log2(e0 / e1) == doctest::Approx(2.0).epsilon(0.05));
    }
    const auto square = mesh_hierarchy(DomainSpec::rectangle(1.0, 1.0), 0.2, 2);
    CHECK(square.back()->total_area() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("build_mesh rejects oversize targets and is deterministic") {
    CHECK_THROWS_AS(build_mesh(DomainSpec::disc(1.0), 0.5), std::invalid_argument);
    const MeshPtr a = build_mesh(DomainSpec::ellipse(1.3, 1.0), 0.1), b = build_mesh(DomainSpec::ellipse(1.3, 1.0), 0.1);
    CHECK(a->to_json().dump() == b->to_json().dump());
  }

  TEST_CASE("boundary arc measure sums to the polygon perimeter") {
    const MeshPtr m = build_mesh(DomainSpec::disc(1.0), 0.05);
    double length = 0.0;
    for (double l : boundary_arc_measure(*m)) length += l;
    CHECK(length == doctest::Approx(2.0 * M_PI).epsilon(2e-3));
    CHECK(length < 2.0 * M_PI);
  }
}
