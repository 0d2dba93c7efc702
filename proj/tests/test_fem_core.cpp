#include <doctest.h>

#include <cmath>

#include "cflow/assembly.hpp"
#include "cflow/constraints.hpp"
#include "cflow/field.hpp"
#include "cflow/linalg.hpp"
#include "cflow/mesh.hpp"
#include "cflow/oracles.hpp"
#include "cflow/quadrature.hpp"

using namespace cflow;

namespace {

double integrate_rule(const TriangleRule& rule, int px, int py) {
  // Reference triangle (0,0),(1,0),(0,1): area 1/2.
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double x = rule.points[q][1], y = rule.points[q][2];
    sum += rule.weights[q] * std::pow(x, px) * std::pow(y, py);
  }
  return 0.5 * sum;
}

// int_T x^a y^b over the reference triangle = a! b! / (a+b+2)!
double exact_monomial(int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); }

bool identical(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.nonZeros() != b.nonZeros()) return false;
  for (Eigen::Index i = 0; i < a.nonZeros(); ++i)
    if (a.valuePtr()[i] != b.valuePtr()[i] || a.innerIndexPtr()[i] != b.innerIndexPtr()[i]) return false;
  return true;
}

}  // namespace

TEST_SUITE("fem_core") {
  TEST_CASE("triangle rules are exact through their degree") {
    std::vector<TriangleRule> rules = {triangle_rule_degree2(), triangle_rule_degree4(), conical_rule(3), conical_rule(5)};
    for (const auto& rule : rules) {
      double wsum = 0.0;
      for (double w : rule.weights) wsum += w;
      CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
      for (int a = 0; a <= rule.degree; ++a)
        for (int b = 0; a + b <= rule.degree; ++b) {
          CAPTURE(rule.degree);
          CAPTURE(a);
          CAPTURE(b);
          CHECK(integrate_rule(rule, a, b) == doctest::Approx(exact_monomial(a, b)).epsilon(1e-13));
        }
    }
  }

  TEST_CASE("Gauss-Legendre is exact through degree 2n-1") {
    for (int n = 1; n <= 5; ++n) {
      const LineRule r = gauss_legendre(n);
      for (int p = 0; p <= 2 * n - 1; ++p) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], p);
        CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("stiffness kills constants and mass integrates to the area") {
    const MeshPtr mesh = build_mesh(DomainSpec::ellipse(1.3, 1.0), 0.15);
    for (SpaceKind kind : {SpaceKind::P1, SpaceKind::P2, SpaceKind::Morley}) {
      CAPTURE(to_string(kind));
      auto space = make_space(mesh, kind);
      const SparseMatrix k = assemble_stiffness(*space), m = assemble_mass(*space);
      const FieldFunction one = interpolate(space, [](Point) { return 1.0; }, [](Point) { return Point{0.0, 0.0}; });
      CHECK((k * one.coefficients).lpNorm<Eigen::Infinity>() < 1e-12);
      CHECK(one.coefficients.dot(m * one.coefficients) == doctest::Approx(mesh->total_area()).epsilon(1e-12));
      CHECK(symmetry_defect(k) < 1e-14);
      CHECK(symmetry_defect(m) < 1e-14);
    }
  }

  TEST_CASE("Dirichlet energy of a quadratic is exact on P2") {
    const MeshPtr mesh = build_mesh(DomainSpec::rectangle(1.0, 1.0), 0.125);
    auto p2 = make_space(mesh, SpaceKind::P2);
    const FieldFunction f = interpolate(p2, [](Point p) { return p.x * p.x + p.x * p.y; });
    // int (2x+y)^2 + x^2 over the unit square = 4/3 + 1 + 1/3 + 1/3
    CHECK(f.coefficients.dot(assemble_stiffness(*p2) * f.coefficients) == doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("Morley reproduces quadratics and their Hessian energy") {
    const MeshPtr mesh = build_mesh(DomainSpec::disc(1.0), 0.2);
    auto morley = make_space(mesh, SpaceKind::Morley);
    const FieldFunction q = interpolate(
        morley, [](Point p) { return 3 * p.x * p.x - p.x * p.y + 0.5 * p.y * p.y + p.x; },
        [](Point p) { return Point{6 * p.x - p.y + 1, -p.x + p.y}; });
    for (int t = 0; t < mesh->triangle_count(); t += 7) {
      const Point c = morley->basis(t).map({1.0 / 3, 1.0 / 3, 1.0 / 3});
      const Sample s = sample(q, t, c);
      CHECK(s.value == doctest::Approx(3 * c.x * c.x - c.x * c.y + 0.5 * c.y * c.y + c.x).epsilon(1e-12));
      CHECK(s.hessian.xx == doctest::Approx(6.0));
      CHECK(s.hessian.xy == doctest::Approx(-1.0));
      CHECK(s.hessian.yy == doctest::Approx(1.0));
    }
    const double energy = q.coefficients.dot(assemble_morley_hessian(*morley) * q.coefficients);
    CHECK(energy == doctest::Approx((36.0 + 2.0 + 1.0) * mesh->total_area()).epsilon(1e-12));
    const double twist = q.coefficients.dot(assemble_morley_twist(*morley) * q.coefficients);
    CHECK(twist == doctest::Approx((1.0 - 6.0) * mesh->total_area()).epsilon(1e-12));
  }

  TEST_CASE("serial and parallel assembly agree bit for bit") {
    const MeshPtr mesh = build_mesh(DomainSpec::radial_fourier(1.0, {0.0, 0.1, 0.05}), 0.1);
    auto p2 = make_space(mesh, SpaceKind::P2);
    auto morley = make_space(mesh, SpaceKind::Morley);
    auto th = make_space(mesh, SpaceKind::TaylorHood);
    CHECK(identical(assemble_stiffness(*p2, Execution::Serial), assemble_stiffness(*p2, Execution::Parallel)));
    CHECK(identical(assemble_mass(*p2, Execution::Serial), assemble_mass(*p2, Execution::Parallel)));
    CHECK(identical(assemble_morley_hessian(*morley, Execution::Serial),
                    assemble_morley_hessian(*morley, Execution::Parallel)));
    const StokesSystem s = assemble_stokes_system(*th, Execution::Serial), p = assemble_stokes_system(*th, Execution::Parallel);
    CHECK(identical(s.a, p.a));
    CHECK(identical(s.b, p.b));
    CHECK(identical(s.m, p.m));
    const Vector x = seeded_block(p2->dof_count(), 1, 3).col(0);
    const SparseMatrix k = assemble_stiffness(*p2);
    CHECK((spmv(k, x, Execution::Serial) - spmv(k, x, Execution::Parallel)).norm() == 0.0);
  }

  TEST_CASE("divergence of an interpolated solenoidal field is small") {
    const MeshPtr mesh = build_mesh(DomainSpec::disc(1.0), 0.1);
    auto th = make_space(mesh, SpaceKind::TaylorHood);
    const StokesSystem sys = assemble_stokes_system(*th);
    // u = rot grad of (1 - r^2)^2; linear fields are divergence-free exactly.
    const FieldFunction lin = interpolate_vector(th, [](Point p) { return p.y; }, [](Point p) { return -p.x; });
    CHECK((sys.b * lin.coefficients.head(th->velocity_dofs())).norm() < 1e-13);
    const FieldFunction grad = interpolate_vector(th, [](Point p) { return p.x; }, [](Point p) { return p.y; });
    // -int q div u with div u = 2: the rows sum to -2 |Omega_h|.
    CHECK((sys.b * grad.coefficients.head(th->velocity_dofs())).sum() == doctest::Approx(-2.0 * mesh->total_area()));
  }

  TEST_CASE("P1 eigenvalues on the square bound the exact ones from above") {
    const MeshPtr mesh = build_mesh(DomainSpec::rectangle(1.0, 1.0), 0.1);
    auto p1 = make_space(mesh, SpaceKind::P1);
    const ReducedSystem r = apply_constraints({assemble_stiffness(*p1), assemble_mass(*p1)}, *p1);
    EigenOptions o;
    o.k = 3;
    const EigenRun run = eigs_smallest(r.matrices[0], r.matrices[1], o);
    const auto exact = oracles::rectangle_reference(1.0, 1.0, 3);
    for (int i = 0; i < 3; ++i) {
      CHECK(run.pairs[i].lambda >= exact[i]);
      CHECK(run.pairs[i].lambda == doctest::Approx(exact[i]).epsilon(0.1));
    }
  }

  TEST_CASE("constraints drop exactly the boundary dofs") {
    const MeshPtr mesh = build_mesh(DomainSpec::disc(1.0), 0.2);
    auto p2 = make_space(mesh, SpaceKind::P2);
    int boundary_edges = 0;
    for (int e = 0; e < mesh->edge_count(); ++e) boundary_edges += mesh->is_boundary_edge(e);
    CHECK(p2->constraints().size() == mesh->boundary().size() + boundary_edges);
    const DofEmbedding emb = constraint_embedding(*p2, p2->dof_count());
    const Vector x = Vector::LinSpaced(emb.free_size(), 1.0, 2.0);
    CHECK((emb.reduce(emb.embed(x)) - x).norm() == 0.0);
    auto morley = make_space(mesh, SpaceKind::Morley);
    CHECK(morley->constraints().size() == mesh->boundary().size() + boundary_edges);
  }

  TEST_CASE("point evaluation reproduces P2 interpolants of quadratics") {
    const MeshPtr mesh = build_mesh(DomainSpec::ellipse(1.5, 1.0), 0.15);
    auto p2 = make_space(mesh, SpaceKind::P2);
    auto f = [](Point p) { return 1.0 + p.x - 2.0 * p.y + p.x * p.y; };
    const FieldFunction u = interpolate(p2, f);
    std::vector<Point> pts = {{0.1, 0.2}, {-0.7, 0.3}, {1.0, -0.1}, {0.0, 0.0}};
    const Evaluation ev = evaluate(u, pts);
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(ev.values[i] == doctest::Approx(f(pts[i])).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate(u, std::vector<Point>{{3.0, 0.0}}), std::out_of_range);
  }
}
