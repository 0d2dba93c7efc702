#include <doctest.h>

#include <cmath>
#include <random>

#include "cflow/assembly.hpp"
#include "cflow/constraints.hpp"
#include "cflow/equivalence.hpp"
#include "cflow/spectra.hpp"

using namespace cflow;

namespace {

// Random simply connected test domains from a fixed seed.
std::vector<DomainSpec> random_domains(std::uint64_t seed, int count) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DomainSpec> out;
  for (int i = 0; i < count; ++i) {
    switch (i % 3) {
      case 0: out.push_back(DomainSpec::ellipse(1.2 + 0.4 * u(gen), 1.0)); break;
      case 1: out.push_back(DomainSpec::rectangle(1.0, 1.0 + 0.5 * u(gen))); break;
      default: out.push_back(DomainSpec::radial_fourier(1.0, {0.0, 0.15 * u(gen), 0.08 * u(gen)})); break;
    }
  }
  return out;
}

double first_dirichlet(const DomainSpec& d, double h) {
  SpectrumOptions o;
  o.k = 2;
  return dirichlet_spectrum(build_mesh(d, h), o).modes[0].lambda;
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("eigenvalues scale like length^-2") {
    for (double s : {0.5, 1.7, 3.0}) {
      const DomainSpec d = DomainSpec::ellipse(1.4, 1.0);
      CHECK(first_dirichlet(d.scaled(s), 0.15 * s) == doctest::Approx(first_dirichlet(d, 0.15) / (s * s)).epsilon(1e-9));
    }
  }

  TEST_CASE("eigenvalues are invariant under rotation of the domain") {
    const DomainSpec d = DomainSpec::radial_fourier(1.0, {0.0, 0.1, 0.05});
    for (double angle : {0.3, 1.1, 2.5}) {
      SpectrumOptions o;
      const double a = buckling_spectrum(build_mesh(d, 0.15), o).modes[0].lambda;
      const double b = buckling_spectrum(build_mesh(d.rotated(angle), 0.15), o).modes[0].lambda;
      CHECK(b == doctest::Approx(a).epsilon(1e-9));
    }
  }

  TEST_CASE("Rayleigh quotients of random vectors bound lambda1 from above") {
    const MeshPtr mesh = build_mesh(DomainSpec::ellipse(1.3, 1.0), 0.15);
    auto p2 = make_space(mesh, SpaceKind::P2);
    const ReducedSystem r = apply_constraints({assemble_stiffness(*p2), assemble_mass(*p2)}, *p2);
    EigenOptions o;
    const double lambda1 = eigs_smallest(r.matrices[0], r.matrices[1], o).pairs[0].lambda;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Vector v = seeded_block(r.embedding.free_size(), 1, seed).col(0);
      CHECK(v.dot(r.matrices[0] * v) / v.dot(r.matrices[1] * v) >= lambda1);
    }
  }

  TEST_CASE("Weinstein gap and buckling-Stokes agreement on random domains") {
    for (const DomainSpec& d : random_domains(20240601, 3)) {
      CAPTURE(d.id());
      const MeshPtr mesh = build_mesh(d, 0.1);
      SpectrumOptions o;
      o.k = 2;
      const double d2 = dirichlet_spectrum(mesh, o).modes[1].lambda;
      o.k = 1;
      const double b1 = buckling_spectrum(mesh, o).modes[0].lambda;
      const double s1 = stokes_spectrum(mesh, o).modes[0].lambda;
      CHECK(b1 > d2);
      CHECK(std::abs(b1 - s1) / s1 < 0.03);  // coarse mesh; Morley converges from below
    }
  }

  TEST_CASE("meshes of random domains are valid and close in area") {
    for (const DomainSpec& d : random_domains(7, 6)) {
      const MeshPtr m = build_mesh(d, 0.1);
      CHECK(m->total_area() == doctest::Approx(d.area()).epsilon(0.02));
      for (int t = 0; t < m->triangle_count(); ++t) CHECK(m->triangle_area(t) > 0.0);
    }
  }

  TEST_CASE("vorticity is linear and trace deviation ignores constants") {
    const MeshPtr mesh = build_mesh(DomainSpec::ellipse(1.5, 1.0), 0.15);
    auto v = make_space(mesh, SpaceKind::P2Vector);
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      const double a = u(gen), b = u(gen), c = u(gen);
      const FieldFunction f = interpolate_vector(v, [=](Point p) { return a * p.y * p.y; }, [=](Point p) { return b * p.x; });
      const FieldFunction g = interpolate_vector(v, [=](Point p) { return c * p.x * p.y; }, [](Point p) { return p.x * p.x; });
      const FieldFunction sum(v, Vector(2.0 * f.coefficients - g.coefficients));
      CHECK((vorticity(sum).coefficients - (2.0 * vorticity(f).coefficients - vorticity(g).coefficients)).norm() < 1e-10);
      FieldFunction w = vorticity(f);
      const double spread = boundary_trace_stats(w).spread;
      w.coefficients.array() += 10.0 * c;
      CHECK(boundary_trace_stats(w).spread == doctest::Approx(spread).epsilon(1e-9));
    }
  }

  TEST_CASE("row-parallel SpMV matches serial on random matrices") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DenseMatrix d = seeded_block(150, 150, seed);
      SparseMatrix a = d.sparseView(1.0, 0.8);
      const DenseMatrix x = seeded_block(150, 3, seed + 100);
      CHECK((spmm(a, x, Execution::Serial) - spmm(a, x, Execution::Parallel)).norm() == 0.0);
    }
  }
}
