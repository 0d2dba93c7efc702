#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "cflow/oracles.hpp"
#include "cflow/spectra.hpp"

using namespace cflow;

TEST_SUITE("spectra") {
  TEST_CASE("problem kinds round trip through their names") {
    for (ProblemKind k : {ProblemKind::Dirichlet, ProblemKind::Buckling, ProblemKind::Stokes, ProblemKind::ConstrainedVorticity})
      CHECK(parse_problem_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_problem_kind("plate"), std::invalid_argument);
  }

  TEST_CASE("richardson removes a pure h^2 term") {
    // q(h) = 3 + 5 h^2 at h and h/2.
    const auto r = richardson({3.0 + 5.0 * 0.04}, {3.0 + 5.0 * 0.01});
    CHECK(r[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(richardson({1.0}, {1.0, 2.0}), std::invalid_argument);
  }

  TEST_CASE("coarse disc spectra are close to the Bessel values") {
    const auto ref = oracles::disc_reference(1.0);
    const MeshPtr mesh = build_mesh(DomainSpec::disc(1.0), 0.1);
    SpectrumOptions o;
    o.k = 3;
    const SpectrumResult d = dirichlet_spectrum(mesh, o);
    CHECK(d.modes[0].lambda == doctest::Approx(ref.lambda1_dirichlet).epsilon(2e-3));
    // lambda2 is double: both copies appear.
    CHECK(d.modes[1].lambda == doctest::Approx(ref.lambda2_dirichlet).epsilon(2e-3));
    CHECK(d.modes[2].lambda == doctest::Approx(ref.lambda2_dirichlet).epsilon(2e-3));
    o.k = 1;
    const SpectrumResult b = buckling_spectrum(mesh, o);
    CHECK(b.modes[0].lambda == doctest::Approx(ref.lambda1_buckling).epsilon(5e-3));
    const SpectrumResult s = stokes_spectrum(mesh, o);
    CHECK(s.modes[0].lambda == doctest::Approx(ref.lambda1_buckling).epsilon(5e-3));
    CHECK(s.modes[0].divergence < 1e-10);
    CHECK(l2_norm_vector(s.modes[0].field) == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("disc Stokes: first eigenvalue simple, second double") {
    const auto ref = oracles::disc_reference(1.0);
    const MeshPtr mesh = build_mesh(DomainSpec::disc(1.0), 0.1);
    SpectrumOptions o;
    o.k = 3;
    const SpectrumResult s = stokes_spectrum(mesh, o);
    CHECK(s.modes[0].lambda == doctest::Approx(ref.lambda1_buckling).epsilon(5e-3));
    CHECK(s.modes[1].lambda == doctest::Approx(ref.lambda2_buckling).epsilon(1e-2));
    CHECK(s.modes[2].lambda == doctest::Approx(ref.lambda2_buckling).epsilon(1e-2));
    CHECK((s.modes[1].lambda - s.modes[0].lambda) / s.modes[0].lambda > 0.5);
  }

  TEST_CASE("eigenvalues are ascending with residuals under their bounds") {
    SpectrumOptions o;
    o.k = 4;
    const SpectrumResult r = buckling_spectrum(build_mesh(DomainSpec::ellipse(1.3, 1.0), 0.15), o);
    for (std::size_t i = 0; i < r.modes.size(); ++i) {
      CHECK(r.modes[i].residual <= r.modes[i].residual_bound);
      if (i > 0) CHECK(r.modes[i - 1].lambda <= r.modes[i].lambda);
    }
  }

  TEST_CASE("constrained vorticity mode has unit norm and small harmonic pairing") {
    const SpectrumResult r = constrained_vorticity_first(build_mesh(DomainSpec::disc(1.0), 0.1), SpectrumOptions{});
    CHECK(l2_norm(r.modes[0].field) == doctest::Approx(1.0));
    CHECK(r.modes[0].orthogonality < 1e-2);
  }

  TEST_CASE("levels carry Richardson estimates and JSON has the contract keys") {
    SpectrumOptions o;
    o.k = 2;
    const auto levels = spectrum_levels(ProblemKind::Dirichlet, DomainSpec::disc(1.0), 0.2, 2, o);
    REQUIRE(levels.size() == 2);
    CHECK(levels[0].extrapolated.empty());
    CHECK(levels[1].extrapolated.size() == 2);
    const auto ref = oracles::disc_reference(1.0);
    CHECK(std::abs(levels[1].extrapolated[0] - ref.lambda1_dirichlet) <
          std::abs(levels[1].modes[0].lambda - ref.lambda1_dirichlet));
    const nlohmann::json j = levels[1].to_json();
    for (const char* key : {"domain", "h", "kind", "eigenvalues", "residuals", "extrapolated"}) CHECK(j.contains(key));
    CHECK(j["kind"] == "dirichlet");
  }

  TEST_CASE("same seed gives identical results") {
    const MeshPtr mesh = build_mesh(DomainSpec::radial_fourier(1.0, {0.0, 0.1, 0.05}), 0.15);
    SpectrumOptions o;
    o.k = 2;
    CHECK(stokes_spectrum(mesh, o).to_json().dump() == stokes_spectrum(mesh, o).to_json().dump());
  }

  TEST_CASE("invalid options are rejected") {
    SpectrumOptions o;
    o.tol = 0.0;
    CHECK_THROWS_AS(dirichlet_spectrum(build_mesh(DomainSpec::disc(1.0), 0.2), o), std::invalid_argument);
    CHECK_THROWS_AS(spectrum_levels(ProblemKind::Buckling, DomainSpec::disc(1.0), 0.2, 0, SpectrumOptions{}),
                    std::invalid_argument);
  }
}
