#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "cflow/oracles.hpp"

using namespace cflow::oracles;
using boost::multiprecision::cpp_rational;

namespace {

// Partial sum of the power series of J_n at a rational point, exactly.
double series_exact(int n, cpp_rational x, int terms) {
  cpp_rational half = x / 2, sum = 0, term = 1;
  for (int i = 0; i < n; ++i) term = term * half / (i + 1);
  const cpp_rational q = half * half;
  for (int k = 0; k < terms; ++k) {
    sum += (k % 2 == 0) ? term : cpp_rational(-term);
    term = term * q / ((k + 1) * (k + 1 + n));
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_SUITE("oracles") {
  TEST_CASE("J_n matches an exact rational series") {
    for (int n = 0; n <= 3; ++n)
      for (auto [num, den] : {std::pair{1, 2}, {3, 2}, {5, 1}, {17, 4}}) {
        const double x = double(num) / den;
        CHECK(bessel_j(n, x) == doctest::Approx(series_exact(n, cpp_rational(num, den), 60)).epsilon(1e-13));
      }
  }

  TEST_CASE("J_n agrees with an independent library") {
    for (int n = 0; n <= 3; ++n)
      for (double x : {0.0, 0.3, 2.4, 7.0, 13.5, 22.0})
        CHECK(std::abs(bessel_j(n, x) - boost::math::cyl_bessel_j(n, x)) < 1e-12);
  }

  TEST_CASE("derivative obeys J0' = -J1 and the recurrence") {
    for (double x : {0.5, 3.0, 9.0}) {
      CHECK(bessel_j_derivative(0, x) == doctest::Approx(-bessel_j(1, x)).epsilon(1e-12));
      CHECK(bessel_j_derivative(2, x) == doctest::Approx(0.5 * (bessel_j(1, x) - bessel_j(3, x))).epsilon(1e-12));
    }
  }

  TEST_CASE("zeros match the library to 1e-10 and are bracketed") {
    const BesselZeroTable& table = zero_table();
    for (int n = 0; n < BesselZeroTable::kOrders; ++n)
      for (int k = 1; k <= BesselZeroTable::kZeros; ++k) {
        const ZeroSearch& z = table.entry(n, k);
        CHECK(std::abs(z.value - boost::math::cyl_bessel_j_zero(double(n), k)) < 1e-10);
        CHECK(z.bracket_lo <= z.value);
        CHECK(z.value <= z.bracket_hi);
        CHECK(std::abs(bessel_j(n, z.value)) < 1e-12);
      }
  }

  TEST_CASE("zeros interlace: j_{n,k} < j_{n+1,k} < j_{n,k+1}") {
    for (int n = 0; n + 1 < BesselZeroTable::kOrders; ++n)
      for (int k = 1; k < BesselZeroTable::kZeros; ++k) {
        CHECK(bessel_zero(n, k) < bessel_zero(n + 1, k));
        CHECK(bessel_zero(n + 1, k) < bessel_zero(n, k + 1));
      }
  }

  TEST_CASE("invalid arguments throw") {
    CHECK_THROWS_AS(bessel_zero(0, 0), std::out_of_range);
    CHECK_THROWS_AS(bessel_j(-1, 1.0), std::out_of_range);
    CHECK_THROWS_AS(disc_reference(0.0), std::invalid_argument);
  }

  TEST_CASE("disc reference scales like R^-2") {
    const DiscReference unit = disc_reference(1.0), big = disc_reference(2.0);
    CHECK(big.lambda1_dirichlet == doctest::Approx(unit.lambda1_dirichlet / 4.0));
    CHECK(unit.lambda1_buckling == doctest::Approx(unit.lambda2_dirichlet));
    // psi is clamped: zero value and slope at r = R.
    CHECK(std::abs(unit.psi(1.0)) < 1e-14);
    CHECK(std::abs(unit.dpsi_dr(1.0)) < 1e-12);
    // Buckling equation in radial form at an interior point: w' = -lambda psi'.
    for (double r : {0.2, 0.6, 0.9})
      CHECK(unit.dw_dr(r) == doctest::Approx(-unit.lambda1_buckling * unit.dpsi_dr(r)).epsilon(1e-10));
  }

  TEST_CASE("rectangle reference is sorted with multiplicity") {
    const auto v = rectangle_reference(1.0, 1.0, 4);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == doctest::Approx(2 * M_PI * M_PI));
    CHECK(v[1] == doctest::Approx(5 * M_PI * M_PI));
    CHECK(v[2] == doctest::Approx(5 * M_PI * M_PI));
    CHECK(v[3] == doctest::Approx(8 * M_PI * M_PI));
  }
}
