#pragma once

// Analytic reference values: Bessel functions of the first kind, their
// zeros, separable rectangle spectra and the clamped radial disc mode.
// Nothing in here depends on the finite-element code.

#include <array>
#include <functional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace cflow::oracles {

/// J_n(x) for 0 <= n <= 10 and 0 <= x <= 100, absolute error below 1e-12.
/// Throws std::out_of_range outside that window.
double bessel_j(int n, double x);

/// dJ_n/dx via the recurrence 2 J_n' = J_{n-1} - J_{n+1}.
double bessel_j_derivative(int n, double x);

struct ZeroSearch {
  double value = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

/// k-th positive zero of J_n (k >= 1). Sign-change scan on a fixed grid,
/// then Newton steps kept inside the bracket (bisection fallback).
ZeroSearch bessel_zero_search(int n, int k);
double bessel_zero(int n, int k);

/// j_{n,k} for n in {0,1,2} and k in {1..5}, computed when constructed.
class BesselZeroTable {
 public:
  static constexpr int kOrders = 3;
  static constexpr int kZeros = 5;

  BesselZeroTable();

  double zero(int n, int k) const { return entries_.at(n).at(k - 1).value; }
  const ZeroSearch& entry(int n, int k) const { return entries_.at(n).at(k - 1); }

  nlohmann::json to_json() const;

 private:
  std::array<std::array<ZeroSearch, kZeros>, kOrders> entries_{};
};

/// Shared, lazily built table.
const BesselZeroTable& zero_table();

struct DiscReference {
  double radius = 1.0;
  double lambda1_dirichlet = 0.0;  // (j01/R)^2
  double lambda2_dirichlet = 0.0;  // (j11/R)^2, double eigenvalue
  double lambda1_buckling = 0.0;   // (j11/R)^2
  double lambda2_buckling = 0.0;   // (j21/R)^2
  std::function<double(double)> psi;       // J0(j11 r/R) - J0(j11)
  std::function<double(double)> dpsi_dr;   // -(j11/R) J1(j11 r/R)
  std::function<double(double)> w;         // Laplacian of psi = -(j11/R)^2 J0(j11 r/R)
  std::function<double(double)> dw_dr;
};

DiscReference disc_reference(double radius);

/// Sorted pi^2 (m^2/a^2 + n^2/b^2), repeated by multiplicity.
std::vector<double> rectangle_reference(double a, double b, int count);

}  // namespace cflow::oracles
