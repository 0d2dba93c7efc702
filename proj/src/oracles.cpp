#include "cflow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace cflow::oracles {
namespace {

constexpr int kMaxOrder = 10;
constexpr double kMaxArgument = 100.0;
constexpr double kSeriesCutoff = 12.0;

double series(int n, double x) {
  // sum_m (-1)^m (x/2)^(2m+n) / (m! (m+n)!)
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  double sum = term;
  const double q = half * half;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (static_cast<double>(m) * static_cast<double>(m + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// Miller's downward recurrence normalised with J0 + 2 sum J_{2k} = 1.
double downward(int n, double x) {
  const int start = 2 * (static_cast<int>(x) + 40 + n);
  double next = 0.0;
  double current = 1e-300;
  double wanted = 0.0;
  double norm = 0.0;
  for (int m = start; m >= 1; --m) {
    const double prev = 2.0 * m / x * current - next;
    next = current;
    current = prev;  // J_{m-1}
    if (m - 1 == n) wanted = current;
    if ((m - 1) % 2 == 0 && m - 1 > 0) norm += 2.0 * current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      next *= 1e-250;
      wanted *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += current;  // J0
  return wanted / norm;
}

void check_range(int n, double x) {
  if (n < 0 || n > kMaxOrder) throw std::out_of_range("bessel_j: order " + std::to_string(n) + " outside [0,10]");
  if (!(x >= 0.0) || x > kMaxArgument) throw std::out_of_range("bessel_j: argument outside [0,100]");
}

}  // namespace

double bessel_j(int n, double x) {
  check_range(n, x);
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  return x <= kSeriesCutoff ? series(n, x) : downward(n, x);
}

double bessel_j_derivative(int n, double x) {
  check_range(n, x);
  if (n == 0) return -bessel_j(1, x);
  if (n == kMaxOrder) {
    // J_n' = J_{n-1} - (n/x) J_n
    if (x == 0.0) return 0.0;
    return bessel_j(n - 1, x) - n / x * bessel_j(n, x);
  }
  return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x));
}

ZeroSearch bessel_zero_search(int n, int k) {
  if (k < 1) throw std::out_of_range("bessel_zero: k must be >= 1");
  constexpr double step = 0.05;
  int found = 0;
  double lo = 0.0;
  double hi = 0.0;
  double prev_x = step;
  double prev_f = bessel_j(n, prev_x);
  for (double x = 2.0 * step; x <= kMaxArgument; x += step) {
    const double f = bessel_j(n, x);
    if ((prev_f < 0.0) != (f < 0.0)) {
      if (++found == k) {
        lo = prev_x;
        hi = x;
        break;
      }
    }
    prev_x = x;
    prev_f = f;
  }
  if (found < k) throw std::runtime_error("bessel_zero: bracket not found");

  ZeroSearch result;
  result.bracket_lo = lo;
  result.bracket_hi = hi;
  double f_lo = bessel_j(n, lo);
  double x = 0.5 * (lo + hi);
  for (int it = 1; it <= 100; ++it) {
    result.iterations = it;
    const double f = bessel_j(n, x);
    if (f == 0.0) break;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = x;
      f_lo = f;
    } else {
      hi = x;
    }
    const double df = bessel_j_derivative(n, x);
    double candidate = df != 0.0 ? x - f / df : 0.5 * (lo + hi);
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    const double delta = std::abs(candidate - x);
    x = candidate;
    if (delta < 1e-15 * x || hi - lo < 4e-16 * x) break;
  }
  result.value = x;
  return result;
}

double bessel_zero(int n, int k) { return bessel_zero_search(n, k).value; }

BesselZeroTable::BesselZeroTable() {
  for (int n = 0; n < kOrders; ++n)
    for (int k = 1; k <= kZeros; ++k) entries_[n][k - 1] = bessel_zero_search(n, k);
}

nlohmann::json BesselZeroTable::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (int n = 0; n < kOrders; ++n) {
    for (int k = 1; k <= kZeros; ++k) {
      const auto& e = entries_[n][k - 1];
      out.push_back({{"n", n},
                     {"k", k},
                     {"zero", e.value},
                     {"residual", std::abs(bessel_j(n, e.value))},
                     {"iterations", e.iterations},
                     {"bracket", {e.bracket_lo, e.bracket_hi}}});
    }
  }
  return out;
}

const BesselZeroTable& zero_table() {
  static const BesselZeroTable table;
  return table;
}

DiscReference disc_reference(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("disc_reference: radius must be positive");
  const auto& table = zero_table();
  const double j01 = table.zero(0, 1);
  const double j11 = table.zero(1, 1);
  const double j21 = table.zero(2, 1);
  const double kappa = j11 / radius;
  const double boundary_value = bessel_j(0, j11);

  DiscReference ref;
  ref.radius = radius;
  ref.lambda1_dirichlet = (j01 / radius) * (j01 / radius);
  ref.lambda2_dirichlet = kappa * kappa;
  ref.lambda1_buckling = kappa * kappa;
  ref.lambda2_buckling = (j21 / radius) * (j21 / radius);
  ref.psi = [kappa, boundary_value](double r) { return bessel_j(0, kappa * r) - boundary_value; };
  ref.dpsi_dr = [kappa](double r) { return -kappa * bessel_j(1, kappa * r); };
  ref.w = [kappa](double r) { return -kappa * kappa * bessel_j(0, kappa * r); };
  ref.dw_dr = [kappa](double r) { return kappa * kappa * kappa * bessel_j(1, kappa * r); };
  return ref;
}

std::vector<double> rectangle_reference(double a, double b, int count) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("rectangle_reference: sides must be positive");
  if (count < 1) return {};
  // Every eigenvalue among the first `count` has m, n <= count.
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count) * count);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (int m = 1; m <= count; ++m)
    for (int n = 1; n <= count; ++n) values.push_back(pi2 * (m * m / (a * a) + n * n / (b * b)));
  std::sort(values.begin(), values.end());
  values.resize(static_cast<std::size_t>(count));
  return values;
}

}  // namespace cflow::oracles
