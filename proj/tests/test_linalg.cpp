#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "cflow/linalg.hpp"

using namespace cflow;

namespace {

// Second-difference matrix on n interior points of [0,1].
SparseMatrix laplacian_1d(int n) {
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2.0);
    if (i + 1 < n) {
      t.emplace_back(i, i + 1, -1.0);
      t.emplace_back(i + 1, i, -1.0);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

SparseMatrix identity(int n) {
  SparseMatrix i(n, n);
  i.setIdentity();
  return i;
}

// Random sparse symmetric positive definite matrix, diagonally dominant.
SparseMatrix random_spd(int n, std::uint64_t seed) {
  const DenseMatrix r = seeded_block(n, 4, seed);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int d = 1; d <= 3; ++d) {
      if (i + d * 3 >= n) break;
      const double v = r(i, d);
      t.emplace_back(i, i + d * 3, v);
      t.emplace_back(i + d * 3, i, v);
      row += std::abs(v);
    }
    t.emplace_back(i, i, 2.0 + row + r(i, 0));
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  SparseMatrix at = a.transpose();
  return 0.5 * (a + at) + 3.0 * identity(n);
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("1D Laplacian eigenvalues match the closed form") {
    const int n = 200;
    EigenOptions o;
    o.k = 5;
    const EigenRun run = eigs_smallest(laplacian_1d(n), identity(n), o);
    REQUIRE(run.pairs.size() == 5);
    for (int j = 1; j <= 5; ++j) {
      const double exact = 2.0 - 2.0 * std::cos(j * M_PI / (n + 1));
      CHECK(run.pairs[j - 1].lambda == doctest::Approx(exact).epsilon(1e-10));
      CHECK(run.pairs[j - 1].residual <= run.pairs[j - 1].residual_bound);
    }
  }

  TEST_CASE("generalized problem agrees with a dense solver") {
    const int n = 120;
    const SparseMatrix a = random_spd(n, 11), b = random_spd(n, 12);
    EigenOptions o;
    o.k = 4;
    const EigenRun run = eigs_smallest(a, b, o);
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> dense{DenseMatrix(a), DenseMatrix(b)};
    for (int i = 0; i < 4; ++i) {
      CHECK(run.pairs[i].lambda == doctest::Approx(dense.eigenvalues()[i]).epsilon(1e-10));
      // B-orthonormal vectors.
      for (int j = 0; j < 4; ++j)
        CHECK(run.pairs[i].vector.dot(b * run.pairs[j].vector) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("eigensolver is deterministic for a fixed seed") {
    const SparseMatrix a = laplacian_1d(80), b = random_spd(80, 5);
    EigenOptions o;
    o.k = 3;
    const EigenRun r1 = eigs_smallest(a, b, o), r2 = eigs_smallest(a, b, o);
    for (int i = 0; i < 3; ++i) {
      CHECK(r1.pairs[i].lambda == r2.pairs[i].lambda);
      CHECK((r1.pairs[i].vector - r2.pairs[i].vector).norm() == 0.0);
    }
    EigenOptions serial = o;
    serial.exec = Execution::Serial;
    const EigenRun r3 = eigs_smallest(a, b, serial);
    for (int i = 0; i < 3; ++i) CHECK(r3.pairs[i].lambda == doctest::Approx(r1.pairs[i].lambda).epsilon(1e-13));
  }

  TEST_CASE("bad eigen inputs are rejected") {
    EigenOptions o;
    o.k = 20;
    CHECK_THROWS_AS(eigs_smallest(laplacian_1d(10), identity(10), o), std::invalid_argument);
    o.k = 1;
    CHECK_THROWS_AS(eigs_smallest(laplacian_1d(10), identity(9), o), std::invalid_argument);
    CHECK_THROWS_AS(eigs_smallest(laplacian_1d(10), SparseMatrix(-1.0 * identity(10)), o), std::invalid_argument);
  }

  TEST_CASE("factorization solves SPD and indefinite systems") {
    const SparseMatrix a = random_spd(60, 7);
    const Vector x = seeded_block(60, 1, 8).col(0);
    CHECK((factorize(a).solve(Vector(a * x)) - x).norm() < 1e-12 * x.norm());
    const SparseMatrix ind = a - 5.0 * identity(60);
    CHECK((factorize(ind, true).solve(Vector(ind * x)) - x).norm() < 1e-10 * x.norm());
    CHECK_THROWS_AS(factorize(SparseMatrix(60, 60)), FactorizationError);
  }

  TEST_CASE("saddle-point solver matches a dense solve") {
    const int nu = 40, np = 6;
    const SparseMatrix k = random_spd(nu, 21);
    // B with constant left kernel: rows sum to zero.
    DenseMatrix bd = seeded_block(np, nu, 22);
    for (int j = 0; j < nu; ++j) bd.col(j).array() -= bd.col(j).mean();
    const SparseMatrix b = bd.sparseView();
    const SaddlePointSolver solver(k, b);
    const Vector f = seeded_block(nu, 1, 23).col(0);
    Vector p;
    const Vector u = solver.solve(f, &p);
    CHECK((b * u).norm() < 1e-12);
    CHECK((DenseMatrix(k) * u + bd.transpose() * p - f).norm() < 1e-11 * f.norm());
    // Reference: eliminate u and solve the (pinned) Schur complement.
    const DenseMatrix kinv = DenseMatrix(k).inverse();
    const DenseMatrix schur = bd * kinv * bd.transpose();
    const Eigen::VectorXd rhs = bd * kinv * f;
    const Eigen::VectorXd pp = schur.bottomRightCorner(np - 1, np - 1).ldlt().solve(rhs.tail(np - 1));
    CHECK((p.tail(np - 1) - pp).norm() < 1e-9 * (1.0 + pp.norm()));
  }

  TEST_CASE("seeded blocks are reproducible and seed dependent") {
    const DenseMatrix a = seeded_block(30, 3, 42), b = seeded_block(30, 3, 42), c = seeded_block(30, 3, 43);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() > 0.1);
    CHECK(a.maxCoeff() < 0.5);
    CHECK(a.minCoeff() >= -0.5);
  }

  TEST_CASE("residual floor scales with the data") {
    const SparseMatrix a = laplacian_1d(50), b = identity(50);
    const Vector v = Vector::Ones(50);
    const double f1 = residual_floor(a, b, v, 1.0, v);
    const double f2 = residual_floor(SparseMatrix(1e6 * a), b, v, 1.0, v);
    CHECK(f1 > 0.0);
    CHECK(f1 < 1e-13);
    CHECK(f2 > 1e5 * f1);
  }
}
