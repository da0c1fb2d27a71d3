#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "appraisal/dynamics.hpp"
#include "appraisal/scenarios.hpp"

using namespace appraisal;

namespace {

// Coordinate-wise evaluation straight from the definition, used as the oracle
// for the vectorized implementation.
Eigen::VectorXd rhs_per_coordinate(const InteractionMatrix& c, const Eigen::VectorXd& x) {
  const int n = c.n();
  Eigen::VectorXd dx(n);
  for (int i = 0; i < n; ++i) {
    double inflow = 0.0;
    for (int j = 0; j < n; ++j) inflow += c.entry(j, i) * (1.0 - x(j)) * x(j);
    dx(i) = -(1.0 - x(i)) * x(i) + inflow;
  }
  return dx;
}

}  // namespace

TEST_CASE("vertices are equilibria for every matrix") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_row_stochastic(4, rng);
    for (int i = 0; i < 4; ++i) {
      CHECK(rhs(c, Eigen::VectorXd::Unit(4, i)).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
  }
}

TEST_CASE("the barycenter is an equilibrium exactly for doubly stochastic matrices") {
  Rng rng(12);
  const Eigen::VectorXd uniform4 = Eigen::VectorXd::Constant(4, 0.25);
  for (int trial = 0; trial < 50; ++trial) {
    const auto ds = random_doubly_stochastic(4, rng);
    CHECK(rhs(ds, uniform4).lpNorm<Eigen::Infinity>() <= 1e-15);

    const auto rs = random_row_stochastic(4, rng);
    const double col_dev = rs.column_sum_deviation();
    const double residual = rhs(rs, uniform4).lpNorm<Eigen::Infinity>();
    // residual at the barycenter is (n-1)/n^2 * max column deviation
    CHECK(residual == doctest::Approx(3.0 / 16.0 * col_dev).epsilon(1e-9));
    if (col_dev > 1e-9) CHECK(residual > 1e-12);
  }
}

TEST_CASE("chain matrix at the barycenter, frozen from the per-coordinate oracle") {
  const auto c = demo_row_stochastic();
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.25);
  const Eigen::VectorXd dx = rhs(c, x);
  // -3/16 + (1/2)(3/16) etc.; the inflow of each coordinate is (3/16) times
  // the matching column sum.
  Eigen::VectorXd expected(4);
  expected << -0.09375, 0.0625, 0.09375, -0.0625;
  CHECK((dx - expected).lpNorm<Eigen::Infinity>() <= 1e-16);
  CHECK((dx - rhs_per_coordinate(c, x)).lpNorm<Eigen::Infinity>() <= 1e-16);
}

TEST_CASE("rhs conserves the total appraisal") {
  Rng rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 3 + trial % 4;
    const auto c = random_row_stochastic(n, rng);
    const Eigen::VectorXd x = random_interior_point(n, rng);
    CHECK(std::abs(rhs(c, x).sum()) <= 1e-13);
  }
}

TEST_CASE("rhs agrees with the drift-matrix form") {
  Rng rng(14);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + trial % 4;
    const auto c = random_row_stochastic(n, rng);
    const Eigen::VectorXd x = random_interior_point(n, rng);
    const Eigen::VectorXd via_w = -(drift_matrix(c, x) * x);
    CHECK((rhs(c, x) - via_w).lpNorm<Eigen::Infinity>() <= 1e-14 * n);
  }
}

TEST_CASE("drift matrix structure") {
  const auto c1 = demo_doubly_stochastic();
  SUBCASE("W e_i = 0 at vertices") {
    const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(4, 0);
    CHECK((drift_matrix(c1, e1) * e1).lpNorm<Eigen::Infinity>() <= 1e-16);
  }
  SUBCASE("column sums vanish for stochastic C") {
    Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd x = random_interior_point(4, rng);
      const Eigen::MatrixXd w = drift_matrix(c1, x);
      CHECK(w.colwise().sum().cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  SUBCASE("W itself need not be a Laplacian even for doubly stochastic C") {
    Eigen::VectorXd x(4);
    x << 0.4, 0.3, 0.2, 0.1;
    const Eigen::MatrixXd w = drift_matrix(c1, x);
    CHECK(w.rowwise().sum().cwiseAbs().maxCoeff() > 1e-3);
  }
}

TEST_CASE("opinion dynamics companion") {
  const auto c1 = demo_doubly_stochastic();
  SUBCASE("consensus states are stationary") {
    const Eigen::VectorXd z = Eigen::VectorXd::Constant(4, 0.7);
    Rng rng(16);
    const Eigen::VectorXd x = random_interior_point(4, rng);
    CHECK(opinion_rhs(c1, x, z).lpNorm<Eigen::Infinity>() <= 1e-15);
  }
  SUBCASE("a fully confident individual never moves") {
    Eigen::VectorXd z(4);
    z << 0.1, 0.9, 0.4, 0.2;
    for (int i = 0; i < 4; ++i) {
      const Eigen::VectorXd x = Eigen::VectorXd::Unit(4, i);
      CHECK(opinion_rhs(c1, x, z)(i) == 0.0);
    }
  }
  SUBCASE("uniform appraisals scale the relative disagreement by 3/4") {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.25);
    const Eigen::VectorXd z = Eigen::VectorXd::Unit(4, 0);
    const Eigen::VectorXd expected = 0.75 * (z - c1.weights() * z);
    CHECK((opinion_rhs(c1, x, z) - expected).lpNorm<Eigen::Infinity>() <= 1e-16);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS((void)opinion_rhs(c1, Eigen::VectorXd::Constant(4, 0.25),
                                      Eigen::VectorXd::Zero(3)),
                    DimensionMismatch);
  }
}

TEST_CASE("interior equilibrium of the ring mix is the barycenter") {
  const Eigen::VectorXd x = interior_equilibrium(demo_doubly_stochastic());
  CHECK((x - Eigen::VectorXd::Constant(4, 0.25)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("interior equilibrium of the chain matrix matches the known limit") {
  const auto c2 = demo_row_stochastic();
  const Eigen::VectorXd x = interior_equilibrium(c2);
  Eigen::VectorXd reported(4);
  reported << 0.0917, 0.211, 0.486, 0.211;
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(x(i) - reported(i)) <= 5e-3);
  }
  CHECK(rhs(c2, x).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK(x.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interior equilibrium of random doubly stochastic matrices is uniform") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 3;
    const auto c = random_doubly_stochastic(n, rng);
    const Eigen::VectorXd x = interior_equilibrium(c, random_interior_point(n, rng));
    CHECK((x - Eigen::VectorXd::Constant(n, 1.0 / n)).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("interior equilibrium rejects bad starts") {
  const auto c = demo_row_stochastic();
  CHECK_THROWS_AS((void)interior_equilibrium(c, Eigen::VectorXd::Unit(4, 0)), InvalidParameter);
  Eigen::VectorXd off(4);
  off << 0.5, 0.4, 0.3, 0.2;
  CHECK_THROWS_AS((void)interior_equilibrium(c, off), InvalidParameter);
}

TEST_CASE("interior equilibrium failure modes") {
  SUBCASE("a dominant neighbor drives the flow into a vertex") {
    // Vertex 1 soaks up half the stationary weight; no interior equilibrium
    // exists and the solver reports the collapse instead of returning e_1.
    Eigen::MatrixXd c(3, 3);
    c << 0, 0.75, 0.25,
        1, 0, 0,
        1, 0, 0;
    try {
      (void)interior_equilibrium(InteractionMatrix::validated(c));
      FAIL("expected ConvergedToVertex");
    } catch (const ConvergedToVertex& e) {
      CHECK(e.vertex == 0);
    }
  }
  SUBCASE("an iteration budget of one is not enough for the chain matrix") {
    CHECK_THROWS_AS((void)interior_equilibrium(demo_row_stochastic(), 1e-12, /*max_iter=*/1),
                    NoConvergence);
  }
}

TEST_CASE("rhs checks dimensions") {
  CHECK_THROWS_AS((void)rhs(demo_row_stochastic(), Eigen::VectorXd::Constant(3, 1.0 / 3)),
                  DimensionMismatch);
  CHECK_THROWS_AS(
      (void)drift_matrix(demo_row_stochastic(), Eigen::VectorXd::Constant(5, 0.2)),
      DimensionMismatch);
}

TEST_CASE("equivalent appraisal: pinned cases") {
  SUBCASE("single-support weights return the supported coordinate") {
    Eigen::VectorXd x(4);
    x << 0.1, 0.2, 0.3, 0.4;
    for (int k = 0; k < 4; ++k) {
      CHECK(equivalent_appraisal(Eigen::VectorXd::Unit(4, k), x) ==
            doctest::Approx(x(k)).epsilon(1e-14));
    }
  }
  SUBCASE("mean constraint picks the zero root") {
    Eigen::VectorXd beta(4), x(4);
    beta << 0.5, 0.5, 0, 0;
    x << 0, 1, 0, 0;
    CHECK(equivalent_appraisal(beta, x) == 0.0);
  }
  SUBCASE("symmetric double root") {
    Eigen::VectorXd beta(2), x(2);
    beta << 0.5, 0.5;
    x << 0.5, 0.5;
    CHECK(equivalent_appraisal(beta, x) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("off-simplex input has no feasible root") {
    Eigen::VectorXd beta(2), x(2);
    beta << 0.5, 0.5;
    x << 0.2, 0.9;  // sums to 1.1
    CHECK_THROWS_AS((void)equivalent_appraisal(beta, x), NoFeasibleRoot);
  }
}

TEST_CASE("equivalent appraisal satisfies its contract on random simplex pairs") {
  Rng rng(18);
  for (int trial = 0; trial < 100000; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::VectorXd beta = random_interior_point(n, rng);
    if (trial % 3 == 0) {  // sparsify the support now and then
      for (int k = 0; k < n - 1; ++k) {
        if (rng.uniform() < 0.4) beta(k) = 0.0;
      }
      beta /= beta.sum();
    }
    const Eigen::VectorXd x =
        trial % 5 == 0 ? Eigen::VectorXd::Unit(n, rng.uniform_int(0, n - 1)).eval()
                       : random_interior_point(n, rng);

    const double v = equivalent_appraisal(beta, x);

    double c = 0.0, lo = 1.0, hi = 0.0;
    for (int k = 0; k < n; ++k) {
      if (beta(k) > 0.0) {
        c += beta(k) * (x(k) - x(k) * x(k));
        lo = std::min(lo, x(k));
        hi = std::max(hi, x(k));
      }
    }
    REQUIRE(std::abs((v - v * v) - c) <= 1e-12);
    REQUIRE(v >= lo - 1e-9);
    REQUIRE(v <= hi + 1e-9);
    REQUIRE(v <= beta.dot(x) + 1e-9);
  }
}
