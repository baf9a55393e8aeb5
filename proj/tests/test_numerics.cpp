#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "czono/interval.hpp"
#include "czono/linalg.hpp"
#include "czono/lp.hpp"
#include "oracles.hpp"

using czono::Interval;
using czono::IntervalMatrix;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Interval random_interval(oracle::TestRng& rng, double span) {
  const double a = rng.uniform(-span, span);
  const double b = rng.uniform(-span, span);
  return Interval::hull_of(a, b);
}

// Shrink: a random proper subinterval.
Interval shrink(const Interval& x, oracle::TestRng& rng) {
  const double lo = rng.uniform(x.lo(), x.mid());
  const double hi = rng.uniform(x.mid(), x.hi());
  return Interval(lo, hi);
}

}  // namespace

TEST_CASE("interval arithmetic on pinned cases") {
  const Interval a = Interval(0, 1) + Interval(0, 1);
  CHECK(a.lo() == doctest::Approx(0.0));
  CHECK(a.hi() == doctest::Approx(2.0));

  const Interval m = Interval(-1, 1) * Interval(-1, 1);
  CHECK(m.lo() == doctest::Approx(-1.0));
  CHECK(m.hi() == doctest::Approx(1.0));

  // Oracle first: extremes of a/b over endpoint combinations of [1,2]/[2,4].
  const Interval sampled = oracle::sample_binary(
      [](double x, double y) { return x / y; }, Interval(1, 2), Interval(2, 4));
  CHECK(sampled.lo() == doctest::Approx(0.25));
  CHECK(sampled.hi() == doctest::Approx(1.0));
  const Interval d = Interval(1, 2) / Interval(2, 4);
  CHECK(d.lo() == doctest::Approx(0.25));
  CHECK(d.hi() == doctest::Approx(1.0));

  CHECK_THROWS_AS(Interval(1, 2) / Interval(-1, 1), czono::DivisionByZeroInterval);
}

TEST_CASE("interval arithmetic is inclusion monotone") {
  oracle::TestRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Interval xw = random_interval(rng, 5.0);
    const Interval yw = random_interval(rng, 5.0);
    const Interval x = shrink(xw, rng);
    const Interval y = shrink(yw, rng);
    CHECK((xw + yw).contains(x + y));
    CHECK((xw - yw).contains(x - y));
    CHECK((xw * yw).contains(x * y));
    // Division needs a denominator family bounded away from zero.
    const Interval dw = Interval(0.5, 0.5) + czono::abs(yw);
    const Interval dn = shrink(dw, rng);
    CHECK((xw / dw).contains(x / dn));
  }
}

TEST_CASE("interval transcendentals match dense sampling") {
  oracle::TestRng rng(23);
  const double slack = 1e-9;
  for (int trial = 0; trial < 60; ++trial) {
    const Interval x = random_interval(rng, 6.0);
    auto check_encloses = [&](const Interval& lib, const Interval& sampled) {
      CHECK(lib.lo() <= sampled.lo() + slack);
      CHECK(lib.hi() >= sampled.hi() - slack);
    };
    check_encloses(czono::sin(x), oracle::sample_unary([](double t) { return std::sin(t); }, x));
    check_encloses(czono::cos(x), oracle::sample_unary([](double t) { return std::cos(t); }, x));
    check_encloses(czono::atan(x), oracle::sample_unary([](double t) { return std::atan(t); }, x));
    check_encloses(czono::exp(x), oracle::sample_unary([](double t) { return std::exp(t); }, x));
    check_encloses(czono::abs(x), oracle::sample_unary([](double t) { return std::abs(t); }, x));
    const Interval pos = Interval(0.1, 0.1) + czono::abs(x);
    check_encloses(czono::log(pos), oracle::sample_unary([](double t) { return std::log(t); }, pos));
    check_encloses(czono::sqrt(pos),
                   oracle::sample_unary([](double t) { return std::sqrt(t); }, pos));
  }

  // sin over a full period hits both extremes; cos likewise.
  CHECK(czono::sin(Interval(0, 7)).lo() == doctest::Approx(-1.0));
  CHECK(czono::sin(Interval(0, 7)).hi() == doctest::Approx(1.0));
  CHECK(czono::cos(Interval(-50, 50)).lo() == doctest::Approx(-1.0));
  CHECK(czono::cos(Interval(-50, 50)).hi() == doctest::Approx(1.0));

  CHECK_THROWS_AS(czono::tan(Interval(0, kPi)), czono::DomainError);
  CHECK_THROWS_AS(czono::log(Interval(0, 1)), czono::DomainError);
  CHECK_THROWS_AS(czono::sqrt(Interval(-1, 1)), czono::DomainError);
  CHECK_THROWS_AS(czono::asin(Interval(0, 2)), czono::DomainError);

  // Repeated multiplication is the documented behavior up to exponent 8:
  // [-1,2]^2 evaluates as [-1,2]*[-1,2] = [-2,4], not the tight [0,4].
  const Interval sq = czono::pow_int(Interval(-1, 2), 2);
  CHECK(sq.lo() == doctest::Approx(-2.0));
  CHECK(sq.hi() == doctest::Approx(4.0));
  // The monomial rule beyond exponent 8 is tight for even powers.
  const Interval big = czono::pow_int(Interval(-1, 2), 10);
  CHECK(big.lo() == doctest::Approx(0.0));
  CHECK(big.hi() == doctest::Approx(1024.0));
}

TEST_CASE("interval empties and sentinels") {
  const Interval e = Interval::empty();
  CHECK(e.is_empty());
  CHECK(!(e == Interval(0, 0)));
  CHECK((e + Interval(1, 2)).is_empty());
  CHECK(czono::intersect(Interval(0, 1), Interval(2, 3)).is_empty());
  CHECK(czono::hull(e, Interval(1, 2)) == Interval(1, 2));
  CHECK_THROWS_AS(Interval(std::nan(""), 1.0), czono::DomainError);
  CHECK_THROWS_AS(Interval(2.0, 1.0), czono::DomainError);
}

TEST_CASE("extended intervals stay ordered or become empty") {
  czono::ExtendedInterval r;  // (-inf, inf)
  CHECK(!r.bounded_below());
  CHECK(!r.bounded_above());
  r.intersect_with(czono::ExtendedInterval(2, 3));
  CHECK(r.lo() == doctest::Approx(2));
  CHECK(r.hi() == doctest::Approx(3));
  czono::ExtendedInterval s(5, std::numeric_limits<double>::infinity());
  s.intersect_with(czono::ExtendedInterval(2, 3));
  CHECK(s.is_empty());
}

TEST_CASE("interval matrix product basics") {
  // Zero-radius A acts as its midpoint.
  Eigen::MatrixXd a(2, 2);
  a << 1, -2, 0.5, 3;
  Eigen::MatrixXd b(2, 2);
  b << 2, 1, -1, 4;
  const IntervalMatrix p = czono::interval_matrix_mul(IntervalMatrix(a), b);
  CHECK((p.mid() - a * b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(p.rad().maxCoeff() == doctest::Approx(0.0));

  // [[-1,1]] * [[2]] = [[-2,2]].
  IntervalMatrix s(1, 1);
  s.set(0, 0, Interval(-1, 1));
  Eigen::MatrixXd two(1, 1);
  two << 2;
  const IntervalMatrix scaled = czono::interval_matrix_mul(s, two);
  CHECK(scaled(0, 0).lo() == doctest::Approx(-2.0));
  CHECK(scaled(0, 0).hi() == doctest::Approx(2.0));
}

TEST_CASE("interval matrix product contains all samples") {
  oracle::TestRng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    IntervalMatrix a(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        a.set(i, j, random_interval(rng, 3.0));
      }
    }
    Eigen::MatrixXd b(2, 2);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) b(i, j) = rng.uniform(-3, 3);
    }
    const IntervalMatrix left = czono::interval_matrix_mul(a, b);
    const IntervalMatrix right = czono::interval_matrix_mul(b, a);
    for (int s = 0; s < 1000; ++s) {
      Eigen::MatrixXd sample(2, 2);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          sample(i, j) = rng.uniform(a(i, j).lo(), a(i, j).hi());
        }
      }
      CHECK(left.contains(sample * b));
      CHECK(right.contains(b * sample));
    }
  }
}

TEST_CASE("gauss-jordan full pivot on pinned cases") {
  const auto id = czono::gauss_jordan_full_pivot(Eigen::MatrixXd::Identity(3, 3));
  CHECK(id.rank == 3);
  CHECK((id.reduced - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
  CHECK(id.col_perm == std::vector<Eigen::Index>{0, 1, 2});
  CHECK(id.row_perm == std::vector<Eigen::Index>{0, 1, 2});

  Eigen::MatrixXd m(2, 2);
  m << 0, 2, 0, 0;
  const auto r = czono::gauss_jordan_full_pivot(m);
  CHECK(r.rank == 1);
  CHECK(r.col_perm[0] == 1);  // the only usable pivot lives in column 2
  CHECK(r.reduced(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("gauss-jordan rank matches the exact integer oracle") {
  oracle::TestRng rng(53);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::vector<long long>> im(4, std::vector<long long>(6, 0));
    Eigen::MatrixXd m(4, 6);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 6; ++j) {
        im[i][j] = rng.uniform_int(-3, 3);
        m(i, j) = static_cast<double>(im[i][j]);
      }
    }
    if (trial % 3 == 0) {  // force rank deficiency
      for (int j = 0; j < 6; ++j) {
        im[3][j] = im[0][j] + im[1][j];
        m(3, j) = m(0, j) + m(1, j);
      }
    }
    const int expected = oracle::integer_rank(im);
    CHECK(czono::gauss_jordan_full_pivot(m).rank == expected);
  }
}

TEST_CASE("gauss-jordan carried rhs follows the row operations") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 2, 1, 2, 4, 0;
  Eigen::VectorXd b(2);
  b << 3, 4;
  const auto r = czono::gauss_jordan_full_pivot(a, b);
  CHECK(r.rank == 2);
  // Reconstruct: for any xi solving the reduced system, the permuted original
  // system must hold.
  Eigen::VectorXd xi_perm(3);
  xi_perm << r.rhs[0], r.rhs[1], 0.0;  // free variable at 0
  Eigen::VectorXd xi(3);
  for (int j = 0; j < 3; ++j) xi[r.col_perm[static_cast<std::size_t>(j)]] = xi_perm[j];
  CHECK((a * xi - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lp solver on pinned cases") {
  // max x s.t. x <= 1, i.e. min -x.
  czono::LpProblem p1 = czono::LpProblem::with_vars(1);
  p1.cost[0] = -1.0;
  p1.ineq_a.resize(1, 1);
  p1.ineq_a << 1;
  p1.ineq_b.resize(1);
  p1.ineq_b << 1;
  const czono::LpResult r1 = czono::lp_solve(p1);
  REQUIRE(r1.status == czono::LpStatus::Optimal);
  CHECK(-r1.value == doctest::Approx(1.0));
  CHECK(r1.x[0] == doctest::Approx(1.0));

  // min 0 s.t. x <= -1, x >= 0 -> infeasible.
  czono::LpProblem p2 = czono::LpProblem::with_vars(1);
  p2.ineq_a.resize(1, 1);
  p2.ineq_a << 1;
  p2.ineq_b.resize(1);
  p2.ineq_b << -1;
  p2.lower[0] = 0.0;
  CHECK(czono::lp_solve(p2).status == czono::LpStatus::Infeasible);

  // min ||xi||_inf s.t. [1 1] xi = 3, reformulated with vars (xi1, xi2, t).
  czono::LpProblem p3 = czono::LpProblem::with_vars(3);
  p3.cost << 0, 0, 1;
  p3.eq_a.resize(1, 3);
  p3.eq_a << 1, 1, 0;
  p3.eq_b.resize(1);
  p3.eq_b << 3;
  p3.ineq_a.resize(4, 3);
  p3.ineq_a << 1, 0, -1, -1, 0, -1, 0, 1, -1, 0, -1, -1;
  p3.ineq_b = Eigen::VectorXd::Zero(4);
  const czono::LpResult r3 = czono::lp_solve(p3);
  REQUIRE(r3.status == czono::LpStatus::Optimal);
  CHECK(r3.value == doctest::Approx(1.5));

  // Unbounded: min x with no constraints.
  czono::LpProblem p4 = czono::LpProblem::with_vars(1);
  p4.cost[0] = 1.0;
  CHECK(czono::lp_solve(p4).status == czono::LpStatus::Unbounded);
}

TEST_CASE("lp solver agrees with the vertex-enumeration oracle") {
  oracle::TestRng rng(71);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.uniform_int(2, 4);
    czono::LpProblem p = czono::LpProblem::with_vars(n);
    for (int j = 0; j < n; ++j) {
      p.cost[j] = rng.uniform(-2, 2);
      p.lower[j] = rng.uniform(-3, -1);
      p.upper[j] = rng.uniform(1, 3);
    }
    // A feasible interior point keeps the instance nonempty by construction.
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0[j] = rng.uniform(p.lower[j] + 0.2, p.upper[j] - 0.2);
    const int m = rng.uniform_int(1, 4);
    p.ineq_a.resize(m, n);
    p.ineq_b.resize(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.ineq_a(i, j) = rng.uniform(-1, 1);
      p.ineq_b[i] = p.ineq_a.row(i).dot(x0) + rng.uniform(0.1, 1.5);
    }
    if (trial % 2 == 0) {
      p.eq_a.resize(1, n);
      for (int j = 0; j < n; ++j) p.eq_a(0, j) = rng.uniform(-1, 1);
      p.eq_b.resize(1);
      p.eq_b << p.eq_a.row(0).dot(x0);
    } else {
      p.eq_a.resize(0, n);
      p.eq_b.resize(0);
    }

    bool has_vertex = false;
    const double oracle_value = oracle::vertex_lp_min(p, has_vertex);
    REQUIRE(has_vertex);
    const czono::LpResult r = czono::lp_solve(p);
    REQUIRE(r.status == czono::LpStatus::Optimal);
    CHECK(std::abs(r.value - oracle_value) <= 1e-6 * (1.0 + std::abs(oracle_value)));
    // Primal feasibility of the returned optimizer.
    for (Eigen::Index i = 0; i < p.eq_a.rows(); ++i) {
      CHECK(std::abs(p.eq_a.row(i).dot(r.x) - p.eq_b[i]) <= 1e-8);
    }
    for (Eigen::Index i = 0; i < p.ineq_a.rows(); ++i) {
      CHECK(p.ineq_a.row(i).dot(r.x) <= p.ineq_b[i] + 1e-8);
    }
    for (int j = 0; j < n; ++j) {
      CHECK(r.x[j] >= p.lower[j] - 1e-8);
      CHECK(r.x[j] <= p.upper[j] + 1e-8);
    }
    ++solved;
  }
  CHECK(solved == 60);
}
