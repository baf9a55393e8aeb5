#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "czono/errors.hpp"
#include "czono/expr.hpp"
#include "czono/model.hpp"
#include "oracles.hpp"
#include "plants.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace czono;

namespace {

const std::vector<std::string> kXy = {"x1", "x2"};

Expr model1_f1() { return parse_expr("3*x1 - x1^2/7 - 4*x1*x2/(4 + x1)", kXy); }

// Expressions used by the randomized soundness sweeps, all well-defined on
// boxes drawn inside [-1, 1]^2.
std::vector<Expr> soundness_pool() {
  std::vector<Expr> pool;
  for (const char* text : {"3*x1 - x1^2/7 - 4*x1*x2/(4 + x1)",
                           "-2*x2 + 3*x1*x2/(4 + x1)",
                           "-0.132*exp(-x1)*x1 - 0.213*x1 + 0.274*x2",
                           "sin(x1)*cos(x2) + x1*x2",
                           "tan(x1) + atan(x1*x2)",
                           "asin(x1/2) + sqrt(x1 + 2)*ln(x2 + 3)",
                           "abs(x1)*x2 - x2^3",
                           "exp(x1 - x2)/(x2 + 5)"}) {
    pool.push_back(parse_expr(text, kXy));
  }
  return pool;
}

double rel_gap(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

bool contains_tol(const Interval& iv, double x, double tol) {
  return x >= iv.lo() - tol && x <= iv.hi() + tol;
}

// Per-plant sampling boxes keeping every expression inside its domain (the
// quadrotor needs |theta| well below pi/2 for tan and the secant).
struct PlantCase {
  SystemModel model;
  std::vector<std::pair<double, double>> x_range;
  std::vector<std::pair<double, double>> u_range;
  double w_bound;
  double v_bound;
};

std::vector<PlantCase> bundled_plants() {
  std::vector<PlantCase> cases;
  cases.push_back({testplants::reactor(), {{0.5, 6.0}, {0.3, 2.0}}, {}, 1.0, 0.3});
  cases.push_back({testplants::model1(), {{0.2, 1.5}, {0.2, 1.2}}, {}, 0.4, 0.4});
  cases.push_back({testplants::model2(), {{-1.0, 1.0}, {-1.0, 2.0}}, {}, 0.0, 0.0});
  const double hover = testplants::quadrotor_hover_thrust();
  cases.push_back(
      {testplants::quadrotor(),
       {{-2.0, 2.0}, {-2.0, 2.0}, {-2.0, 2.0}, {-1.0, 1.0},
        {-1.0, 1.0}, {-1.0, 1.0}, {-0.5, 0.5}, {-0.5, 0.5},
        {-1.5, 1.5}, {-0.3, 0.3}, {-0.3, 0.3}, {-0.3, 0.3}},
       {{hover - 1.0, hover + 1.0}, {-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}},
       1.0,
       0.0});
  return cases;
}

Eigen::VectorXd draw_in(oracle::TestRng& rng, const std::vector<std::pair<double, double>>& range) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(range.size()));
  for (std::size_t i = 0; i < range.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        range[i].first + (range[i].second - range[i].first) * rng.uniform(0.0, 1.0);
  }
  return out;
}

Eigen::VectorXd draw_box(oracle::TestRng& rng, int n, double bound) {
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = bound * (2.0 * rng.uniform(0.0, 1.0) - 1.0);
  return out;
}

}  // namespace

TEST_CASE("parser accepts benchmark dynamics and rejects malformed input") {
  const Expr f1 = model1_f1();
  CHECK(f1.max_variable() == 1);
  const double at = f1.eval(std::vector<double>{0.8, 0.65});
  CHECK(at == doctest::Approx(3 * 0.8 - 0.64 / 7.0 - 4 * 0.8 * 0.65 / 4.8).epsilon(1e-14));

  const Expr f2 = parse_expr("-0.132*exp(-x1)*x1 - 0.213*x1 + 0.274*x2", kXy);
  CHECK(f2.eval(std::vector<double>{0.0, 1.0}) == doctest::Approx(0.274).epsilon(1e-14));

  CHECK_THROWS_AS(parse_expr("x1 +", kXy), SyntaxError);
  try {
    parse_expr("x1 +", kXy);
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
    CHECK(e.offset == 4);
  }
  CHECK_THROWS_AS(parse_expr("x1 x2", kXy), SyntaxError);
  CHECK_THROWS_AS(parse_expr("x1^2.5", kXy), SyntaxError);
  CHECK_THROWS_AS(parse_expr("(x1 + x2", kXy), SyntaxError);
  CHECK_THROWS_AS(parse_expr("x1 + x3", kXy), UnknownVariable);
  CHECK_THROWS_AS(parse_expr("foo(x1)", kXy), UnknownVariable);

  CHECK_THROWS_AS(f1.eval(std::vector<double>{0.8}), DimensionMismatch);
  CHECK_THROWS_AS(parse_expr("1/x1", kXy).eval(std::vector<double>{0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(parse_expr("ln(x1)", kXy).eval(std::vector<double>{-1.0, 0.0}), DomainError);
}

TEST_CASE("differentiation produces the expected structures") {
  const std::vector<std::string> one = {"x"};
  const Expr d = differentiate(parse_expr("x^2", one), 0);
  CHECK(d.same_structure(parse_expr("2*x", one)));

  const Expr z = differentiate(parse_expr("3*x1", kXy), 1);
  CHECK(z.is_zero());
  CHECK(z.is_constant());
  CHECK(z.constant_value() == 0.0);

  const Expr a = abs(Expr::variable(0));
  const Expr da = differentiate(a, 0);
  CHECK(da.eval(std::vector<double>{0.5}) == 1.0);
  CHECK(da.eval(std::vector<double>{-0.5}) == -1.0);
  CHECK(da.eval(std::vector<double>{0.0}) == 0.0);
  CHECK_THROWS_AS(differentiate(da, 0), NonSmooth);
}

TEST_CASE("derivatives of benchmark dynamics match central differences") {
  const Expr f1 = model1_f1();
  const std::vector<double> x0 = {0.8, 0.65};
  const Eigen::VectorXd fd = oracle::fd_gradient(
      [&](const Eigen::VectorXd& p) {
        return f1.eval(std::vector<double>{p[0], p[1]});
      },
      Eigen::Vector2d(0.8, 0.65));
  for (int j = 0; j < 2; ++j) {
    const double sym = f1.derivative(j).eval(x0);
    CHECK(rel_gap(sym, fd[j]) < 1e-7);
  }
}

TEST_CASE("all bundled plant jacobians match finite differences") {
  oracle::TestRng rng(0x5eed0001u);
  for (const PlantCase& pc : bundled_plants()) {
    const SystemModel& m = pc.model;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd x = draw_in(rng, pc.x_range);
      const Eigen::VectorXd u = draw_in(rng, pc.u_range);
      const Eigen::VectorXd w = draw_box(rng, m.n_w(), pc.w_bound);
      const Eigen::MatrixXd jac = m.dynamics_jacobian_at(x, u, w);
      const int total = m.n_x() + m.n_u() + m.n_w();
      Eigen::VectorXd point(total);
      point << x, u, w;
      for (int i = 0; i < m.n_x(); ++i) {
        const Eigen::VectorXd fd = oracle::fd_gradient(
            [&](const Eigen::VectorXd& p) {
              std::vector<double> vals(p.data(), p.data() + p.size());
              return m.dynamics()[static_cast<std::size_t>(i)].eval(vals);
            },
            point);
        for (int j = 0; j < total; ++j) {
          CHECK(rel_gap(jac(i, j), fd[j]) < 1e-6);
        }
      }
      if (m.has_measurement()) {
        const Eigen::VectorXd v = draw_box(rng, m.n_v(), pc.v_bound);
        const Eigen::MatrixXd gjac = m.measurement_jacobian_at(x, u, v);
        Eigen::VectorXd gpoint(m.n_x() + m.n_u() + m.n_v());
        gpoint << x, u, v;
        for (int i = 0; i < m.n_y(); ++i) {
          const Eigen::VectorXd fd = oracle::fd_gradient(
              [&](const Eigen::VectorXd& p) {
                std::vector<double> vals(p.data(), p.data() + p.size());
                return m.measurement()[static_cast<std::size_t>(i)].eval(vals);
              },
              gpoint);
          for (int j = 0; j < gpoint.size(); ++j) {
            CHECK(rel_gap(gjac(i, j), fd[j]) < 1e-6);
          }
        }
      }
    }
  }
}

TEST_CASE("half hessians carry halved diagonals and upper cross terms") {
  const std::vector<std::string> one = {"z"};
  const auto hsq = half_hessian({parse_expr("z^2", one)}, 1);
  REQUIRE(hsq.size() == 1);
  CHECK(hsq[0][0][0].is_constant());
  CHECK(hsq[0][0][0].constant_value() == doctest::Approx(1.0));

  const std::vector<std::string> two = {"z1", "z2"};
  const auto hxy = half_hessian({parse_expr("z1*z2", two)}, 2);
  CHECK(hxy[0][0][0].is_zero());
  CHECK(hxy[0][0][1].is_constant());
  CHECK(hxy[0][0][1].constant_value() == doctest::Approx(1.0));
  CHECK(hxy[0][1][0].is_zero());
  CHECK(hxy[0][1][1].is_zero());

  CHECK_THROWS_AS(half_hessian({abs(Expr::variable(0))}, 1), NonSmooth);
}

TEST_CASE("half hessian quadratic form reproduces second-order behavior") {
  const Expr f1 = model1_f1();
  const auto hh = half_hessian({f1}, 2);
  const std::vector<double> x0 = {0.8, 0.65};
  Eigen::Matrix2d h_sym;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) h_sym(i, j) = hh[0][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(x0);

  const Eigen::MatrixXd h_fd = oracle::fd_hessian(
      [&](const Eigen::VectorXd& p) {
        return f1.eval(std::vector<double>{p[0], p[1]});
      },
      Eigen::Vector2d(0.8, 0.65));

  oracle::TestRng rng(0x5eed0002u);
  const double f0 = f1.eval(x0);
  Eigen::Vector2d grad(f1.derivative(0).eval(x0), f1.derivative(1).eval(x0));
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Vector2d d(0.01 * (2 * rng.uniform(0.0, 1.0) - 1), 0.01 * (2 * rng.uniform(0.0, 1.0) - 1));
    const double quad_sym = d.dot(h_sym * d);
    const double quad_fd = 0.5 * d.dot(h_fd * d);
    CHECK(std::abs(quad_sym - quad_fd) < 1e-5 * std::max(1.0, std::abs(quad_fd)));
    const double truth = f1.eval(std::vector<double>{0.8 + d[0], 0.65 + d[1]});
    CHECK(std::abs(truth - (f0 + grad.dot(d) + quad_sym)) < 1e-6);
  }
}

TEST_CASE("interval evaluation is sharp on pinned cases") {
  const std::vector<std::string> one = {"x"};
  const Expr s = parse_expr("sin(x)", one);
  const Interval r = s.eval(Box{Interval(0.0, 3.14159265358979323846 / 2)});
  CHECK(r.lo() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.hi() == doctest::Approx(1.0).epsilon(1e-12));

  const Expr xmx = parse_expr("x - x", one);
  const Interval dep = xmx.eval(Box{Interval(0.0, 1.0)});
  CHECK(dep.lo() == doctest::Approx(-1.0));
  CHECK(dep.hi() == doctest::Approx(1.0));

  const Expr f1 = model1_f1();
  const Interval enc = f1.eval(Box{Interval(0.7, 0.9), Interval(0.6, 0.7)});
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double a = 0.7 + 0.2 * i / 99.0;
      const double b = 0.6 + 0.1 * j / 99.0;
      CHECK(contains_tol(enc, f1.eval(std::vector<double>{a, b}), 1e-9));
    }
  }
}

TEST_CASE("interval evaluation encloses sampled values on random boxes") {
  const std::vector<Expr> pool = soundness_pool();
  oracle::TestRng rng(0x5eed0003u);
  int checked = 0;
  for (int round = 0; round < 100; ++round) {
    const Expr& e = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1))];
    Box box(2);
    for (int j = 0; j < 2; ++j) {
      const double a = 2 * rng.uniform(0.0, 1.0) - 1;
      const double b = 2 * rng.uniform(0.0, 1.0) - 1;
      box[static_cast<std::size_t>(j)] = Interval(std::min(a, b), std::max(a, b));
    }
    const Interval enc = e.eval(box);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> p(2);
      for (int j = 0; j < 2; ++j) {
        const Interval& bj = box[static_cast<std::size_t>(j)];
        p[static_cast<std::size_t>(j)] = bj.lo() + bj.diam() * rng.uniform(0.0, 1.0);
      }
      const double val = e.eval(p);
      if (!contains_tol(enc, val, 1e-9)) {
        CAPTURE(round);
        CAPTURE(val);
        REQUIRE(contains_tol(enc, val, 1e-9));
      }
      ++checked;
    }
  }
  CHECK(checked == 100000);
}

TEST_CASE("affine-in-disturbance detection matches superposition") {
  oracle::TestRng rng(0x5eed0004u);
  for (const PlantCase& pc : bundled_plants()) {
    const SystemModel& m = pc.model;
    CHECK(m.dynamics_affine_in_w());
    CHECK(m.dynamics_constant_dw());
    if (m.n_w() == 0) continue;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd x = draw_in(rng, pc.x_range);
      const Eigen::VectorXd u = draw_in(rng, pc.u_range);
      const Eigen::VectorXd wa = draw_box(rng, m.n_w(), pc.w_bound);
      const Eigen::VectorXd wb = draw_box(rng, m.n_w(), pc.w_bound);
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(m.n_w());
      const Eigen::VectorXd base = m.eval_dynamics(x, u, zero);
      const Eigen::VectorXd lhs = m.eval_dynamics(x, u, wa + wb) - base;
      const Eigen::VectorXd rhs =
          (m.eval_dynamics(x, u, wa) - base) + (m.eval_dynamics(x, u, wb) - base);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  const SystemModel bent = SystemModel::from_text(
      {"x1"}, {}, {"w1"}, {}, {"x1 + sin(w1)"}, {});
  CHECK_FALSE(bent.dynamics_affine_in_w());
}

TEST_CASE("linear measurement pieces are extracted exactly") {
  const SystemModel m1 = testplants::model1();
  REQUIRE(m1.measurement_linear());
  Eigen::MatrixXd c_want(2, 2);
  c_want << 1, 0, -1, 1;
  CHECK((m1.meas_c() - c_want).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m1.meas_dv() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m1.meas_du().cols() == 0);
  CHECK(m1.meas_g0().cwiseAbs().maxCoeff() == 0.0);

  const SystemModel re = testplants::reactor();
  REQUIRE(re.measurement_linear());
  CHECK(re.meas_c()(0, 0) == 1.0);
  CHECK(re.meas_c()(0, 1) == 1.0);
  CHECK(re.meas_dv()(0, 0) == 1.0);

  const SystemModel quad = testplants::quadrotor();
  REQUIRE(quad.measurement_linear());
  CHECK(quad.meas_c().rows() == 9);
  CHECK(quad.meas_c().cols() == 12);
  CHECK(quad.meas_c().sum() == doctest::Approx(9.0));

  const SystemModel curved = SystemModel::from_text(
      {"x1"}, {}, {}, {"v1"}, {"x1"}, {"x1^2 + v1"});
  CHECK_FALSE(curved.measurement_linear());
  CHECK_THROWS_AS(curved.meas_c(), DomainError);
}

TEST_CASE("printing then reparsing is stable") {
  oracle::TestRng rng(0x5eed0005u);
  std::vector<Expr> pool = soundness_pool();
  pool.push_back(model1_f1());
  for (const Expr& e : pool) {
    const std::string text = e.to_string(kXy);
    const Expr back = parse_expr(text, kXy);
    CHECK(back.to_string(kXy) == text);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> p = {0.1 + 0.8 * rng.uniform(0.0, 1.0), 0.1 + 0.8 * rng.uniform(0.0, 1.0)};
      const double a = e.eval(p);
      const double b = back.eval(p);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("model construction validates its inputs") {
  CHECK_THROWS_AS(SystemModel::from_text({"x1", "x2"}, {}, {}, {}, {"x1"}, {}),
                  DimensionMismatch);
  CHECK_THROWS_AS(SystemModel::from_text({"x1", "x1"}, {}, {}, {}, {"x1", "x1"}, {}),
                  DomainError);
  CHECK_THROWS_AS(SystemModel::from_text({"x1"}, {}, {"x1"}, {}, {"x1"}, {}),
                  DomainError);

  const SystemModel m2 = testplants::model2();
  CHECK(m2.n_w() == 0);
  CHECK_FALSE(m2.has_measurement());
  CHECK(m2.dynamics_twice_differentiable());
  const Eigen::VectorXd next =
      m2.eval_dynamics(Eigen::Vector2d(0.0, 1.0), Eigen::VectorXd(), Eigen::VectorXd());
  CHECK(next[0] == doctest::Approx(0.4));
  CHECK(next[1] == doctest::Approx(0.274));
}
