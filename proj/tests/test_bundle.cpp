#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "czono/bundle.hpp"
#include "oracles.hpp"
#include "plants.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace czono;

namespace {

// Two-dimensional running example: three generators tied by one constraint.
// Vertices (0,0), (-2,-2), (-1,3); interval hull [-2,0] x [-2,3].
ConstrainedZonotope example_cz() {
  Eigen::MatrixXd g(2, 3);
  g << 1, 0, 1, 1, 2, -1;
  Eigen::MatrixXd a(1, 3);
  a << -2, 1, -1;
  Eigen::VectorXd b(1);
  b << 2;
  return ConstrainedZonotope(g, Eigen::Vector2d::Zero(), a, b);
}

// Initial set of the reactor benchmark.
ConstrainedZonotope reactor_x0() {
  Eigen::MatrixXd g(2, 3);
  g << 2.5, 0, 1.0, 0, 0.5, 1.0;
  Eigen::MatrixXd a(1, 3);
  a << 1, 0, 1;
  Eigen::VectorXd b(1);
  b << 1;
  Eigen::Vector2d c(2.5, 1.0);
  return ConstrainedZonotope(g, c, a, b);
}

std::vector<Eigen::VectorXd> members_of(const ConstrainedZonotope& z, int combos,
                                        oracle::TestRng& rng) {
  const auto vertices = oracle::constrained_box_vertices(z.A, z.b);
  return oracle::member_points(z.G, z.c, vertices, combos, rng);
}

bool box_contains(const Box& box, const Eigen::VectorXd& p, double tol) {
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (p[static_cast<Eigen::Index>(i)] < box[i].lo() - tol ||
        p[static_cast<Eigen::Index>(i)] > box[i].hi() + tol) {
      return false;
    }
  }
  return true;
}

double cell_volume(const Box& cell) {
  double v = 1.0;
  for (const Interval& axis : cell) v *= axis.diam();
  return v;
}

// Drift of the reactor dynamics with the disturbance pinned to zero.
std::vector<Expr> reactor_drift() {
  const SystemModel model = testplants::reactor();
  std::vector<Expr> drift = model.dynamics();
  for (Expr& e : drift) {
    e = e.substitute(2, 0.0).substitute(3, 0.0);
  }
  return drift;
}

Eigen::VectorXd corner_of(const Box& cell, unsigned mask) {
  Eigen::VectorXd p(static_cast<Eigen::Index>(cell.size()));
  for (std::size_t i = 0; i < cell.size(); ++i) {
    p[static_cast<Eigen::Index>(i)] = (mask >> i) & 1u ? cell[i].hi() : cell[i].lo();
  }
  return p;
}

}  // namespace

TEST_CASE("nd_partition splits a box into congruent cells sharing faces") {
  const Box unit{Interval(0.0, 1.0), Interval(0.0, 1.0)};

  SUBCASE("two divisions of the unit square") {
    const IntervalBundle parts = nd_partition(unit, 2);
    REQUIRE(parts.size() == 4);
    for (const Box& cell : parts.cells) {
      CHECK(cell[0].diam() == doctest::Approx(0.5).epsilon(1e-14));
      CHECK(cell[1].diam() == doctest::Approx(0.5).epsilon(1e-14));
    }
    // Cells are ordered with the last axis fastest; neighbours share their
    // boundary value exactly, not merely within tolerance.
    CHECK(parts.cells[0][1].hi() == parts.cells[1][1].lo());
    CHECK(parts.cells[0][0].hi() == parts.cells[2][0].lo());
    CHECK(parts.cells[3][0].lo() == parts.cells[1][0].hi());
  }

  SUBCASE("one division returns the box itself") {
    const IntervalBundle parts = nd_partition(unit, 1);
    REQUIRE(parts.size() == 1);
    CHECK(parts.cells[0][0].lo() == 0.0);
    CHECK(parts.cells[0][0].hi() == 1.0);
    CHECK(parts.cells[0][1].lo() == 0.0);
    CHECK(parts.cells[0][1].hi() == 1.0);
  }

  SUBCASE("volumes add up over a rectangular box") {
    const Box box{Interval(0.0, 3.0), Interval(-1.0, 2.0)};
    const IntervalBundle parts = nd_partition(box, 3);
    REQUIRE(parts.size() == 9);
    double total = 0.0;
    for (const Box& cell : parts.cells) total += cell_volume(cell);
    CHECK(total == doctest::Approx(9.0).epsilon(1e-10));
    // Every cell is congruent to the first.
    for (const Box& cell : parts.cells) {
      CHECK(cell[0].diam() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(cell[1].diam() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // Each axis uses a single shared set of cut points.
    std::set<double> x_cuts;
    for (const Box& cell : parts.cells) {
      x_cuts.insert(cell[0].lo());
      x_cuts.insert(cell[0].hi());
    }
    CHECK(x_cuts.size() == 4);
  }

  SUBCASE("invalid requests are rejected") {
    CHECK_THROWS_AS(nd_partition(unit, 0), DomainError);
    const Box flat{Interval(0.0, 1.0), Interval(2.0, 2.0)};
    CHECK_THROWS_AS(nd_partition(flat, 2), DegenerateInput);
  }
}

TEST_CASE("tight_interval_bundle keeps exactly the cells meeting the set") {
  SUBCASE("an axis-aligned box keeps the whole grid") {
    const Box box{Interval(0.0, 1.0), Interval(0.0, 2.0)};
    const IntervalBundle kept = tight_interval_bundle(ConstrainedZonotope::from_box(box), 4);
    CHECK(kept.size() == 16);
  }

  SUBCASE("a constrained set drops the vacant corners") {
    const ConstrainedZonotope z = example_cz();
    const IntervalBundle kept = tight_interval_bundle(z, 10);
    CHECK(kept.size() < 100);
    CHECK(kept.size() > 0);

    // Every sampled member lands in a kept cell.
    oracle::TestRng rng(0xb07d0001u);
    const auto samples = members_of(z, 10000, rng);
    std::set<std::size_t> occupied;
    for (const auto& p : samples) {
      bool covered = false;
      for (std::size_t j = 0; j < kept.size() && !covered; ++j) {
        if (box_contains(kept.cells[j], p, 1e-12)) {
          covered = true;
          occupied.insert(j);
        }
      }
      CHECK(covered);
    }
    CHECK(occupied.size() <= kept.size());

    // Spot-check that kept cells are genuinely needed: each one holds an
    // actual member of the set, so dropping it would lose coverage.
    const std::size_t stride = std::max<std::size_t>(1, kept.size() / 10);
    for (std::size_t j = 0; j < kept.size(); j += stride) {
      const Box& cell = kept.cells[j];
      const ConstrainedZonotope overlap = generalized_intersection(
          z, ConstrainedZonotope::from_box(cell), Eigen::MatrixXd::Identity(2, 2));
      Eigen::Vector2d mid(cell[0].mid(), cell[1].mid());
      const Eigen::VectorXd witness = closest_point(overlap, mid);
      CHECK(box_contains(cell, witness, 1e-7));
      CHECK(contains_point(z, witness));
    }
  }

  SUBCASE("an empty set is rejected") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd a(1, 2);
    a << 1, 0;
    Eigen::VectorXd b(1);
    b << 5;
    const ConstrainedZonotope empty(g, Eigen::Vector2d::Zero(), a, b);
    CHECK_THROWS_AS(tight_interval_bundle(empty, 2), EmptySet);
  }
}

TEST_CASE("refine_bundle maps each cell through the expressions") {
  SUBCASE("identity dynamics reproduce the cells") {
    const IntervalBundle parts = nd_partition({Interval(0.0, 1.0), Interval(-1.0, 1.0)}, 3);
    const std::vector<Expr> id{Expr::variable(0), Expr::variable(1)};
    const IntervalBundle imaged = refine_bundle(id, Eigen::VectorXd(), parts);
    REQUIRE(imaged.size() == parts.size());
    for (std::size_t j = 0; j < parts.size(); ++j) {
      CHECK(imaged.cells[j][0].lo() == parts.cells[j][0].lo());
      CHECK(imaged.cells[j][1].hi() == parts.cells[j][1].hi());
    }
  }

  SUBCASE("a square maps interval endpoints exactly") {
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(0.0, 1.0)});
    parts.cells.push_back(Box{Interval(1.0, 2.0)});
    const std::vector<Expr> sq{parse_expr("x^2", {"x"})};
    const IntervalBundle imaged = refine_bundle(sq, Eigen::VectorXd(), parts);
    REQUIRE(imaged.size() == 2);
    CHECK(imaged.cells[0][0].lo() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(imaged.cells[0][0].hi() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(imaged.cells[1][0].lo() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(imaged.cells[1][0].hi() == doctest::Approx(4.0).epsilon(1e-14));
  }

  SUBCASE("input variables are pinned to the supplied values") {
    const std::vector<Expr> f{parse_expr("x + 2*u", {"x", "u"})};
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(0.0, 1.0)});
    Eigen::VectorXd u(1);
    u << 3.0;
    const IntervalBundle imaged = refine_bundle(f, u, parts);
    CHECK(imaged.cells[0][0].lo() == doctest::Approx(6.0));
    CHECK(imaged.cells[0][0].hi() == doctest::Approx(7.0));
  }

  SUBCASE("reactor images cover sampled point evaluations cell by cell") {
    const SystemModel model = testplants::reactor();
    const std::vector<Expr> drift = reactor_drift();
    const IntervalBundle parts = nd_partition({Interval(2.0, 5.0), Interval(0.5, 2.0)}, 3);
    const IntervalBundle imaged = refine_bundle(drift, Eigen::VectorXd(), parts);
    REQUIRE(imaged.size() == parts.size());

    oracle::TestRng rng(0xb07d0002u);
    const Eigen::VectorXd no_input;
    const Eigen::Vector2d no_dist(0.0, 0.0);
    for (std::size_t j = 0; j < parts.size(); ++j) {
      for (int trial = 0; trial < 1000; ++trial) {
        Eigen::Vector2d x(rng.uniform(parts.cells[j][0].lo(), parts.cells[j][0].hi()),
                          rng.uniform(parts.cells[j][1].lo(), parts.cells[j][1].hi()));
        const Eigen::VectorXd fx = model.eval_dynamics(x, no_input, no_dist);
        CHECK(box_contains(imaged.cells[j], fx, 1e-12));
      }
    }
  }

  SUBCASE("evaluation failures carry the cell index") {
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(1.0, 2.0)});
    parts.cells.push_back(Box{Interval(-1.0, 1.0)});
    const std::vector<Expr> f{parse_expr("1/x", {"x"})};
    CHECK_THROWS_WITH_AS(refine_bundle(f, Eigen::VectorXd(), parts),
                         doctest::Contains("cell 1"), DomainError);
  }
}

TEST_CASE("bundle_interval_hull bounds every cell") {
  SUBCASE("two disjoint segments") {
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(0.0, 1.0)});
    parts.cells.push_back(Box{Interval(2.0, 3.0)});
    const Box hull = bundle_interval_hull(parts);
    CHECK(hull[0].lo() == 0.0);
    CHECK(hull[0].hi() == 3.0);
  }

  SUBCASE("random cells against a sorting oracle") {
    oracle::TestRng rng(0xb07d0003u);
    IntervalBundle parts;
    std::vector<double> lows0, highs2;
    for (int j = 0; j < 20; ++j) {
      Box cell(3);
      for (int i = 0; i < 3; ++i) {
        const double a = rng.uniform(-5.0, 5.0);
        const double b = rng.uniform(-5.0, 5.0);
        cell[static_cast<std::size_t>(i)] = Interval(std::min(a, b), std::max(a, b));
      }
      lows0.push_back(cell[0].lo());
      highs2.push_back(cell[2].hi());
      parts.cells.push_back(cell);
    }
    const Box hull = bundle_interval_hull(parts);
    CHECK(hull[0].lo() == *std::min_element(lows0.begin(), lows0.end()));
    CHECK(hull[2].hi() == *std::max_element(highs2.begin(), highs2.end()));
    for (const Box& cell : parts.cells) {
      for (int i = 0; i < 3; ++i) {
        CHECK(hull[static_cast<std::size_t>(i)].lo() <= cell[static_cast<std::size_t>(i)].lo());
        CHECK(hull[static_cast<std::size_t>(i)].hi() >= cell[static_cast<std::size_t>(i)].hi());
      }
    }
  }
}

TEST_CASE("endpoint_intervals keeps the cells touching the hull boundary") {
  SUBCASE("a regular grid keeps its boundary ring") {
    const Box unit{Interval(0.0, 1.0), Interval(0.0, 1.0)};
    for (int nd : {2, 3, 4, 6}) {
      const IntervalBundle ring = endpoint_intervals(nd_partition(unit, nd));
      CHECK(ring.size() == static_cast<std::size_t>(4 * nd - 4));
    }
  }

  SUBCASE("a single cell is its own boundary") {
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(0.0, 1.0), Interval(0.0, 1.0)});
    const IntervalBundle ring = endpoint_intervals(parts);
    REQUIRE(ring.size() == 1);
    CHECK(ring.cells[0][0].hi() == 1.0);
  }

  SUBCASE("cells strictly inside an enclosing hull are flagged") {
    const IntervalBundle parts = nd_partition({Interval(0.0, 1.0), Interval(0.0, 1.0)}, 4);
    IntervalBundle interior;
    const Box hull = bundle_interval_hull(parts);
    for (const Box& cell : parts.cells) {
      const bool touches = cell[0].lo() == hull[0].lo() || cell[0].hi() == hull[0].hi() ||
                           cell[1].lo() == hull[1].lo() || cell[1].hi() == hull[1].hi();
      if (!touches) interior.cells.push_back(cell);
    }
    REQUIRE(interior.size() == 4);
    CHECK_THROWS_AS(endpoint_intervals(interior, hull), DegenerateInput);
    // The same cells keep their own ring once the hull is recomputed.
    CHECK(endpoint_intervals(interior).size() == 4);
  }
}

TEST_CASE("midpoint_polytope_hrep wraps the cell midpoints") {
  SUBCASE("four midpoints at the unit square corners") {
    IntervalBundle parts;
    for (double cx : {0.0, 1.0}) {
      for (double cy : {0.0, 1.0}) {
        parts.cells.push_back(
            Box{Interval(cx - 0.1, cx + 0.1), Interval(cy - 0.1, cy + 0.1)});
      }
    }
    const auto [h, k] = midpoint_polytope_hrep(parts);
    REQUIRE(h.rows() == 4);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      CHECK(h.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // The square's support values: x <= 1, -x <= 0, y <= 1, -y <= 0.
    for (const auto& [dir, want] : std::vector<std::pair<Eigen::Vector2d, double>>{
             {{1, 0}, 1.0}, {{-1, 0}, 0.0}, {{0, 1}, 1.0}, {{0, -1}, 0.0}}) {
      bool found = false;
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        if ((h.row(i).transpose() - dir).norm() < 1e-9) {
          CHECK(k[i] == doctest::Approx(want).epsilon(1e-12));
          found = true;
        }
      }
      CHECK(found);
    }
  }

  SUBCASE("collinear midpoints are inflated into a full polygon") {
    IntervalBundle parts;
    for (double t : {0.0, 1.0, 2.0}) {
      parts.cells.push_back(Box{Interval(t - 0.2, t + 0.2), Interval(t - 0.2, t + 0.2)});
    }
    const auto [h, k] = midpoint_polytope_hrep(parts);
    CHECK(h.rows() >= 3);
    // After inflation every original midpoint is strictly interior.
    for (double t : {0.0, 1.0, 2.0}) {
      const Eigen::Vector2d m(t, t);
      CHECK(((h * m - k).array() < -1e-9).all());
    }
  }

  SUBCASE("a single midpoint inflates to a box around itself") {
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(1.0, 3.0), Interval(-1.0, 1.0)});
    const auto [h, k] = midpoint_polytope_hrep(parts);
    REQUIRE(h.rows() == 4);
    const Eigen::Vector2d m(2.0, 0.0);
    CHECK(((h * m - k).array() < 0.0).all());
  }

  SUBCASE("staircase midpoints agree with a convex hull oracle") {
    const IntervalBundle ring = endpoint_intervals(tight_interval_bundle(example_cz(), 6));
    const auto [h, k] = midpoint_polytope_hrep(ring);

    std::vector<Eigen::Vector2d> mids;
    for (const Box& cell : ring.cells) {
      mids.emplace_back(cell[0].mid(), cell[1].mid());
    }
    const auto hull_poly = oracle::gift_wrap_hull(mids);

    oracle::TestRng rng(0xb07d0004u);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      Eigen::Vector2d p(rng.uniform(-3.0, 1.0), rng.uniform(-3.0, 4.0));
      const bool in_hrep = ((h * p - k).array() <= 1e-7).all();
      const bool clearly_in = ((h * p - k).array() <= -1e-6).all();
      const bool clearly_out = ((h * p - k).array() > 1e-6).any();
      if (clearly_in) {
        CHECK(oracle::point_in_hull(hull_poly, p, 1e-7));
        ++checked;
      } else if (clearly_out) {
        CHECK_FALSE(oracle::point_in_hull(hull_poly, p, -1e-9));
        ++checked;
      } else {
        (void)in_hrep;
      }
    }
    CHECK(checked > 800);
  }

  SUBCASE("higher dimensions are rejected") {
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(0.0, 1.0), Interval(0.0, 1.0), Interval(0.0, 1.0)});
    CHECK_THROWS_AS(midpoint_polytope_hrep(parts), DimensionUnsupported);
  }
}

TEST_CASE("move_hyperplanes pushes each face to the bundle support") {
  SUBCASE("axis directions recover the hull box") {
    Eigen::MatrixXd h(4, 2);
    h << 1, 0, -1, 0, 0, 1, 0, -1;
    const Eigen::VectorXd k = Eigen::VectorXd::Zero(4);
    const IntervalBundle parts = nd_partition({Interval(-2.0, 2.0), Interval(-1.0, 3.0)}, 2);
    const Eigen::VectorXd moved = move_hyperplanes(h, k, parts);
    CHECK(moved[0] == doctest::Approx(2.0));
    CHECK(moved[1] == doctest::Approx(2.0));
    CHECK(moved[2] == doctest::Approx(3.0));
    CHECK(moved[3] == doctest::Approx(1.0));
  }

  SUBCASE("every corner stays feasible and each face is attained") {
    oracle::TestRng rng(0xb07d0005u);
    Eigen::MatrixXd h(5, 2);
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      const double angle = rng.uniform(0.0, 2.0 * M_PI);
      h(i, 0) = std::cos(angle);
      h(i, 1) = std::sin(angle);
    }
    const IntervalBundle ring = endpoint_intervals(tight_interval_bundle(example_cz(), 5));
    const Eigen::VectorXd moved = move_hyperplanes(h, Eigen::VectorXd::Zero(5), ring);

    Eigen::VectorXd best = Eigen::VectorXd::Constant(5, -1e300);
    for (const Box& cell : ring.cells) {
      for (unsigned mask = 0; mask < 4; ++mask) {
        const Eigen::VectorXd corner = corner_of(cell, mask);
        const Eigen::VectorXd vals = h * corner;
        CHECK((vals - moved).maxCoeff() <= 1e-12);
        best = best.cwiseMax(vals);
      }
    }
    CHECK((best - moved).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("the input offsets are only an interface") {
    Eigen::MatrixXd h(1, 2);
    h << 1, 0;
    IntervalBundle parts;
    parts.cells.push_back(Box{Interval(0.0, 1.0), Interval(0.0, 1.0)});
    Eigen::VectorXd k_small(1), k_large(1);
    k_small << -100.0;
    k_large << 100.0;
    CHECK(move_hyperplanes(h, k_small, parts)[0] == doctest::Approx(1.0));
    CHECK(move_hyperplanes(h, k_large, parts)[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("bundle prediction with identity dynamics returns the interval hull") {
  const ConstrainedZonotope state = example_cz();
  const std::vector<Expr> id{Expr::variable(0), Expr::variable(1)};
  const Eigen::MatrixXd dw = Eigen::MatrixXd::Zero(2, 1);
  const ConstrainedZonotope no_noise =
      ConstrainedZonotope::from_box(Box{Interval(0.0, 0.0)});

  const ConstrainedZonotope out = czib_predict(state, id, Eigen::VectorXd(), dw, no_noise, 1);
  const ConstrainedZonotope hull_box = ConstrainedZonotope::from_box(interval_hull(state));
  for (int i = 0; i < 16; ++i) {
    const double angle = 2.0 * M_PI * i / 16;
    Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
    CHECK(support(out, dir) == doctest::Approx(support(hull_box, dir)).epsilon(1e-7));
  }
}

TEST_CASE("bundle prediction encloses sampled reactor successors") {
  const SystemModel model = testplants::reactor();
  const ConstrainedZonotope x0 = reactor_x0();
  const ConstrainedZonotope w_set =
      ConstrainedZonotope::from_box(Box{Interval(-1.0, 1.0), Interval(-1.0, 1.0)});
  Eigen::MatrixXd dw(2, 2);
  dw << 0.0001, 0, 0, 0.0001;
  const std::vector<Expr> drift = reactor_drift();
  const Eigen::VectorXd no_input;

  const ConstrainedZonotope coarse = czib_predict(x0, drift, no_input, dw, w_set, 3);
  const ConstrainedZonotope fine = czib_predict(x0, drift, no_input, dw, w_set, 12);

  SUBCASE("sampled successors are contained") {
    oracle::TestRng rng(0xb07d0006u);
    const auto starts = members_of(x0, 10000, rng);
    for (const auto& x : starts) {
      Eigen::Vector2d w(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      const Eigen::VectorXd next = model.eval_dynamics(x, no_input, w);
      CHECK(contains_point(coarse, next));
      CHECK(contains_point(fine, next));
    }
  }

  SUBCASE("the finer partition is at least as tight") {
    const Box coarse_hull = interval_hull(coarse);
    const Box fine_hull = interval_hull(fine);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(fine_hull[i].lo() >= coarse_hull[i].lo() - 1e-9);
      CHECK(fine_hull[i].hi() <= coarse_hull[i].hi() + 1e-9);
    }
  }

  SUBCASE("the model overload matches the expression route") {
    const ConstrainedZonotope via_model = czib_predict(x0, model, no_input, w_set, 3);
    for (int i = 0; i < 16; ++i) {
      const double angle = 2.0 * M_PI * i / 16;
      Eigen::Vector2d dir(std::cos(angle), std::sin(angle));
      CHECK(support(via_model, dir) == doctest::Approx(support(coarse, dir)).epsilon(1e-9));
    }
  }
}

TEST_CASE("bundle prediction rejects unsupported problems") {
  SUBCASE("only planar states are handled") {
    const ConstrainedZonotope tall = ConstrainedZonotope::from_box(
        Box{Interval(0.0, 1.0), Interval(0.0, 1.0), Interval(0.0, 1.0)});
    const std::vector<Expr> id{Expr::variable(0), Expr::variable(1), Expr::variable(2)};
    const ConstrainedZonotope w0 = ConstrainedZonotope::from_box(Box{Interval(0.0, 0.0)});
    CHECK_THROWS_AS(czib_predict(tall, id, Eigen::VectorXd(), Eigen::MatrixXd::Zero(3, 1), w0, 2),
                    DimensionUnsupported);
  }

  SUBCASE("dynamics must be affine in the disturbance") {
    const SystemModel model =
        SystemModel::from_text({"x1", "x2"}, {}, {"w1"}, {},
                               {"x1 + sin(w1)", "x2"}, {});
    const ConstrainedZonotope state =
        ConstrainedZonotope::from_box(Box{Interval(0.0, 1.0), Interval(0.0, 1.0)});
    const ConstrainedZonotope w_set = ConstrainedZonotope::from_box(Box{Interval(-1.0, 1.0)});
    CHECK_THROWS_AS(czib_predict(state, model, Eigen::VectorXd(), w_set, 2), NotAffineInW);
  }

  SUBCASE("component counts must match") {
    const ConstrainedZonotope state = example_cz();
    const std::vector<Expr> one{Expr::variable(0)};
    const ConstrainedZonotope w0 = ConstrainedZonotope::from_box(Box{Interval(0.0, 0.0)});
    CHECK_THROWS_AS(czib_predict(state, one, Eigen::VectorXd(), Eigen::MatrixXd::Zero(2, 1), w0, 2),
                    DimensionMismatch);
  }
}
