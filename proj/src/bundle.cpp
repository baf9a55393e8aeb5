#include "czono/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "czono/errors.hpp"

namespace czono {
namespace {

void validate_bundle(const IntervalBundle& bundle) {
  if (bundle.cells.empty()) throw DegenerateInput("interval bundle has no cells");
  const std::size_t n = bundle.cells.front().size();
  for (const Box& cell : bundle.cells) {
    if (cell.size() != n) throw DimensionMismatch("interval bundle cells disagree on dimension");
  }
}

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Monotone chain; returns counterclockwise vertices without the closing
// repeat. Fewer than three returned points means the input was affinely
// dependent.
std::vector<Eigen::Vector2d> convex_hull_ccw(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;

  std::vector<Eigen::Vector2d> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, low = k + 1; i-- > 0;) {
    while (k >= low && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

IntervalBundle nd_partition(const Box& box, int divisions) {
  if (divisions < 1) throw DomainError("partition needs at least one division per axis");
  const std::size_t n = box.size();
  if (n == 0) throw DegenerateInput("cannot partition a zero-dimensional box");
  for (const Interval& axis : box) {
    if (!(axis.rad() > 0.0)) throw DegenerateInput("cannot partition a degenerate axis");
  }

  std::vector<std::vector<double>> cuts(n);
  for (std::size_t i = 0; i < n; ++i) {
    cuts[i].resize(static_cast<std::size_t>(divisions) + 1);
    for (int t = 0; t <= divisions; ++t) {
      cuts[i][static_cast<std::size_t>(t)] =
          box[i].lo() + (box[i].hi() - box[i].lo()) * t / divisions;
    }
    cuts[i].front() = box[i].lo();
    cuts[i].back() = box[i].hi();
  }

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(divisions);

  IntervalBundle out;
  out.cells.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    Box cell(n);
    for (std::size_t i = n; i-- > 0;) {
      const std::size_t t = rem % static_cast<std::size_t>(divisions);
      rem /= static_cast<std::size_t>(divisions);
      cell[i] = Interval(cuts[i][t], cuts[i][t + 1]);
    }
    out.cells.push_back(std::move(cell));
  }
  return out;
}

IntervalBundle tight_interval_bundle(const ConstrainedZonotope& z, int divisions) {
  if (is_empty(z)) throw EmptySet("cannot bundle an empty set");
  const IntervalBundle grid = nd_partition(interval_hull(z), divisions);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(z.dim(), z.dim());

  IntervalBundle out;
  for (const Box& cell : grid.cells) {
    const ConstrainedZonotope overlap =
        generalized_intersection(z, ConstrainedZonotope::from_box(cell), eye);
    if (!is_empty(overlap)) out.cells.push_back(cell);
  }
  return out;
}

IntervalBundle refine_bundle(const std::vector<Expr>& f, const Eigen::VectorXd& input,
                             const IntervalBundle& bundle) {
  validate_bundle(bundle);
  const Eigen::Index n = bundle.dim();
  for (const Expr& e : f) {
    if (e.max_variable() >= n + input.size()) {
      throw DimensionMismatch("expression uses a variable beyond the cell and input blocks");
    }
  }

  IntervalBundle out;
  out.cells.reserve(bundle.cells.size());
  for (std::size_t j = 0; j < bundle.cells.size(); ++j) {
    Box arg = bundle.cells[j];
    for (Eigen::Index i = 0; i < input.size(); ++i) arg.push_back(Interval(input[i]));
    Box image(f.size());
    try {
      for (std::size_t q = 0; q < f.size(); ++q) image[q] = f[q].eval(arg);
    } catch (const DomainError& e) {
      throw DomainError("cell " + std::to_string(j) + ": " + e.what());
    }
    out.cells.push_back(std::move(image));
  }
  return out;
}

Box bundle_interval_hull(const IntervalBundle& bundle) {
  validate_bundle(bundle);
  Box hull = bundle.cells.front();
  for (std::size_t j = 1; j < bundle.cells.size(); ++j) {
    for (std::size_t i = 0; i < hull.size(); ++i) {
      hull[i] = Interval(std::min(hull[i].lo(), bundle.cells[j][i].lo()),
                         std::max(hull[i].hi(), bundle.cells[j][i].hi()));
    }
  }
  return hull;
}

IntervalBundle endpoint_intervals(const IntervalBundle& bundle) {
  return endpoint_intervals(bundle, bundle_interval_hull(bundle));
}

IntervalBundle endpoint_intervals(const IntervalBundle& bundle, const Box& hull) {
  validate_bundle(bundle);
  if (hull.size() != bundle.cells.front().size()) {
    throw DimensionMismatch("hull dimension does not match the bundle");
  }
  constexpr double kTol = 1e-12;

  IntervalBundle out;
  for (const Box& cell : bundle.cells) {
    bool touches = false;
    for (std::size_t i = 0; i < cell.size() && !touches; ++i) {
      touches = std::abs(cell[i].lo() - hull[i].lo()) <= kTol ||
                std::abs(cell[i].hi() - hull[i].hi()) <= kTol;
    }
    if (touches) out.cells.push_back(cell);
  }
  if (out.cells.empty()) throw DegenerateInput("no cell touches the hull boundary");
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> midpoint_polytope_hrep(const IntervalBundle& bundle) {
  validate_bundle(bundle);
  if (bundle.dim() != 2) {
    throw DimensionUnsupported("midpoint polytopes are only available in two dimensions");
  }

  std::vector<Eigen::Vector2d> mids;
  mids.reserve(bundle.cells.size());
  for (const Box& cell : bundle.cells) {
    mids.emplace_back(cell[0].mid(), cell[1].mid());
  }

  std::vector<Eigen::Vector2d> hull = convex_hull_ccw(mids);
  if (hull.size() < 3) {
    // Affinely dependent midpoints: pad each with the corners of a
    // zero-centered box spanning 10% of the bundle hull diameter.
    const Box outer = bundle_interval_hull(bundle);
    const double rx = 0.1 * outer[0].rad();
    const double ry = 0.1 * outer[1].rad();
    std::vector<Eigen::Vector2d> padded;
    padded.reserve(4 * mids.size());
    for (const Eigen::Vector2d& m : mids) {
      padded.emplace_back(m.x() - rx, m.y() - ry);
      padded.emplace_back(m.x() - rx, m.y() + ry);
      padded.emplace_back(m.x() + rx, m.y() - ry);
      padded.emplace_back(m.x() + rx, m.y() + ry);
    }
    hull = convex_hull_ccw(padded);
    if (hull.size() < 3) {
      throw DegenerateInput("cell midpoints stay affinely dependent after inflation");
    }
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(hull.size());
  Eigen::MatrixXd h(rows, 2);
  Eigen::VectorXd k(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Vector2d& p = hull[static_cast<std::size_t>(i)];
    const Eigen::Vector2d& q = hull[static_cast<std::size_t>((i + 1) % rows)];
    const Eigen::Vector2d edge = q - p;
    Eigen::Vector2d normal(edge.y(), -edge.x());
    normal.normalize();
    h.row(i) = normal.transpose();
    k[i] = normal.dot(p);
  }
  return {std::move(h), std::move(k)};
}

Eigen::VectorXd move_hyperplanes(const Eigen::MatrixXd& h, const Eigen::VectorXd& k,
                                 const IntervalBundle& bundle) {
  validate_bundle(bundle);
  if (h.cols() != bundle.dim()) {
    throw DimensionMismatch("hyperplane normals do not match the bundle dimension");
  }
  if (h.rows() != k.size()) throw DimensionMismatch("halfspace offsets do not match the normals");

  // The tightest offset per face is the exact support of the bundle: the
  // maximum of the linear functional over the finitely many cell corners.
  const std::size_t n = static_cast<std::size_t>(bundle.dim());
  Eigen::VectorXd moved = Eigen::VectorXd::Constant(k.size(), -std::numeric_limits<double>::infinity());
  Eigen::VectorXd corner(bundle.dim());
  for (const Box& cell : bundle.cells) {
    const std::size_t corners = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      for (std::size_t i = 0; i < n; ++i) {
        corner[static_cast<Eigen::Index>(i)] =
            (mask >> i) & 1u ? cell[i].hi() : cell[i].lo();
      }
      moved = moved.cwiseMax(h * corner);
    }
  }
  return moved;
}

ConstrainedZonotope czib_predict(const ConstrainedZonotope& state, const std::vector<Expr>& f,
                                 const Eigen::VectorXd& input, const Eigen::MatrixXd& dw,
                                 const ConstrainedZonotope& disturbance, int divisions) {
  if (state.dim() != 2) {
    throw DimensionUnsupported("bundle prediction is only available for two-dimensional states");
  }
  if (f.size() != 2) {
    throw DimensionMismatch("bundle prediction needs one expression per state component");
  }
  if (dw.rows() != state.dim() || dw.cols() != disturbance.dim()) {
    throw DimensionMismatch("disturbance gain shape does not match");
  }

  const IntervalBundle tight = tight_interval_bundle(state, divisions);
  const IntervalBundle refined = refine_bundle(f, input, tight);
  const Box hull = bundle_interval_hull(refined);

  const IntervalBundle endpoints = endpoint_intervals(refined, hull);
  auto [normals, offsets] = midpoint_polytope_hrep(endpoints);
  const Eigen::VectorXd moved = move_hyperplanes(normals, offsets, refined);

  const ConstrainedZonotope polytope = from_hrep(normals, moved);
  const ConstrainedZonotope clipped = generalized_intersection(
      polytope, ConstrainedZonotope::from_box(hull), Eigen::MatrixXd::Identity(2, 2));
  return minkowski_sum(clipped, linear_image(dw, disturbance));
}

ConstrainedZonotope czib_predict(const ConstrainedZonotope& state, const SystemModel& model,
                                 const Eigen::VectorXd& input,
                                 const ConstrainedZonotope& disturbance, int divisions) {
  if (!model.dynamics_affine_in_w() || !model.dynamics_constant_dw()) {
    throw NotAffineInW("bundle prediction needs dynamics affine in the disturbance with constant gain");
  }
  if (state.dim() != model.n_x() || input.size() != model.n_u() ||
      disturbance.dim() != model.n_w()) {
    throw DimensionMismatch("state, input, or disturbance does not match the model");
  }

  std::vector<Expr> drift = model.dynamics();
  const int w_lo = model.n_x() + model.n_u();
  for (Expr& e : drift) {
    for (int i = 0; i < model.n_w(); ++i) e = e.substitute(w_lo + i, 0.0);
  }
  const Eigen::MatrixXd dw = model.dynamics_dw_at(Eigen::VectorXd::Zero(model.n_x()), input,
                                                  Eigen::VectorXd::Zero(model.n_w()));
  return czib_predict(state, drift, input, dw, disturbance, divisions);
}

}  // namespace czono
