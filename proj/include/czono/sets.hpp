#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "czono/errors.hpp"
#include "czono/interval.hpp"

namespace czono {

// Zonotope {c + G xi : |xi|_inf <= 1} in generator representation. n_g = 0 is
// the singleton {c}.
struct Zonotope {
  Eigen::MatrixXd G;  // n x n_g
  Eigen::VectorXd c;  // n

  Zonotope() = default;
  Zonotope(Eigen::MatrixXd gens, Eigen::VectorXd center);
  static Zonotope point(Eigen::VectorXd center);
  static Zonotope from_box(const Box& box);

  Eigen::Index dim() const { return c.size(); }
  Eigen::Index num_generators() const { return G.cols(); }
};

// Constrained zonotope {c + G xi : |xi|_inf <= 1, A xi = b} in constrained
// generator representation. n_c = 0 degenerates to a zonotope. Emptiness is a
// queryable state (is_empty), not a representation invariant.
struct ConstrainedZonotope {
  Eigen::MatrixXd G;  // n   x n_g
  Eigen::VectorXd c;  // n
  Eigen::MatrixXd A;  // n_c x n_g
  Eigen::VectorXd b;  // n_c

  ConstrainedZonotope() = default;
  ConstrainedZonotope(Eigen::MatrixXd gens, Eigen::VectorXd center);
  ConstrainedZonotope(Eigen::MatrixXd gens, Eigen::VectorXd center,
                      Eigen::MatrixXd con_coeffs, Eigen::VectorXd con_rhs);
  static ConstrainedZonotope point(Eigen::VectorXd center);
  static ConstrainedZonotope from_box(const Box& box);
  static ConstrainedZonotope from_zonotope(const Zonotope& z);

  Eigen::Index dim() const { return c.size(); }
  Eigen::Index num_generators() const { return G.cols(); }
  Eigen::Index num_constraints() const { return b.size(); }
};

// DomainError unless the constrained zonotope carries no constraints.
Zonotope as_zonotope(const ConstrainedZonotope& z);

// Exact set operations (the result represents the mathematical set exactly).
ConstrainedZonotope linear_image(const Eigen::MatrixXd& r, const ConstrainedZonotope& z);
Zonotope linear_image(const Eigen::MatrixXd& r, const Zonotope& z);
ConstrainedZonotope minkowski_sum(const ConstrainedZonotope& z, const ConstrainedZonotope& w);
Zonotope minkowski_sum(const Zonotope& z, const Zonotope& w);
// {z in Z : R z in Y}; pass R = identity for the plain intersection.
ConstrainedZonotope generalized_intersection(const ConstrainedZonotope& z,
                                             const ConstrainedZonotope& y,
                                             const Eigen::MatrixXd& r);
ConstrainedZonotope cartesian_product(const ConstrainedZonotope& x,
                                      const ConstrainedZonotope& w);
ConstrainedZonotope translate(const ConstrainedZonotope& z, const Eigen::VectorXd& v);

// Membership scale of the cheapest feasible factor assignment: the point is a
// member iff the minimal |xi|_inf reaching it is <= 1 (plus tolerance).
struct MembershipQuery {
  bool member = false;
  double attained = 0.0;    // min |xi|_inf; +inf when the point is unreachable
  bool near_boundary = false;
};

bool is_empty(const ConstrainedZonotope& z);
MembershipQuery membership(const ConstrainedZonotope& z, const Eigen::VectorXd& point);
bool contains_point(const ConstrainedZonotope& z, const Eigen::VectorXd& point);

// Componentwise tight bounds via 2n LPs. EmptySet on an empty input.
Box interval_hull(const ConstrainedZonotope& z);
Box interval_hull(const Zonotope& z);

// max over the set of direction' z, via one LP. EmptySet on an empty input.
double support(const ConstrainedZonotope& z, const Eigen::VectorXd& direction);
double support(const Zonotope& z, const Eigen::VectorXd& direction);

// CG-rep of the bounded nonempty polytope {x : H x <= k}: the enclosing
// zonotope is the polytope's interval hull, and each constraint is completed
// into an equality with one slack generator.
ConstrainedZonotope from_hrep(const Eigen::MatrixXd& h, const Eigen::VectorXd& k);

// Point of Z closest to h in the 1-norm, via one LP. EmptySet on empty input.
Eigen::VectorXd closest_point(const ConstrainedZonotope& z, const Eigen::VectorXd& h);

// Equal-as-a-set CG-rep whose center is exactly h. h must lie in the affine
// span c + range(G), else NotInRange. Representation grows to 2 n_g
// generators and 2 n_c + n constraints.
ConstrainedZonotope move_center(const ConstrainedZonotope& z, const Eigen::VectorXd& h);

// Drop generator columns that are zero in both G and A.
ConstrainedZonotope prune_zero_generators(const ConstrainedZonotope& z);
Zonotope prune_zero_generators(const Zonotope& z);

// Monte-Carlo volume estimate: fraction of points sampled uniformly in the
// interval hull that are members, times the hull volume. Deterministic for a
// fixed seed. EmptySet on an empty input.
double volume_estimate(const ConstrainedZonotope& z, std::uint64_t seed, int samples = 64);

}  // namespace czono
