#pragma once

#include <Eigen/Dense>
#include <vector>

#include "czono/errors.hpp"

namespace czono {

// Closed bounded interval [lo, hi]. An empty interval is represented by the
// canonical sentinel [1, -1]; all finite lo <= hi pairs are proper intervals.
// Endpoints must be finite: the public constructors reject NaN/inf so that
// downstream arithmetic never has to reason about extended reals. (The
// rescaling sweep, which genuinely needs half-open ranges, uses
// ExtendedInterval below instead.)
class Interval {
public:
  Interval() : lo_(0.0), hi_(0.0) {}
  explicit Interval(double point) : Interval(point, point) {}
  Interval(double lo, double hi);

  static Interval empty();
  // [-r, r]; r must be >= 0.
  static Interval symmetric(double r);
  static Interval hull_of(double a, double b);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_empty() const { return lo_ > hi_; }

  double mid() const;
  double rad() const;
  double diam() const;

  bool contains(double x) const;
  bool contains(const Interval& other) const;

  Interval operator-() const;
  Interval& operator+=(const Interval& r) { return *this = *this + r; }
  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  // Throws DivisionByZeroInterval when 0 lies in b.
  friend Interval operator/(const Interval& a, const Interval& b);
  friend Interval operator*(double s, const Interval& a);
  friend Interval operator+(double s, const Interval& a);
  friend Interval operator+(const Interval& a, double s) { return s + a; }
  friend Interval operator-(const Interval& a, double s) { return (-s) + a; }
  friend Interval operator-(double s, const Interval& a) { return s + (-a); }

  friend bool operator==(const Interval& a, const Interval& b);

  // Set intersection; may be empty.
  friend Interval intersect(const Interval& a, const Interval& b);
  // Smallest interval containing both.
  friend Interval hull(const Interval& a, const Interval& b);

private:
  double lo_, hi_;
};

Interval intersect(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);

Interval sin(const Interval& x);
Interval cos(const Interval& x);
// DomainError when a pole of tan lies inside x.
Interval tan(const Interval& x);
Interval atan(const Interval& x);
// DomainError when x leaves [-1, 1].
Interval asin(const Interval& x);
Interval exp(const Interval& x);
// DomainError unless x.lo > 0.
Interval log(const Interval& x);
// DomainError unless x.lo >= 0.
Interval sqrt(const Interval& x);
Interval abs(const Interval& x);
// Sign with the 0 convention sign(0) = 0; the enclosure of {sign(t): t in x}.
Interval sign(const Interval& x);
// x^k for integer k (negative k divides; DomainError when 0 in x and k < 0).
// Exponents up to 8 in magnitude use repeated multiplication; beyond that the
// monomial rule (direct endpoint analysis) is applied.
Interval pow_int(const Interval& x, int k);

// Axis-aligned box: one interval per coordinate.
using Box = std::vector<Interval>;

Box box_from_point(const Eigen::VectorXd& p);
Eigen::VectorXd box_mid(const Box& b);
Eigen::VectorXd box_rad(const Box& b);
bool box_contains(const Box& b, const Eigen::VectorXd& p);
double box_volume(const Box& b);
double box_max_radius(const Box& b);

// Interval with endpoints allowed at +-infinity. It exists solely for the
// generator-bound propagation sweep, whose intermediate ranges start
// unbounded; nothing else in the library accepts it.
class ExtendedInterval {
public:
  ExtendedInterval();  // (-inf, +inf)
  ExtendedInterval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_empty() const { return lo_ > hi_; }
  bool bounded_below() const;
  bool bounded_above() const;

  // Intersect with a proper interval or another extended interval.
  void intersect_with(const ExtendedInterval& other);

private:
  double lo_, hi_;
};

// Dense interval matrix stored as two real matrices of equal shape.
class IntervalMatrix {
public:
  IntervalMatrix() = default;
  IntervalMatrix(Eigen::Index rows, Eigen::Index cols);  // all entries [0,0]
  explicit IntervalMatrix(const Eigen::MatrixXd& exact);
  IntervalMatrix(const Eigen::MatrixXd& lo, const Eigen::MatrixXd& hi);

  Eigen::Index rows() const { return lo_.rows(); }
  Eigen::Index cols() const { return lo_.cols(); }

  Interval operator()(Eigen::Index i, Eigen::Index j) const;
  void set(Eigen::Index i, Eigen::Index j, const Interval& v);

  const Eigen::MatrixXd& lower() const { return lo_; }
  const Eigen::MatrixXd& upper() const { return hi_; }
  Eigen::MatrixXd mid() const { return 0.5 * (lo_ + hi_); }
  Eigen::MatrixXd rad() const { return 0.5 * (hi_ - lo_); }

  bool contains(const Eigen::MatrixXd& m) const;

  friend IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b);
  friend IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b);

private:
  Eigen::MatrixXd lo_, hi_;
};

// Exact interval-matrix products with a real factor (entrywise interval
// arithmetic, no rounding inflation beyond floating point itself).
IntervalMatrix interval_matrix_mul(const IntervalMatrix& a, const Eigen::MatrixXd& b);
IntervalMatrix interval_matrix_mul(const Eigen::MatrixXd& a, const IntervalMatrix& b);
IntervalMatrix interval_matrix_mul(const IntervalMatrix& a, const IntervalMatrix& b);
// y = M * x with x a box (vector of intervals); result has one interval per row.
Box interval_matrix_apply(const IntervalMatrix& m, const Box& x);

}  // namespace czono
