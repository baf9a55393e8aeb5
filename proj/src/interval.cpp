#include "czono/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace czono {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;

void require_finite(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("interval endpoint is not finite");
  }
}

// True when some point c + 2*pi*k (integer k) lies inside [lo, hi].
bool hits_mod_two_pi(double lo, double hi, double c) {
  const double k_min = std::ceil((lo - c) / kTwoPi);
  const double k_max = std::floor((hi - c) / kTwoPi);
  return k_min <= k_max;
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  require_finite(lo, hi);
  if (lo > hi) {
    throw DomainError("interval endpoints out of order");
  }
}

Interval Interval::empty() {
  Interval e;
  e.lo_ = 1.0;
  e.hi_ = -1.0;
  return e;
}

Interval Interval::symmetric(double r) {
  if (!(r >= 0.0)) {
    throw DomainError("symmetric interval needs a nonnegative radius");
  }
  return Interval(-r, r);
}

Interval Interval::hull_of(double a, double b) {
  return Interval(std::min(a, b), std::max(a, b));
}

double Interval::mid() const {
  if (is_empty()) throw EmptySet("mid of empty interval");
  return 0.5 * (lo_ + hi_);
}

double Interval::rad() const {
  if (is_empty()) throw EmptySet("rad of empty interval");
  return 0.5 * (hi_ - lo_);
}

double Interval::diam() const {
  if (is_empty()) throw EmptySet("diam of empty interval");
  return hi_ - lo_;
}

bool Interval::contains(double x) const { return lo_ <= x && x <= hi_; }

bool Interval::contains(const Interval& other) const {
  if (other.is_empty()) return true;
  if (is_empty()) return false;
  return lo_ <= other.lo_ && other.hi_ <= hi_;
}

Interval Interval::operator-() const {
  if (is_empty()) return empty();
  return Interval(-hi_, -lo_);
}

Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return Interval(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

Interval operator-(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  return Interval(a.lo_ - b.hi_, a.hi_ - b.lo_);
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  const double p1 = a.lo_ * b.lo_;
  const double p2 = a.lo_ * b.hi_;
  const double p3 = a.hi_ * b.lo_;
  const double p4 = a.hi_ * b.hi_;
  return Interval(std::min(std::min(p1, p2), std::min(p3, p4)),
                  std::max(std::max(p1, p2), std::max(p3, p4)));
}

Interval operator/(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (b.lo_ <= 0.0 && 0.0 <= b.hi_) {
    throw DivisionByZeroInterval("interval divisor contains zero");
  }
  return a * Interval(1.0 / b.hi_, 1.0 / b.lo_);
}

Interval operator*(double s, const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  require_finite(s, s);
  return s >= 0.0 ? Interval(s * a.lo_, s * a.hi_) : Interval(s * a.hi_, s * a.lo_);
}

Interval operator+(double s, const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  require_finite(s, s);
  return Interval(s + a.lo_, s + a.hi_);
}

bool operator==(const Interval& a, const Interval& b) {
  if (a.is_empty() && b.is_empty()) return true;
  return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  const double lo = std::max(a.lo_, b.lo_);
  const double hi = std::min(a.hi_, b.hi_);
  if (lo > hi) return Interval::empty();
  return Interval(lo, hi);
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return Interval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
}

Interval sin(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  const double slo = std::sin(x.lo());
  const double shi = std::sin(x.hi());
  double lo = std::min(slo, shi);
  double hi = std::max(slo, shi);
  if (hits_mod_two_pi(x.lo(), x.hi(), 0.5 * kPi)) hi = 1.0;
  if (hits_mod_two_pi(x.lo(), x.hi(), -0.5 * kPi)) lo = -1.0;
  return Interval(lo, hi);
}

Interval cos(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  const double clo = std::cos(x.lo());
  const double chi = std::cos(x.hi());
  double lo = std::min(clo, chi);
  double hi = std::max(clo, chi);
  if (hits_mod_two_pi(x.lo(), x.hi(), 0.0)) hi = 1.0;
  if (hits_mod_two_pi(x.lo(), x.hi(), kPi)) lo = -1.0;
  return Interval(lo, hi);
}

Interval tan(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  // Poles sit at pi/2 + pi*k; reuse the 2*pi helper on both residues.
  if (hits_mod_two_pi(x.lo(), x.hi(), 0.5 * kPi) ||
      hits_mod_two_pi(x.lo(), x.hi(), -0.5 * kPi)) {
    throw DomainError("tan over an interval containing a pole");
  }
  return Interval(std::tan(x.lo()), std::tan(x.hi()));
}

Interval atan(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  return Interval(std::atan(x.lo()), std::atan(x.hi()));
}

Interval asin(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  const double slack = 1e-12;
  if (x.lo() < -1.0 - slack || x.hi() > 1.0 + slack) {
    throw DomainError("asin over an interval leaving [-1, 1]");
  }
  const double lo = std::clamp(x.lo(), -1.0, 1.0);
  const double hi = std::clamp(x.hi(), -1.0, 1.0);
  return Interval(std::asin(lo), std::asin(hi));
}

Interval exp(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  return Interval(std::exp(x.lo()), std::exp(x.hi()));
}

Interval log(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  if (!(x.lo() > 0.0)) {
    throw DomainError("log over an interval reaching 0 or below");
  }
  return Interval(std::log(x.lo()), std::log(x.hi()));
}

Interval sqrt(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  if (x.lo() < 0.0) {
    throw DomainError("sqrt over an interval with negative part");
  }
  return Interval(std::sqrt(x.lo()), std::sqrt(x.hi()));
}

Interval abs(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  if (x.lo() >= 0.0) return x;
  if (x.hi() <= 0.0) return Interval(-x.hi(), -x.lo());
  return Interval(0.0, std::max(-x.lo(), x.hi()));
}

Interval sign(const Interval& x) {
  if (x.is_empty()) return Interval::empty();
  if (x.lo() > 0.0) return Interval(1.0);
  if (x.hi() < 0.0) return Interval(-1.0);
  if (x.lo() == 0.0 && x.hi() == 0.0) return Interval(0.0);
  if (x.lo() == 0.0) return Interval(0.0, 1.0);
  if (x.hi() == 0.0) return Interval(-1.0, 0.0);
  return Interval(-1.0, 1.0);
}

Interval pow_int(const Interval& x, int k) {
  if (x.is_empty()) return Interval::empty();
  if (k == 0) return Interval(1.0);
  if (k < 0) return Interval(1.0) / pow_int(x, -k);
  if (k <= 8) {
    Interval r = x;
    for (int i = 1; i < k; ++i) r = r * x;
    return r;
  }
  // Monomial rule for large exponents.
  const double plo = std::pow(x.lo(), k);
  const double phi = std::pow(x.hi(), k);
  if (k % 2 == 1) return Interval(plo, phi);
  if (x.lo() >= 0.0) return Interval(plo, phi);
  if (x.hi() <= 0.0) return Interval(phi, plo);
  return Interval(0.0, std::max(plo, phi));
}

Box box_from_point(const Eigen::VectorXd& p) {
  Box b;
  b.reserve(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) b.emplace_back(p[i]);
  return b;
}

Eigen::VectorXd box_mid(const Box& b) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) m[static_cast<Eigen::Index>(i)] = b[i].mid();
  return m;
}

Eigen::VectorXd box_rad(const Box& b) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) r[static_cast<Eigen::Index>(i)] = b[i].rad();
  return r;
}

bool box_contains(const Box& b, const Eigen::VectorXd& p) {
  if (static_cast<Eigen::Index>(b.size()) != p.size()) {
    throw DimensionMismatch("box/point dimension mismatch");
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!b[i].contains(p[static_cast<Eigen::Index>(i)])) return false;
  }
  return true;
}

double box_volume(const Box& b) {
  double v = 1.0;
  for (const Interval& c : b) v *= c.diam();
  return v;
}

double box_max_radius(const Box& b) {
  double r = 0.0;
  for (const Interval& c : b) r = std::max(r, c.rad());
  return r;
}

ExtendedInterval::ExtendedInterval()
    : lo_(-std::numeric_limits<double>::infinity()),
      hi_(std::numeric_limits<double>::infinity()) {}

ExtendedInterval::ExtendedInterval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi)) {
    throw DomainError("extended interval endpoint is NaN");
  }
}

bool ExtendedInterval::bounded_below() const { return std::isfinite(lo_); }
bool ExtendedInterval::bounded_above() const { return std::isfinite(hi_); }

void ExtendedInterval::intersect_with(const ExtendedInterval& other) {
  lo_ = std::max(lo_, other.lo_);
  hi_ = std::min(hi_, other.hi_);
}

IntervalMatrix::IntervalMatrix(Eigen::Index rows, Eigen::Index cols)
    : lo_(Eigen::MatrixXd::Zero(rows, cols)), hi_(Eigen::MatrixXd::Zero(rows, cols)) {}

IntervalMatrix::IntervalMatrix(const Eigen::MatrixXd& exact) : lo_(exact), hi_(exact) {}

IntervalMatrix::IntervalMatrix(const Eigen::MatrixXd& lo, const Eigen::MatrixXd& hi)
    : lo_(lo), hi_(hi) {
  if (lo.rows() != hi.rows() || lo.cols() != hi.cols()) {
    throw DimensionMismatch("interval matrix bound shapes differ");
  }
  if ((lo.array() > hi.array()).any()) {
    throw DomainError("interval matrix has an entry with lo > hi");
  }
}

Interval IntervalMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
  return Interval(lo_(i, j), hi_(i, j));
}

void IntervalMatrix::set(Eigen::Index i, Eigen::Index j, const Interval& v) {
  if (v.is_empty()) throw EmptySet("cannot store an empty interval entry");
  lo_(i, j) = v.lo();
  hi_(i, j) = v.hi();
}

bool IntervalMatrix::contains(const Eigen::MatrixXd& m) const {
  if (m.rows() != rows() || m.cols() != cols()) {
    throw DimensionMismatch("interval matrix containment shape mismatch");
  }
  return (lo_.array() <= m.array()).all() && (m.array() <= hi_.array()).all();
}

IntervalMatrix operator+(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("interval matrix sum shape mismatch");
  }
  return IntervalMatrix(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

IntervalMatrix operator-(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("interval matrix difference shape mismatch");
  }
  return IntervalMatrix(a.lo_ - b.hi_, a.hi_ - b.lo_);
}

IntervalMatrix interval_matrix_mul(const IntervalMatrix& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("interval matrix product inner dimensions differ");
  }
  // For scalar s >= 0 the product [lo,hi]*s is [lo*s, hi*s]; for s < 0 the
  // roles swap. Splitting b into positive and negative parts makes the whole
  // product two pairs of real matrix products.
  const Eigen::MatrixXd bp = b.cwiseMax(0.0);
  const Eigen::MatrixXd bm = b.cwiseMin(0.0);
  return IntervalMatrix(a.lower() * bp + a.upper() * bm,
                        a.upper() * bp + a.lower() * bm);
}

IntervalMatrix interval_matrix_mul(const Eigen::MatrixXd& a, const IntervalMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("interval matrix product inner dimensions differ");
  }
  const Eigen::MatrixXd ap = a.cwiseMax(0.0);
  const Eigen::MatrixXd am = a.cwiseMin(0.0);
  return IntervalMatrix(ap * b.lower() + am * b.upper(),
                        ap * b.upper() + am * b.lower());
}

IntervalMatrix interval_matrix_mul(const IntervalMatrix& a, const IntervalMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("interval matrix product inner dimensions differ");
  }
  IntervalMatrix c(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Interval acc(0.0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) {
        acc += a(i, k) * b(k, j);
      }
      c.set(i, j, acc);
    }
  }
  return c;
}

Box interval_matrix_apply(const IntervalMatrix& m, const Box& x) {
  if (m.cols() != static_cast<Eigen::Index>(x.size())) {
    throw DimensionMismatch("interval matrix-box product dimension mismatch");
  }
  Box out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Interval acc(0.0);
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      acc += m(i, k) * x[static_cast<std::size_t>(k)];
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace czono
