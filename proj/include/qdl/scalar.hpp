#pragma once

#include "qdl/rat.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qdl {

enum class Backend { Exact, Float };

/// Comparison tolerance for the float backend. Set once at session start.
double& float_epsilon();

/// Thrown when an operation needs a value the exact backend cannot represent
/// (e.g. an irrational root of a residual polynomial).
struct ExactUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Element of the residue field: a complex number carried either as an exact
/// pair of rationals or as a double pair. Mixed operations demote to float.
class Scalar {
public:
  Scalar() : exact_(true) {}
  Scalar(long long n) : exact_(true), re_(n) {}
  Scalar(Rat re) : exact_(true), re_(std::move(re)) {}
  Scalar(Rat re, Rat im) : exact_(true), re_(std::move(re)), im_(std::move(im)) {}
  explicit Scalar(std::complex<double> z) : exact_(false), fl_(z) {}
  static Scalar of_double(double re, double im = 0.0) {
    return Scalar(std::complex<double>(re, im));
  }
  static Scalar i() { return Scalar(Rat(0), Rat(1)); }

  bool exact() const { return exact_; }
  const Rat& re_q() const { return re_; }
  const Rat& im_q() const { return im_; }
  std::complex<double> to_complex() const {
    return exact_ ? std::complex<double>(re_.to_double(), im_.to_double()) : fl_;
  }

  Scalar to_float() const { return exact_ ? Scalar(to_complex()) : *this; }

  bool is_zero() const {
    if (exact_) return re_.is_zero() && im_.is_zero();
    return std::abs(fl_) <= float_epsilon();
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(a.re_ + b.re_, a.im_ + b.im_);
    return Scalar(a.to_complex() + b.to_complex());
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return Scalar(a.re_ - b.re_, a.im_ - b.im_);
    return Scalar(a.to_complex() - b.to_complex());
  }
  Scalar operator-() const {
    if (exact_) return Scalar(-re_, -im_);
    return Scalar(-fl_);
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_)
      return Scalar(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    return Scalar(a.to_complex() * b.to_complex());
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (b.is_zero()) throw std::domain_error("Scalar: division by zero");
    if (a.exact_ && b.exact_) {
      Rat n2 = b.re_ * b.re_ + b.im_ * b.im_;
      return Scalar((a.re_ * b.re_ + a.im_ * b.im_) / n2,
                    (a.im_ * b.re_ - a.re_ * b.im_) / n2);
    }
    return Scalar(a.to_complex() / b.to_complex());
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  Scalar conj() const {
    if (exact_) return Scalar(re_, -im_);
    return Scalar(std::conj(fl_));
  }

  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.re_ == b.re_ && a.im_ == b.im_;
    return std::abs(a.to_complex() - b.to_complex()) <= float_epsilon();
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  Scalar pow(long long n) const {
    if (n < 0) return (Scalar(1) / *this).pow(-n);
    Scalar r(1), b = *this;
    while (n > 0) {
      if (n & 1) r *= b;
      b *= b;
      n >>= 1;
    }
    return r;
  }

  /// Principal n-th root. Exact backend succeeds only for values whose
  /// principal root lies in Q(i); otherwise throws ExactUnsupported.
  Scalar nth_root(unsigned n) const;

  /// Exact square root in Q(i) if it exists.
  std::optional<Scalar> sqrt_exact_qi() const;

  std::string str() const {
    std::ostringstream os;
    if (exact_) {
      os << "(" << re_.str() << "," << im_.str() << ")";
    } else {
      os << "(" << fl_.real() << "," << fl_.imag() << ")";
    }
    return os.str();
  }

  /// Total order on exact scalars (lexicographic), used for canonical sorting.
  /// Float scalars compare through doubles.
  friend bool scalar_less(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
      if (a.re_ != b.re_) return a.re_ < b.re_;
      return a.im_ < b.im_;
    }
    auto x = a.to_complex(), y = b.to_complex();
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  }

private:
  bool exact_;
  Rat re_, im_;
  std::complex<double> fl_{};
};

inline double& float_epsilon() {
  static double eps = 1e-9;
  return eps;
}

inline std::optional<Scalar> Scalar::sqrt_exact_qi() const {
  if (!exact_) return std::nullopt;
  // sqrt(a+bi) = x+yi with x^2-y^2 = a, 2xy = b; x^2 = (a + |z|)/2 needs
  // |z| = sqrt(a^2+b^2) rational and the halves to be rational squares.
  Rat a = re_, b = im_;
  auto mod2 = (a * a + b * b).sqrt_exact();
  if (!mod2) return std::nullopt;
  auto x2 = ((a + *mod2) / Rat(2)).sqrt_exact();
  if (x2) {
    Rat x = *x2;
    if (!x.is_zero()) {
      Rat y = b / (Rat(2) * x);
      // principal branch: Re > 0, or Re == 0 and Im >= 0
      if (x.sign() < 0 || (x.sign() == 0 && y.sign() < 0)) { x = -x; y = -y; }
      return Scalar(x, y);
    }
    // a <= 0, b == 0: sqrt of a non-positive real
    auto y2 = (-a).sqrt_exact();
    if (y2) return Scalar(Rat(0), *y2);
  }
  return std::nullopt;
}

inline Scalar Scalar::nth_root(unsigned n) const {
  if (n == 0) throw std::domain_error("Scalar: 0th root");
  if (n == 1) return *this;
  if (!exact_) {
    return Scalar(std::pow(fl_, 1.0 / static_cast<double>(n)));
  }
  if (is_zero()) return Scalar(0);
  if (n == 2) {
    if (auto r = sqrt_exact_qi()) return *r;
    throw ExactUnsupported("Scalar: square root not in Q(i): " + str());
  }
  if (n % 2 == 0) return nth_root(2).nth_root(n / 2);
  // Odd root: handle rational reals with exact roots; the principal odd root
  // of a negative real is complex, which leaves Q(i) except for 0.
  if (im_.is_zero() && re_.sign() > 0) {
    if (auto r = re_.nth_root_exact(n)) return Scalar(*r);
  }
  throw ExactUnsupported("Scalar: " + std::to_string(n) + "th root not in Q(i): " + str());
}

}  // namespace qdl
