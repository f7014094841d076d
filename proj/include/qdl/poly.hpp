#pragma once

#include "qdl/puiseux.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qdl {

/// Polynomial over L, coeffs[i] multiplies z^i. Trailing zero-mod-precision
/// coefficients are trimmed; the zero polynomial has an empty list.
class PolyL {
public:
  PolyL() = default;
  explicit PolyL(std::vector<PuiseuxSeries> coeffs) : c_(std::move(coeffs)) { trim(); }
  static PolyL constant(PuiseuxSeries f) { return PolyL({std::move(f)}); }
  static PolyL z(Rat prec = default_precision()) {
    return PolyL({PuiseuxSeries::zero(prec), PuiseuxSeries::constant(Scalar(1), prec)});
  }

  const std::vector<PuiseuxSeries>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  const PuiseuxSeries& coeff(size_t i) const {
    static const PuiseuxSeries kZero = PuiseuxSeries::zero();
    return i < c_.size() ? c_[i] : kZero;
  }

  friend PolyL operator+(const PolyL& a, const PolyL& b) {
    std::vector<PuiseuxSeries> r(std::max(a.c_.size(), b.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
    return PolyL(std::move(r));
  }
  friend PolyL operator-(const PolyL& a, const PolyL& b) {
    std::vector<PuiseuxSeries> r(std::max(a.c_.size(), b.c_.size()));
    for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
    return PolyL(std::move(r));
  }
  PolyL operator-() const {
    std::vector<PuiseuxSeries> r;
    r.reserve(c_.size());
    for (const auto& f : c_) r.push_back(-f);
    return PolyL(std::move(r));
  }
  friend PolyL operator*(const PolyL& a, const PolyL& b) {
    if (a.is_zero() || b.is_zero()) return PolyL();
    std::vector<PuiseuxSeries> r(a.c_.size() + b.c_.size() - 1);
    Rat p = std::min(min_prec(a.c_), min_prec(b.c_));
    for (auto& f : r) f = PuiseuxSeries::zero(p);
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return PolyL(std::move(r));
  }
  friend PolyL operator*(const PolyL& a, const PuiseuxSeries& s) {
    std::vector<PuiseuxSeries> r;
    r.reserve(a.c_.size());
    for (const auto& f : a.c_) r.push_back(f * s);
    return PolyL(std::move(r));
  }

  PolyL derivative() const {
    if (c_.size() <= 1) return PolyL();
    std::vector<PuiseuxSeries> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) {
      PuiseuxSeries s(c_[i].prec());
      for (const auto& [e, co] : c_[i].terms()) s.add_term(e, co * Scalar((long long)i));
      r[i - 1] = std::move(s);
    }
    return PolyL(std::move(r));
  }

  PuiseuxSeries eval(const PuiseuxSeries& x) const {
    if (c_.empty()) return PuiseuxSeries::zero();
    PuiseuxSeries acc = c_.back();
    for (size_t i = c_.size() - 1; i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  /// p(c + u) as a polynomial in u.
  PolyL shifted(const PuiseuxSeries& c) const {
    PolyL acc;
    PolyL lin({c, PuiseuxSeries::constant(Scalar(1), c.prec())});
    for (size_t i = c_.size(); i-- > 0;) acc = acc * lin + PolyL::constant(c_[i]);
    return acc;
  }

  /// p(t^s z) as a polynomial in z: coefficients a_i * t^{s i}.
  PolyL var_scaled(const Rat& s) const {
    std::vector<PuiseuxSeries> r;
    r.reserve(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
      PuiseuxSeries f(c_[i].prec() + s * Rat((long long)i));
      for (const auto& [e, co] : c_[i].terms()) f.add_term(e + s * Rat((long long)i), co);
      r.push_back(std::move(f));
    }
    return PolyL(std::move(r));
  }

  /// Reversal z^deg * p(1/z), used for the infinity chart.
  PolyL reversed(size_t deg) const {
    std::vector<PuiseuxSeries> r(deg + 1, PuiseuxSeries::zero(min_prec(c_)));
    for (size_t i = 0; i < c_.size() && i <= deg; ++i) r[deg - i] = c_[i];
    return PolyL(std::move(r));
  }

  std::string str() const {
    if (c_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (!s.empty()) s += " + ";
      s += "(" + c_[i].str() + ")";
      if (i == 1) s += "*z";
      else if (i > 1) s += "*z^" + std::to_string(i);
    }
    return s;
  }

private:
  static Rat min_prec(const std::vector<PuiseuxSeries>& v) {
    Rat p = default_precision();
    bool first = true;
    for (const auto& f : v) {
      if (first || f.prec() < p) p = f.prec();
      first = false;
    }
    return p;
  }
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<PuiseuxSeries> c_;
};

/// A point of P^1(L) in homogeneous normal form: either a finite series value
/// or the point at infinity.
struct PointL {
  bool infinite = false;
  PuiseuxSeries value;

  static PointL at_infinity() {
    PointL p;
    p.infinite = true;
    return p;
  }
  static PointL finite(PuiseuxSeries v) {
    PointL p;
    p.value = std::move(v);
    return p;
  }
  friend bool operator==(const PointL& a, const PointL& b) {
    if (a.infinite || b.infinite) return a.infinite && b.infinite;
    return a.value == b.value;
  }
  std::string str() const { return infinite ? "inf" : value.str(); }
};

/// Rational map over L as numerator/denominator pair.
struct RatMapL {
  PolyL num, den;

  int degree() const { return std::max(num.degree(), den.degree()); }

  PointL eval(const PointL& p) const {
    if (p.infinite) {
      int dn = num.degree(), dd = den.degree();
      if (dn > dd) return PointL::at_infinity();
      if (dn < dd) return PointL::finite(PuiseuxSeries::zero(num.coeffs().empty()
                                                                 ? default_precision()
                                                                 : num.coeffs()[0].prec()));
      return PointL::finite(num.coeffs().back() / den.coeffs().back());
    }
    PuiseuxSeries n = num.eval(p.value), d = den.eval(p.value);
    if (d.is_zero()) {
      if (n.is_zero()) throw PrecisionExhausted("RatMapL::eval: 0/0 at finite precision");
      return PointL::at_infinity();
    }
    return PointL::finite(n / d);
  }

  /// Composition this(other(z)).
  RatMapL compose(const RatMapL& other) const {
    // num(N/D), den(N/D) with common D^d cleared.
    int d = std::max(num.degree(), den.degree());
    auto lift = [&](const PolyL& p) {
      PolyL acc;
      for (int i = 0; i <= d; ++i) {
        if (i > p.degree()) break;
        PolyL term = PolyL::constant(p.coeff(i));
        for (int k = 0; k < i; ++k) term = term * other.num;
        for (int k = i; k < d; ++k) term = term * other.den;
        acc = acc + term;
      }
      return acc;
    };
    return RatMapL{lift(num), lift(den)};
  }

  /// phi(c + u) as a map in u.
  RatMapL recentered(const PuiseuxSeries& c) const {
    return RatMapL{num.shifted(c), den.shifted(c)};
  }

  /// Conjugation by the chart swap z -> 1/z: returns 1/phi(1/z).
  RatMapL chart_swapped() const {
    size_t d = static_cast<size_t>(std::max(num.degree(), den.degree()));
    return RatMapL{den.reversed(d), num.reversed(d)};
  }

  RatMapL derivative_map() const {
    // (N'D - ND') / D^2
    return RatMapL{num.derivative() * den - num * den.derivative(), den * den};
  }

  RatMapL to_float() const {
    auto conv = [](const PolyL& p) {
      std::vector<PuiseuxSeries> v;
      for (const auto& f : p.coeffs()) v.push_back(f.to_float());
      return PolyL(std::move(v));
    };
    return RatMapL{conv(num), conv(den)};
  }
};

}  // namespace qdl
