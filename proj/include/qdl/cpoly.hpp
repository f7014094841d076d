#pragma once

#include "qdl/scalar.hpp"

#include <algorithm>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qdl {

/// Polynomial over the residue field C (exact Q(i) or float), coeffs[i]*z^i.
class CPoly {
public:
  CPoly() = default;
  explicit CPoly(std::vector<Scalar> c) : c_(std::move(c)) { trim(); }
  static CPoly constant(Scalar c) { return CPoly({std::move(c)}); }
  static CPoly z() { return CPoly({Scalar(0), Scalar(1)}); }

  const std::vector<Scalar>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Scalar coeff(size_t i) const { return i < c_.size() ? c_[i] : Scalar(0); }
  const Scalar& lead() const { return c_.back(); }

  friend CPoly operator+(const CPoly& a, const CPoly& b) {
    std::vector<Scalar> r(std::max(a.c_.size(), b.c_.size()), Scalar(0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
    return CPoly(std::move(r));
  }
  friend CPoly operator-(const CPoly& a, const CPoly& b) {
    std::vector<Scalar> r(std::max(a.c_.size(), b.c_.size()), Scalar(0));
    for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
    return CPoly(std::move(r));
  }
  CPoly operator-() const {
    std::vector<Scalar> r = c_;
    for (auto& x : r) x = -x;
    return CPoly(std::move(r));
  }
  friend CPoly operator*(const CPoly& a, const CPoly& b) {
    if (a.is_zero() || b.is_zero()) return CPoly();
    std::vector<Scalar> r(a.c_.size() + b.c_.size() - 1, Scalar(0));
    for (size_t i = 0; i < a.c_.size(); ++i)
      for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return CPoly(std::move(r));
  }
  friend CPoly operator*(const CPoly& a, const Scalar& s) {
    std::vector<Scalar> r = a.c_;
    for (auto& x : r) x = x * s;
    return CPoly(std::move(r));
  }

  Scalar eval(const Scalar& x) const {
    Scalar acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  CPoly derivative() const {
    if (c_.size() <= 1) return CPoly();
    std::vector<Scalar> r(c_.size() - 1, Scalar(0));
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Scalar((long long)i);
    return CPoly(std::move(r));
  }

  CPoly monic() const {
    if (is_zero()) return *this;
    return *this * (Scalar(1) / lead());
  }

  /// Euclidean division: returns (quotient, remainder).
  std::pair<CPoly, CPoly> divmod(const CPoly& d) const {
    if (d.is_zero()) throw std::domain_error("CPoly: division by zero polynomial");
    CPoly r = *this, q;
    std::vector<Scalar> qc(std::max(0, degree() - d.degree() + 1), Scalar(0));
    while (!r.is_zero() && r.degree() >= d.degree()) {
      int k = r.degree() - d.degree();
      Scalar f = r.lead() / d.lead();
      qc[k] = qc[k] + f;
      std::vector<Scalar> sub(k + d.c_.size(), Scalar(0));
      for (size_t i = 0; i < d.c_.size(); ++i) sub[k + i] = d.c_[i] * f;
      r = r - CPoly(std::move(sub));
    }
    return {CPoly(std::move(qc)), r};
  }

  /// gcd via Euclid; exact over Q(i), tolerance-based for float scalars
  /// (the Scalar zero test already applies the session epsilon after the
  /// monic renormalization below).
  friend CPoly cgcd(CPoly a, CPoly b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    a = a.monic();
    b = b.monic();
    while (!b.is_zero()) {
      CPoly r = a.divmod(b).second;
      a = b;
      b = r.is_zero() ? r : r.monic();
    }
    return a.monic();
  }

  /// p(c + z) expanded in z.
  CPoly shifted(const Scalar& c) const {
    CPoly acc;
    CPoly lin({c, Scalar(1)});
    for (size_t i = c_.size(); i-- > 0;) acc = acc * lin + CPoly::constant(c_[i]);
    return acc;
  }

  CPoly reversed(size_t deg) const {
    std::vector<Scalar> r(deg + 1, Scalar(0));
    for (size_t i = 0; i < c_.size() && i <= deg; ++i) r[deg - i] = c_[i];
    return CPoly(std::move(r));
  }

  CPoly to_float() const {
    std::vector<Scalar> r = c_;
    for (auto& x : r) x = x.to_float();
    return CPoly(std::move(r));
  }

  bool all_exact() const {
    for (const auto& x : c_)
      if (!x.exact()) return false;
    return true;
  }

  friend bool operator==(const CPoly& a, const CPoly& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (size_t i = 0; i < a.c_.size(); ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

  std::string str() const {
    if (c_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (!s.empty()) s += " + ";
      s += c_[i].str();
      if (i == 1) s += "*z";
      else if (i > 1) s += "*z^" + std::to_string(i);
    }
    return s;
  }

private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Scalar> c_;
};

/// Roots with multiplicity over C. Exact coefficients are solved exactly
/// when the roots lie in Q(i) (closed forms for degree <= 2, rational
/// reconstruction of numeric roots above); otherwise falls back to
/// Durand-Kerner doubles, or throws ExactUnsupported when `require_exact`.
std::vector<std::pair<Scalar, int>> croots(const CPoly& p, bool require_exact = false);

/// Point of P^1(C).
struct CPoint {
  bool inf = false;
  Scalar v;

  static CPoint infinity() {
    CPoint p;
    p.inf = true;
    return p;
  }
  static CPoint finite(Scalar s) {
    CPoint p;
    p.v = std::move(s);
    return p;
  }
  friend bool operator==(const CPoint& a, const CPoint& b) {
    if (a.inf || b.inf) return a.inf && b.inf;
    return a.v == b.v;
  }
  friend bool operator!=(const CPoint& a, const CPoint& b) { return !(a == b); }
  std::string str() const { return inf ? "inf" : v.str(); }
};

/// Rational map over C, kept gcd-free with monic denominator (or monic
/// numerator when the denominator is constant).
class CRatMap {
public:
  CRatMap() : num_(CPoly::z()), den_(CPoly::constant(Scalar(1))) {}
  CRatMap(CPoly num, CPoly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  const CPoly& num() const { return num_; }
  const CPoly& den() const { return den_; }
  int degree() const { return std::max(num_.degree(), den_.degree()); }

  CPoint eval(const CPoint& p) const {
    if (p.inf) {
      int dn = num_.degree(), dd = den_.degree();
      if (dn > dd) return CPoint::infinity();
      if (dn < dd) return CPoint::finite(Scalar(0));
      return CPoint::finite(num_.lead() / den_.lead());
    }
    Scalar n = num_.eval(p.v), d = den_.eval(p.v);
    if (d.is_zero()) return CPoint::infinity();
    return CPoint::finite(n / d);
  }

  CRatMap compose(const CRatMap& g) const {
    int d = degree();
    auto lift = [&](const CPoly& p) {
      CPoly acc;
      for (int i = 0; i <= d; ++i) {
        if (i > p.degree()) break;
        CPoly term = CPoly::constant(p.coeff(i));
        for (int k = 0; k < i; ++k) term = term * g.num_;
        for (int k = i; k < d; ++k) term = term * g.den_;
        acc = acc + term;
      }
      return acc;
    };
    return CRatMap(lift(num_), lift(den_));
  }

  /// Local degree (multiplicity) of the map at point p: the multiplicity of
  /// p as a preimage of its image.
  int local_multiplicity(const CPoint& p) const;

  bool is_identity() const {
    return num_ == CPoly::z() && den_ == CPoly::constant(Scalar(1));
  }

  friend bool operator==(const CRatMap& a, const CRatMap& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string str() const {
    if (den_ == CPoly::constant(Scalar(1))) return num_.str();
    return "(" + num_.str() + ") / (" + den_.str() + ")";
  }

private:
  void normalize();
  CPoly num_, den_;
};

/// Mobius map helper: inverse of a degree-1 CRatMap.
CRatMap mobius_inverse(const CRatMap& m);

}  // namespace qdl
