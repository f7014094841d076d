#pragma once

#include "qdl/rat.hpp"
#include "qdl/scalar.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qdl {

struct DivisionByZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PrecisionExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotIntegral : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Default precision cap P: series are known modulo O(t^P).
inline Rat default_precision() { return Rat(24); }

/// Truncated element of the completed Puiseux-series field L = C<<t>>.
/// Terms are sorted by strictly increasing rational exponent, all below the
/// precision cap, with nonzero coefficients under the backend's zero test.
class PuiseuxSeries {
public:
  using Term = std::pair<Rat, Scalar>;

  PuiseuxSeries() : prec_(default_precision()) {}
  explicit PuiseuxSeries(Rat prec) : prec_(std::move(prec)) {}

  static PuiseuxSeries zero(Rat prec = default_precision()) {
    return PuiseuxSeries(std::move(prec));
  }
  static PuiseuxSeries constant(Scalar c, Rat prec = default_precision()) {
    PuiseuxSeries f(std::move(prec));
    f.add_term(Rat(0), std::move(c));
    return f;
  }
  static PuiseuxSeries monomial(Scalar c, Rat e, Rat prec = default_precision()) {
    PuiseuxSeries f(std::move(prec));
    f.add_term(std::move(e), std::move(c));
    return f;
  }
  static PuiseuxSeries tau(Rat prec = default_precision()) {
    return monomial(Scalar(1), Rat(1), std::move(prec));
  }

  const std::vector<Term>& terms() const { return terms_; }
  const Rat& prec() const { return prec_; }

  bool is_zero() const { return terms_.empty(); }

  /// Least stored exponent; +inf for the zero-modulo-precision series.
  OrdVal ord() const {
    if (terms_.empty()) return OrdVal::infinity();
    return OrdVal(terms_.front().first);
  }
  /// ord clamped at the precision cap, for precision bookkeeping.
  Rat ord_or_prec() const { return terms_.empty() ? prec_ : terms_.front().first; }

  const Scalar& leading_coeff() const {
    if (terms_.empty()) throw PrecisionExhausted("leading_coeff of zero-mod-precision series");
    return terms_.front().second;
  }

  /// Coefficient at exponent e (zero if absent).
  Scalar coeff(const Rat& e) const {
    for (const auto& [ex, c] : terms_)
      if (ex == e) return c;
    return Scalar(0);
  }

  void add_term(Rat e, Scalar c) {
    if (e >= prec_) return;
    // float coefficients may be genuinely tiny, so the storage floor sits
    // far below the comparison epsilon; cancellation is detected relative
    // to the magnitudes that met in the sum
    if (c.exact() ? c.is_zero() : std::abs(c.to_complex()) <= 1e-14) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                               [](const Term& t, const Rat& x) { return t.first < x; });
    if (it != terms_.end() && it->first == e) {
      double m = std::max(std::abs(it->second.to_complex()), std::abs(c.to_complex()));
      it->second += c;
      bool gone = it->second.exact()
                      ? it->second.is_zero()
                      : std::abs(it->second.to_complex()) <= 1e-12 * m;
      if (gone) terms_.erase(it);
    } else {
      terms_.insert(it, {std::move(e), std::move(c)});
    }
  }

  PuiseuxSeries truncated(const Rat& new_prec) const {
    PuiseuxSeries r(std::min(prec_, new_prec));
    for (const auto& [e, c] : terms_) {
      if (e >= r.prec_) break;
      r.terms_.push_back({e, c});
    }
    return r;
  }

  /// Drops every term with exponent >= cut (keeps precision).
  PuiseuxSeries drop_from(const Rat& cut) const {
    PuiseuxSeries r(prec_);
    for (const auto& [e, c] : terms_) {
      if (e >= cut) break;
      r.terms_.push_back({e, c});
    }
    return r;
  }

  friend PuiseuxSeries operator+(const PuiseuxSeries& f, const PuiseuxSeries& g) {
    PuiseuxSeries r(std::min(f.prec_, g.prec_));
    for (const auto& [e, c] : f.terms_) r.add_term(e, c);
    for (const auto& [e, c] : g.terms_) r.add_term(e, c);
    return r;
  }
  friend PuiseuxSeries operator-(const PuiseuxSeries& f, const PuiseuxSeries& g) {
    PuiseuxSeries r(std::min(f.prec_, g.prec_));
    for (const auto& [e, c] : f.terms_) r.add_term(e, c);
    for (const auto& [e, c] : g.terms_) r.add_term(e, -c);
    return r;
  }
  PuiseuxSeries operator-() const {
    PuiseuxSeries r(prec_);
    for (const auto& [e, c] : terms_) r.terms_.push_back({e, -c});
    return r;
  }
  friend PuiseuxSeries operator*(const PuiseuxSeries& f, const PuiseuxSeries& g) {
    // cap = min(prec_f + ord g, prec_g + ord f): terms beyond it are untrusted.
    PuiseuxSeries r(std::min(f.prec_ + g.ord_or_prec(), g.prec_ + f.ord_or_prec()));
    for (const auto& [e1, c1] : f.terms_)
      for (const auto& [e2, c2] : g.terms_) r.add_term(e1 + e2, c1 * c2);
    return r;
  }
  PuiseuxSeries& operator+=(const PuiseuxSeries& o) { return *this = *this + o; }
  PuiseuxSeries& operator-=(const PuiseuxSeries& o) { return *this = *this - o; }
  PuiseuxSeries& operator*=(const PuiseuxSeries& o) { return *this = *this * o; }

  /// Multiplicative inverse via the geometric series on the unit part.
  PuiseuxSeries inverse() const {
    if (terms_.empty()) throw DivisionByZero("inverse of zero-mod-precision series");
    Rat e = terms_.front().first;
    Scalar c = terms_.front().second;
    // f = c t^e (1 + u), ord u > 0; 1/f = c^{-1} t^{-e} sum (-u)^k.
    Rat rel = prec_ - e;  // relative precision of the unit part
    PuiseuxSeries u(rel);
    for (size_t i = 1; i < terms_.size(); ++i)
      u.add_term(terms_[i].first - e, terms_[i].second / c);
    PuiseuxSeries acc = PuiseuxSeries::constant(Scalar(1), rel);
    PuiseuxSeries pw = PuiseuxSeries::constant(Scalar(1), rel);
    if (!u.is_zero()) {
      Rat step = u.terms_.front().first;
      Rat covered(0);
      while (covered < rel) {
        pw = (pw * (-u)).truncated(rel);
        if (pw.is_zero()) break;
        acc += pw;
        covered += step;
      }
    }
    PuiseuxSeries r(prec_ - e - e);
    for (const auto& [ex, co] : acc.terms_) r.add_term(ex - e, co / c);
    return r;
  }

  friend PuiseuxSeries operator/(const PuiseuxSeries& f, const PuiseuxSeries& g) {
    return f * g.inverse();
  }
  PuiseuxSeries& operator/=(const PuiseuxSeries& o) { return *this = *this / o; }

  /// f^(a/b) with the principal-root branch on the leading coefficient;
  /// fractional powers use the binomial series on the unit part.
  PuiseuxSeries pow_rational(const Rat& r) const;

  PuiseuxSeries pow_int(long long n) const {
    if (n < 0) return inverse().pow_int(-n);
    PuiseuxSeries r = PuiseuxSeries::constant(Scalar(1), prec_ + Rat(n - 1) * ord_or_prec());
    PuiseuxSeries b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

  /// Reduction to the residue field.
  Scalar residue() const {
    if (terms_.empty()) return Scalar(0);
    const Rat& e = terms_.front().first;
    if (e.sign() < 0) throw NotIntegral("residue of a series with ord < 0");
    if (e.sign() > 0) return Scalar(0);
    return terms_.front().second;
  }

  /// Equality modulo the weaker of the two precisions.
  friend bool operator==(const PuiseuxSeries& f, const PuiseuxSeries& g) {
    Rat p = std::min(f.prec_, g.prec_);
    return (f - g).truncated(p).is_zero();
  }
  friend bool operator!=(const PuiseuxSeries& f, const PuiseuxSeries& g) { return !(f == g); }

  PuiseuxSeries to_float() const {
    PuiseuxSeries r(prec_);
    for (const auto& [e, c] : terms_) r.terms_.push_back({e, c.to_float()});
    return r;
  }

  std::string str() const;

private:
  std::vector<Term> terms_;
  Rat prec_;
};

inline PuiseuxSeries PuiseuxSeries::pow_rational(const Rat& r) const {
  if (terms_.empty()) {
    if (r.sign() <= 0) throw DivisionByZero("pow_rational of zero series with non-positive exponent");
    return PuiseuxSeries::zero(prec_ * r);
  }
  if (r.is_integer()) {
    long long n = static_cast<long long>(r.num());
    return pow_int(n);
  }
  Rat e = terms_.front().first;
  Scalar c = terms_.front().second;
  unsigned b = static_cast<unsigned>(r.den());
  Scalar croot = c.nth_root(b);  // principal branch
  Scalar cpow = croot.pow(static_cast<long long>(r.num()));
  Rat rel = prec_ - e;
  PuiseuxSeries u(rel);
  for (size_t i = 1; i < terms_.size(); ++i)
    u.add_term(terms_[i].first - e, terms_[i].second / c);
  // (1+u)^r = sum binom(r,k) u^k
  PuiseuxSeries acc = PuiseuxSeries::constant(Scalar(1), rel);
  if (!u.is_zero()) {
    PuiseuxSeries pw = PuiseuxSeries::constant(Scalar(1), rel);
    Scalar coef(1);
    Rat step = u.terms_.front().first;
    Rat covered(0);
    long long k = 0;
    while (covered < rel) {
      pw = (pw * u).truncated(rel);
      coef = coef * Scalar((r - Rat(k)) / Rat(k + 1));
      ++k;
      if (pw.is_zero()) break;
      PuiseuxSeries add = pw;
      PuiseuxSeries term(rel);
      for (const auto& [ex, co] : add.terms_) term.add_term(ex, co * coef);
      acc += term;
      covered += step;
    }
  }
  PuiseuxSeries out(prec_ - e + e * r);
  for (const auto& [ex, co] : acc.terms_) out.add_term(ex + e * r, co * cpow);
  return out;
}

inline std::string PuiseuxSeries::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [e, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += c.str();
    if (!e.is_zero()) {
      s += "*t^(" + e.num().str() + "/" + e.den().str() + ")";
    }
  }
  return s;
}

}  // namespace qdl
