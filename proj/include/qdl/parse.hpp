#pragma once

#include "qdl/newton.hpp"
#include "qdl/poly.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

namespace qdl {

struct ParseError : std::runtime_error {
  size_t pos;
  ParseError(const std::string& msg, size_t at)
      : std::runtime_error(msg + " (at position " + std::to_string(at) + ")"), pos(at) {}
};

/// Recursive-descent parser for map/series expressions in the variables z
/// (the dynamical variable) and t (the series parameter tau), e.g.
/// "z + 1 + t/z", "-t - (1+t^2)/z + t/z^2", "(1,0)*t^(1/2) + (-1,0)*t".
/// Numbers are rationals or decimals; `i` is the imaginary unit; `(a,b)`
/// denotes the complex scalar a+bi.
class ExprParser {
public:
  ExprParser(std::string text, Backend backend, Rat prec = default_precision())
      : s_(std::move(text)), backend_(backend), prec_(std::move(prec)) {}

  RatMapL parse_map() {
    RatMapL v = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected trailing input", pos_);
    return v;
  }

  PuiseuxSeries parse_series() {
    RatMapL v = parse_map();
    if (v.num.degree() > 0 || v.den.degree() > 0)
      throw ParseError("expected a series, found the variable z", 0);
    if (v.den.is_zero()) throw ParseError("zero denominator", 0);
    PuiseuxSeries d = v.den.coeff(0);
    if (v.num.is_zero()) return PuiseuxSeries::zero(prec_);
    return v.num.coeff(0) / d;
  }

private:
  RatMapL constant(PuiseuxSeries f) {
    return RatMapL{PolyL::constant(std::move(f)),
                   PolyL::constant(PuiseuxSeries::constant(Scalar(1), prec_))};
  }

  static RatMapL add(const RatMapL& a, const RatMapL& b) {
    return RatMapL{a.num * b.den + b.num * a.den, a.den * b.den};
  }
  static RatMapL sub(const RatMapL& a, const RatMapL& b) {
    return RatMapL{a.num * b.den - b.num * a.den, a.den * b.den};
  }
  static RatMapL mul(const RatMapL& a, const RatMapL& b) {
    return RatMapL{a.num * b.num, a.den * b.den};
  }
  RatMapL div(const RatMapL& a, const RatMapL& b) {
    if (b.num.is_zero()) throw ParseError("division by zero", pos_);
    return RatMapL{a.num * b.den, a.den * b.num};
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  RatMapL expr() {
    RatMapL v = term();
    while (true) {
      if (eat('+')) v = add(v, term());
      else if (eat('-')) v = sub(v, term());
      else return v;
    }
  }

  RatMapL term() {
    RatMapL v = factor();
    while (true) {
      if (eat('*')) v = mul(v, factor());
      else if (eat('/')) v = div(v, factor());
      else return v;
    }
  }

  RatMapL factor() {
    if (eat('-')) {
      RatMapL v = factor();
      return RatMapL{-v.num, v.den};
    }
    RatMapL v = atom();
    if (eat('^')) {
      Rat e = exponent();
      v = power(v, e);
    }
    return v;
  }

  RatMapL power(const RatMapL& v, const Rat& e) {
    if (e.is_integer()) {
      long long n = static_cast<long long>(e.num());
      bool neg = n < 0;
      if (neg) n = -n;
      RatMapL r = constant(PuiseuxSeries::constant(Scalar(1), prec_));
      for (long long k = 0; k < n; ++k) r = mul(r, v);
      if (neg) r = RatMapL{r.den, r.num};
      return r;
    }
    // Fractional power: only for pure series values (no z).
    if (v.num.degree() > 0 || v.den.degree() > 0)
      throw ParseError("fractional power of a z-dependent expression", pos_);
    PuiseuxSeries base = v.num.coeff(0) / v.den.coeff(0);
    return constant(base.pow_rational(e));
  }

  /// Exponent: integer, or parenthesized rational like (1/2), or (-3/2).
  Rat exponent() {
    if (eat('(')) {
      Rat n = signed_int();
      Rat d(1);
      if (eat('/')) d = signed_int();
      if (!eat(')')) throw ParseError("expected ')' in exponent", pos_);
      return n / d;
    }
    return signed_int();
  }

  Rat signed_int() {
    skip_ws();
    bool neg = eat('-');
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) throw ParseError("expected an integer", pos_);
    Rat v(BigInt(s_.substr(start, pos_ - start)));
    return neg ? -v : v;
  }

  RatMapL atom() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RatMapL v = expr();
      if (eat(',')) {
        RatMapL im = expr();
        v = add(v, mul(constant(PuiseuxSeries::constant(unit_i(), prec_)), im));
      }
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return v;
    }
    if (c == 'z') {
      ++pos_;
      return RatMapL{PolyL::z(prec_), PolyL::constant(PuiseuxSeries::constant(Scalar(1), prec_))};
    }
    if (c == 't') {
      ++pos_;
      return constant(PuiseuxSeries::tau(prec_));
    }
    if (c == 'i' ) {
      ++pos_;
      return constant(PuiseuxSeries::constant(unit_i(), prec_));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Scalar unit_i() const {
    return backend_ == Backend::Exact ? Scalar::i() : Scalar(std::complex<double>(0, 1));
  }

  RatMapL number() {
    size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    Rat v = Rat::parse(s_.substr(start, pos_ - start));
    Scalar sc = backend_ == Backend::Exact ? Scalar(v) : Scalar::of_double(v.to_double());
    return constant(PuiseuxSeries::constant(sc, prec_));
  }

  std::string s_;
  size_t pos_ = 0;
  Backend backend_;
  Rat prec_;
};

inline RatMapL parse_map(const std::string& text, Backend backend = Backend::Exact,
                         Rat prec = default_precision()) {
  RatMapL m = ExprParser(text, backend, std::move(prec)).parse_map();
  // clearing denominators can leave a common factor; cancel it
  PolyL g = gcdL(m.num, m.den);
  if (g.degree() >= 1) {
    m.num = divmodL(m.num, g).first;
    m.den = divmodL(m.den, g).first;
  }
  return m;
}

inline PuiseuxSeries parse_series(const std::string& text, Backend backend = Backend::Exact,
                                  Rat prec = default_precision()) {
  return ExprParser(text, backend, std::move(prec)).parse_series();
}

}  // namespace qdl
