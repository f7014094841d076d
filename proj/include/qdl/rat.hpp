#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace qdl {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational, always kept in lowest terms with den > 0.
class Rat {
public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}
  Rat(BigInt n) : num_(std::move(n)), den_(1) {}
  Rat(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
  Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ == 0 ? 0 : (num_ > 0 ? 1 : -1); }

  Rat operator-() const { return Rat(-num_, den_, no_norm{}); }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return Rat(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
    return Rat(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rat& operator+=(const Rat& o) { return *this = *this + o; }
  Rat& operator-=(const Rat& o) { return *this = *this - o; }
  Rat& operator*=(const Rat& o) { return *this = *this * o; }
  Rat& operator/=(const Rat& o) { return *this = *this / o; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  /// Floor as BigInt.
  BigInt floor() const {
    BigInt q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "a/b" or "a" when integral.
  std::string str() const {
    std::string s = num_.str();
    if (den_ != 1) s += "/" + den_.str();
    return s;
  }

  /// Parses "a", "a/b" or a decimal like "-1.25".
  static Rat parse(const std::string& s);

  /// Exact square root if it exists.
  std::optional<Rat> sqrt_exact() const;

  /// Exact n-th root if it exists (n >= 1); for negative values only odd n.
  std::optional<Rat> nth_root_exact(unsigned n) const;

private:
  struct no_norm {};
  Rat(BigInt n, BigInt d, no_norm) : num_(std::move(n)), den_(std::move(d)) {}

  void normalize() {
    if (den_ == 0) throw std::domain_error("Rat: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    BigInt g = boost::multiprecision::gcd(num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  BigInt num_, den_;
};

inline Rat Rat::parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (neg) ip = ip.substr(1);
    if (ip.empty()) ip = "0";
    BigInt den = 1;
    for (size_t i = 0; i < fp.size(); ++i) den *= 10;
    BigInt num = BigInt(ip) * den + (fp.empty() ? BigInt(0) : BigInt(fp));
    if (neg) num = -num;
    return Rat(num, den);
  }
  return Rat(BigInt(s));
}

inline std::optional<BigInt> isqrt_exact(const BigInt& n) {
  if (n < 0) return std::nullopt;
  BigInt r = boost::multiprecision::sqrt(n);
  if (r * r == n) return r;
  return std::nullopt;
}

inline std::optional<Rat> Rat::sqrt_exact() const {
  if (num_ < 0) return std::nullopt;
  auto rn = isqrt_exact(num_);
  auto rd = isqrt_exact(den_);
  if (rn && rd) return Rat(*rn, *rd);
  return std::nullopt;
}

inline std::optional<BigInt> iroot_exact(const BigInt& n, unsigned k) {
  if (n == 0) return BigInt(0);
  bool neg = n < 0;
  if (neg && k % 2 == 0) return std::nullopt;
  BigInt a = boost::multiprecision::abs(n);
  // Newton iteration on integers.
  BigInt x = 1;
  x <<= (static_cast<unsigned>(boost::multiprecision::msb(a)) / k + 1);
  while (true) {
    BigInt xk = boost::multiprecision::pow(x, k - 1);
    BigInt nx = ((k - 1) * x * xk + a) / (k * xk);
    if (nx >= x) break;
    x = nx;
  }
  if (boost::multiprecision::pow(x, k) == a) return neg ? -x : x;
  return std::nullopt;
}

inline std::optional<Rat> Rat::nth_root_exact(unsigned n) const {
  if (n == 1) return *this;
  auto rn = iroot_exact(num_, n);
  auto rd = iroot_exact(den_, n);
  if (rn && rd) return Rat(*rn, *rd);
  return std::nullopt;
}

/// Extended rational with +infinity, used for valuations.
struct OrdVal {
  bool inf = false;
  Rat v;

  OrdVal() : inf(true) {}
  OrdVal(Rat r) : inf(false), v(std::move(r)) {}
  static OrdVal infinity() { return OrdVal(); }

  bool is_inf() const { return inf; }
  const Rat& finite() const {
    if (inf) throw std::domain_error("OrdVal: infinite");
    return v;
  }

  friend bool operator==(const OrdVal& a, const OrdVal& b) {
    if (a.inf || b.inf) return a.inf && b.inf;
    return a.v == b.v;
  }
  friend bool operator<(const OrdVal& a, const OrdVal& b) {
    if (a.inf) return false;
    if (b.inf) return true;
    return a.v < b.v;
  }
  friend bool operator<=(const OrdVal& a, const OrdVal& b) { return a < b || a == b; }
  friend bool operator>=(const OrdVal& a, const OrdVal& b) { return b <= a; }
  friend bool operator>(const OrdVal& a, const OrdVal& b) { return b < a; }

  friend OrdVal operator+(const OrdVal& a, const OrdVal& b) {
    if (a.inf || b.inf) return infinity();
    return OrdVal(a.v + b.v);
  }

  std::string str() const { return inf ? "+inf" : v.str(); }
};

}  // namespace qdl
