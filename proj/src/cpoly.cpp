#include "qdl/cpoly.hpp"

#include <cmath>
#include <stdexcept>

namespace qdl {
namespace {

/// Continued-fraction reconstruction of a double as a rational with bounded
/// denominator; returns nullopt when no good approximation exists.
std::optional<Rat> rat_reconstruct(double x, double tol = 1e-8) {
  if (!std::isfinite(x)) return std::nullopt;
  const long long max_den = 1000000000LL;
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    if (fl > 9e17 || fl < -9e17) break;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > max_den || q2 < 0) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - x) <= tol * std::max(1.0, std::abs(x))) return Rat(p1, q1);
    double frac = v - fl;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  return std::nullopt;
}

std::optional<Scalar> gaussian_reconstruct(std::complex<double> z) {
  auto re = rat_reconstruct(z.real());
  auto im = rat_reconstruct(z.imag());
  if (re && im) return Scalar(*re, *im);
  return std::nullopt;
}

std::vector<std::complex<double>> durand_kerner(const CPoly& p) {
  int d = p.degree();
  std::vector<std::complex<double>> c(d + 1);
  for (int i = 0; i <= d; ++i) c[i] = p.coeff(i).to_complex();
  for (int i = 0; i <= d; ++i) c[i] /= c[d];
  std::vector<std::complex<double>> r(d);
  std::complex<double> seed(0.4, 0.9);
  std::complex<double> acc(1, 0);
  for (int i = 0; i < d; ++i) {
    acc *= seed;
    r[i] = acc;
  }
  for (int it = 0; it < 500; ++it) {
    double moved = 0;
    for (int i = 0; i < d; ++i) {
      std::complex<double> val(0, 0);
      // Horner for monic p at r[i]
      val = 1.0;
      for (int k = d - 1; k >= 0; --k) val = val * r[i] + c[k];
      std::complex<double> denom(1, 0);
      for (int j = 0; j < d; ++j)
        if (j != i) denom *= (r[i] - r[j]);
      std::complex<double> delta = val / denom;
      r[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14) break;
  }
  return r;
}

/// Multiplicity of x as a root of p (by derivative vanishing).
int root_multiplicity(const CPoly& p, const Scalar& x) {
  CPoly q = p;
  int m = 0;
  while (!q.is_zero() && q.eval(x).is_zero()) {
    ++m;
    q = q.derivative();
  }
  return m;
}

/// Deflate p by (z - r)^m exactly (coefficients exact, r exact).
CPoly deflate(const CPoly& p, const Scalar& r, int m) {
  CPoly lin({-r, Scalar(1)});
  CPoly q = p;
  for (int k = 0; k < m; ++k) {
    auto [quot, rem] = q.divmod(lin);
    q = quot;
  }
  return q;
}

std::optional<Scalar> find_exact_root(const CPoly& p) {
  int d = p.degree();
  if (d <= 0) return std::nullopt;
  if (d == 1) return -p.coeff(0) / p.coeff(1);
  if (d == 2) {
    Scalar a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
    Scalar disc = b * b - Scalar(4) * a * c;
    auto s = disc.sqrt_exact_qi();
    if (!s) return std::nullopt;
    return (-b + *s) / (Scalar(2) * a);
  }
  // Higher degree: reconstruct numeric roots as Gaussian rationals.
  for (const auto& z : durand_kerner(p)) {
    if (auto cand = gaussian_reconstruct(z)) {
      if (p.eval(*cand).is_zero()) return cand;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::pair<Scalar, int>> croots(const CPoly& p, bool require_exact) {
  if (p.degree() < 1) return {};
  std::vector<std::pair<Scalar, int>> out;
  // Zero roots first.
  CPoly q = p;
  {
    int k = 0;
    while (k <= q.degree() && q.coeff(k).is_zero()) ++k;
    if (k > 0) {
      out.push_back({Scalar(0), k});
      std::vector<Scalar> shift(q.coeffs().begin() + k, q.coeffs().end());
      q = CPoly(std::move(shift));
    }
  }
  if (q.all_exact()) {
    CPoly r = q;
    bool ok = true;
    std::vector<std::pair<Scalar, int>> exact_out;
    while (r.degree() >= 1) {
      auto root = find_exact_root(r);
      if (!root) {
        ok = false;
        break;
      }
      int m = root_multiplicity(r, *root);
      exact_out.push_back({*root, m});
      r = deflate(r, *root, m);
    }
    if (ok) {
      out.insert(out.end(), exact_out.begin(), exact_out.end());
      return out;
    }
    if (require_exact)
      throw ExactUnsupported("croots: roots not in Q(i) for " + p.str());
  }
  // Float path: Durand-Kerner with clustering.
  if (q.degree() >= 1) {
    auto rs = durand_kerner(q);
    std::vector<bool> used(rs.size(), false);
    for (size_t i = 0; i < rs.size(); ++i) {
      if (used[i]) continue;
      std::complex<double> sum = rs[i];
      int cnt = 1;
      used[i] = true;
      for (size_t j = i + 1; j < rs.size(); ++j) {
        if (!used[j] && std::abs(rs[j] - rs[i]) < 1e-6) {
          sum += rs[j];
          ++cnt;
          used[j] = true;
        }
      }
      // the cluster average carries O(sqrt(eps)) noise for a multiple root;
      // polish it as a simple root of the (cnt-1)-th derivative
      std::complex<double> z = sum / static_cast<double>(cnt);
      CPoly d = q;
      for (int k = 1; k < cnt; ++k) d = d.derivative();
      CPoly dd = d.derivative();
      for (int it = 0; it < 32; ++it) {
        std::complex<double> dv = dd.eval(Scalar(z)).to_complex();
        if (std::abs(dv) == 0.0) break;
        std::complex<double> step = d.eval(Scalar(z)).to_complex() / dv;
        z -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) break;
      }
      out.push_back({Scalar(z), cnt});
    }
  }
  return out;
}

void CRatMap::normalize() {
  if (num_.is_zero() && den_.is_zero())
    throw std::domain_error("CRatMap: 0/0");
  if (!num_.is_zero() && !den_.is_zero()) {
    CPoly g = cgcd(num_, den_);
    if (g.degree() >= 1) {
      num_ = num_.divmod(g).first;
      den_ = den_.divmod(g).first;
    }
  }
  if (den_.is_zero()) {
    num_ = CPoly::constant(Scalar(1));
    return;
  }
  Scalar s = den_.lead();
  num_ = num_ * (Scalar(1) / s);
  den_ = den_ * (Scalar(1) / s);
  if (den_.degree() == 0 && !num_.is_zero()) {
    // den is exactly 1 now; nothing further.
  }
}

int CRatMap::local_multiplicity(const CPoint& p) const {
  if (p.inf) {
    size_t d = static_cast<size_t>(degree());
    CRatMap sw(den_.reversed(d), num_.reversed(d));  // 1/f(1/z)
    return sw.local_multiplicity(CPoint::finite(Scalar(0)));
  }
  CPoint w = eval(p);
  CPoly h = w.inf ? den_ : num_ - den_ * w.v;
  return root_multiplicity(h, p.v);
}

CRatMap mobius_inverse(const CRatMap& m) {
  if (m.degree() != 1) throw std::domain_error("mobius_inverse: degree != 1");
  Scalar a = m.num().coeff(1), b = m.num().coeff(0);
  Scalar c = m.den().coeff(1), d = m.den().coeff(0);
  return CRatMap(CPoly({-b, d}), CPoly({a, -c}));
}

}  // namespace qdl
