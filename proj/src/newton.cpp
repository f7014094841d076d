#include "qdl/newton.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdl {
namespace {

struct HullPoint {
  int i;
  Rat v;
};

/// Lower hull, left to right, collinear points merged.
std::vector<HullPoint> lower_hull(const std::vector<HullPoint>& pts) {
  std::vector<HullPoint> h;
  for (const auto& p : pts) {
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h[h.size() - 1];
      // keep b only if strictly below chord a-p
      // cross: (b-a) x (p-a) <= 0 means b on or above the segment -> drop
      Rat cross = (b.v - a.v) * Rat(p.i - a.i) - (p.v - a.v) * Rat(b.i - a.i);
      if (cross.sign() >= 0) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  return h;
}

}  // namespace

NewtonPolygon newton_polygon(const PolyL& p) {
  if (p.is_zero()) throw std::domain_error("newton_polygon: zero polynomial");
  NewtonPolygon np;
  std::vector<HullPoint> pts;
  int first = -1;
  for (int i = 0; i <= p.degree(); ++i) {
    OrdVal o = p.coeff(i).ord();
    if (o.is_inf()) continue;
    if (first < 0) first = i;
    pts.push_back({i, o.finite()});
  }
  np.zero_root_multiplicity = first < 0 ? p.degree() : first;
  if (pts.size() < 2) return np;
  auto hull = lower_hull(pts);
  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    Rat slope = (hull[k + 1].v - hull[k].v) / Rat(hull[k + 1].i - hull[k].i);
    np.segments.push_back({slope, hull[k + 1].i - hull[k].i});
  }
  return np;
}

std::pair<PolyL, PolyL> divmodL(const PolyL& a, const PolyL& b) {
  if (b.is_zero()) throw DivisionByZero("divmodL: zero divisor");
  PolyL r = a;
  std::vector<PuiseuxSeries> qc;
  int qdeg = a.degree() - b.degree();
  if (qdeg < 0) return {PolyL(), r};
  qc.assign(qdeg + 1, PuiseuxSeries::zero(b.coeffs().back().prec()));
  PuiseuxSeries blead_inv = b.coeffs().back().inverse();
  while (!r.is_zero() && r.degree() >= b.degree()) {
    int k = r.degree() - b.degree();
    PuiseuxSeries f = r.coeffs().back() * blead_inv;
    qc[k] = qc[k] + f;
    std::vector<PuiseuxSeries> sub(k + b.coeffs().size(), PuiseuxSeries::zero(f.prec()));
    for (size_t i = 0; i < b.coeffs().size(); ++i) sub[k + i] = b.coeff(i) * f;
    r = r - PolyL(std::move(sub));
  }
  return {PolyL(std::move(qc)), r};
}

PolyL gcdL(PolyL a, PolyL b) {
  auto make_monic = [](const PolyL& p) {
    if (p.is_zero()) return p;
    PuiseuxSeries inv = p.coeffs().back().inverse();
    return p * inv;
  };
  if (a.is_zero()) return make_monic(b);
  if (b.is_zero()) return make_monic(a);
  a = make_monic(a);
  b = make_monic(b);
  while (!b.is_zero()) {
    PolyL r = divmodL(a, b).second;
    a = b;
    b = make_monic(r);
  }
  return make_monic(a);
}

namespace {

PolyL scale_var(const PolyL& p, const Rat& s) { return p.var_scaled(s); }

/// Residual polynomial of the polygon segment starting at index i0 with
/// value v0 and slope sigma.
CPoly residual_poly(const PolyL& p, int i0, const Rat& v0, const Rat& sigma, int len) {
  std::vector<Scalar> c(len + 1, Scalar(0));
  for (int j = 0; j <= len; ++j) {
    int i = i0 + j;
    if (i > p.degree()) break;
    const PuiseuxSeries& a = p.coeff(i);
    Rat want = v0 + sigma * Rat(j);
    if (!a.ord().is_inf() && a.ord().finite() == want) {
      // residue of a * t^{-want}
      c[j] = a.leading_coeff();
    }
  }
  return CPoly(std::move(c));
}

/// Simple-root Newton refinement from the initial approximation r0.
/// Doubles the certified gap each step; returns the refined root.
PuiseuxSeries newton_refine(const PolyL& p, PuiseuxSeries r, const Rat& target) {
  PolyL dp = p.derivative();
  Rat lead_ord = p.coeffs().back().ord_or_prec();
  for (int it = 0; it < 64; ++it) {
    PuiseuxSeries pv = p.eval(r);
    if (pv.is_zero() || pv.ord_or_prec() >= target + lead_ord) return r;
    PuiseuxSeries dv = dp.eval(r);
    if (dv.is_zero())
      throw PrecisionExhausted("newton_refine: derivative vanishes modulo precision");
    r = r - pv / dv;
    // keep the iterate bounded in size
    r = r.truncated(target + Rat(2));
  }
  throw PrecisionExhausted("newton_refine: no convergence to target precision");
}

/// Roots of square-free p with ord strictly greater than `floor_ord`
/// (pass a very negative value for no constraint).
void sf_roots(const PolyL& p, const Rat& floor_ord, bool restrict_positive,
              const Rat& target, std::vector<PuiseuxSeries>& out,
              const PuiseuxSeries& center, const Rat& scale_exp, int depth) {
  if (depth > 64) throw PrecisionExhausted("sf_roots: recursion too deep");
  // polygon of p
  std::vector<std::pair<int, Rat>> pts;
  for (int i = 0; i <= p.degree(); ++i) {
    OrdVal o = p.coeff(i).ord();
    if (!o.is_inf()) pts.push_back({i, o.finite()});
  }
  if (pts.empty()) throw PrecisionExhausted("sf_roots: zero polynomial modulo precision");
  int first = pts.front().first;
  if (first > 0) {
    // w = 0 is a root of this branch polynomial, i.e. the accumulated center
    // is an exact root; ord(+inf) passes every floor constraint.
    out.push_back(center);
  }
  if (pts.size() < 2) return;
  std::vector<HullPoint> hp;
  for (auto& [i, v] : pts) hp.push_back({i, v});
  auto hull = lower_hull(hp);
  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    Rat sigma = (hull[k + 1].v - hull[k].v) / Rat(hull[k + 1].i - hull[k].i);
    Rat s = -sigma;  // root ord
    if (restrict_positive && s.sign() <= 0) continue;
    if (s <= floor_ord) continue;
    int len = hull[k + 1].i - hull[k].i;
    CPoly res = residual_poly(p, hull[k].i, hull[k].v, sigma, len);
    auto rroots = croots(res);
    for (const auto& [c0, mu] : rroots) {
      if (c0.is_zero()) continue;
      PuiseuxSeries c0s = PuiseuxSeries::monomial(c0, scale_exp + s,
                                                  center.prec());
      PuiseuxSeries new_center = center + c0s;
      if (mu == 1) {
        // separated branch: polish by Newton on the original polynomial
        out.push_back(new_center);
      } else {
        // substitute z = t^s (c0 + w) and recurse on ord(w) > 0
        PolyL q = scale_var(p, s).shifted(PuiseuxSeries::constant(c0, center.prec()));
        sf_roots(q, Rat(0), true, target, out, new_center, scale_exp + s, depth + 1);
      }
    }
  }
}

}  // namespace

std::vector<RootL> roots(const PolyL& p, const Rat& target_prec) {
  if (p.degree() < 1) throw std::domain_error("roots: degree < 1");
  std::vector<RootL> out;
  // strip zero roots
  PolyL q = p;
  {
    int k = 0;
    while (k <= q.degree() && q.coeff(k).is_zero()) ++k;
    if (k > 0) {
      out.push_back({PuiseuxSeries::zero(target_prec), k});
      std::vector<PuiseuxSeries> c(q.coeffs().begin() + k, q.coeffs().end());
      q = PolyL(std::move(c));
    }
  }
  if (q.degree() < 1) return out;

  // square-free decomposition via gcd with the derivative
  PolyL g = gcdL(q, q.derivative());
  PolyL sf = g.degree() >= 1 ? divmodL(q, g).first : q;

  std::vector<PuiseuxSeries> approx;
  sf_roots(sf, Rat(-1000000), false, target_prec, approx,
           PuiseuxSeries::zero(target_prec), Rat(0), 0);

  // multiplicities: 1 + multiplicity in g, matched by root refinement of g
  std::vector<PuiseuxSeries> groots;
  if (g.degree() >= 1) {
    PolyL gg = gcdL(g, g.derivative());
    PolyL gsf = gg.degree() >= 1 ? divmodL(g, gg).first : g;
    sf_roots(gsf, Rat(-1000000), false, target_prec, groots,
             PuiseuxSeries::zero(target_prec), Rat(0), 0);
  }

  Rat lead_ord = q.coeffs().back().ord_or_prec();
  int total = 0;
  for (auto& r0 : approx) {
    PuiseuxSeries r = newton_refine(sf, r0, target_prec);
    // final certificate against q itself
    PuiseuxSeries res = q.eval(r);
    if (!res.is_zero() && res.ord_or_prec() < target_prec + lead_ord)
      r = newton_refine(q, r, target_prec);
    int mult = 1;
    for (const auto& gr : groots) {
      PuiseuxSeries diff = r - gr;
      if (diff.is_zero() || diff.ord_or_prec() >= std::min(target_prec, Rat(8))) {
        // count multiplicity of this root inside g by derivative vanishing
        PolyL d = g;
        int m = 0;
        while (!d.is_zero() && d.degree() >= 0) {
          PuiseuxSeries v = d.eval(r);
          Rat dl = d.coeffs().back().ord_or_prec();
          if (v.is_zero() || v.ord_or_prec() >= std::min(target_prec, Rat(8)) + dl) {
            ++m;
            if (d.degree() == 0) break;
            d = d.derivative();
          } else {
            break;
          }
        }
        mult += m;
        break;
      }
    }
    out.push_back({r, mult});
    total += mult;
  }
  int sum = 0;
  for (const auto& r : out) sum += r.multiplicity;
  if (sum != p.degree())
    throw PrecisionExhausted("roots: multiplicities sum to " + std::to_string(sum) +
                             ", expected " + std::to_string(p.degree()));
  return out;
}

}  // namespace qdl
