#include "qdl/berkovich.hpp"

#include "qdl/newton.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdl {

Rat join_exponent(const TypeIIPoint& x, const TypeIIPoint& y) {
  Rat j = std::min(x.alpha, y.alpha);
  OrdVal o = (x.center - y.center).ord();
  if (!o.is_inf() && o.finite() < j) j = o.finite();
  return j;
}

TypeIIPoint join(const TypeIIPoint& x, const TypeIIPoint& y) {
  return TypeIIPoint::make(x.center, join_exponent(x, y));
}

bool contains(const TypeIIPoint& outer, const TypeIIPoint& inner) {
  if (outer.alpha > inner.alpha) return false;
  OrdVal o = (outer.center - inner.center).ord();
  return o.is_inf() || o.finite() >= outer.alpha;
}

Rat hyperbolic_distance(const TypeIIPoint& x, const TypeIIPoint& y) {
  Rat j = join_exponent(x, y);
  return (x.alpha - j) + (y.alpha - j);
}

Slot slot_of(const TypeIIPoint& x, const PointL& p) {
  if (p.infinite) return Slot::infinity();
  PuiseuxSeries d = p.value - x.center;
  OrdVal o = d.ord();
  if (o.is_inf() || o.finite() >= x.alpha) return Slot::finite(d.coeff(x.alpha));
  return Slot::infinity();
}

Slot slot_of_point(const TypeIIPoint& x, const TypeIIPoint& y) {
  if (x == y) throw std::domain_error("slot_of_point: identical points");
  PuiseuxSeries d = y.center - x.center;
  OrdVal o = d.ord();
  if (y.alpha > x.alpha && (o.is_inf() || o.finite() >= x.alpha))
    return Slot::finite(d.coeff(x.alpha));
  return Slot::infinity();
}

namespace {

/// Least ord over the coefficients; fails when a coefficient that is zero
/// modulo precision could hide terms below the least certified ord.
bool poly_level(const PolyL& p, Rat& level) {
  bool have = false;
  Rat v(0), minprec(0);
  bool have_prec = false;
  for (int i = 0; i <= p.degree(); ++i) {
    const PuiseuxSeries& c = p.coeff(i);
    if (!have_prec || c.prec() < minprec) minprec = c.prec();
    have_prec = true;
    OrdVal o = c.ord();
    if (o.is_inf()) continue;
    if (!have || o.finite() < v) v = o.finite();
    have = true;
  }
  if (!have || v >= minprec) return false;
  level = v;
  return true;
}

/// Residues of the coefficients at the given level.
CPoly level_residues(const PolyL& p, const Rat& level) {
  std::vector<Scalar> c(p.degree() + 1, Scalar(0));
  for (int i = 0; i <= p.degree(); ++i) c[i] = p.coeff(i).coeff(level);
  return CPoly(std::move(c));
}

const Rat kRayPrec = Rat(100000);

}  // namespace

MapAtPoint map_point_full(const RatMapL& phi, const TypeIIPoint& x) {
  PolyL A = phi.num.shifted(x.center).var_scaled(x.alpha);
  PolyL B = phi.den.shifted(x.center).var_scaled(x.alpha);
  Rat vB;
  if (!poly_level(B, vB))
    throw PrecisionExhausted("map_point: denominator vanishes modulo precision");
  CPoly Bn = level_residues(B, vB);
  PuiseuxSeries c_acc = PuiseuxSeries::zero(kRayPrec);
  for (int it = 0; it < 1000; ++it) {
    Rat vA;
    if (!poly_level(A, vA))
      throw PrecisionExhausted("map_point: recentering cancelled all certified terms");
    Rat v = vA - vB;
    CRatMap g(level_residues(A, vA), Bn);
    if (g.degree() >= 1) return {TypeIIPoint::make(c_acc, v), g, g.degree()};
    Scalar k = g.num().coeff(0) / g.den().coeff(0);
    c_acc.add_term(v, k);
    A = A - B * PuiseuxSeries::monomial(k, v, v + kRayPrec);
  }
  throw PrecisionExhausted("map_point: no stabilization");
}

TypeIIPoint map_point(const RatMapL& phi, const TypeIIPoint& x) {
  return map_point_full(phi, x).image;
}

CRatMap tangent_map(const RatMapL& phi, const TypeIIPoint& x) {
  return map_point_full(phi, x).tangent;
}

int local_degree(const RatMapL& phi, const TypeIIPoint& x) {
  return map_point_full(phi, x).degree;
}

std::vector<std::pair<PointL, int>> critical_points(const RatMapL& phi) {
  PolyL W = phi.num.derivative() * phi.den - phi.num * phi.den.derivative();
  std::vector<std::pair<PointL, int>> out;
  int found = 0;
  if (W.degree() >= 1) {
    for (const auto& r : roots(W, Rat(16))) {
      out.push_back({PointL::finite(r.value), r.multiplicity});
      found += r.multiplicity;
    }
  }
  int expected = 2 * phi.degree() - 2;
  if (found < expected) out.push_back({PointL::at_infinity(), expected - found});
  return out;
}

DirectionClass classify_direction(const RatMapL& phi, const TypeIIPoint& x, const Slot& s) {
  MapAtPoint m = map_point_full(phi, x);
  if (m.degree == 1) {
    // the critical points share a slot; that direction covers everything
    Slot cs = slot_of(x, critical_points(phi).front().first);
    if (s == cs) return {true, Slot(), 0, 1};
  }
  CPoint p = s.to_cpoint();
  return {false, Slot::of_cpoint(m.tangent.eval(p)), m.tangent.local_multiplicity(p), 0};
}

std::vector<Rat> ray_solutions(const PolyL& A, const PolyL& B, const Rat& slope, const Rat& cst) {
  struct Line {
    Rat m, b;  // beta -> m*beta + b
  };
  auto lines_of = [](const PolyL& p) {
    std::vector<Line> ls;
    for (int i = 0; i <= p.degree(); ++i) {
      OrdVal o = p.coeff(i).ord();
      if (!o.is_inf()) ls.push_back({Rat(i), o.finite()});
    }
    return ls;
  };
  std::vector<Line> la = lines_of(A), lb = lines_of(B);
  if (la.empty() || lb.empty()) return {};
  auto env = [](const std::vector<Line>& ls, const Rat& beta) {
    Rat best = ls[0].m * beta + ls[0].b;
    for (const auto& l : ls) best = std::min(best, l.m * beta + l.b);
    return best;
  };
  auto fval = [&](const Rat& beta) {
    return env(la, beta) - env(lb, beta) - (slope * beta + cst);
  };
  auto argmin = [](const std::vector<Line>& ls, const Rat& beta) {
    Line best = ls[0];
    for (const auto& l : ls)
      if (l.m * beta + l.b < best.m * beta + best.b) best = l;
    return best;
  };

  // breakpoints: pairwise crossings of every line, including the right side
  std::vector<Line> all = la;
  all.insert(all.end(), lb.begin(), lb.end());
  all.push_back({slope, cst});
  std::vector<Rat> bps;
  for (size_t i = 0; i < all.size(); ++i)
    for (size_t j = i + 1; j < all.size(); ++j)
      if (all[i].m != all[j].m) bps.push_back((all[j].b - all[i].b) / (all[i].m - all[j].m));
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  std::vector<Rat> cands;
  auto try_beta = [&](const Rat& beta) {
    if (fval(beta).is_zero()) cands.push_back(beta);
  };
  for (const auto& b : bps) try_beta(b);
  std::vector<Rat> samples;
  if (bps.empty()) {
    samples.push_back(Rat(0));
  } else {
    samples.push_back(bps.front() - Rat(1));
    for (size_t i = 0; i + 1 < bps.size(); ++i) samples.push_back((bps[i] + bps[i + 1]) / Rat(2));
    samples.push_back(bps.back() + Rat(1));
  }
  for (const auto& s : samples) {
    Line a = argmin(la, s), b = argmin(lb, s);
    Rat dm = a.m - b.m - slope;
    if (!dm.is_zero()) {
      try_beta((cst - (a.b - b.b)) / dm);
    } else if (fval(s).is_zero()) {
      cands.push_back(s);  // degenerate piece, constant and matching
    }
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  return cands;
}

std::vector<std::pair<TypeIIPoint, int>> preimages(const RatMapL& phi, const TypeIIPoint& x) {
  // Every preimage ball contains a rigid preimage of the target center or a
  // pole; those rigid points seed the rays to search.
  std::vector<PuiseuxSeries> seeds;
  PolyL E = phi.num - phi.den * x.center;
  if (E.degree() >= 1)
    for (const auto& r : roots(E, Rat(16))) seeds.push_back(r.value);
  if (phi.den.degree() >= 1)
    for (const auto& r : roots(phi.den, Rat(16))) seeds.push_back(r.value);

  std::vector<std::pair<TypeIIPoint, int>> out;
  int total = 0;
  for (const auto& seed : seeds) {
    PolyL A = E.shifted(seed);
    PolyL B = phi.den.shifted(seed);
    for (const Rat& beta : ray_solutions(A, B, Rat(0), x.alpha)) {
      TypeIIPoint y = TypeIIPoint::make(seed, beta);
      bool dup = false;
      for (const auto& [p, m] : out)
        if (p == y) dup = true;
      if (dup) continue;
      try {
        MapAtPoint m = map_point_full(phi, y);
        if (m.image == x) {
          out.push_back({y, m.degree});
          total += m.degree;
        }
      } catch (const PrecisionExhausted&) {
        // uncertifiable candidate; the total check below reports failure
      }
    }
  }
  if (total != phi.degree())
    throw PrecisionExhausted("preimages: found total multiplicity " + std::to_string(total));
  return out;
}

std::vector<TypeIIPoint> fixed_points_on_ray(const RatMapL& phi, const PuiseuxSeries& c) {
  PolyL A = (phi.num - phi.den * c).shifted(c);
  PolyL B = phi.den.shifted(c);
  std::vector<TypeIIPoint> out;
  for (const Rat& beta : ray_solutions(A, B, Rat(1), Rat(0))) {
    TypeIIPoint y = TypeIIPoint::make(c, beta);
    try {
      if (map_point(phi, y) == y) out.push_back(y);
    } catch (const PrecisionExhausted&) {
    }
  }
  return out;
}

}  // namespace qdl
