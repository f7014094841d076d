#include "qdl/classifier.hpp"

#include "qdl/newton.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qdl {

std::string case_name(CaseKind k) {
  switch (k) {
    case CaseKind::Simple: return "Simple";
    case CaseKind::AttractingShift: return "AttractingShift";
    case CaseKind::IndifferentOrbit: return "IndifferentOrbit";
    case CaseKind::OneRepelling: return "OneRepelling";
    case CaseKind::TwoRepelling: return "TwoRepelling";
  }
  return "?";
}

// ---------------------------------------------------------------- shift models

ShiftModel subshift_sigma_q(int q) {
  if (q < 1) throw std::domain_error("subshift_sigma_q: q >= 1 required");
  ShiftModel m;
  m.q = q;
  auto X = [](int j) { return "X" + std::to_string(j); };
  auto Y = [](int j) { return "Y" + std::to_string(j); };
  for (int j = 0; j < q; ++j) m.symbols.push_back(X(j));
  for (int j = 0; j < q; ++j) m.symbols.push_back(Y(j));
  auto add = [&](const std::string& from, const std::string& to) {
    Transition t{from, to};
    for (const auto& u : m.transitions)
      if (u == t) return;
    m.transitions.push_back(t);
  };
  for (int j = 0; j < q; ++j) add(X(j), X((j + 1) % q));
  for (int j = 0; j < q; ++j) add(X(q - 1), Y(j));
  for (int j = 0; j < q; ++j) add(Y(j), X(j));
  for (int j = 0; j < q; ++j) add(Y(0), Y(j));
  m.factor_map = "X_j -> X, Y_j -> Y; q-to-one exactly over the backward orbit of X^inf";
  return m;
}

ShiftModel full_two_shift() {
  ShiftModel m;
  m.q = 0;
  m.symbols = {"X", "Y"};
  m.transitions = {{"X", "X"}, {"X", "Y"}, {"Y", "X"}, {"Y", "Y"}};
  m.factor_map = "identity";
  return m;
}

// ---------------------------------------------------------------- small helpers

namespace {

Rat map_precision(const RatMapL& phi) {
  Rat p = default_precision();
  bool first = true;
  for (const PolyL* q : {&phi.num, &phi.den})
    for (const auto& c : q->coeffs()) {
      if (first || c.prec() < p) p = c.prec();
      first = false;
    }
  return p;
}

bool map_is_exact(const RatMapL& phi) {
  for (const PolyL* q : {&phi.num, &phi.den})
    for (const auto& c : q->coeffs())
      for (const auto& [e, s] : c.terms())
        if (!s.exact()) return false;
  return true;
}

/// Image of a type-II point under the chart swap z -> 1/z.
TypeIIPoint invert_point(const TypeIIPoint& x) {
  OrdVal o = x.center.ord();
  if (o.is_inf()) return TypeIIPoint::make(PuiseuxSeries::zero(x.center.prec()), -x.alpha);
  Rat v = o.finite();
  return TypeIIPoint::make(x.center.inverse(), x.alpha - Rat(2) * v);
}

RatMapL iterate_map(const RatMapL& phi, int k) {
  RatMapL r = phi;
  for (int i = 1; i < k; ++i) r = phi.compose(r);
  return r;
}

/// phi(z) - z as a polynomial numerator: num - z * den.
PolyL fixed_point_poly(const RatMapL& phi) {
  int d = std::max(phi.num.degree(), phi.den.degree() + 1);
  std::vector<PuiseuxSeries> fc;
  for (int i = 0; i <= d; ++i) {
    PuiseuxSeries v = phi.num.coeff(i);
    if (i >= 1) v = v - phi.den.coeff(i - 1);
    fc.push_back(std::move(v));
  }
  return PolyL(std::move(fc));
}

FixedKind kind_of_multiplier(const PuiseuxSeries& m) {
  OrdVal o = m.ord();
  if (o.is_inf() || o.finite() > Rat(0)) return FixedKind::Attracting;
  if (o.finite() < Rat(0)) return FixedKind::Repelling;
  return FixedKind::Indifferent;
}

/// Smallest k in [1, bound] with T^k = id; 0 when there is none.
int mobius_order(const CRatMap& T, int bound) {
  CRatMap acc = T;
  for (int k = 1; k <= bound; ++k) {
    if (acc.is_identity()) return k;
    acc = T.compose(acc);
  }
  return 0;
}

CPoly fixed_slot_poly(const CRatMap& T) { return T.num() - CPoly::z() * T.den(); }

std::vector<CPoint> multiple_fixed_points(const CRatMap& T) {
  CPoly Fz = fixed_slot_poly(T);
  std::vector<CPoint> out;
  if (Fz.is_zero()) return out;  // identity: every point fixed
  for (const auto& [v, m] : croots(Fz))
    if (m >= 2) out.push_back(CPoint::finite(v));
  int inf_mult = T.degree() + 1 - Fz.degree();
  if (inf_mult >= 2) out.push_back(CPoint::infinity());
  return out;
}

/// The boundary point crossed first when travelling from the rigid point a
/// towards theta, among the given candidates; empty when no candidate
/// separates a from theta.
std::optional<TypeIIPoint> first_crossed(const PointL& a, const TypeIIPoint& th,
                                         const std::vector<TypeIIPoint>& cands) {
  std::optional<TypeIIPoint> best;
  auto on_center_ray = [](const PuiseuxSeries& c, const TypeIIPoint& y) {
    OrdVal o = (c - y.center).ord();
    return o.is_inf() || o.finite() >= y.alpha;
  };
  if (a.infinite) {
    // path descends along the theta ray from huge balls to theta
    for (const auto& y : cands)
      if (on_center_ray(th.center, y) && y.alpha <= th.alpha)
        if (!best || y.alpha < best->alpha) best = y;
    return best;
  }
  OrdVal oj = (a.value - th.center).ord();
  Rat j = th.alpha;
  if (!oj.is_inf() && oj.finite() < j) j = oj.finite();
  // leg 1: the ray above a, from a up to the join; nearest first = largest alpha
  for (const auto& y : cands)
    if (on_center_ray(a.value, y) && y.alpha >= j)
      if (!best || y.alpha > best->alpha) best = y;
  if (best) return best;
  // leg 2: from the join down the theta ray; nearest first = smallest alpha
  for (const auto& y : cands)
    if (on_center_ray(th.center, y) && y.alpha >= j && y.alpha <= th.alpha)
      if (!best || y.alpha < best->alpha) best = y;
  return best;
}

}  // namespace

// ---------------------------------------------------------------- fixed points

std::vector<FixedPointEntry> fixed_points_with_multipliers(const RatMapL& phi) {
  PolyL F = fixed_point_poly(phi);
  if (F.is_zero()) throw std::domain_error("fixed_points_with_multipliers: identity map");
  PolyL W = phi.num.derivative() * phi.den - phi.num * phi.den.derivative();
  std::vector<FixedPointEntry> out;
  int found = 0;
  if (F.degree() >= 1) {
    for (const auto& r : roots(F, Rat(16))) {
      found += r.multiplicity;
      PuiseuxSeries mult;
      if (r.multiplicity > 1) {
        mult = PuiseuxSeries::constant(Scalar(1), map_precision(phi));
      } else {
        PuiseuxSeries dd = phi.den.eval(r.value);
        mult = W.eval(r.value) / (dd * dd);
      }
      FixedKind k = kind_of_multiplier(mult);
      out.push_back({PointL::finite(r.value), r.multiplicity, std::move(mult), k});
    }
  }
  int total = phi.degree() + 1;
  if (found < total) {
    int m = total - found;
    PuiseuxSeries mult;
    if (m > 1) {
      mult = PuiseuxSeries::constant(Scalar(1), map_precision(phi));
    } else {
      RatMapL psi = phi.chart_swapped();
      PolyL Wp = psi.num.derivative() * psi.den - psi.num * psi.den.derivative();
      PuiseuxSeries z0 = PuiseuxSeries::zero(map_precision(phi));
      PuiseuxSeries dd = psi.den.eval(z0);
      mult = Wp.eval(z0) / (dd * dd);
    }
    FixedKind k = kind_of_multiplier(mult);
    out.push_back({PointL::at_infinity(), m, std::move(mult), k});
  }
  return out;
}

int fixed_slot_multiplicity(const CRatMap& T, const CPoint& p) {
  CPoly Fz = fixed_slot_poly(T);
  if (Fz.is_zero()) throw std::domain_error("fixed_slot_multiplicity: identity map");
  int total = T.degree() + 1;
  if (p.inf) return total - Fz.degree();
  int m = 0;
  CPoly cur = Fz;
  CPoly lin({-p.v, Scalar(1)});
  while (!cur.is_zero()) {
    auto [q, r] = cur.divmod(lin);
    if (!r.is_zero()) break;
    cur = q;
    ++m;
  }
  return m;
}

// ---------------------------------------------------------------- Julia test

JuliaResult julia_membership_indifferent(const RatMapL& phi, const TypeIIPoint& x, int period,
                                         int horizon) {
  (void)horizon;
  std::vector<TypeIIPoint> orbit{x};
  std::vector<MapAtPoint> steps;
  TypeIIPoint cur = x;
  for (int i = 0; i < period; ++i) {
    MapAtPoint m = map_point_full(phi, cur);
    steps.push_back(m);
    cur = m.image;
    if (i + 1 < period) orbit.push_back(cur);
  }
  if (!(cur == x))
    throw std::domain_error("julia_membership_indifferent: point not periodic of the given period");
  bool exact = true;
  int degprod = 1;
  for (const auto& s : steps) {
    degprod *= s.degree;
    exact = exact && s.tangent.num().all_exact() && s.tangent.den().all_exact();
  }
  if (degprod == 2) return {JuliaOutcome::Julia, exact};

  // tangent return map and the bad slots pulled back to x
  CRatMap T;
  for (const auto& s : steps) T = s.tangent.compose(T);
  PointL crit = critical_points(phi).front().first;
  std::vector<CPoint> bads;
  for (int i = 0; i < period; ++i) {
    CPoint b = slot_of(orbit[i], crit).to_cpoint();
    for (int j = i - 1; j >= 0; --j) b = mobius_inverse(steps[j].tangent).eval(b);
    bads.push_back(b);
  }
  // a Moebius orbit is finite iff the map has finite order or the seed is
  // fixed (invertibility rules out strict preperiodicity; an exact Q(i)
  // multiplier that is a root of unity has order <= 12)
  bool finite_order = T.is_identity() || mobius_order(T, 24) > 0;
  for (const auto& b : bads) {
    if (finite_order) break;
    if (T.eval(b) == b) continue;
    return {JuliaOutcome::Julia, exact};
  }
  return {JuliaOutcome::Fatou, exact};
}

// ---------------------------------------------------------------- Rivera search

namespace {

std::vector<TypeIIPoint> fixed_typeII_candidates(const RatMapL& phi) {
  Rat prec = map_precision(phi);
  std::vector<PuiseuxSeries> seeds;
  bool seed_inf = false;
  for (const auto& [p, m] : critical_points(phi)) {
    if (p.infinite) seed_inf = true;
    else seeds.push_back(p.value);
  }
  PolyL F = fixed_point_poly(phi);
  int found = 0;
  if (F.degree() >= 1) {
    for (const auto& r : roots(F, Rat(16))) {
      seeds.push_back(r.value);
      found += r.multiplicity;
    }
  }
  if (found < phi.degree() + 1) seed_inf = true;

  std::vector<TypeIIPoint> out;
  auto push = [&](const TypeIIPoint& y) {
    for (const auto& o : out)
      if (o == y) return;
    out.push_back(y);
  };
  for (const auto& c : seeds)
    for (const auto& y : fixed_points_on_ray(phi, c)) push(y);
  if (seed_inf) {
    RatMapL psi = phi.chart_swapped();
    for (const auto& y : fixed_points_on_ray(psi, PuiseuxSeries::zero(prec))) {
      TypeIIPoint cand = invert_point(y);
      try {
        if (map_point(phi, cand) == cand) push(cand);
      } catch (const PrecisionExhausted&) {
      }
    }
  }
  return out;
}

/// Fixed Fatou ball directions at a degree-one Julia fixed point: fixed slots
/// of the tangent map, excluding the bad direction and the directions holding
/// the other preimages of x.
std::vector<Direction> fixed_ball_domains(const RatMapL& phi, const TypeIIPoint& x) {
  MapAtPoint m = map_point_full(phi, x);
  CPoly Fz = fixed_slot_poly(m.tangent);
  std::vector<Slot> cands;
  if (!Fz.is_zero())
    for (const auto& [v, mu] : croots(Fz)) cands.push_back(Slot::finite(v));
  if (m.tangent.den().degree() == 0) cands.push_back(Slot::infinity());
  std::vector<Slot> excl;
  excl.push_back(slot_of(x, critical_points(phi).front().first));
  for (const auto& [y, mu] : preimages(phi, x))
    if (!(y == x)) excl.push_back(slot_of_point(x, y));
  std::vector<Direction> out;
  for (const auto& s : cands) {
    bool skip = false;
    for (const auto& e : excl)
      if (s == e) skip = true;
    if (skip) continue;
    DirectionClass dc = classify_direction(phi, x, s);
    if (!dc.bad && dc.degree == 1 && dc.image == s) out.push_back({x, s});
  }
  return out;
}

std::optional<RiveraData> starlike_orbit_search(const RatMapL& phi, const TypeIIPoint& th, int q) {
  RatMapL pq = iterate_map(phi, q);
  Rat prec = map_precision(phi);
  std::vector<TypeIIPoint> fps;
  auto push = [&](const TypeIIPoint& y) {
    for (const auto& o : fps)
      if (o == y) return;
    fps.push_back(y);
  };
  bool crit_inf = false;
  for (const auto& [p, m] : critical_points(phi)) {
    if (p.infinite) {
      crit_inf = true;
      continue;
    }
    for (const auto& y : fixed_points_on_ray(pq, p.value)) push(y);
  }
  if (crit_inf) {
    RatMapL psiq = pq.chart_swapped();
    for (const auto& y : fixed_points_on_ray(psiq, PuiseuxSeries::zero(prec))) {
      TypeIIPoint cand = invert_point(y);
      try {
        if (map_point(pq, cand) == cand) push(cand);
      } catch (const PrecisionExhausted&) {
      }
    }
  }

  std::vector<std::vector<TypeIIPoint>> orbits;
  auto used = [&](const TypeIIPoint& y) {
    for (const auto& orb : orbits)
      for (const auto& p : orb)
        if (p == y) return true;
    return false;
  };
  for (const auto& y : fps) {
    if (y == th || used(y)) continue;
    try {
      std::vector<TypeIIPoint> orb{y};
      int period = 0;
      TypeIIPoint cur = y;
      for (int i = 1; i <= q; ++i) {
        cur = map_point(phi, cur);
        if (cur == y) {
          period = i;
          break;
        }
        orb.push_back(cur);
      }
      if (period == q) orbits.push_back(orb);
    } catch (const PrecisionExhausted&) {
    }
  }
  if (orbits.empty()) return std::nullopt;

  // prefer the orbit carrying the local-degree-2 point, rotated to the front
  for (auto& orb : orbits) {
    int hot = -1;
    bool ok = true;
    for (size_t i = 0; i < orb.size(); ++i) {
      try {
        if (local_degree(phi, orb[i]) == 2) hot = static_cast<int>(i);
      } catch (const PrecisionExhausted&) {
        ok = false;
      }
    }
    if (!ok) continue;
    if (hot > 0) std::rotate(orb.begin(), orb.begin() + hot, orb.end());
    if (hot >= 0) {
      RiveraData rd{th, orb, q, orb, {}};
      return rd;
    }
  }
  RiveraData rd{th, orbits.front(), q, orbits.front(), {}};
  return rd;
}

}  // namespace

RiveraResult find_fixed_rivera_domain(const RatMapL& phi, int depth_bound) {
  (void)depth_bound;
  RiveraResult res;
  std::vector<TypeIIPoint> cands = fixed_typeII_candidates(phi);
  // simple case: a fixed point of local degree two swallows the Julia set
  for (const auto& x : cands) {
    try {
      if (local_degree(phi, x) == 2) {
        res.outcome = RiveraOutcome::SimpleCase;
        res.simple_point = x;
        return res;
      }
    } catch (const PrecisionExhausted&) {
    }
  }
  // attracting rigid fixed point: Cantor Julia set, no Rivera domain
  for (const auto& e : fixed_points_with_multipliers(phi)) {
    if (e.kind == FixedKind::Attracting) {
      res.outcome = RiveraOutcome::AttractingCase;
      res.attractor = e.point;
      return res;
    }
  }
  for (const auto& x : cands) {
    CRatMap T;
    try {
      T = tangent_map(phi, x);
    } catch (const PrecisionExhausted&) {
      continue;
    }
    int order = mobius_order(T, 24);
    if (order >= 2) {
      if (order > 8)
        throw SearchBoundExceeded("find_fixed_rivera_domain: rotation order " +
                                  std::to_string(order) + " exceeds the composition guard");
      if (auto rd = starlike_orbit_search(phi, x, order)) {
        res.outcome = RiveraOutcome::Found;
        res.data = *rd;
        return res;
      }
    } else {
      JuliaResult jr = julia_membership_indifferent(phi, x, 1);
      if (jr.outcome == JuliaOutcome::Julia) {
        RiveraData rd;
        rd.theta0 = x;
        rd.orbit = {x};
        rd.q = 1;
        rd.skeleton = {x};
        rd.ball_domains = fixed_ball_domains(phi, x);
        res.outcome = RiveraOutcome::Found;
        res.data = rd;
        return res;
      }
    }
  }
  return res;
}

// ---------------------------------------------------------------- piece tracking

CriticalTrack track_critical_piece(const RatMapL& phi, const RiveraData& rd, const PointL& crit,
                                   int levels) {
  CriticalTrack tr;
  std::vector<PointL> w{crit};
  for (int n = 1; n <= levels; ++n) {
    try {
      w.push_back(phi.eval(w.back()));
    } catch (const PrecisionExhausted&) {
      break;
    }
  }
  int cols = static_cast<int>(w.size()) - 1;

  std::vector<std::pair<TypeIIPoint, std::vector<TypeIIPoint>>> memo;
  auto preimages_of = [&](const TypeIIPoint& x) -> const std::vector<TypeIIPoint>* {
    for (const auto& [k, v] : memo)
      if (k == x) return &v;
    try {
      std::vector<TypeIIPoint> pts;
      for (const auto& [y, m] : preimages(phi, x)) pts.push_back(y);
      memo.push_back({x, std::move(pts)});
      return &memo.back().second;
    } catch (const PrecisionExhausted&) {
      return nullptr;
    }
  };

  std::vector<std::vector<std::optional<TypeIIPoint>>> z(1);
  for (int n = 0; n <= cols; ++n) z[0].push_back(first_crossed(w[n], rd.theta0, rd.orbit));
  if (!z[0][0]) {
    tr.escaped = true;
    tr.escape_level = 0;
    return tr;
  }
  for (int l = 1; l <= levels && l <= cols; ++l) {
    std::vector<std::optional<TypeIIPoint>> row;
    for (int n = 0; n + l <= cols; ++n) {
      const auto& prev = z[l - 1][n + 1];
      if (!prev) {
        row.push_back(std::nullopt);
        continue;
      }
      const auto* pre = preimages_of(*prev);
      if (!pre) {
        row.push_back(std::nullopt);
        continue;
      }
      row.push_back(first_crossed(w[n], rd.theta0, *pre));
    }
    bool dead = row.empty() || !row[0];
    z.push_back(std::move(row));
    if (dead) {
      tr.escaped = true;
      tr.escape_level = l;
      break;
    }
  }
  for (const auto& r : z) {
    if (r.empty() || !r[0]) break;
    tr.boundaries.push_back(*r[0]);
  }
  return tr;
}

// ---------------------------------------------------------------- case 3 vs 4

namespace {

enum class DriftOutcome { Escapes, Fails, Inconclusive };

double cauchy_bound(const CPoly& p) {
  if (p.degree() < 1) return 0.0;
  double lead = std::abs(p.lead().to_complex());
  double m = 0.0;
  for (int i = 0; i < p.degree(); ++i)
    m = std::max(m, std::abs(p.coeff(i).to_complex()) / lead);
  return 1.0 + m;
}

/// Certifies that both critical points of the return tangent map drift
/// monotonically to its multiple fixed point: beyond every real root of the
/// displacement numerator and of the denominator the displacement keeps its
/// sign, so an iterate past the bound with outward displacement never returns.
DriftOutcome crits_drift_certificate(const CRatMap& T, const CPoint& u0, int horizon,
                                     bool& exact) {
  std::vector<CPoint> multi = multiple_fixed_points(T);
  if (multi.size() != 1 || !(multi[0] == u0)) return DriftOutcome::Inconclusive;

  CRatMap R = T;
  if (!u0.inf) {
    CRatMap M(CPoly({Scalar(1)}), CPoly({-u0.v, Scalar(1)}));
    R = M.compose(T.compose(mobius_inverse(M)));
  }
  exact = R.num().all_exact() && R.den().all_exact();
  auto real_coeffs = [](const CPoly& p) {
    for (const auto& c : p.coeffs())
      if (!(c - c.conj()).is_zero()) return false;
    return true;
  };
  if (!real_coeffs(R.num()) || !real_coeffs(R.den())) return DriftOutcome::Inconclusive;

  CPoly W = R.num().derivative() * R.den() - R.num() * R.den().derivative();
  std::vector<CPoint> crits;
  int found = 0;
  try {
    for (const auto& [v, m] : croots(W)) {
      for (int i = 0; i < m; ++i) crits.push_back(CPoint::finite(v));
      found += m;
    }
  } catch (const ExactUnsupported&) {
    return DriftOutcome::Inconclusive;
  }
  while (found < 2 * R.degree() - 2) {
    crits.push_back(CPoint::infinity());
    ++found;
  }
  for (const auto& c : crits)
    if (c.inf || !(c.v - c.v.conj()).is_zero()) return DriftOutcome::Inconclusive;

  CPoly Fn = fixed_slot_poly(R);
  double B = 1.0 + std::max(cauchy_bound(Fn), cauchy_bound(R.den()));
  Rat Br(static_cast<long long>(std::ceil(B)) + 1);

  for (const auto& c0 : crits) {
    bool escaped = false;
    std::vector<CPoint> seen;
    CPoint z = c0;
    for (int k = 0; k < horizon && !escaped; ++k) {
      if (z.inf) return DriftOutcome::Fails;  // landed exactly on the fixed point
      for (const auto& s : seen)
        if (s == z) return DriftOutcome::Fails;  // periodic critical orbit
      seen.push_back(z);
      CPoint w = R.eval(z);
      if (!w.inf) {
        Scalar disp = w.v - z.v;
        bool beyond_pos, beyond_neg, disp_pos, disp_neg;
        if (exact) {
          beyond_pos = z.v.re_q() > Br;
          beyond_neg = z.v.re_q() < -Br;
          disp_pos = disp.re_q().sign() > 0;
          disp_neg = disp.re_q().sign() < 0;
        } else {
          double zr = z.v.to_complex().real();
          double dr = disp.to_complex().real();
          beyond_pos = zr > Br.to_double();
          beyond_neg = zr < -Br.to_double();
          disp_pos = dr > float_epsilon();
          disp_neg = dr < -float_epsilon();
        }
        if ((beyond_pos && disp_pos) || (beyond_neg && disp_neg)) escaped = true;
      }
      z = w;
    }
    if (!escaped) return DriftOutcome::Fails;
  }
  return DriftOutcome::Escapes;
}

struct Orbit2Result {
  std::vector<TypeIIPoint> orbit;
  int qprime;
  CRatMap tangent;
};

std::optional<Orbit2Result> verify_second_orbit(const RatMapL& phi, const RiveraData& rd,
                                                const TypeIIPoint& xp) {
  try {
    std::vector<TypeIIPoint> orb{xp};
    std::vector<MapAtPoint> steps;
    TypeIIPoint cur = xp;
    int limit = std::max(12, 3 * rd.q);
    for (int i = 0; i < limit; ++i) {
      MapAtPoint m = map_point_full(phi, cur);
      steps.push_back(m);
      cur = m.image;
      if (cur == xp) {
        int p = i + 1;
        if (p <= rd.q) return std::nullopt;
        int degprod = 1;
        CRatMap T2;
        for (int j = 0; j < p; ++j) {
          degprod *= steps[j].degree;
          T2 = steps[j].tangent.compose(T2);
        }
        if (degprod != 2) return std::nullopt;
        for (const auto& a : orb)
          for (const auto& b : rd.orbit)
            if (a == b) return std::nullopt;
        return Orbit2Result{orb, p, T2};
      }
      orb.push_back(cur);
    }
  } catch (const PrecisionExhausted&) {
  }
  return std::nullopt;
}

/// Searches for the second repelling orbit: the level-piece boundaries of a
/// critical point converge geometrically to the boundary of a periodic
/// closed ball exactly when that orbit exists; the extrapolated limit is
/// verified exactly before it is accepted.
std::optional<Orbit2Result> find_second_orbit(const RatMapL& phi, const RiveraData& rd,
                                              int depth_bound) {
  std::vector<PointL> crits;
  for (const auto& [p, m] : critical_points(phi)) crits.push_back(p);
  std::vector<TypeIIPoint> tried;
  auto seen = [&](const TypeIIPoint& y) {
    for (const auto& t : tried)
      if (t == y) return true;
    return false;
  };
  int cap = std::min(depth_bound, 24);
  for (int budget : {12, 18, 24}) {
    if (budget > cap && budget != 12) continue;
    for (const auto& cr : crits) {
      RatMapL psi = phi;
      RiveraData local = rd;
      PuiseuxSeries cval;
      bool swapped = false;
      if (cr.infinite) {
        psi = phi.chart_swapped();
        local.theta0 = invert_point(rd.theta0);
        local.orbit.clear();
        for (const auto& x : rd.orbit) local.orbit.push_back(invert_point(x));
        cval = PuiseuxSeries::zero(map_precision(phi));
        swapped = true;
      } else {
        cval = cr.value;
      }
      CriticalTrack tr =
          track_critical_piece(psi, local, PointL::finite(cval), std::min(budget, cap));
      const auto& bs = tr.boundaries;
      int L = static_cast<int>(bs.size()) - 1;
      auto on_ray = [&](const TypeIIPoint& y) {
        OrdVal o = (cval - y.center).ord();
        return o.is_inf() || o.finite() >= y.alpha;
      };
      for (int s = 1; 2 * s <= L; ++s) {
        int i2 = L, i1 = L - s, i0 = L - 2 * s;
        if (!on_ray(bs[i0]) || !on_ray(bs[i1]) || !on_ray(bs[i2])) continue;
        Rat d1 = bs[i2].alpha - bs[i1].alpha;
        Rat d0 = bs[i1].alpha - bs[i0].alpha;
        if (!(d1 > Rat(0)) || !(d0 > Rat(0)) || !(d1 < d0)) continue;
        Rat r = d1 / d0;
        Rat beta = bs[i2].alpha + d1 * r / (Rat(1) - r);
        TypeIIPoint cand = TypeIIPoint::make(cval, beta);
        if (swapped) cand = invert_point(cand);
        if (seen(cand)) continue;
        tried.push_back(cand);
        if (auto res = verify_second_orbit(phi, rd, cand)) return res;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- case 1 witness

BallCertificate attracting_shift_certificate(const RatMapL& phi,
                                             const std::vector<FixedPointEntry>& fps,
                                             int depth_bound, std::string& notes) {
  BallCertificate bc;
  std::vector<PuiseuxSeries> pts;
  for (const auto& e : fps)
    if (e.kind != FixedKind::Attracting && !e.point.infinite) pts.push_back(e.point.value);
  if (pts.empty()) {
    notes += "shift certificate: no finite non-attracting fixed point to seed the ball; ";
    return bc;
  }
  std::vector<PuiseuxSeries> frontier = pts;
  int maxd = std::min(depth_bound, 4);
  for (int d = 0; d <= maxd; ++d) {
    if (d > 0) {
      std::vector<PuiseuxSeries> next;
      for (const auto& wv : frontier) {
        PolyL E = phi.num - phi.den * wv;
        if (E.degree() >= 1)
          for (const auto& r : roots(E, Rat(16))) next.push_back(r.value);
      }
      frontier = next;
      pts.insert(pts.end(), next.begin(), next.end());
    }
    Rat a(0);
    bool have = false;
    for (size_t i = 1; i < pts.size(); ++i) {
      OrdVal o = (pts[i] - pts[0]).ord();
      if (o.is_inf()) continue;
      if (!have || o.finite() < a) a = o.finite();
      have = true;
    }
    if (!have) continue;
    TypeIIPoint D = TypeIIPoint::make(pts[0], a);
    try {
      auto pre = preimages(phi, D);
      if (pre.size() != 2 || pre[0].second != 1 || pre[1].second != 1) continue;
      const TypeIIPoint& y0 = pre[0].first;
      const TypeIIPoint& y1 = pre[1].first;
      bool ok = contains(D, y0) && contains(D, y1) && !(y0 == D) && !(y1 == D);
      Rat j = join_exponent(y0, y1);
      ok = ok && j < y0.alpha && j < y1.alpha;  // disjoint sub-balls
      for (const TypeIIPoint* y : {&y0, &y1}) {
        MapAtPoint m = map_point_full(phi, *y);
        // bijective onto the parent ball: degree one, outside maps to outside
        ok = ok && m.degree == 1 && m.tangent.den().degree() == 0 &&
             m.tangent.num().degree() == 1;
      }
      if (ok) {
        bc.D = D;
        bc.D0 = y0;
        bc.D1 = y1;
        bc.verified = true;
        return bc;
      }
    } catch (const PrecisionExhausted&) {
    }
  }
  notes += "shift certificate: no verified ball within the depth bound; ";
  return bc;
}

}  // namespace

// ---------------------------------------------------------------- classify

ClassificationReport classify(const RatMapL& phi, int depth_bound, int horizon) {
  ClassificationReport rep;
  rep.depth_bound = depth_bound;
  rep.horizon = horizon;
  rep.exact = map_is_exact(phi);
  rep.fixed_points = fixed_points_with_multipliers(phi);

  RiveraResult rr = find_fixed_rivera_domain(phi, depth_bound);
  switch (rr.outcome) {
    case RiveraOutcome::SimpleCase:
      rep.kind = CaseKind::Simple;
      rep.simple_point = rr.simple_point;
      return rep;
    case RiveraOutcome::AttractingCase: {
      rep.kind = CaseKind::AttractingShift;
      rep.attractor = rr.attractor;
      rep.model = full_two_shift();
      try {
        rep.shift_certificate =
            attracting_shift_certificate(phi, rep.fixed_points, depth_bound, rep.notes);
      } catch (const ExactUnsupported&) {
        rep.exact = false;
        rep.notes += "shift certificate recomputed with float scalars; ";
        RatMapL pf = phi.to_float();
        rep.shift_certificate =
            attracting_shift_certificate(pf, fixed_points_with_multipliers(pf), depth_bound,
                                         rep.notes);
      }
      return rep;
    }
    case RiveraOutcome::NotFound:
      throw SearchBoundExceeded("classify: no fixed Rivera domain found within bounds");
    case RiveraOutcome::Found:
      break;
  }

  RiveraData rd = rr.data;
  rep.rivera = rd;
  std::vector<MapAtPoint> steps;
  int degprod = 1;
  for (int i = 0; i < rd.q; ++i) {
    MapAtPoint m = map_point_full(phi, rd.orbit[i]);
    if (!(m.image == rd.orbit[(i + 1) % rd.q]))
      throw std::logic_error("classify: boundary orbit does not close up");
    degprod *= m.degree;
    steps.push_back(m);
  }
  CRatMap T;
  for (const auto& s : steps) T = s.tangent.compose(T);
  rep.tangent_orbit = T;

  if (degprod == 1) {
    rep.kind = CaseKind::IndifferentOrbit;
    rep.model = subshift_sigma_q(rd.q);
    rep.renewal_shift = true;
    JuliaResult jr = julia_membership_indifferent(phi, rd.orbit[0], rd.q, horizon);
    rep.exact = rep.exact && jr.exact;
    if (jr.outcome != JuliaOutcome::Julia)
      rep.notes += "warning: boundary orbit not certified in the Julia set; ";
    return rep;
  }

  // repelling boundary orbit: decide whether a second orbit exists
  CPoint u0 = slot_of_point(rd.orbit[0], rd.theta0).to_cpoint();
  bool drift_exact = rep.exact;
  DriftOutcome dr = crits_drift_certificate(T, u0, horizon, drift_exact);
  if (dr == DriftOutcome::Escapes) {
    rep.kind = CaseKind::OneRepelling;
    rep.exact = rep.exact && drift_exact;
    return rep;
  }
  if (auto o2 = find_second_orbit(phi, rd, depth_bound)) {
    rep.kind = CaseKind::TwoRepelling;
    rep.orbit2 = o2->orbit;
    rep.qprime = o2->qprime;
    rep.tangent_orbit2 = o2->tangent;
    return rep;
  }
  throw SearchBoundExceeded("classify: repelling case undecided within bounds");
}

// ---------------------------------------------------------------- residue check

ResidueCheck verify_residue_formula(const RatMapL& phi, const RiveraDomainDesc& U) {
  ResidueCheck rc;
  auto inside = [&](const PointL& p) {
    if (!U.starlike) return slot_of(U.ball.at, p) == U.ball.slot;
    for (const auto& xi : U.data.orbit) {
      if (xi == U.data.theta0) continue;
      if (!(slot_of(xi, p) == slot_of_point(xi, U.data.theta0))) return false;
    }
    return true;
  };
  for (const auto& e : fixed_points_with_multipliers(phi))
    if (inside(e.point)) rc.fixed_count += e.multiplicity;

  std::vector<std::pair<TypeIIPoint, Slot>> boundary;
  if (!U.starlike) {
    boundary.push_back({U.ball.at, U.ball.slot});
  } else {
    for (const auto& xi : U.data.orbit)
      if (!(xi == U.data.theta0)) boundary.push_back({xi, slot_of_point(xi, U.data.theta0)});
  }
  int rhs = 2;
  for (const auto& [xi, s] : boundary) {
    MapAtPoint m = map_point_full(phi, xi);
    if (!(m.image == xi)) continue;
    int eta = fixed_slot_multiplicity(m.tangent, s.to_cpoint());
    rc.boundary_eta.push_back({xi, eta});
    rhs += eta - 2;
  }
  rc.ok = rc.fixed_count == rhs;
  return rc;
}

// ---------------------------------------------------------------- normal form

std::optional<Scalar> quadratic_polynomial_normal_form(const CRatMap& T) {
  if (T.degree() != 2) return std::nullopt;
  CPoly W = T.num().derivative() * T.den() - T.num() * T.den().derivative();
  std::vector<CPoint> crits;
  int found = 0;
  for (const auto& [v, m] : croots(W)) {
    crits.push_back(CPoint::finite(v));
    found += m;
  }
  if (found < 2) crits.push_back(CPoint::infinity());
  for (size_t i = 0; i < crits.size(); ++i) {
    const CPoint& c = crits[i];
    const CPoint& o = crits[crits.size() - 1 - i];
    if (!(T.eval(c) == c) || c == o) continue;
    CRatMap A;
    if (c.inf) {
      A = CRatMap(CPoly({-o.v, Scalar(1)}), CPoly({Scalar(1)}));  // z - o
    } else if (o.inf) {
      A = CRatMap(CPoly({Scalar(1)}), CPoly({-c.v, Scalar(1)}));  // 1/(z - c)
    } else {
      A = CRatMap(CPoly({-o.v, Scalar(1)}), CPoly({-c.v, Scalar(1)}));
    }
    CRatMap B = A.compose(T.compose(mobius_inverse(A)));
    if (B.den().degree() != 0 || B.num().degree() != 2) continue;
    Scalar a2 = B.num().coeff(2) / B.den().coeff(0);
    Scalar a1 = B.num().coeff(1) / B.den().coeff(0);
    Scalar a0 = B.num().coeff(0) / B.den().coeff(0);
    if (!a1.is_zero()) continue;
    return a2 * a0;
  }
  return std::nullopt;
}

}  // namespace qdl
