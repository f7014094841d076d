#include "qdl/puzzle.hpp"

#include <algorithm>
#include <sstream>

namespace qdl {

namespace {

long long half_steps(const Rat& level) {
  Rat two = level + level;
  BigInt f = two.floor();
  if (Rat(f) != two || level < Rat(0))
    throw std::invalid_argument("piece level must be a non-negative half integer");
  return std::stoll(f.str());
}

void push_unique(std::vector<Slot>& v, const Slot& s) {
  for (const auto& e : v)
    if (e == s) return;
  v.push_back(s);
}

/// Direction preimages of slot e under a tangent map.
std::vector<Slot> slot_preimages(const CRatMap& T, const Slot& e) {
  CPoly p = e.inf ? T.den() : T.num() - CPoly::constant(e.v) * T.den();
  std::vector<Slot> out;
  if (p.degree() >= 1)
    for (const auto& rm : croots(p, false)) push_unique(out, Slot::finite(rm.first));
  if (p.degree() < T.degree()) push_unique(out, Slot::infinity());
  return out;
}

/// Sort key for the active-critical-point tie break: smaller valuation of
/// the center first, with infinity smallest of all.
bool center_ord_less(const PointL& a, const PointL& b) {
  if (a.infinite || b.infinite) return a.infinite && !b.infinite;
  OrdVal oa = a.value.ord(), ob = b.value.ord();
  return oa < ob;
}

}  // namespace

PointL active_critical_point(const RatMapL& phi, const ClassificationReport& report,
                             int horizon) {
  const RiveraData& rd = report.rivera;
  if (rd.orbit.empty()) throw std::invalid_argument("no repelling boundary orbit");
  const TypeIIPoint& xi0 = rd.orbit.front();
  CPoint u0 = slot_of_point(xi0, rd.theta0).to_cpoint();
  const CRatMap& T = report.tangent_orbit;

  auto crits = critical_points(phi);
  std::vector<PointL> cs;
  for (const auto& cm : crits) cs.push_back(cm.first);
  if (cs.size() == 1) cs.push_back(cs[0]);

  auto wandering = [&](const PointL& c) {
    CPoint s = slot_of(xi0, c).to_cpoint();
    std::vector<CPoint> seen;
    for (int i = 0; i < horizon; ++i) {
      if (s == u0) return false;
      for (const auto& t : seen)
        if (t == s) return false;
      // exact coordinates roughly double in digit size per iterate; an
      // exploding height certifies escape within the horizon
      if (s.str().size() > 2000) return true;
      seen.push_back(s);
      s = T.eval(s);
    }
    return true;
  };

  bool w0 = wandering(cs[0]), w1 = wandering(cs[1]);
  if (w0 != w1) return w0 ? cs[1] : cs[0];
  return center_ord_less(cs[0], cs[1]) ? cs[0] : cs[1];
}

int PieceForest::add_piece(Piece p) {
  p.id = static_cast<int>(pieces.size());
  pieces.push_back(p);
  expanded_.push_back(0);
  kids_.emplace_back();
  return p.id;
}

const std::vector<int>& PieceForest::children(int id) {
  if (expanded_[id]) return kids_[id];
  const Piece parent = pieces[id];  // copy: pieces may reallocate below
  std::vector<int> out;
  for (const auto& pm : preimages(phi, parent.boundary)) {
    const TypeIIPoint& chi = pm.first;
    CRatMap T = tangent_map(phi, chi);
    std::vector<Slot> excluded;
    for (const Slot& e : parent.excluded)
      for (const Slot& s : slot_preimages(T, e)) push_unique(excluded, s);
    for (const auto& cm : crits_) {
      Slot s = slot_of(chi, cm.first);
      if (classify_direction(phi, chi, s).bad) push_unique(excluded, s);
    }
    Piece np;
    np.level = parent.level + 1;
    np.boundary = chi;
    np.excluded = excluded;
    np.image = id;
    np.degree = pm.second;
    np.closed_ball = excluded.size() == 1;
    out.push_back(add_piece(np));
  }
  kids_[id] = out;
  expanded_[id] = 1;
  return kids_[id];
}

bool PieceForest::member(int id, const PointL& z) const {
  const Piece& p = pieces[id];
  Slot s = slot_of(p.boundary, z);
  for (const auto& e : p.excluded)
    if (e == s) return false;
  return true;
}

bool PieceForest::member(int id, const TypeIIPoint& x) const {
  const Piece& p = pieces[id];
  if (x == p.boundary) return true;
  Slot s = slot_of_point(p.boundary, x);
  for (const auto& e : p.excluded)
    if (e == s) return false;
  return true;
}

template <class P>
static std::optional<int> scan_roots(const PieceForest& f, const std::vector<int>& ids,
                                     const P& z) {
  for (int id : ids)
    if (f.member(id, z)) return id;
  return std::nullopt;
}

std::optional<int> PieceForest::piece_of(const PointL& z, const Rat& level) {
  long long m2 = half_steps(level);
  if (m2 == 0) return scan_roots(*this, level0, z);
  if (m2 == 1) {
    auto r = scan_roots(*this, level_half, z);
    return r ? r : scan_roots(*this, level0, z);
  }
  auto up = piece_of(phi.eval(z), level - 1);
  if (!up) return std::nullopt;
  for (int id : children(*up))
    if (member(id, z)) return id;
  return std::nullopt;
}

std::optional<int> PieceForest::piece_of(const TypeIIPoint& x, const Rat& level) {
  long long m2 = half_steps(level);
  if (m2 == 0) return scan_roots(*this, level0, x);
  if (m2 == 1) {
    auto r = scan_roots(*this, level_half, x);
    return r ? r : scan_roots(*this, level0, x);
  }
  auto up = piece_of(map_point(phi, x), level - 1);
  if (!up) return std::nullopt;
  for (int id : children(*up))
    if (member(id, x)) return id;
  return std::nullopt;
}

const PointL& PieceForest::omega_at(int n) {
  while (static_cast<int>(omega_orbit_.size()) < n)
    omega_orbit_.push_back(phi.eval(omega_orbit_.empty() ? omega : omega_orbit_.back()));
  return n == 0 ? omega : omega_orbit_[n - 1];
}

std::optional<int> PieceForest::orbit_piece(int n, long long m2) {
  auto key = std::make_pair(n, m2);
  auto it = omega_cache_.find(key);
  if (it != omega_cache_.end()) return it->second;
  std::optional<int> r;
  // copy: the recursion below may extend omega_orbit_ and invalidate references
  const PointL z = omega_at(n);
  if (m2 == 0) {
    r = scan_roots(*this, level0, z);
  } else if (m2 == 1) {
    r = scan_roots(*this, level_half, z);
    // points missed by the half-level refinement keep their level-0 piece
    // (equal boundaries mean the intermediate piece coincides with it)
    if (!r) r = orbit_piece(n, 0);
  } else {
    auto up = orbit_piece(n + 1, m2 - 2);
    if (up)
      for (int id : children(*up))
        if (member(id, z)) {
          r = id;
          break;
        }
  }
  omega_cache_[key] = r;
  return r;
}

int PieceForest::omega_piece(const Rat& level) {
  auto r = orbit_piece(0, half_steps(level));
  if (!r) throw DepthExceeded("active critical point left the level sets");
  return *r;
}

std::vector<int> PieceForest::level_ids(const Rat& level) const {
  std::vector<int> out;
  for (const auto& p : pieces)
    if (p.level == level) out.push_back(p.id);
  return out;
}

PieceForest build_pieces(const RatMapL& phi, const ClassificationReport& report,
                         const Rat& max_level) {
  if (report.kind != CaseKind::OneRepelling && report.kind != CaseKind::TwoRepelling)
    throw std::invalid_argument("pieces require a repelling boundary orbit");
  PieceForest f;
  f.phi = phi;
  f.rd = report.rivera;
  f.crits_ = critical_points(phi);
  int q = f.rd.q;

  for (int j = 0; j < q; ++j) f.u.push_back(slot_of_point(f.rd.orbit[j], f.rd.theta0));

  for (int j = 0; j < q; ++j) {
    Piece p;
    p.level = Rat(0);
    p.boundary = f.rd.orbit[j];
    p.excluded = {f.u[j]};
    p.degree = j == 0 ? 2 : 1;
    p.closed_ball = true;
    f.level0.push_back(f.add_piece(p));
  }
  for (int j = 1; j < q; ++j) f.pieces[f.level0[j]].image = f.level0[(j + 1) % q];

  // D_0: the direction at xi_0, other than the one of U_0, that maps onto
  // the direction of U_0 at xi_1.
  CRatMap T1 = tangent_map(phi, f.rd.orbit[0]);
  f.dir0 = Slot::infinity();
  bool found = false;
  for (const Slot& s : slot_preimages(T1, f.u[1 % q]))
    if (s != f.u[0]) {
      f.dir0 = s;
      found = true;
    }
  if (!found) throw std::runtime_error("special direction D_0 not found");

  found = false;
  for (const auto& pm : preimages(phi, f.rd.theta0))
    if (pm.first != f.rd.theta0 && slot_of_point(f.rd.orbit[0], pm.first) == f.dir0) {
      f.theta_half = pm.first;
      found = true;
    }
  if (!found) throw std::runtime_error("half-level center not found");

  {
    Piece p;
    p.level = Rat(1, 2);
    p.boundary = f.theta_half;
    p.excluded = {slot_of_point(f.theta_half, f.rd.theta0)};
    p.closed_ball = true;
    f.level_half.push_back(f.add_piece(p));
    int b0 = f.level_half.back();
    f.pieces[b0].parent = f.level0[0];
    for (int j = 1; j < q; ++j) {
      Piece h = f.pieces[f.level0[j]];
      h.level = Rat(1, 2);
      h.image = -1;
      h.parent = f.level0[j];
      f.level_half.push_back(f.add_piece(h));
    }
  }

  f.omega = active_critical_point(phi, report);
  f.omega_prime = f.crits_[0].first == f.omega && f.crits_.size() > 1
                      ? f.crits_[1].first
                      : f.crits_[0].first;

  // eager expansion of both towers
  long long top2 = half_steps(max_level);
  for (long long lv2 = 0; lv2 + 2 <= top2; ++lv2) {
    std::vector<int> ids;
    for (const auto& p : f.pieces)
      if (half_steps(p.level) == lv2) ids.push_back(p.id);
    for (int id : ids) f.children(id);
  }

  // containment links
  for (auto& p : f.pieces) {
    long long lv2 = half_steps(p.level);
    if (lv2 >= 1 && p.parent_half < 0)
      for (const auto& c : f.pieces)
        if (half_steps(c.level) == lv2 - 1 && f.member(c.id, p.boundary)) {
          p.parent_half = c.id;
          break;
        }
    if (lv2 >= 2 && p.parent < 0)
      for (const auto& c : f.pieces)
        if (half_steps(c.level) == lv2 - 2 && f.member(c.id, p.boundary)) {
          p.parent = c.id;
          break;
        }
  }
  return f;
}

namespace {

/// Shared machinery for grids and distance tables along one orbit.
struct SeedOrbit {
  PieceForest* f;
  bool rigid;
  std::vector<PointL> rz;
  std::vector<TypeIIPoint> tx;
  std::map<std::pair<int, long long>, std::optional<int>> memo;

  void extend(int n) {
    if (rigid) {
      while (static_cast<int>(rz.size()) <= n) rz.push_back(f->phi.eval(rz.back()));
    } else {
      while (static_cast<int>(tx.size()) <= n) tx.push_back(map_point(f->phi, tx.back()));
    }
  }

  std::optional<int> piece(int n, long long m2) {
    auto key = std::make_pair(n, m2);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    extend(n);
    std::optional<int> r;
    auto scan = [&](const std::vector<int>& ids) -> std::optional<int> {
      for (int id : ids)
        if (rigid ? f->member(id, rz[n]) : f->member(id, tx[n])) return id;
      return std::nullopt;
    };
    if (m2 == 0) {
      r = scan(f->level0);
    } else if (m2 == 1) {
      r = scan(f->level_half);
      // see orbit_piece: a point missed by the half-level refinement keeps
      // its level-0 piece
      if (!r) r = piece(n, 0);
    } else {
      auto up = piece(n + 1, m2 - 2);
      if (up) r = scan(f->children(*up));
    }
    memo[key] = r;
    return r;
  }

  TypeIIPoint boundary(int n, long long m2) {
    auto p = piece(n, m2);
    if (!p) throw DepthExceeded("orbit left the level sets at column " + std::to_string(n));
    return f->pieces[*p].boundary;
  }
};

SeedOrbit seed_orbit(PieceForest& f, const PointL& z) {
  SeedOrbit s;
  s.f = &f;
  s.rigid = true;
  s.rz = {z};
  return s;
}

SeedOrbit seed_orbit(PieceForest& f, const TypeIIPoint& x) {
  SeedOrbit s;
  s.f = &f;
  s.rigid = false;
  s.tx = {x};
  return s;
}

MarkedGrid grid_from(SeedOrbit& so, PieceForest& f, int columns, const Rat& depth) {
  long long d2 = half_steps(depth);
  MarkedGrid g;
  g.columns = columns;
  g.depth = depth;
  g.entries.assign(columns + 1, std::vector<int>(d2 + 1, 1));
  for (int n = 0; n <= columns; ++n)
    for (long long m2 = 0; m2 <= d2; ++m2) {
      auto zp = so.piece(n, m2);
      int wp = f.omega_piece(Rat(m2, 2));
      if (!zp)
        throw DepthExceeded("orbit left the level sets at column " + std::to_string(n));
      g.entries[n][m2] = *zp == wp ? 2 : 1;
    }
  detect_flags(g);
  return g;
}

DistanceTable distances_from(SeedOrbit& so, int columns, const Rat& depth) {
  long long d2 = half_steps(depth);
  DistanceTable dt;
  for (int n = 0; n <= columns; ++n)
    for (long long m2 = 1; m2 <= d2; ++m2) {
      TypeIIPoint a = so.boundary(n, m2 - 1), b = so.boundary(n, m2);
      if (a != b) dt.entries[{n, static_cast<int>(m2)}] = hyperbolic_distance(a, b);
    }
  return dt;
}

}  // namespace

MarkedGrid marked_grid(PieceForest& f, const PointL& zeta, int columns, const Rat& depth) {
  SeedOrbit so = seed_orbit(f, zeta);
  return grid_from(so, f, columns, depth);
}

MarkedGrid marked_grid(PieceForest& f, const TypeIIPoint& zeta, int columns, const Rat& depth) {
  SeedOrbit so = seed_orbit(f, zeta);
  return grid_from(so, f, columns, depth);
}

DistanceTable distance_table(PieceForest& f, const PointL& zeta, int columns, const Rat& depth) {
  SeedOrbit so = seed_orbit(f, zeta);
  return distances_from(so, columns, depth);
}

DistanceTable distance_table(PieceForest& f, const TypeIIPoint& zeta, int columns,
                             const Rat& depth) {
  SeedOrbit so = seed_orbit(f, zeta);
  return distances_from(so, columns, depth);
}

int MarkedGrid::column_depth2(int n) const {
  int d = -1;
  for (int m2 = 0; m2 < static_cast<int>(entries[n].size()); ++m2)
    if (entries[n][m2] == 2) d = m2;
  return d;
}

Rat DistanceTable::at(int n, int m2) const {
  auto it = entries.find({n, m2});
  return it == entries.end() ? Rat(0) : it->second;
}

void detect_flags(MarkedGrid& g) {
  g.flag = MarkedGrid::Flag::None;
  g.period = g.preperiod = 0;
  int N = g.columns;
  auto full = [&](int n) {
    return g.column_depth2(n) == static_cast<int>(g.entries[n].size()) - 1;
  };
  // the set of full columns must match the arithmetic progression exactly
  auto matches = [&](int k, int p) {
    for (int n = 0; n <= N; ++n) {
      bool in_prog = n >= k && (n - k) % p == 0;
      if (full(n) != in_prog) return false;
    }
    return true;
  };
  for (int p = 1; p <= N; ++p)
    if (matches(0, p)) {
      g.flag = MarkedGrid::Flag::Periodic;
      g.period = p;
      return;
    }
  for (int k = 1; k <= N; ++k)
    for (int p = 1; k + p <= N; ++p)
      if (matches(k, p)) {
        g.flag = MarkedGrid::Flag::Preperiodic;
        g.preperiod = k;
        g.period = p;
        return;
      }
  for (int n = 1; n <= N; ++n)
    if (full(n)) {
      g.flag = MarkedGrid::Flag::Recurrent;
      return;
    }
}

std::vector<GridViolation> check_grid_rules(const MarkedGrid& g, const MarkedGrid& critical) {
  std::vector<GridViolation> out;
  for (int n = 0; n <= g.columns; ++n) {
    int d2 = static_cast<int>(g.entries[n].size()) - 1;
    for (int m2 = 0; m2 <= d2; ++m2) {
      if (g.entries[n][m2] != 2) continue;
      for (int j2 = 0; j2 < m2; ++j2)
        if (g.entries[n][j2] != 2) {
          out.push_back({"Ma", n, 0, Rat(m2, 2)});
          break;
        }
      for (int j = 0; 2 * j <= m2; ++j) {
        int nn = n + j, mm2 = m2 - 2 * j;
        if (nn > g.columns || j > critical.columns) break;
        if (mm2 >= static_cast<int>(critical.entries[j].size())) break;
        if (g.entries[nn][mm2] != critical.entries[j][mm2])
          out.push_back({"Mb", n, j, Rat(m2, 2)});
      }
    }
  }
  return out;
}

std::vector<GridViolation> check_weak_third_rule(const MarkedGrid& critical,
                                                const MarkedGrid& g) {
  std::vector<GridViolation> out;
  int D2 = static_cast<int>(g.entries[0].size()) - 1;
  for (int l02 = 2; l02 <= D2; ++l02)
    for (int k = 1; 2 * k < l02 + 1; ++k) {
      if (k > critical.columns) break;
      if (!critical.marked(k, l02 - 2 * k + 1)) continue;
      bool hyp = true;
      for (int j = 1; hyp && j < k; ++j) hyp = !critical.marked(j, l02 - 2 * j);
      if (!hyp) continue;
      if (l02 + 1 > D2) continue;
      for (int n = 0; n + k <= g.columns; ++n) {
        // the n-th column must have depth exactly l0
        if (!g.marked(n, l02) || g.marked(n, l02 + 1)) continue;
        if (g.marked(n + k, l02 - 2 * k + 1))
          out.push_back({"weak-third", n, k, Rat(l02, 2)});
      }
    }
  return out;
}

YoccozResult yoccoz_test(const MarkedGrid& g, const DistanceTable& dt) {
  YoccozResult r;
  MarkedGrid gg = g;
  detect_flags(gg);
  int D2 = static_cast<int>(g.entries[0].size()) - 1;
  Rat acc(0);
  for (int m2 = 1; m2 <= D2; ++m2) {
    acc = acc + dt.at(0, m2);
    r.partial_sums.push_back(acc);
  }

  if (gg.flag == MarkedGrid::Flag::Periodic || gg.flag == MarkedGrid::Flag::Preperiodic) {
    r.outcome = YoccozOutcome::Converges;
    r.certificate = "eventually periodic grid";
    return r;
  }

  if (gg.flag == MarkedGrid::Flag::Recurrent) {
    // child-generation bookkeeping: each split piece has two children whose
    // contributions are each half of the parent's, so every generation
    // contributes the base distance.
    int base2 = 0;
    for (int m2 = 1; m2 <= D2 && base2 == 0; ++m2)
      if (dt.at(0, m2) > Rat(0)) base2 = m2;
    if (base2 == 0) return r;
    struct Node {
      int d2;
      Rat v;
    };
    std::vector<Node> cur = {{base2, dt.at(0, base2)}};
    Rat total = cur[0].v;
    int gens = 0;
    bool consistent = true;
    while (consistent) {
      std::vector<Node> next;
      for (const Node& e : cur) {
        int k = 0;
        for (int n = 1; n <= g.columns; ++n)
          if (g.column_depth2(n) >= e.d2) {
            k = n;
            break;
          }
        if (k == 0) {
          consistent = false;
          break;
        }
        int dp2 = g.column_depth2(k);
        int nstar = (dp2 - e.d2 - 1) / (2 * k);
        if (nstar < 0) nstar = 0;
        int m = 0;
        for (int n = (nstar + 1) * k + 1; n <= g.columns; ++n)
          if (g.column_depth2(n) >= e.d2) {
            m = n;
            break;
          }
        if (m == 0) {
          consistent = false;
          break;
        }
        Rat half = e.v / Rat(2);
        for (int child : {e.d2 + 2 * k, e.d2 + 2 * m}) {
          if (child <= D2 && dt.at(0, child) > Rat(0) && dt.at(0, child) != half) {
            consistent = false;
            break;
          }
          next.push_back({child, half});
        }
        if (!consistent) break;
      }
      if (!consistent || next.empty()) break;
      Rat sum(0);
      for (const Node& e : next) sum = sum + e.v;
      if (sum != total) break;
      cur = next;
      ++gens;
      bool deeper = false;
      for (const Node& e : cur)
        if (e.d2 <= D2) deeper = true;
      if (!deeper) break;
    }
    r.generations = gens;
    if (gens >= 2) {
      r.outcome = YoccozOutcome::Diverges;
      r.certificate = "recurrent non-periodic grid: constant contribution per generation";
    }
    return r;
  }

  // bounded column depths: distances repeat among finitely many positive
  // values, so persistent splittings force divergence
  int l02 = -1;
  for (int n = 0; n <= g.columns; ++n) l02 = std::max(l02, g.column_depth2(n));
  int splits = 0, last = 0;
  for (int m2 = l02 + 2; m2 <= D2; ++m2)
    if (dt.at(0, m2) > Rat(0)) {
      ++splits;
      last = m2;
    }
  if (splits >= 3 && last > D2 - 4) {
    r.outcome = YoccozOutcome::Diverges;
    r.certificate = "bounded-depth grid with persistent splittings";
  }
  return r;
}

EndClass classify_end(const MarkedGrid& g, const DistanceTable& dt) {
  int D2 = static_cast<int>(g.entries[0].size()) - 1;
  int last = 0;
  for (int m2 = 1; m2 <= D2; ++m2)
    if (dt.at(0, m2) > Rat(0)) last = m2;
  if (2 * last <= D2) return {EndKind::BallMinusDirections, 0};
  YoccozResult y = yoccoz_test(g, dt);
  if (y.outcome == YoccozOutcome::Diverges) return {EndKind::RigidPoint, 0};
  MarkedGrid gg = g;
  detect_flags(gg);
  return {EndKind::PeriodicClosedBall, gg.period};
}

std::string dump_grid(const MarkedGrid& g) {
  int D2 = static_cast<int>(g.entries[0].size()) - 1;
  std::ostringstream os;
  for (int m2 = D2; m2 >= 0; --m2) {
    for (int n = 0; n <= g.columns; ++n)
      os << (g.marked(n, m2) ? 'X' : '.');
    os << '\n';
  }
  return os.str();
}

}  // namespace qdl
