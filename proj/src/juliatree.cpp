#include "qdl/juliatree.hpp"

#include "qdl/puzzle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qdl {

namespace {

// rigid point as a degenerate ball, deep enough to act as an endpoint
TypeIIPoint rigid_ball(const PointL& z) {
  if (z.infinite) throw std::logic_error("rigid_ball: point at infinity");
  return TypeIIPoint::make(z.value, z.value.prec());
}

bool ball_contains(const TypeIIPoint& x, const PointL& z) {
  if (z.infinite) return false;
  return (z.value - x.center).ord() >= OrdVal(x.alpha);
}

// deepest of the three pairwise joins: the branch point of the triple
TypeIIPoint median(const TypeIIPoint& a, const TypeIIPoint& b, const TypeIIPoint& c) {
  TypeIIPoint m = join(a, b);
  TypeIIPoint j = join(a, c);
  if (j.alpha > m.alpha) m = j;
  j = join(b, c);
  if (j.alpha > m.alpha) m = j;
  return m;
}

int find_point(const std::vector<TypeIIPoint>& s, const TypeIIPoint& x) {
  for (size_t i = 0; i < s.size(); ++i)
    if (s[i] == x) return static_cast<int>(i);
  return -1;
}

bool add_point(std::vector<TypeIIPoint>& s, const TypeIIPoint& x) {
  if (find_point(s, x) >= 0) return false;
  s.push_back(x);
  return true;
}

std::vector<int> bfs_parent(const std::vector<std::vector<int>>& adj, int from) {
  std::vector<int> par(adj.size(), -2);
  std::deque<int> q{from};
  par[from] = -1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v])
      if (par[w] == -2) {
        par[w] = v;
        q.push_back(w);
      }
  }
  return par;
}

// tree structure on a join-closed ball set: parent = least strict container
void structure_tree(BerkLevelTree& t) {
  const int n = static_cast<int>(t.verts.size());
  t.edges.clear();
  t.adj.assign(n, {});
  for (int v = 0; v < n; ++v) {
    int par = -1;
    for (int u = 0; u < n; ++u) {
      if (u == v || !(contains(t.verts[u].x, t.verts[v].x))) continue;
      if (t.verts[u].x == t.verts[v].x) throw std::logic_error("duplicate tree vertex");
      if (par < 0 || contains(t.verts[par].x, t.verts[u].x)) par = u;
    }
    if (par >= 0) {
      t.edges.emplace_back(par, v);
      t.adj[par].push_back(v);
      t.adj[v].push_back(par);
    }
  }
  if (t.edges.size() + 1 != t.verts.size())
    throw std::logic_error("level set is not join-closed");
  std::vector<int> p = bfs_parent(t.adj, 0);
  for (int v = 0; v < n; ++v)
    if (p[v] == -2) throw std::logic_error("level tree is disconnected");
}

}  // namespace

int BerkLevelTree::find(const TypeIIPoint& x) const {
  for (const auto& v : verts)
    if (v.x == x) return v.id;
  return -1;
}

std::vector<int> berk_path(const BerkLevelTree& t, int a, int b) {
  std::vector<int> par = bfs_parent(t.adj, a);
  std::vector<int> path;
  for (int v = b; v != -1; v = par[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

JuliaTower build_julia_tower(const RatMapL& phi, const ClassificationReport& report,
                             int L, int horizon) {
  if (report.kind != CaseKind::OneRepelling && report.kind != CaseKind::TwoRepelling)
    throw std::invalid_argument("tower needs a repelling orbit in H");

  JuliaTower tw;
  tw.phi = phi;
  tw.rd = report.rivera;
  tw.L = L;
  const int q = tw.rd.q;

  tw.omega = active_critical_point(phi, report, horizon);
  for (const auto& [c, m] : critical_points(phi))
    if (!(c == tw.omega)) tw.omega_prime = c;

  // escape detection: an orbit point outside every level-0 piece is in U_0
  PieceForest forest = build_pieces(phi, report, Rat(0));
  auto escape_orbit = [&](const PointL& crit, std::vector<PointL>& in_u0) {
    PointL z = crit;
    for (int n = 0; n < horizon; ++n) {
      if (!z.infinite && z.value.str().size() > 4000) return;  // growth cap
      if (!forest.piece_of(z, Rat(0)).has_value()) in_u0.push_back(z);
      z = phi.eval(z);
    }
  };
  std::vector<PointL> esc_omega, esc_prime;
  escape_orbit(tw.omega, esc_omega);
  escape_orbit(tw.omega_prime, esc_prime);
  tw.omega_escapes = !esc_omega.empty();
  tw.omega_prime_escapes = !esc_prime.empty();

  // O_0: skeleton projections of the escaping active-critical orbit
  auto project = [&](const PointL& z) {
    TypeIIPoint xz = rigid_ball(z);
    TypeIIPoint best = tw.rd.theta0;
    for (const auto& xi : tw.rd.orbit) {
      TypeIIPoint m = median(xz, tw.rd.theta0, xi);
      if (!(m == tw.rd.theta0)) best = m;
    }
    return best;
  };
  for (const PointL& z : esc_omega) add_point(tw.orbit0, project(z));

  // nested vertex sets, closed under joins, forward images and preimages
  std::vector<std::vector<TypeIIPoint>> S(L + 1);
  for (const auto& xi : tw.rd.orbit) add_point(S[0], xi);
  add_point(S[0], tw.rd.theta0);
  for (const auto& s : tw.orbit0) add_point(S[0], s);

  std::vector<std::pair<TypeIIPoint, std::vector<TypeIIPoint>>> pre_cache;
  auto preimages_of = [&](const TypeIIPoint& x) -> const std::vector<TypeIIPoint>& {
    for (const auto& [k, v] : pre_cache)
      if (k == x) return v;
    std::vector<TypeIIPoint> ps;
    for (const auto& [p, m] : preimages(phi, x)) ps.push_back(p);
    pre_cache.emplace_back(x, std::move(ps));
    return pre_cache.back().second;
  };

  for (int round = 0;; ++round) {
    if (round > 40) throw std::logic_error("vertex closure did not stabilize");
    bool changed = false;
    for (int l = 1; l <= L; ++l)
      for (const auto& x : S[l - 1]) changed |= add_point(S[l], x);
    for (int l = 0; l <= L; ++l)
      for (size_t i = 0; i < S[l].size(); ++i)
        for (size_t j = 0; j < i; ++j) changed |= add_point(S[l], join(S[l][i], S[l][j]));
    for (int l = L; l >= 1; --l)
      for (size_t i = 0; i < S[l].size(); ++i)
        changed |= add_point(S[l - 1], map_point(phi, S[l][i]));
    for (int l = 0; l < L; ++l)
      for (size_t i = 0; i < S[l].size(); ++i)
        for (const auto& p : preimages_of(S[l][i])) changed |= add_point(S[l + 1], p);
    if (!changed) break;
  }

  // trees with tags and markers
  const int tag_steps = L + 2 * q + 4;
  tw.levels.resize(L + 1);
  for (int l = 0; l <= L; ++l) {
    BerkLevelTree& t = tw.levels[l];
    t.level = l;
    for (const auto& x : S[l]) {
      BerkVertex v;
      v.id = static_cast<int>(t.verts.size());
      v.x = x;
      TypeIIPoint y = x;
      for (int k = 0; k <= tag_steps; ++k) {
        if (y == tw.rd.theta0) {
          v.tag = BerkVertex::Tag::Theta;
          break;
        }
        bool orb = false;
        for (const auto& xi : tw.rd.orbit) orb = orb || y == xi;
        if (orb) {
          v.tag = BerkVertex::Tag::Orbit;
          break;
        }
        if (k < tag_steps) y = map_point(phi, y);
      }
      t.verts.push_back(std::move(v));
    }
    structure_tree(t);
    t.theta0 = t.find(tw.rd.theta0);
    for (const auto& xi : tw.rd.orbit) t.orbit.push_back(t.find(xi));

    int w = -1;
    for (const auto& v : t.verts)
      if (ball_contains(v.x, tw.omega) && (w < 0 || v.x.alpha > t.verts[w].x.alpha))
        w = v.id;
    if (w < 0) throw std::logic_error("no vertex ball holds the critical point");
    t.w = w;
  }

  // transition tables and the fiber involution
  for (int l = 0; l < L; ++l) {
    const BerkLevelTree& lo = tw.levels[l];
    const BerkLevelTree& hi = tw.levels[l + 1];
    std::vector<int> f(hi.verts.size()), u(lo.verts.size());
    for (const auto& v : hi.verts) {
      f[v.id] = lo.find(map_point(phi, v.x));
      if (f[v.id] < 0) throw std::logic_error("vertex image escapes the level below");
    }
    for (const auto& v : lo.verts) u[v.id] = hi.find(v.x);
    std::vector<int> g(hi.verts.size(), -1);
    for (size_t a = 0; a < hi.verts.size(); ++a) {
      if (g[a] >= 0) continue;
      std::vector<int> fiber;
      for (size_t b = a; b < hi.verts.size(); ++b)
        if (f[b] == f[a]) fiber.push_back(static_cast<int>(b));
      if (fiber.size() == 1) g[a] = static_cast<int>(a);
      else if (fiber.size() == 2) {
        g[fiber[0]] = fiber[1];
        g[fiber[1]] = fiber[0];
      } else
        throw std::logic_error("vertex fiber larger than the degree");
    }
    tw.fmap.push_back(std::move(f));
    tw.up.push_back(std::move(u));
    tw.gamma.push_back(std::move(g));
  }
  for (int l = 0; l < L; ++l) tw.levels[l].v = tw.fmap[l][tw.levels[l + 1].w];
  return tw;
}

BerkLevelTree build_julia_tree(const RatMapL& phi, const ClassificationReport& report,
                               int level) {
  return build_julia_tower(phi, report, level).levels[level];
}

Quotient quotient_tree(const std::vector<std::vector<int>>& adj,
                       const std::vector<char>& flagged) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> par(n);
  for (int i = 0; i < n; ++i) par[i] = i;
  std::function<int(int)> find = [&](int x) { return par[x] == x ? x : par[x] = find(par[x]); };
  for (int v = 0; v < n; ++v)
    for (int w : adj[v])
      if (flagged[v] && flagged[w]) par[find(v)] = find(w);

  Quotient out;
  out.cls.assign(n, -1);
  std::map<int, int> id;
  for (int v = 0; v < n; ++v) {
    int r = find(v);
    auto [it, fresh] = id.emplace(r, out.classes);
    if (fresh) ++out.classes;
    out.cls[v] = it->second;
  }
  out.adj.assign(out.classes, {});
  std::set<std::pair<int, int>> seen;
  for (int v = 0; v < n; ++v)
    for (int w : adj[v]) {
      int a = out.cls[v], b = out.cls[w];
      if (a == b || !seen.emplace(std::min(a, b), std::max(a, b)).second) continue;
      out.adj[a].push_back(b);
      out.adj[b].push_back(a);
    }
  size_t edges = seen.size();
  if (edges + 1 != static_cast<size_t>(out.classes))
    throw std::logic_error("collapse classes do not quotient to a tree");
  return out;
}

CollapsedTower collapse(const JuliaTower& tw) {
  CollapsedTower ct;
  ct.L = tw.L;
  ct.q = tw.rd.q;
  ct.trivial = tw.orbit0.size() <= 1;

  // hull membership of the projected orbit
  auto in_hull = [&](const TypeIIPoint& u) {
    for (const auto& a : tw.orbit0)
      for (const auto& b : tw.orbit0)
        if (hyperbolic_distance(a, u) + hyperbolic_distance(u, b) ==
            hyperbolic_distance(a, b))
          return true;
    return false;
  };

  std::vector<Quotient> qs(tw.L + 1);
  for (int l = 0; l <= tw.L; ++l) {
    const BerkLevelTree& t = tw.levels[l];
    std::vector<char> flagged(t.verts.size(), 0);
    if (!ct.trivial) {
      int steps = l + 2 * ct.q + 2;
      for (const auto& v : t.verts) {
        TypeIIPoint y = v.x;
        for (int k = 0; k < steps; ++k) y = map_point(tw.phi, y);
        flagged[v.id] = in_hull(y);
      }
    }
    qs[l] = quotient_tree(t.adj, flagged);
    ct.cls.push_back(qs[l].cls);
    ct.adj.push_back(qs[l].adj);

    std::vector<int> kind(qs[l].classes, 2);
    for (const auto& v : t.verts) {
      int c = qs[l].cls[v.id];
      if (v.tag == BerkVertex::Tag::Theta) kind[c] = 0;
      else if (v.tag == BerkVertex::Tag::Orbit && kind[c] != 0) kind[c] = 1;
    }
    ct.kind.push_back(std::move(kind));
    ct.theta0.push_back(qs[l].cls[t.theta0]);
    ct.w.push_back(qs[l].cls[t.w]);
    ct.v.push_back(t.v >= 0 ? qs[l].cls[t.v] : -1);
  }
  for (int j : tw.levels[0].orbit) ct.orbit.push_back(qs[0].cls[j]);

  for (int l = 0; l < tw.L; ++l) {
    std::vector<int> psi(qs[l + 1].classes, -1), up(qs[l].classes, -1);
    for (size_t v = 0; v < tw.fmap[l].size(); ++v) {
      int c = qs[l + 1].cls[v], ic = qs[l].cls[tw.fmap[l][v]];
      if (psi[c] >= 0 && psi[c] != ic)
        throw std::logic_error("induced map is not constant on a class");
      psi[c] = ic;
    }
    for (size_t v = 0; v < tw.up[l].size(); ++v) {
      int c = qs[l].cls[v], ic = qs[l + 1].cls[tw.up[l][v]];
      if (up[c] >= 0 && up[c] != ic)
        throw std::logic_error("inclusion is not constant on a class");
      up[c] = ic;
    }
    std::vector<int> g(qs[l + 1].classes, -1);
    for (int a = 0; a < qs[l + 1].classes; ++a) {
      if (g[a] >= 0) continue;
      std::vector<int> fiber;
      for (int b = a; b < qs[l + 1].classes; ++b)
        if (psi[b] == psi[a]) fiber.push_back(b);
      if (fiber.size() == 1) g[a] = a;
      else if (fiber.size() == 2) {
        g[fiber[0]] = fiber[1];
        g[fiber[1]] = fiber[0];
      } else
        throw std::logic_error("collapsed fiber larger than the degree");
    }
    ct.psi.push_back(std::move(psi));
    ct.up.push_back(std::move(up));
    ct.gamma.push_back(std::move(g));
  }
  return ct;
}

namespace {

std::vector<int> tree_path_adj(const std::vector<std::vector<int>>& adj, int a, int b) {
  std::vector<int> par = bfs_parent(adj, a);
  std::vector<int> path;
  for (int v = b; v != -1; v = par[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

std::vector<int> postcritical_subtree(const CollapsedTower& ct, int level) {
  // embed a class at a lower level into the query level
  auto embed = [&](int c, int from) {
    for (int l = from; l < level; ++l) c = ct.up[l][c];
    return c;
  };
  auto self0 = [&](int c) { return ct.L >= 1 ? ct.psi[0][ct.up[0][c]] : c; };

  std::vector<int> keep;
  const int n = static_cast<int>(ct.adj[level].size());
  for (int x = 0; x < n; ++x) {
    bool ok = true;
    int y = x, lv = level;
    for (int k = 0; k <= n + level + 2 && ok; ++k) {
      int e = embed(y, lv);
      std::vector<int> path = tree_path_adj(ct.adj[level], ct.theta0[level], e);
      for (size_t i = 0; i + 1 < path.size(); ++i)
        if (path[i] == ct.w[level]) ok = false;
      if (lv > 0) {
        y = ct.psi[lv - 1][y];
        --lv;
      } else {
        y = self0(y);
      }
    }
    if (ok) keep.push_back(x);
  }
  return keep;
}

SideTower side_of(const CollapsedTower& ct) {
  SideTower s;
  s.L = ct.L;
  s.q = ct.q;
  s.adj = ct.adj;
  s.up = ct.up;
  s.psi = ct.psi;
  s.gamma = ct.gamma;
  s.kind = ct.kind;
  s.root = ct.theta0;
  s.orbit0 = ct.orbit;
  s.vmark = ct.v;
  return s;
}

SideTower side_of(const TreeTower& tw) {
  SideTower s;
  s.L = static_cast<int>(tw.trees.size()) - 1;
  s.q = tw.q;
  Rat a0 = rotation_orbit(tw.p, tw.q)[0];
  for (int l = 0; l <= s.L; ++l) {
    const LevelTree& t = tw.trees[l];
    s.adj.push_back(t.adj);
    std::vector<int> kind;
    for (const auto& v : t.verts) kind.push_back(v.is_gamma ? 0 : 1);
    s.kind.push_back(std::move(kind));
    s.root.push_back(t.vertex_at_angle(a0));
    s.vmark.push_back(l < s.L ? tw.m2[l][tw.trees[l + 1].v0] : -1);
  }
  s.up = tw.iota;
  s.psi = tw.m2;
  for (const auto& b : tw.branched) s.gamma.push_back(b.gamma);
  int f = -1;
  for (const auto& v : tw.trees[0].verts)
    if (!v.is_gamma) {
      f = v.id;
      break;
    }
  if (s.L >= 1) {
    // the induced self-map of the level-0 tree, read off the tower tables
    for (int j = 0; j < s.q; ++j) {
      s.orbit0.push_back(f);
      f = tw.m2[0][tw.iota[0][f]];
    }
  } else {
    for (const auto& v : tw.trees[0].verts)
      if (!v.is_gamma) s.orbit0.push_back(v.id);
  }
  return s;
}

namespace {

struct Candidate {
  Rat theta;  // in [0, 1)
  Flavor flavor;
  TreeTower lam;
  std::vector<std::vector<int>> h;
};

// one attempt: build the lamination tower at theta and lift the base
// isomorphism through every level; empty on any failure
std::optional<Candidate> try_candidate(const SideTower& side, int p, int q,
                                       const Rat& theta, Flavor flavor, int upto,
                                       std::string& why) {
  Candidate cand;
  cand.theta = theta;
  cand.flavor = flavor;
  try {
    // one spare level so the induced level-0 dynamics can be read off the
    // tables even when upto is 0
    cand.lam = inverse_limit_truncation(p, q, theta, flavor, std::max(upto, 1));
  } catch (const std::exception& e) {
    why = std::string("lamination: ") + e.what();
    return std::nullopt;
  }
  const TreeTower& lam = cand.lam;
  if (side.adj[0].size() != lam.trees[0].verts.size()) {
    why = "level-0 vertex counts differ";
    return std::nullopt;
  }
  int gam0 = -1;
  for (const auto& v : lam.trees[0].verts)
    if (v.is_gamma) gam0 = v.id;

  std::vector<int> faces;
  for (const auto& v : lam.trees[0].verts)
    if (!v.is_gamma) faces.push_back(v.id);
  if (static_cast<int>(faces.size()) != q || static_cast<int>(side.orbit0.size()) != q) {
    why = "level-0 region counts differ";
    return std::nullopt;
  }

  for (int r = 0; r < q; ++r) {
    std::vector<std::vector<int>> h(1);
    h[0].assign(side.adj[0].size(), -1);
    h[0][side.root[0]] = gam0;
    int f = faces[r];
    bool clash = false;
    for (int j = 0; j < q; ++j) {
      if (h[0][side.orbit0[j]] >= 0) clash = true;
      h[0][side.orbit0[j]] = f;
      f = lam.m2[0][lam.iota[0][f]];
    }
    if (clash) continue;

    bool ok = true;
    for (int l = 0; l < upto && ok; ++l) {
      LiftProblem pr;
      pr.adjA = side.adj[l + 1];
      pr.adjT = lam.trees[l + 1].adj;
      pr.inA.assign(pr.adjA.size(), 0);
      pr.inT.assign(pr.adjT.size(), 0);
      pr.phi.resize(pr.adjA.size());
      pr.m.resize(pr.adjT.size());
      for (size_t v = 0; v < pr.adjA.size(); ++v)
        pr.phi[v] = side.up[l][side.psi[l][v]];
      for (size_t v = 0; v < pr.adjT.size(); ++v)
        pr.m[v] = lam.iota[l][lam.m2[l][v]];
      pr.gammaA = side.gamma[l];
      pr.gammaT = lam.branched[l].gamma;
      pr.h.assign(pr.adjA.size(), -1);
      for (size_t u = 0; u < side.adj[l].size(); ++u) {
        pr.inA[side.up[l][u]] = 1;
        pr.h[side.up[l][u]] = lam.iota[l][h[l][u]];
      }
      for (size_t u = 0; u < lam.trees[l].verts.size(); ++u)
        pr.inT[lam.iota[l][u]] = 1;
      try {
        h.push_back(lift_isomorphism(pr));
      } catch (const NotLiftable& e) {
        why = e.what();
        ok = false;
      }
    }
    if (!ok) continue;

    // kind preservation at every level
    for (int l = 0; l <= upto && ok; ++l)
      for (size_t v = 0; v < h[l].size(); ++v) {
        if (side.kind[l][v] == 2) continue;
        if ((side.kind[l][v] == 0) != lam.trees[l].verts[h[l][v]].is_gamma) {
          why = "kind mismatch at level " + std::to_string(l);
          ok = false;
          break;
        }
      }
    if (!ok) continue;

    cand.h = std::move(h);
    return cand;
  }
  if (why.empty()) why = "no base rotation lifts";
  return std::nullopt;
}

}  // namespace

ConjugacyReport conjugacy_engine(const SideTower& side, int p, int q, int L) {
  if (q != side.q) throw std::invalid_argument("rotation period disagrees with the tower");
  auto [lo0, hi0] = characteristic_interval(p, q);  // hi0 may exceed 1

  struct Cell {
    Rat lo, hi;  // unwrapped: lo0 <= lo < hi <= hi0
  };
  std::vector<Cell> cells{{lo0, hi0}};
  std::vector<Rat> exacts{lo0, hi0};
  std::vector<Rat> base = rotation_orbit(p, q);

  ConjugacyReport rep;
  rep.L = L;
  rep.p = p;
  rep.q = q;
  std::string why;
  std::optional<Candidate> cell_win, exact_win;

  for (int k = 0; k <= L; ++k) {
    // breakpoints: the level-k support angles, unwrapped into the interval
    std::vector<Rat> brk;
    Rat pow(1);
    for (int i = 0; i < k; ++i) pow = pow * Rat(2);
    for (const Rat& a : base)
      for (Rat j(0); j < pow; j = j + Rat(1)) {
        Rat s = (a + j) / pow;
        if (s < lo0) s = s + Rat(1);
        if (lo0 < s && s < hi0) brk.push_back(s);
      }
    std::sort(brk.begin(), brk.end());

    std::vector<Cell> next;
    cell_win.reset();
    for (const Cell& c : cells) {
      std::vector<Rat> cuts{c.lo};
      for (const Rat& s : brk)
        if (c.lo < s && s < c.hi) cuts.push_back(s);
      cuts.push_back(c.hi);
      for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        Rat mid = (cuts[i] + cuts[i + 1]) / Rat(2);
        auto res = try_candidate(side, p, q, angle_mod1(mid), Flavor::Plus, k, why);
        if (res) {
          next.push_back({cuts[i], cuts[i + 1]});
          cell_win = std::move(res);
        }
      }
    }

    // exact candidates: previous survivors plus the new subdivision angles
    std::vector<Rat> exnext_pool = exacts;
    exnext_pool.insert(exnext_pool.end(), brk.begin(), brk.end());
    std::sort(exnext_pool.begin(), exnext_pool.end());
    exnext_pool.erase(std::unique(exnext_pool.begin(), exnext_pool.end()),
                      exnext_pool.end());
    std::vector<Rat> exnext;
    exact_win.reset();
    for (const Rat& t : exnext_pool) {
      for (Flavor f : {Flavor::Join, Flavor::Plus, Flavor::Minus}) {
        auto res = try_candidate(side, p, q, angle_mod1(t), f, k, why);
        if (res) {
          exnext.push_back(t);
          if (!exact_win) exact_win = std::move(res);
          break;
        }
      }
    }

    if (next.empty() && exnext.empty())
      throw NoConjugacy("no admissible angle at level " + std::to_string(k) +
                        " (last failure: " + why + ")");

    std::vector<std::pair<Rat, Rat>> arcs;
    for (const Cell& c : next) {
      if (!arcs.empty() && arcs.back().second == c.lo) arcs.back().second = c.hi;
      else arcs.emplace_back(c.lo, c.hi);
    }
    rep.arcs.push_back(arcs);
    std::vector<Rat> exrep;
    for (const Rat& t : exnext) exrep.push_back(angle_mod1(t));
    rep.exact.push_back(exrep);
    cells = std::move(next);
    exacts = std::move(exnext);
  }

  const Candidate& win = cells.empty() ? *exact_win : *cell_win;
  rep.prefixed = cells.empty();
  rep.theta = win.theta;
  rep.flavor = win.flavor;
  rep.lam = win.lam;
  rep.h = win.h;
  for (int l = 0; l <= L; ++l)
    rep.vimg.push_back(side.vmark[l] >= 0 ? rep.h[l][side.vmark[l]] : -1);
  rep.summary = "conjugacy verified through level " + std::to_string(L) +
                (rep.prefixed ? " (critically prefixed angle " : " (angle interval around ") +
                rep.theta.str() + ")";
  return rep;
}

ConjugacyReport conjugacy_search(const CollapsedTower& ct, int p, int q) {
  return conjugacy_engine(side_of(ct), p, q, ct.L);
}

}  // namespace qdl
