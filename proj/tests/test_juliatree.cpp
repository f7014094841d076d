#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdl/juliatree.hpp"
#include "qdl/parse.hpp"

#include <algorithm>
#include <set>
#include <vector>

using namespace qdl;

namespace {

struct Fixture {
  RatMapL phi;
  ClassificationReport rep;
  JuliaTower tw;
  CollapsedTower ct;
};

// phi(z) = t - (1 + t^2)/z + t/z^2: two repelling boundary orbits, q = 2
const Fixture& f_two() {
  static Fixture f = [] {
    Fixture x;
    x.phi = parse_map("t - (1 + t^2)/z + t/z^2", Backend::Exact, Rat(64));
    x.rep = classify(x.phi);
    x.tw = build_julia_tower(x.phi, x.rep, 3);
    x.ct = collapse(x.tw);
    return x;
  }();
  return f;
}

// phi(z) = -t - (1 + t^2)/z + t/z^2: one repelling boundary orbit, q = 2
const Fixture& f_one() {
  static Fixture f = [] {
    Fixture x;
    x.phi = parse_map("-t - (1 + t^2)/z + t/z^2", Backend::Exact, Rat(64));
    x.rep = classify(x.phi);
    x.tw = build_julia_tower(x.phi, x.rep, 3);
    x.ct = collapse(x.tw);
    return x;
  }();
  return f;
}

int deepest(const BerkLevelTree& t, const PointL& z) {
  int best = -1;
  for (const auto& v : t.verts)
    if (!z.infinite && (z.value - v.x.center).ord() >= OrdVal(v.x.alpha))
      if (best < 0 || v.x.alpha > t.verts[best].x.alpha) best = v.id;
  return best;
}

bool connected(const std::vector<std::vector<int>>& adj, const std::vector<int>& keep) {
  if (keep.empty()) return false;
  std::set<int> want(keep.begin(), keep.end()), seen{keep[0]};
  std::vector<int> stack{keep[0]};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (want.count(w) && seen.insert(w).second) stack.push_back(w);
  }
  return seen == want;
}

// the class of xi_j at a level, followed up the inclusion chain
int orbit_class(const CollapsedTower& ct, int level, int j) {
  int c = ct.orbit[j];
  for (int l = 0; l < level; ++l) c = ct.up[l][c];
  return c;
}

}  // namespace

TEST_CASE("level zero hull is the repelling orbit joined at the center") {
  const Fixture& f = f_two();
  CHECK(f.rep.kind == CaseKind::TwoRepelling);
  const BerkLevelTree& t = f.tw.levels[0];
  REQUIRE(t.verts.size() == 3);
  CHECK(t.edges.size() == 2);
  CHECK(t.verts[t.theta0].x == TypeIIPoint::gauss());
  CHECK(t.verts[t.theta0].tag == BerkVertex::Tag::Theta);
  REQUIRE(t.orbit.size() == 2);
  CHECK(t.verts[t.orbit[0]].x == TypeIIPoint::make(PuiseuxSeries::zero(), Rat(1)));
  CHECK(t.verts[t.orbit[1]].x == TypeIIPoint::make(PuiseuxSeries::zero(), Rat(-1)));
  for (int j : t.orbit) {
    CHECK(t.verts[j].tag == BerkVertex::Tag::Orbit);
    CHECK(std::find(t.adj[t.theta0].begin(), t.adj[t.theta0].end(), j) !=
          t.adj[t.theta0].end());
  }
  CHECK(!f.tw.omega_escapes);
  CHECK(!f.tw.omega_prime_escapes);
  CHECK(f.tw.orbit0.empty());
}

TEST_CASE("vertex sets nest and keep their markings") {
  for (const Fixture* f : {&f_two(), &f_one()}) {
    const JuliaTower& tw = f->tw;
    for (int l = 0; l < tw.L; ++l) {
      const BerkLevelTree& lo = tw.levels[l];
      const BerkLevelTree& hi = tw.levels[l + 1];
      std::set<int> img;
      for (size_t u = 0; u < lo.verts.size(); ++u) {
        int v = tw.up[l][u];
        CHECK(img.insert(v).second);
        CHECK(hi.verts[v].x == lo.verts[u].x);
        CHECK(hi.verts[v].tag == lo.verts[u].tag);
      }
      CHECK(tw.up[l][lo.theta0] == hi.theta0);
      // the critical ball only shrinks with the level
      const TypeIIPoint& a = lo.verts[lo.w].x;
      const TypeIIPoint& b = hi.verts[hi.w].x;
      CHECK((a == b || contains(a, b)));
    }
  }
}

TEST_CASE("transition tables obey the branched dynamics laws") {
  for (const Fixture* f : {&f_two(), &f_one()}) {
    const JuliaTower& tw = f->tw;
    int q = static_cast<int>(tw.levels[0].orbit.size());
    for (int l = 0; l < tw.L; ++l) {
      const std::vector<int>& fm = tw.fmap[l];
      const std::vector<int>& g = tw.gamma[l];
      for (size_t v = 0; v < fm.size(); ++v) {
        CHECK(g[g[v]] == static_cast<int>(v));
        CHECK(fm[g[v]] == fm[v]);
      }
      // fibers are exactly the involution orbits
      for (size_t v = 0; v < fm.size(); ++v)
        for (size_t w = v + 1; w < fm.size(); ++w)
          if (fm[v] == fm[w]) CHECK(g[v] == static_cast<int>(w));
      // theta_0 is fixed and the boundary orbit cycles
      CHECK(fm[tw.levels[l + 1].theta0] == tw.levels[l].theta0);
      for (int j = 0; j < q; ++j)
        CHECK(fm[tw.levels[l + 1].orbit[j]] == tw.levels[l].orbit[(j + 1) % q]);
      // the marked critical value is the image of the finer critical vertex
      CHECK(tw.levels[l].v == fm[tw.levels[l + 1].w]);
    }
  }
}

TEST_CASE("new degree-one orbit preimages are endpoints") {
  const Fixture& f = f_two();
  const BerkLevelTree& t = f.tw.levels[1];
  std::set<int> old;
  for (int v : f.tw.up[0]) old.insert(v);
  int fresh = 0;
  for (const auto& v : t.verts) {
    if (old.count(v.id) || v.tag != BerkVertex::Tag::Orbit) continue;
    ++fresh;
    if (local_degree(f.phi, v.x) == 1) CHECK(t.adj[v.id].size() == 1);
  }
  CHECK(fresh > 0);
}

TEST_CASE("the degree-two locus is the path between the critical balls") {
  for (const Fixture* f : {&f_two(), &f_one()}) {
    for (int l = 0; l <= f->tw.L; ++l) {
      const BerkLevelTree& t = f->tw.levels[l];
      int a = deepest(t, f->tw.omega), b = deepest(t, f->tw.omega_prime);
      REQUIRE(a >= 0);
      REQUIRE(b >= 0);
      std::vector<int> path = berk_path(t, a, b);
      std::set<int> on(path.begin(), path.end());
      for (const auto& v : t.verts)
        CHECK((local_degree(f->phi, v.x) == 2) == (on.count(v.id) > 0));
    }
  }
  // the locus is a single vertex at the base and grows by level three
  const BerkLevelTree& t3 = f_two().tw.levels[3];
  int n2 = 0;
  for (const auto& v : t3.verts) n2 += local_degree(f_two().phi, v.x) == 2;
  CHECK(n2 == 3);
}

TEST_CASE("collapse is the identity when no critical point escapes") {
  for (const Fixture* f : {&f_two(), &f_one()}) {
    const CollapsedTower& ct = f->ct;
    CHECK(ct.trivial);
    for (int l = 0; l <= ct.L; ++l) {
      const BerkLevelTree& t = f->tw.levels[l];
      REQUIRE(ct.adj[l].size() == t.verts.size());
      for (size_t v = 0; v < t.verts.size(); ++v) {
        CHECK(ct.cls[l][v] == static_cast<int>(v));
        int k = ct.kind[l][v];
        if (t.verts[v].tag == BerkVertex::Tag::Theta) CHECK(k == 0);
        else if (t.verts[v].tag == BerkVertex::Tag::Orbit) CHECK(k == 1);
        else CHECK(k == 2);
      }
      CHECK(ct.theta0[l] == t.theta0);
      CHECK(ct.w[l] == t.w);
    }
    for (int l = 0; l < ct.L; ++l) {
      CHECK(ct.psi[l] == f->tw.fmap[l]);
      CHECK(ct.up[l] == f->tw.up[l]);
    }
  }
}

TEST_CASE("quotient of a tree by a flagged subforest") {
  // a path with one flagged edge contracts to a shorter path
  std::vector<std::vector<int>> path{{1}, {0, 2}, {1, 3}, {2, 4}, {3, 5}, {4}};
  Quotient q = quotient_tree(path, {0, 0, 1, 1, 0, 0});
  CHECK(q.classes == 5);
  CHECK(q.cls[2] == q.cls[3]);
  int leaves = 0;
  for (const auto& a : q.adj) {
    CHECK(a.size() <= 2);
    leaves += a.size() == 1;
  }
  CHECK(leaves == 2);

  // non-adjacent flagged vertices stay separate
  Quotient r = quotient_tree(path, {0, 1, 0, 1, 0, 0});
  CHECK(r.classes == 6);
  CHECK(r.cls[1] != r.cls[3]);

  // contracting a star edge keeps the other spokes
  std::vector<std::vector<int>> star{{1, 2, 3}, {0}, {0}, {0}};
  Quotient s = quotient_tree(star, {1, 1, 0, 0});
  CHECK(s.classes == 3);
  CHECK(s.cls[0] == s.cls[1]);
  CHECK(s.adj[s.cls[0]].size() == 2);
}

TEST_CASE("postcritical filter: connected, forward invariant, marked") {
  for (const Fixture* f : {&f_two(), &f_one()}) {
    const CollapsedTower& ct = f->ct;
    for (int l = 0; l <= ct.L; ++l) {
      std::vector<int> P = postcritical_subtree(ct, l);
      std::set<int> in(P.begin(), P.end());
      CHECK(in.count(ct.theta0[l]));
      CHECK(in.count(ct.w[l]));
      CHECK(connected(ct.adj[l], P));
    }
    // invariance under the induced self-map of the base level
    std::vector<int> P0 = postcritical_subtree(ct, 0);
    std::set<int> in0(P0.begin(), P0.end());
    if (ct.L >= 1)
      for (int x : P0) CHECK(in0.count(ct.psi[0][ct.up[0][x]]));
  }
  // below the critical depth the filter is the base star; at depth three the
  // critical vertex becomes an endpoint and the whole tree survives
  const CollapsedTower& ct = f_two().ct;
  for (int l = 0; l <= 2; ++l) {
    std::vector<int> P = postcritical_subtree(ct, l);
    CHECK(std::set<int>(P.begin(), P.end()) ==
          std::set<int>{ct.theta0[l], orbit_class(ct, l, 0), orbit_class(ct, l, 1)});
  }
  CHECK(postcritical_subtree(ct, 3).size() == ct.adj[3].size());
}

namespace {

void check_isomorphism_tower(const SideTower& side, const ConjugacyReport& cr) {
  const TreeTower& lam = cr.lam;
  for (int l = 0; l <= cr.L; ++l) {
    const std::vector<int>& h = cr.h[l];
    REQUIRE(h.size() == side.adj[l].size());
    std::set<int> img(h.begin(), h.end());
    CHECK(img.size() == lam.trees[l].verts.size());
    for (size_t v = 0; v < h.size(); ++v) {
      if (side.kind[l][v] != 2)
        CHECK((side.kind[l][v] == 0) == lam.trees[l].verts[h[v]].is_gamma);
      for (int w : side.adj[l][v]) {
        const auto& a = lam.trees[l].adj[h[v]];
        CHECK(std::find(a.begin(), a.end(), h[w]) != a.end());
      }
    }
  }
  for (int l = 0; l < cr.L; ++l)
    for (size_t v = 0; v < cr.h[l + 1].size(); ++v) {
      // conjugation of the level maps and compatibility with the inclusions
      CHECK(cr.h[l][side.psi[l][v]] == lam.m2[l][cr.h[l + 1][v]]);
    }
  for (int l = 0; l < cr.L; ++l)
    for (size_t u = 0; u < cr.h[l].size(); ++u)
      CHECK(cr.h[l + 1][side.up[l][u]] == lam.iota[l][cr.h[l][u]]);
}

void check_nested_arcs(const ConjugacyReport& cr) {
  for (size_t k = 0; k + 1 < cr.arcs.size(); ++k)
    for (const auto& [lo, hi] : cr.arcs[k + 1]) {
      bool inside = false;
      for (const auto& [a, b] : cr.arcs[k])
        if (!(lo < a) && !(b < hi)) inside = true;
      CHECK(inside);
    }
}

}  // namespace

TEST_CASE("conjugacy of the two-orbit example through level three") {
  const Fixture& f = f_two();
  ConjugacyReport cr = conjugacy_search(f.ct, 1, 2);
  CHECK(cr.summary.find("verified through level 3") != std::string::npos);
  CHECK(!cr.prefixed);
  for (const auto& a : cr.arcs) CHECK(!a.empty());
  check_nested_arcs(cr);
  check_isomorphism_tower(side_of(f.ct), cr);
  // the admissible interval narrows to the middle of the characteristic one
  REQUIRE(cr.arcs[3].size() == 1);
  CHECK(cr.arcs[3][0] == std::pair{Rat(5, 12), Rat(7, 12)});
  CHECK(Rat(5, 12) < cr.theta);
  CHECK(cr.theta < Rat(7, 12));
}

TEST_CASE("conjugacy of the one-orbit example through level three") {
  const Fixture& f = f_one();
  ConjugacyReport cr = conjugacy_search(f.ct, 1, 2);
  CHECK(cr.summary.find("verified through level 3") != std::string::npos);
  CHECK(!cr.prefixed);
  check_nested_arcs(cr);
  check_isomorphism_tower(side_of(f.ct), cr);
  // the two examples split the characteristic interval between them
  REQUIRE(cr.arcs[3].size() == 2);
  CHECK(cr.arcs[3][0] == std::pair{Rat(1, 3), Rat(5, 12)});
  CHECK(cr.arcs[3][1] == std::pair{Rat(7, 12), Rat(2, 3)});
}

TEST_CASE("the lamination tower recognizes its own angle") {
  for (auto [p, q, L] : {std::tuple{1, 2, 3}, {1, 3, 2}}) {
    Rat t1 = angle_mod1(characteristic_interval(p, q).second);
    TreeTower tw = inverse_limit_truncation(p, q, t1, Flavor::Plus, L);
    ConjugacyReport cr = conjugacy_engine(side_of(tw), p, q, L);
    check_isomorphism_tower(side_of(tw), cr);
    // the seeding angle stays admissible at every level
    for (const auto& ex : cr.exact)
      CHECK(std::find(ex.begin(), ex.end(), t1) != ex.end());
  }
}

TEST_CASE("conjugacy failures are reported, not fudged") {
  SideTower side = side_of(f_two().ct);
  CHECK_THROWS_AS(conjugacy_engine(side, 1, 3, 1), std::invalid_argument);
  // breaking the root marking kills every candidate
  side.kind[0][side.root[0]] = 1;
  CHECK_THROWS_AS(conjugacy_engine(side, 1, 2, 1), NoConjugacy);
}
