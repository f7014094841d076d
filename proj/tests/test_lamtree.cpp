#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdl/lamtree.hpp"

#include <algorithm>
#include <set>
#include <vector>

using namespace qdl;

namespace {

TreeTower center_tower(int p, int q, int L) {
  Rat t1 = angle_mod1(characteristic_interval(p, q).second);
  return inverse_limit_truncation(p, q, t1, Flavor::Plus, L);
}

int gamma_count(const LevelTree& t) {
  int n = 0;
  for (const auto& v : t.verts) n += v.is_gamma;
  return n;
}

// lift problem between two towers at one level: A' = tree l+1 with subtree
// iota(tree l), branched map iota o m2, base iso h on the subtree
LiftProblem make_problem(const TreeTower& a, const TreeTower& b, int l,
                         const std::vector<int>& h_low) {
  LiftProblem pr;
  pr.adjA = a.trees[l + 1].adj;
  pr.adjT = b.trees[l + 1].adj;
  pr.inA.assign(pr.adjA.size(), 0);
  pr.inT.assign(pr.adjT.size(), 0);
  pr.phi.resize(pr.adjA.size());
  pr.m.resize(pr.adjT.size());
  for (size_t v = 0; v < pr.adjA.size(); ++v) pr.phi[v] = a.iota[l][a.m2[l][v]];
  for (size_t v = 0; v < pr.adjT.size(); ++v) pr.m[v] = b.iota[l][b.m2[l][v]];
  pr.gammaA = a.branched[l].gamma;
  pr.gammaT = b.branched[l].gamma;
  pr.h.assign(pr.adjA.size(), -1);
  for (size_t u = 0; u < a.trees[l].verts.size(); ++u) {
    pr.inA[a.iota[l][u]] = 1;
    pr.h[a.iota[l][u]] = b.iota[l][h_low[u]];
  }
  for (size_t u = 0; u < b.trees[l].verts.size(); ++u) pr.inT[b.iota[l][u]] = 1;
  return pr;
}

}  // namespace

TEST_CASE("level zero trees are starlike") {
  for (auto [p, q] : {std::pair{1, 2}, {1, 3}, {2, 5}}) {
    LevelTree t = center_tower(p, q, 0).trees[0];
    CHECK(gamma_count(t) == 1);
    CHECK(t.verts.size() == static_cast<size_t>(1 + q));
    CHECK(t.edges.size() == static_cast<size_t>(q));
    for (const auto& [g, y] : t.edges) {
      CHECK(t.verts[g].is_gamma);
      CHECK(!t.verts[y].is_gamma);
    }
  }
}

TEST_CASE("level one tree of the 1/2-limb by hand") {
  TreeTower tw = center_tower(1, 2, 1);
  const LevelTree& t = tw.trees[1];
  CHECK(t.marked == std::vector<Rat>{Rat(1, 6), Rat(1, 3), Rat(2, 3), Rat(5, 6)});
  CHECK(gamma_count(t) == 2);
  CHECK(t.verts.size() == 5);
  CHECK(t.edges.size() == 4);

  // the path Y - Gamma - Y - Gamma - Y: end regions have one arc each, the
  // middle region is the annulus with two boundary arcs holding 0 and infinity
  int mid = t.face_at(Rat(1, 4));
  CHECK(t.verts[mid].arcs.size() == 2);
  CHECK(mid == t.face_at(Rat(3, 4)));
  CHECK(t.v0 == mid);
  CHECK(t.vinf == mid);
  CHECK(t.vertex_at_angle(Rat(1, 3)) == t.vertex_at_angle(Rat(2, 3)));
  CHECK(t.vertex_at_angle(Rat(1, 6)) == t.vertex_at_angle(Rat(5, 6)));
  CHECK(t.vertex_at_angle(Rat(1, 3)) != t.vertex_at_angle(Rat(1, 6)));
}

TEST_CASE("transition tables are coherent") {
  std::vector<TreeTower> towers;
  towers.push_back(center_tower(1, 2, 4));
  towers.push_back(center_tower(1, 3, 4));
  towers.push_back(inverse_limit_truncation(1, 3, Rat(9, 56), Flavor::Join, 4));
  towers.push_back(inverse_limit_truncation(1, 2, Rat(3, 7), Flavor::Plus, 4));

  for (const TreeTower& tw : towers) {
    for (int l = 0; l + 1 <= 4; ++l) {
      const LevelTree& lo = tw.trees[l];
      const LevelTree& hi = tw.trees[l + 1];

      // pi o iota = id, iota keeps kinds and payload anchors, edges persist
      for (size_t u = 0; u < lo.verts.size(); ++u) {
        int v = tw.iota[l][u];
        CHECK(tw.pi[l][v] == static_cast<int>(u));
        CHECK(hi.verts[v].is_gamma == lo.verts[u].is_gamma);
        if (lo.verts[u].is_gamma) {
          CHECK(hi.verts[v].angles == lo.verts[u].angles);
        } else {
          bool shares = false;
          for (const auto& [a, b] : hi.verts[v].arcs)
            if (a == lo.verts[u].arcs[0].first) shares = true;
          CHECK(shares);
        }
      }
      for (const auto& [a, b] : lo.edges) {
        int ia = tw.iota[l][a], ib = tw.iota[l][b];
        CHECK(std::find(hi.adj[ia].begin(), hi.adj[ia].end(), ib) != hi.adj[ia].end());
      }

      // projection keeps or absorbs kinds: a Gamma image is never a finer kind
      for (const auto& v : hi.verts)
        if (!v.is_gamma) CHECK(!lo.verts[tw.pi[l][v.id]].is_gamma);
    }

    // doubling commutes with projection two levels against one
    for (int l = 0; l + 2 <= 4; ++l)
      for (size_t v = 0; v < tw.trees[l + 2].verts.size(); ++v)
        CHECK(tw.m2[l][tw.pi[l + 1][v]] == tw.pi[l][tw.m2[l + 1][v]]);
  }
}

TEST_CASE("branched structure of doubling") {
  for (const TreeTower& tw :
       {center_tower(1, 2, 4), center_tower(1, 3, 4),
        inverse_limit_truncation(1, 2, Rat(3, 7), Flavor::Plus, 4)}) {
    for (int l = 0; l + 1 <= 4; ++l) {
      const BranchedData& bd = tw.branched[l];
      const std::vector<int>& m2 = tw.m2[l];
      const LevelTree& hi = tw.trees[l + 1];

      for (size_t v = 0; v < hi.verts.size(); ++v) {
        CHECK(bd.gamma[bd.gamma[v]] == static_cast<int>(v));
        CHECK(m2[bd.gamma[v]] == m2[v]);
      }
      // fibers are exactly the involution orbits
      for (size_t v = 0; v < hi.verts.size(); ++v)
        for (size_t w = v + 1; w < hi.verts.size(); ++w)
          if (m2[v] == m2[w]) CHECK(bd.gamma[v] == static_cast<int>(w));

      // the critical value interval is the image of the fixed locus
      std::set<int> fiximg, iset(bd.I.begin(), bd.I.end());
      for (size_t v = 0; v < hi.verts.size(); ++v)
        if (bd.gamma[v] == static_cast<int>(v)) fiximg.insert(m2[v]);
      CHECK(fiximg == iset);

      // the critical interval is connected
      std::set<int> jset(bd.J.begin(), bd.J.end());
      REQUIRE(!bd.J.empty());
      std::vector<int> stack{bd.J[0]};
      std::set<int> seen{bd.J[0]};
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : hi.adj[v])
          if (jset.count(w) && !seen.count(w)) {
            seen.insert(w);
            stack.push_back(w);
          }
      }
      CHECK(seen == jset);
    }
  }
}

TEST_CASE("center towers identify the two sheet centers") {
  for (auto [p, q] : {std::pair{1, 2}, {1, 3}}) {
    TreeTower tw = center_tower(p, q, 4);
    for (int l = 0; l <= 4; ++l) CHECK(tw.trees[l].v0 == tw.trees[l].vinf);
  }
}

TEST_CASE("lifting the base isomorphism up the center tower") {
  TreeTower tw = center_tower(1, 2, 4);

  // identity on the level-0 tree lifts through every level
  std::vector<int> h(tw.trees[0].verts.size());
  for (size_t v = 0; v < h.size(); ++v) h[v] = static_cast<int>(v);
  for (int l = 0; l + 1 <= 4; ++l) {
    LiftProblem pr = make_problem(tw, tw, l, h);
    std::vector<int> hh = lift_isomorphism(pr);
    // the lift restricts to the base iso on the included subtree
    for (size_t v = 0; v < pr.adjA.size(); ++v)
      if (pr.inA[v]) CHECK(hh[v] == pr.h[v]);
    h = hh;
  }

  // swapping the two end regions of the base tree admits no lift
  std::vector<int> bad(tw.trees[0].verts.size());
  for (size_t v = 0; v < bad.size(); ++v) bad[v] = static_cast<int>(v);
  std::vector<int> ys;
  for (const auto& v : tw.trees[0].verts)
    if (!v.is_gamma) ys.push_back(v.id);
  REQUIRE(ys.size() == 2);
  std::swap(bad[ys[0]], bad[ys[1]]);
  CHECK_THROWS_AS(lift_isomorphism(make_problem(tw, tw, 0, bad)), NotLiftable);
}

TEST_CASE("airplane-style tower structural sanity") {
  TreeTower tw = inverse_limit_truncation(1, 2, Rat(3, 7), Flavor::Plus, 3);
  for (int l = 0; l <= 3; ++l) {
    const LevelTree& t = tw.trees[l];
    CHECK(t.verts.size() == t.edges.size() + 1);
    for (const auto& v : t.verts) {
      if (v.is_gamma)
        CHECK(!v.angles.empty());
      else
        CHECK(!v.arcs.empty());
    }
    // every marked angle belongs to a Gamma-vertex, every arc to a region
    for (const Rat& a : t.marked) CHECK(t.vertex_at_angle(a) >= 0);
    for (size_t a = 0; a < t.arcs.size(); ++a) CHECK(t.arc_face[a] >= 0);
  }
}

TEST_CASE("dot and svg exports") {
  TreeTower tw = center_tower(1, 3, 1);
  std::string dot = dot_export(tw.trees[1]);
  CHECK(dot.find("graph level1") != std::string::npos);
  CHECK(dot.find("style=filled") != std::string::npos);
  CHECK(dot.find("style=solid") != std::string::npos);
  CHECK(dot.find("--") != std::string::npos);

  std::string svg = svg_export(tw.trees[1].geo);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
