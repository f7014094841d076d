#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdl/newton.hpp"
#include "qdl/parse.hpp"

#include <algorithm>
#include <random>

using namespace qdl;

namespace {

PolyL linear(const PuiseuxSeries& root) {
  return PolyL({-root, PuiseuxSeries::constant(Scalar(1), root.prec())});
}

PuiseuxSeries tau_pow(long long n, long long d = 1) {
  return PuiseuxSeries::monomial(Scalar(1), Rat(n, d));
}

bool has_root(const std::vector<RootL>& rs, const PuiseuxSeries& v, int mult) {
  for (const auto& r : rs)
    if (r.multiplicity == mult && r.value == v) return true;
  return false;
}

}  // namespace

TEST_CASE("croots exact closed forms") {
  // z^2 + 1 -> +-i
  auto rs = croots(CPoly({Scalar(1), Scalar(0), Scalar(1)}));
  REQUIRE(rs.size() == 2);
  CHECK(((rs[0].first == Scalar::i() && rs[1].first == -Scalar::i()) ||
         (rs[1].first == Scalar::i() && rs[0].first == -Scalar::i())));
  // (z-2)^2 (z+1): rational roots of a cubic, multiplicities 2 and 1
  CPoly p = CPoly({-Scalar(2), Scalar(1)}) * CPoly({-Scalar(2), Scalar(1)}) *
            CPoly({Scalar(1), Scalar(1)});
  auto cs = croots(p);
  REQUIRE(cs.size() == 2);
  int total = 0;
  for (auto& [r, m] : cs) {
    total += m;
    if (r == Scalar(2)) CHECK(m == 2);
    if (r == Scalar(Rat(-1))) CHECK(m == 1);
  }
  CHECK(total == 3);
}

TEST_CASE("croots irrational fallback") {
  CPoly p({Scalar(Rat(-2)), Scalar(0), Scalar(1)});  // z^2 - 2
  CHECK_THROWS_AS(croots(p, true), ExactUnsupported);
  auto rs = croots(p);
  REQUIRE(rs.size() == 2);
  for (auto& [r, m] : rs) {
    CHECK(m == 1);
    CHECK(std::abs(std::abs(r.to_complex().real()) - std::sqrt(2.0)) < 1e-9);
  }
}

TEST_CASE("newton polygon examples") {
  // z^2 - t: one segment of slope -1/2, length 2
  PolyL p({-PuiseuxSeries::tau(), PuiseuxSeries::zero(), PuiseuxSeries::constant(Scalar(1))});
  NewtonPolygon np = newton_polygon(p);
  CHECK(np.zero_root_multiplicity == 0);
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rat(-1, 2));
  CHECK(np.segments[0].length == 2);

  // t z^2 + z + 1: root ords 0 and -1
  PolyL q({PuiseuxSeries::constant(Scalar(1)), PuiseuxSeries::constant(Scalar(1)),
           PuiseuxSeries::tau()});
  NewtonPolygon nq = newton_polygon(q);
  REQUIRE(nq.segments.size() == 2);
  CHECK(nq.segments[0].slope == Rat(0));
  CHECK(nq.segments[0].length == 1);
  CHECK(nq.segments[1].slope == Rat(1));
  CHECK(nq.segments[1].length == 1);

  // z^2 (z - t): zero root of multiplicity 2
  PolyL r = PolyL({PuiseuxSeries::zero(), PuiseuxSeries::zero(),
                   PuiseuxSeries::constant(Scalar(1))}) *
            linear(PuiseuxSeries::tau());
  CHECK(newton_polygon(r).zero_root_multiplicity == 2);
}

TEST_CASE("roots: linear and ramified") {
  auto rs = roots(linear(-PuiseuxSeries::tau()), Rat(12));
  REQUIRE(rs.size() == 1);
  CHECK(has_root(rs, -PuiseuxSeries::tau(), 1));

  // z^2 - t -> +- t^(1/2)
  PolyL p({-PuiseuxSeries::tau(), PuiseuxSeries::zero(), PuiseuxSeries::constant(Scalar(1))});
  auto ps = roots(p, Rat(12));
  REQUIRE(ps.size() == 2);
  PuiseuxSeries half = tau_pow(1, 2);
  CHECK(has_root(ps, half, 1));
  CHECK(has_root(ps, -half, 1));
}

TEST_CASE("roots: binomial oracle for z^2 - (1+t)") {
  PolyL p({-(PuiseuxSeries::constant(Scalar(1)) + PuiseuxSeries::tau()),
           PuiseuxSeries::zero(), PuiseuxSeries::constant(Scalar(1))});
  auto rs = roots(p, Rat(16));
  REQUIRE(rs.size() == 2);
  PuiseuxSeries s = (PuiseuxSeries::constant(Scalar(1)) + PuiseuxSeries::tau()).pow_rational(Rat(1, 2));
  CHECK(has_root(rs, s, 1));
  CHECK(has_root(rs, -s, 1));
  // leading corrections 1 + t/2 - t^2/8
  CHECK(s.coeff(Rat(1)) == Scalar(Rat(1, 2)));
  CHECK(s.coeff(Rat(2)) == Scalar(Rat(-1, 8)));
}

TEST_CASE("roots: multiplicities") {
  // (z - t)^2 (z + 1)
  PolyL p = linear(PuiseuxSeries::tau()) * linear(PuiseuxSeries::tau()) *
            linear(-PuiseuxSeries::constant(Scalar(1)));
  auto rs = roots(p, Rat(12));
  CHECK(has_root(rs, PuiseuxSeries::tau(), 2));
  CHECK(has_root(rs, -PuiseuxSeries::constant(Scalar(1)), 1));
  int sum = 0;
  for (auto& r : rs) sum += r.multiplicity;
  CHECK(sum == 3);

  // z^3 - t z = z (z - t^(1/2)) (z + t^(1/2))
  PolyL q({PuiseuxSeries::zero(), -PuiseuxSeries::tau(), PuiseuxSeries::zero(),
           PuiseuxSeries::constant(Scalar(1))});
  auto qs = roots(q, Rat(12));
  REQUIRE(qs.size() == 3);
  CHECK(has_root(qs, PuiseuxSeries::zero(), 1));
  CHECK(has_root(qs, tau_pow(1, 2), 1));
  CHECK(has_root(qs, -tau_pow(1, 2), 1));
}

TEST_CASE("roots fuzz: products of random linear factors") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> nfac(1, 4), num(-4, 4), den(1, 2), coeff(-3, 3), terms(1, 3);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<PuiseuxSeries> given;
    PolyL p = PolyL::constant(PuiseuxSeries::constant(Scalar(1)));
    int n = nfac(rng);
    for (int k = 0; k < n; ++k) {
      PuiseuxSeries r;
      int nt = terms(rng);
      for (int j = 0; j < nt; ++j) {
        int c = coeff(rng);
        if (c == 0) c = 1;
        r.add_term(Rat(num(rng), den(rng)), Scalar(Rat(c)));
      }
      given.push_back(r);
      p = p * linear(r);
    }
    auto rs = roots(p, Rat(8));
    int sum = 0;
    for (auto& r : rs) sum += r.multiplicity;
    CHECK(sum == n);
    for (const auto& g : given) {
      bool found = false;
      for (const auto& r : rs)
        if ((r.value - g).truncated(Rat(8)).is_zero() ||
            (r.value - g).ord_or_prec() >= Rat(8)) found = true;
      CHECK(found);
    }
  }
}

TEST_CASE("polygon ord multiset matches roots") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2), coeff(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    PolyL p = PolyL::constant(PuiseuxSeries::constant(Scalar(1)));
    int n = 3;
    for (int k = 0; k < n; ++k) {
      int c = coeff(rng);
      if (c == 0) c = 2;
      PuiseuxSeries r = PuiseuxSeries::monomial(Scalar(Rat(c)), Rat(num(rng), den(rng)));
      p = p * linear(r);
    }
    NewtonPolygon np = newton_polygon(p);
    std::vector<Rat> from_polygon;
    for (int k = 0; k < np.zero_root_multiplicity; ++k) from_polygon.push_back(Rat(1000));
    for (const auto& seg : np.segments)
      for (int k = 0; k < seg.length; ++k) from_polygon.push_back(-seg.slope);
    std::vector<Rat> from_roots;
    for (const auto& r : roots(p, Rat(8)))
      for (int k = 0; k < r.multiplicity; ++k)
        from_roots.push_back(r.value.is_zero() ? Rat(1000) : r.value.ord().finite());
    std::sort(from_polygon.begin(), from_polygon.end());
    std::sort(from_roots.begin(), from_roots.end());
    CHECK(from_polygon == from_roots);
  }
}

TEST_CASE("gcd and division over L") {
  PolyL a = linear(PuiseuxSeries::tau()) * linear(-PuiseuxSeries::constant(Scalar(1)));
  PolyL b = linear(PuiseuxSeries::tau()) * linear(PuiseuxSeries::constant(Scalar(2)));
  PolyL g = gcdL(a, b);
  CHECK(g.degree() == 1);
  CHECK((-g.coeff(0)) == PuiseuxSeries::tau());
  auto [q, r] = divmodL(a, g);
  CHECK(r.is_zero());
  CHECK((q * g - a).is_zero());
}
