#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qdl/berkovich.hpp"
#include "qdl/parse.hpp"

#include <random>

using namespace qdl;

namespace {

TypeIIPoint pt(const std::string& center, Rat alpha) {
  return TypeIIPoint::make(parse_series(center), std::move(alpha));
}

/// Membership in the segment between two finite rigid points.
bool on_critical_segment(const TypeIIPoint& x, const PuiseuxSeries& w1, const PuiseuxSeries& w2) {
  OrdVal j = (w1 - w2).ord();
  if (!j.is_inf() && x.alpha < j.finite()) return false;
  auto reaches = [&](const PuiseuxSeries& w) {
    OrdVal o = (x.center - w).ord();
    return o.is_inf() || o.finite() >= x.alpha;
  };
  return reaches(w1) || reaches(w2);
}

}  // namespace

TEST_CASE("equality law and canonical form") {
  TypeIIPoint a = pt("0", Rat(1));
  TypeIIPoint b = pt("t", Rat(1));       // ord(t - 0) = 1 >= 1
  TypeIIPoint c = pt("t", Rat(2));
  CHECK(a == b);
  CHECK(a != c);
  CHECK(b != c);
  // canonicalization drops terms at or above alpha, and is idempotent
  TypeIIPoint d = TypeIIPoint::make(parse_series("1 + t + t^2"), Rat(2));
  CHECK(d.center == parse_series("1 + t"));
  CHECK(TypeIIPoint::make(d.center, d.alpha) == d);
  // symmetry and transitivity on a chain
  TypeIIPoint e = pt("t + t^3", Rat(1));
  CHECK(b == e);
  CHECK(a == e);
}

TEST_CASE("hyperbolic distance") {
  CHECK(hyperbolic_distance(pt("0", Rat(0)), pt("0", Rat(1))) == Rat(1));
  TypeIIPoint x = pt("1 + t", Rat(3, 2));
  CHECK(hyperbolic_distance(x, x) == Rat(0));
  CHECK(hyperbolic_distance(pt("0", Rat(1)), pt("t", Rat(2))) == Rat(1));
  // symmetric, and additive along a ray
  CHECK(hyperbolic_distance(pt("t", Rat(2)), pt("0", Rat(1))) == Rat(1));
  CHECK(hyperbolic_distance(pt("0", Rat(-1)), pt("0", Rat(2))) == Rat(3));
  // through the join: dist(x_{1,2}, x_{t,2}) joins at 0
  CHECK(hyperbolic_distance(pt("1", Rat(2)), pt("t", Rat(2))) == Rat(4));
}

TEST_CASE("join and containment") {
  TypeIIPoint j = join(pt("1", Rat(2)), pt("t", Rat(2)));
  CHECK(j == pt("0", Rat(0)));
  CHECK(contains(j, pt("1", Rat(2))));
  CHECK(contains(j, pt("t", Rat(2))));
  CHECK(!contains(pt("1", Rat(2)), j));
  CHECK(contains(pt("0", Rat(1)), pt("t", Rat(2))));
  CHECK(!contains(pt("0", Rat(1)), pt("1", Rat(2))));
}

TEST_CASE("slots") {
  TypeIIPoint g = TypeIIPoint::gauss();
  CHECK(slot_of(g, PointL::finite(parse_series("t"))) == Slot::finite(Scalar(0)));
  CHECK(slot_of(g, PointL::finite(parse_series("1 + t"))) == Slot::finite(Scalar(1)));
  CHECK(slot_of(g, PointL::finite(parse_series("t^(-1)"))) == Slot::infinity());
  CHECK(slot_of(g, PointL::at_infinity()) == Slot::infinity());
  TypeIIPoint x = pt("0", Rat(1));
  CHECK(slot_of(x, PointL::finite(parse_series("2*t"))) == Slot::finite(Scalar(2)));
  CHECK(slot_of_point(x, pt("t", Rat(2))) == Slot::finite(Scalar(1)));
  CHECK(slot_of_point(x, TypeIIPoint::gauss()) == Slot::infinity());
}

TEST_CASE("map_point examples") {
  RatMapL phi1 = parse_map("z + 1 + t/z");
  CHECK(map_point(phi1, TypeIIPoint::gauss()) == TypeIIPoint::gauss());

  RatMapL sq = parse_map("z^2");
  CHECK(map_point(sq, pt("0", Rat(1))) == pt("0", Rat(2)));
  CHECK(map_point(sq, pt("0", Rat(-3, 2))) == pt("0", Rat(-3)));

  RatMapL phi3 = parse_map("t^(1/2) - (1 + t^2)/z + t/z^2");
  TypeIIPoint a = pt("0", Rat(1, 2));
  TypeIIPoint b = map_point(phi3, a);
  CHECK(b == pt("0", Rat(-1, 2)));
  CHECK(map_point(phi3, b) == a);
}

TEST_CASE("tangent map examples") {
  RatMapL phi1 = parse_map("z + 1 + t/z");
  CRatMap t1 = tangent_map(phi1, TypeIIPoint::gauss());
  CHECK(t1 == CRatMap(CPoly({Scalar(1), Scalar(1)}), CPoly::constant(Scalar(1))));

  RatMapL r1 = parse_map("-t - (1 + t^2)/z + t/z^2");
  RatMapL r1sq = r1.compose(r1);
  TypeIIPoint x1 = pt("0", Rat(1));
  CHECK(map_point(r1sq, x1) == x1);
  CRatMap R = tangent_map(r1sq, x1);
  // -1 + z^2/(z-1) = (z^2 - z + 1)/(z - 1)
  CRatMap expect(CPoly({Scalar(1), Scalar(Rat(-1)), Scalar(1)}), CPoly({Scalar(Rat(-1)), Scalar(1)}));
  CHECK(R == expect);

  for (long long a : {0LL, -1LL}) {
    std::string text = "t - (1 + t^2)/z + t/z^2 - (" + std::to_string(a) + ")*t^5";
    RatMapL r2 = parse_map(text, Backend::Exact, Rat(64));
    RatMapL r2cube = r2.compose(r2).compose(r2);
    TypeIIPoint x3 = pt("0", Rat(3));
    CHECK(map_point(r2cube, x3) == x3);
    CRatMap T = tangent_map(r2cube, x3);
    CHECK(T == CRatMap(CPoly({Scalar(a), Scalar(0), Scalar(1)}), CPoly::constant(Scalar(1))));
  }
}

TEST_CASE("local degree and the critical segment") {
  RatMapL r1 = parse_map("-t - (1 + t^2)/z + t/z^2");
  CHECK(local_degree(r1, pt("0", Rat(1))) == 2);
  CHECK(local_degree(r1, TypeIIPoint::gauss()) == 1);
  CHECK(local_degree(r1, pt("0", Rat(-1))) == 1);

  // critical points 0 and 2t/(1+t^2)
  auto crit = critical_points(r1);
  int total = 0;
  for (auto& [p, m] : crit) total += m;
  CHECK(total == 2);
  PuiseuxSeries w1, w2;
  REQUIRE(crit.size() == 2);
  REQUIRE(!crit[0].first.infinite);
  REQUIRE(!crit[1].first.infinite);
  w1 = crit[0].first.value;
  w2 = crit[1].first.value;
  PuiseuxSeries expect_w = parse_series("2*t/(1 + t^2)");
  CHECK(((w1 == expect_w && w2.is_zero()) || (w2 == expect_w && w1.is_zero())));

  // degree is 2 exactly on the segment between the critical points
  for (int n = -4; n <= 8; ++n) {
    TypeIIPoint x = pt("0", Rat(n, 2));
    CHECK(local_degree(r1, x) == (on_critical_segment(x, w1, w2) ? 2 : 1));
  }

  // polynomial map: critical points 0 and infinity
  auto csq = critical_points(parse_map("z^2"));
  REQUIRE(csq.size() == 2);
  bool has_inf = csq[0].first.infinite || csq[1].first.infinite;
  CHECK(has_inf);
}

TEST_CASE("direction classification") {
  RatMapL phi1 = parse_map("z + 1 + t/z");
  TypeIIPoint g = TypeIIPoint::gauss();
  DirectionClass bad = classify_direction(phi1, g, Slot::finite(Scalar(0)));
  CHECK(bad.bad);
  CHECK(bad.surplus == 1);
  DirectionClass good = classify_direction(phi1, g, Slot::infinity());
  CHECK(!good.bad);
  CHECK(good.degree == 1);
  CHECK(good.image == Slot::infinity());

  RatMapL sq = parse_map("z^2");
  for (long long s : {0LL, 1LL, 2LL}) {
    DirectionClass d = classify_direction(sq, g, Slot::finite(Scalar(s)));
    CHECK(!d.bad);
    CHECK(d.degree == (s == 0 ? 2 : 1));
    CHECK(d.image == Slot::finite(Scalar(s * s)));
  }
  DirectionClass dinf = classify_direction(sq, g, Slot::infinity());
  CHECK(!dinf.bad);
  CHECK(dinf.degree == 2);
}

TEST_CASE("path isometry on good directions") {
  RatMapL sq = parse_map("z^2");
  TypeIIPoint g = TypeIIPoint::gauss();
  for (int n = 1; n <= 4; ++n) {
    Rat d(n, 8);
    // slot 0 has degree 2: images move at speed 2
    TypeIIPoint y0 = pt("0", d);
    CHECK(hyperbolic_distance(map_point(sq, g), map_point(sq, y0)) == Rat(2) * d);
    // slot 1 has degree 1
    TypeIIPoint y1 = TypeIIPoint::make(parse_series("1"), d);
    CHECK(hyperbolic_distance(map_point(sq, g), map_point(sq, y1)) == d);
  }
}

TEST_CASE("preimages") {
  RatMapL sq = parse_map("z^2");
  auto p1 = preimages(sq, pt("0", Rat(2)));
  REQUIRE(p1.size() == 1);
  CHECK(p1[0].first == pt("0", Rat(1)));
  CHECK(p1[0].second == 2);

  // x_{0,1} sits on the critical segment with local degree 2, so it is the
  // entire fiber over its image x_{0,-1}
  RatMapL r1 = parse_map("-t - (1 + t^2)/z + t/z^2");
  auto p2 = preimages(r1, pt("0", Rat(-1)));
  REQUIRE(p2.size() == 1);
  CHECK(p2[0].first == pt("0", Rat(1)));
  CHECK(p2[0].second == 2);
  CHECK(map_point(r1, p2[0].first) == pt("0", Rat(-1)));

  // containment: the Gauss point is among the preimages of its image
  for (const char* text : {"z + 1 + t/z", "t^(1/2) - (1 + t^2)/z + t/z^2"}) {
    RatMapL phi = parse_map(text);
    TypeIIPoint img = map_point(phi, TypeIIPoint::gauss());
    bool found = false;
    for (auto& [y, m] : preimages(phi, img))
      if (y == TypeIIPoint::gauss()) found = true;
    CHECK(found);
  }
}

TEST_CASE("fixed points on rays") {
  RatMapL r1 = parse_map("-t - (1 + t^2)/z + t/z^2");
  RatMapL r1sq = r1.compose(r1);
  auto fixed = fixed_points_on_ray(r1sq, PuiseuxSeries::zero());
  bool has_1 = false, has_m1 = false;
  for (auto& x : fixed) {
    if (x == pt("0", Rat(1))) has_1 = true;
    if (x == pt("0", Rat(-1))) has_m1 = true;
  }
  CHECK(has_1);
  CHECK(has_m1);

  RatMapL phi1 = parse_map("z + 1 + t/z");
  auto f1 = fixed_points_on_ray(phi1, PuiseuxSeries::zero());
  bool has_gauss = false;
  for (auto& x : f1)
    if (x == TypeIIPoint::gauss()) has_gauss = true;
  CHECK(has_gauss);
}

TEST_CASE("fuzz: tangent degree matches the critical segment") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> coef(-3, 3), texp(0, 2), aden(1, 2), anum(-3, 6);
  int checked = 0;
  for (int trial = 0; trial < 120 && checked < 100; ++trial) {
    // random quadratic numerator and denominator with monomial coefficients
    auto rnd_poly = [&](int deg) {
      std::vector<PuiseuxSeries> c(deg + 1);
      for (int i = 0; i <= deg; ++i) {
        int a = coef(rng);
        c[i] = a == 0 ? PuiseuxSeries::zero()
                      : PuiseuxSeries::monomial(Scalar(Rat(a)), Rat(texp(rng)));
      }
      return PolyL(std::move(c));
    };
    RatMapL phi{rnd_poly(2), rnd_poly(1)};
    if (phi.num.degree() != 2 || phi.den.is_zero()) continue;
    std::vector<std::pair<PointL, int>> crit;
    try {
      crit = critical_points(phi);
    } catch (const PrecisionExhausted&) {
      continue;
    } catch (const ExactUnsupported&) {
      continue;
    }
    if (crit.size() != 2 || crit[0].first.infinite || crit[1].first.infinite) continue;
    TypeIIPoint x = TypeIIPoint::make(
        PuiseuxSeries::monomial(Scalar(Rat(std::max(1, coef(rng) + 2))), Rat(texp(rng))),
        Rat(anum(rng), aden(rng)));
    try {
      MapAtPoint m = map_point_full(phi, x);
      CHECK(m.tangent.degree() == m.degree);
      bool seg = on_critical_segment(x, crit[0].first.value, crit[1].first.value);
      CHECK(m.degree == (seg ? 2 : 1));
      ++checked;
    } catch (const PrecisionExhausted&) {
    }
  }
  CHECK(checked >= 60);
}
