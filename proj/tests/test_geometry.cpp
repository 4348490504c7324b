#include <random>

#include "bsld/geometry.hpp"
#include "doctest.h"

using namespace bsld;

namespace {

std::mt19937_64 rng(20240817);

double urand(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

MoebiusMap random_isometry() {
  MoebiusMap t = MoebiusMap::translation(urand(0, kTwoPi), urand(0, 2.5));
  MoebiusMap r = MoebiusMap::rotation(urand(0, kTwoPi));
  return compose(r, t);
}

DiscPoint random_point() {
  double rr = std::sqrt(urand(0, 0.9));
  double th = urand(0, kTwoPi);
  return {rr * std::cos(th), rr * std::sin(th)};
}

}  // namespace

TEST_CASE("compose identities") {
  MoebiusMap g = random_isometry();
  MoebiusMap id = MoebiusMap::identity();
  CHECK(compose(g, id).close_to(g, 1e-12));
  CHECK(compose(g, g.inverse()).close_to(id, 1e-10));
}

TEST_CASE("apply_boundary basics") {
  double phi = 1.2345, th = 0.6789;
  CHECK(MoebiusMap::rotation(phi).apply(BoundaryPoint(th)).theta ==
        doctest::Approx(ang::norm(th + phi)).epsilon(1e-12));
  CHECK(MoebiusMap::identity().apply(BoundaryPoint(th)).theta == doctest::Approx(th));
  // Hyperbolic translation along the real axis fixes 0 and pi.
  MoebiusMap t = MoebiusMap::translation(0.0, 1.7);
  CHECK(t.apply(BoundaryPoint(0.0)).theta == doctest::Approx(0.0));
  CHECK(t.apply(BoundaryPoint(std::numbers::pi)).theta == doctest::Approx(std::numbers::pi));
}

TEST_CASE("boundary derivative") {
  MoebiusMap r = MoebiusMap::rotation(0.7);
  for (double th : {0.0, 1.0, 2.5, 5.0})
    CHECK(r.boundary_derivative(BoundaryPoint(th)) == doctest::Approx(1.0));

  // Chain rule.
  for (int i = 0; i < 100; ++i) {
    MoebiusMap g = random_isometry(), h = random_isometry();
    BoundaryPoint xi(urand(0, kTwoPi));
    double lhs = compose(g, h).boundary_derivative(xi);
    double rhs = g.boundary_derivative(h.apply(xi)) * h.boundary_derivative(xi);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }

  // Attracting fixed point of a translation of length ell: |g'| = e^{-ell},
  // cross-checked against a central finite difference of the boundary action.
  double ell = 1.3;
  MoebiusMap t = MoebiusMap::translation(0.0, ell);
  CHECK(t.boundary_derivative(BoundaryPoint(0.0)) == doctest::Approx(std::exp(-ell)).epsilon(1e-10));
  double h = 1e-6;
  double fd = ang::norm_pm(t.apply(BoundaryPoint(h)).theta - t.apply(BoundaryPoint(-h)).theta) / (2 * h);
  CHECK(fd == doctest::Approx(std::exp(-ell)).epsilon(1e-8));
}

TEST_CASE("disc distance") {
  CHECK(disc_distance({0, 0}, {0, 0}) == 0.0);
  CHECK(disc_distance({0, 0}, {0.5, 0}) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  for (int i = 0; i < 1000; ++i) {
    MoebiusMap g = random_isometry();
    DiscPoint z = random_point(), w = random_point();
    CHECK(std::abs(disc_distance(g.apply(z), g.apply(w)) - disc_distance(z, w)) < 1e-10);
  }
}

TEST_CASE("poisson kernel and busemann") {
  for (double th : {0.3, 2.0, 4.4}) CHECK(poisson_kernel({0, 0}, BoundaryPoint(th)) == doctest::Approx(1.0));
  CHECK(std::log(poisson_kernel({0.5, 0}, BoundaryPoint(0.0))) == doctest::Approx(std::log(3.0)));

  DiscPoint a = random_point(), b = random_point(), c = random_point();
  BoundaryPoint xi(urand(0, kTwoPi));
  CHECK(busemann(xi, a, a) == 0.0);
  CHECK(busemann(xi, a, b) + busemann(xi, b, c) == doctest::Approx(busemann(xi, a, c)).epsilon(1e-12));

  // Against the limit definition along the ray to xi at t = 20.
  for (int i = 0; i < 20; ++i) {
    DiscPoint bb = random_point();
    BoundaryPoint e(urand(0, kTwoPi));
    OrientedGeodesic ray(BoundaryPoint(e.theta + std::numbers::pi), e);
    DiscPoint far = ray.point_at(20.0);
    double limit = disc_distance({0, 0}, far) - disc_distance(bb, far);
    CHECK(busemann(e, {0, 0}, bb) == doctest::Approx(limit).epsilon(1e-6));
  }
}

TEST_CASE("geodesic basics") {
  OrientedGeodesic d(BoundaryPoint(0.0), BoundaryPoint(std::numbers::pi));
  CHECK(d.is_diameter());
  DiscPoint mid = d.point_at(0.0);
  CHECK(std::abs(mid.c()) < 1e-12);
  CHECK(d.side_of({0.0, 0.5}) == Side::Left);
  CHECK(d.side_of({0.0, -0.5}) == Side::Right);

  CHECK_THROWS_AS(OrientedGeodesic(BoundaryPoint(1.0), BoundaryPoint(1.0)), DegenerateGeodesic);

  // point_at parametrizes by arc length.
  OrientedGeodesic g(BoundaryPoint(0.3), BoundaryPoint(2.0));
  for (double t : {-1.0, 0.0, 0.7, 2.0}) {
    CHECK(disc_distance(g.point_at(t), g.point_at(t + 0.5)) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(g.param_of(g.point_at(t)) == doctest::Approx(t).epsilon(1e-8));
  }
}

TEST_CASE("geodesic equivariance under Moebius maps") {
  for (int i = 0; i < 100; ++i) {
    double s = urand(0, kTwoPi);
    OrientedGeodesic g(BoundaryPoint(s), BoundaryPoint(s + urand(0.1, kTwoPi - 0.1)));
    MoebiusMap m = random_isometry();
    OrientedGeodesic img = g.image(m);
    DiscPoint p = m.apply(g.point_at(0.0));
    CHECK(std::abs(img.signed_offset(p)) < 1e-10);
  }
}

TEST_CASE("geodesic intersection") {
  OrientedGeodesic d1(BoundaryPoint(0.0), BoundaryPoint(std::numbers::pi));
  OrientedGeodesic d2(BoundaryPoint(std::numbers::pi / 2), BoundaryPoint(3 * std::numbers::pi / 2));
  auto w = d1.intersect(d2);
  REQUIRE(w.has_value());
  CHECK(std::abs(w->c()) < 1e-12);

  // Random pairs: if an intersection is reported, it lies on both geodesics.
  int found = 0;
  for (int i = 0; i < 200; ++i) {
    OrientedGeodesic a(BoundaryPoint(urand(0, kTwoPi)), BoundaryPoint(urand(0, kTwoPi)));
    OrientedGeodesic b(BoundaryPoint(urand(0, kTwoPi)), BoundaryPoint(urand(0, kTwoPi)));
    auto z = a.intersect(b);
    if (!z) continue;
    ++found;
    CHECK(std::abs(a.signed_offset(*z)) < 1e-9);
    CHECK(std::abs(b.signed_offset(*z)) < 1e-9);
  }
  CHECK(found > 20);
}

TEST_CASE("crosses_segment") {
  // Vertical diameter crosses the horizontal chord between (-0.5,0.2),(0.5,0.2)... use geodesic segment.
  OrientedGeodesic d(BoundaryPoint(3 * std::numbers::pi / 2), BoundaryPoint(std::numbers::pi / 2));
  auto w = d.crosses_segment({-0.5, 0.2}, {0.5, 0.2});
  REQUIRE(w.has_value());
  CHECK(std::abs(w->re) < 1e-10);
  // Segment off to one side is missed.
  CHECK(!d.crosses_segment({0.2, 0.1}, {0.6, 0.3}).has_value());
}

TEST_CASE("normalization drift stays bounded") {
  // Short random steps so the entries stay representable over 10^4 factors.
  MoebiusMap acc = MoebiusMap::identity();
  for (int i = 0; i < 10000; ++i) {
    MoebiusMap step = compose(MoebiusMap::rotation(urand(0, kTwoPi)),
                              MoebiusMap::translation(urand(0, kTwoPi), urand(0, 0.02)));
    acc = compose(acc, step);
  }
  CHECK(std::abs(acc.det_defect()) < 1e-8);
}

TEST_CASE("arc membership and containment") {
  Arc a(BoundaryPoint(6.0), BoundaryPoint(0.5));  // wraps through 0
  CHECK(a.contains(6.1));
  CHECK(a.contains(0.2));
  CHECK(a.contains(6.0));
  CHECK(!a.contains(0.5));
  CHECK(!a.contains(3.0));
  Arc b(BoundaryPoint(6.1), BoundaryPoint(0.1));
  CHECK(a.contains_arc(b, 1e-12));
  CHECK(!b.contains_arc(a, 1e-12));
  auto c = a.intersect(Arc(BoundaryPoint(0.2), BoundaryPoint(3.0)));
  REQUIRE(c.has_value());
  CHECK(c->lo == doctest::Approx(0.2));
  CHECK(c->len == doctest::Approx(0.3));
}
