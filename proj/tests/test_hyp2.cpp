// Copyright 2026 The hypstruct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <functional>
#include <random>

#include "catch_amalgamated.hpp"
#include "hypstruct/hyp2.hpp"

using namespace hypstruct;
using namespace hypstruct::hyp2;
using Catch::Matchers::WithinAbs;

namespace {

// Length of the vertical segment from i to i*t by midpoint quadrature of dy/y.
double integrate_vertical(double t) {
  const int n = 200000;
  const double h = (t - 1.0) / n;
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += h / (1.0 + (k + 0.5) * h);
  return s;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return 0.5 * (a + b);
}

// Inner minimization over beta for each point of alpha, both by arc parameter.
double sampled_distance(const Geodesic& alpha, const Geodesic& beta) {
  auto inner = [&](double s) {
    const HPoint p = point_at(alpha, s);
    const double t = golden_min([&](double u) { return dist(p, point_at(beta, u)); }, -30.0, 30.0);
    return dist(p, point_at(beta, t));
  };
  return inner(golden_min(inner, -30.0, 30.0));
}

Isometry random_isometry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  while (true) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a * d - b * c > 0.1) return Isometry::normalized(a, b, c, d, rng() % 2 == 0);
  }
}

HPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-5.0, 5.0), ly(-2.0, 2.0);
  return HPoint(x(rng), std::exp(ly(rng)));
}

}  // namespace

TEST_CASE("dist examples", "[hyp2]") {
  const HPoint i(0.0, 1.0);
  CHECK(dist(i, i) == 0.0);
  CHECK_THAT(dist(i, HPoint(1.0, 1.0)), WithinAbs(2.0 * std::asinh(0.5), 1e-12));
  CHECK_THAT(dist(i, HPoint(1.0, 1.0)), WithinAbs(0.962424, 1e-6));
  CHECK_THAT(dist(i, HPoint(0.0, 4.0)), WithinAbs(integrate_vertical(4.0), 1e-8));
  CHECK_THAT(dist(i, HPoint(0.0, 4.0)), WithinAbs(1.386294, 1e-6));
}

TEST_CASE("points off the half-plane are rejected", "[hyp2]") {
  CHECK_THROWS_MATCHES(HPoint(0.0, 0.0), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::NonPositiveImaginary;
                       }));
  CHECK_THROWS_AS(HPoint(0.0, -1.0), Error);
}

TEST_CASE("dist is a metric on samples", "[hyp2]") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 500; ++k) {
    const HPoint p = random_point(rng), q = random_point(rng), r = random_point(rng);
    CHECK_THAT(dist(p, q), WithinAbs(dist(q, p), 1e-12));
    CHECK(dist(p, r) <= dist(p, q) + dist(q, r) + 1e-9);
    CHECK(dist(p, q) > 0.0);
  }
}

TEST_CASE("apply examples", "[hyp2]") {
  const HPoint p(0.3, 2.0);
  const HPoint q = Isometry::identity().apply(p);
  CHECK(q.re() == p.re());
  CHECK(q.im() == p.im());
  const HPoint r = Isometry::psi().apply(HPoint(1.0, 1.0));
  CHECK_THAT(r.re(), WithinAbs(-1.0, 1e-15));
  CHECK_THAT(r.im(), WithinAbs(1.0, 1e-15));
  const HPoint s = Isometry(1.0 / std::sqrt(2.0), 0.0, 0.0, std::sqrt(2.0)).apply(HPoint(0.0, 1.0));
  CHECK_THAT(s.re(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(s.im(), WithinAbs(0.5, 1e-15));
}

TEST_CASE("isometries preserve distance", "[hyp2]") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Isometry g = random_isometry(rng);
    const HPoint p = random_point(rng), q = random_point(rng);
    CHECK_THAT(dist(g.apply(p), g.apply(q)), WithinAbs(dist(p, q), 1e-8));
  }
}

TEST_CASE("composition and inverse agree with pointwise action", "[hyp2]") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 300; ++k) {
    const Isometry g = random_isometry(rng), h = random_isometry(rng);
    const HPoint p = random_point(rng);
    const HPoint a = (g * h).apply(p), b = g.apply(h.apply(p));
    CHECK(dist(a, b) < 1e-8);
    CHECK(dist(g.inverse().apply(g.apply(p)), p) < 1e-8);
  }
}

TEST_CASE("determinant must be one", "[hyp2]") {
  CHECK_THROWS_MATCHES(Isometry(2, 0, 0, 1), Error, Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::DegenerateMatrix;
                       }));
}

TEST_CASE("classify examples", "[hyp2]") {
  const IsometryClass u = classify(Isometry(1, 1, 0, 1));
  CHECK(u.tag == IsometryClass::Tag::parabolic);
  REQUIRE(u.parabolic_fixed);
  CHECK(u.parabolic_fixed->is_infinity());

  const Isometry cat(2, 1, 1, 1);
  const IsometryClass l = classify(cat);
  CHECK(l.tag == IsometryClass::Tag::loxodromic);
  CHECK_THAT(l.translation_length, WithinAbs(2.0 * std::acosh(1.5), 1e-12));
  CHECK_THAT(l.translation_length, WithinAbs(1.924847, 1e-6));
  // Orbit oracle: d(i, g^n i)/n approaches the translation length.
  const HPoint i(0.0, 1.0);
  const double n = 64;
  CHECK_THAT(dist(i, cat.power(64).apply(i)) / n, WithinAbs(l.translation_length, 0.05));
  const double growth = dist(i, cat.power(64).apply(i)) - dist(i, cat.power(32).apply(i));
  CHECK_THAT(growth / 32.0, WithinAbs(l.translation_length, 1e-6));

  CHECK(classify(Isometry(0, 1, -1, 0)).tag == IsometryClass::Tag::elliptic);
  CHECK(classify(Isometry::identity()).tag == IsometryClass::Tag::identity);
}

TEST_CASE("loxodromic fixed points solve the fixed-point quadratic", "[hyp2]") {
  const Isometry g(2, 1, 1, 1);
  const IsometryClass l = classify(g);
  REQUIRE(l.attracting);
  REQUIRE(l.repelling);
  for (const BoundaryPoint& x : {*l.attracting, *l.repelling}) {
    const double z = x.value();
    CHECK_THAT(g.c() * z * z + (g.d() - g.a()) * z - g.b(), WithinAbs(0.0, 1e-12));
  }
  // Attracting: forward orbits of a point converge to it.
  const HPoint far = g.power(40).apply(HPoint(5.0, 3.0));
  CHECK_THAT(far.re(), WithinAbs(l.attracting->value(), 1e-6));
}

TEST_CASE("parabolic tolerance band is flagged", "[hyp2]") {
  const double e = 5e-10;
  const Isometry g(1.0 + e, 1.0, e, 1.0);
  const IsometryClass c = classify(g);
  CHECK(c.tag == IsometryClass::Tag::parabolic);
  CHECK(c.tolerance_band);
  const IsometryClass exact = classify(Isometry(1, 3, 0, 1));
  CHECK(exact.tag == IsometryClass::Tag::parabolic);
  CHECK_FALSE(exact.tolerance_band);
}

TEST_CASE("reversing isometries classify through the square", "[hyp2]") {
  const IsometryClass r = classify(Isometry::psi());
  CHECK(r.tag == IsometryClass::Tag::reversing_composite);
  CHECK(r.reflection);
  REQUIRE(r.square_class);
  CHECK(r.square_class->tag == IsometryClass::Tag::identity);

  const IsometryClass glide = classify(Isometry(2.0, 0.0, 0.0, 0.5, true));
  CHECK(glide.tag == IsometryClass::Tag::reversing_composite);
  CHECK_FALSE(glide.reflection);
  REQUIRE(glide.square_class);
  CHECK(glide.square_class->tag == IsometryClass::Tag::loxodromic);
  CHECK_THAT(glide.square_class->translation_length, WithinAbs(2.0 * std::log(4.0), 1e-12));
}

TEST_CASE("classification is conjugation invariant", "[hyp2]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  while (checked < 300) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a * d - b * c < 0.1) continue;
    const Isometry g = Isometry::normalized(a, b, c, d);
    if (std::abs(std::abs(g.trace()) - 2.0) < 1e-3) continue;
    Isometry h = random_isometry(rng);
    if (h.reversing()) h = h * Isometry::psi();
    const IsometryClass k = classify(g), kc = classify(h * g * h.inverse());
    CHECK(k.tag == kc.tag);
    CHECK_THAT(kc.translation_length, WithinAbs(k.translation_length, 1e-8));
    if (k.tag == IsometryClass::Tag::loxodromic) {
      CHECK(h.apply(*k.attracting).near(*kc.attracting, 1e-6));
      CHECK(h.apply(*k.repelling).near(*kc.repelling, 1e-6));
    }
    ++checked;
  }
}

TEST_CASE("translation length matches orbit growth at n = 64", "[hyp2]") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int checked = 0;
  while (checked < 100) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a * d - b * c < 0.1) continue;
    const Isometry g = Isometry::normalized(a, b, c, d);
    if (std::abs(g.trace()) < 2.2 || std::abs(g.trace()) > 8.0) continue;
    const IsometryClass k = classify(g);
    const HPoint x(0.0, 1.0);
    const double slope = (dist(x, g.power(64).apply(x)) - dist(x, g.power(32).apply(x))) / 32.0;
    CHECK_THAT(slope, WithinAbs(k.translation_length, 1e-6));
    ++checked;
  }
}

TEST_CASE("common perpendicular examples", "[hyp2]") {
  const auto p = common_perpendicular(Geodesic::semicircle(-3, 1), Geodesic::semicircle(3, 1));
  CHECK_THAT(p.foot_on_alpha.re(), WithinAbs(-p.foot_on_beta.re(), 1e-12));
  CHECK_THAT(p.foot_on_alpha.im(), WithinAbs(p.foot_on_beta.im(), 1e-12));
  CHECK_THAT(p.length, WithinAbs(dist(p.foot_on_alpha, p.foot_on_beta), 1e-9));

  const Geodesic a = Geodesic::vertical(0), b = Geodesic::semicircle(5, 1);
  const auto q = common_perpendicular(a, b);
  CHECK_THAT(q.length, WithinAbs(sampled_distance(a, b), 1e-7));

  CHECK_THROWS_MATCHES(common_perpendicular(Geodesic::vertical(0), Geodesic::vertical(1)), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == ErrorCode::AsymptoticOrCrossing;
                       }));
  CHECK_THROWS_AS(common_perpendicular(Geodesic::semicircle(0, 1), Geodesic::semicircle(1, 1)), Error);
}

TEST_CASE("common perpendicular feet lie on the geodesics and minimize", "[hyp2]") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> c(-5.0, 5.0), r(0.2, 2.0);
  int checked = 0;
  while (checked < 40) {
    const double c1 = c(rng), r1 = r(rng), c2 = c(rng), r2 = r(rng);
    if (std::abs(c1 - c2) <= r1 + r2 + 0.1) continue;
    const Geodesic a = Geodesic::semicircle(c1, r1), b = Geodesic::semicircle(c2, r2);
    const auto p = common_perpendicular(a, b);
    CHECK_THAT(std::hypot(p.foot_on_alpha.re() - c1, p.foot_on_alpha.im()), WithinAbs(r1, 1e-9));
    CHECK_THAT(std::hypot(p.foot_on_beta.re() - c2, p.foot_on_beta.im()), WithinAbs(r2, 1e-9));
    CHECK_THAT(p.length, WithinAbs(sampled_distance(a, b), 1e-7));
    CHECK_THAT(perpendicular_length(a, b), WithinAbs(p.length, 1e-9));
    ++checked;
  }
}

TEST_CASE("project_point examples", "[hyp2]") {
  const Geodesic g = Geodesic::vertical(0);
  const HPoint u = project_point(g, Geodesic::semicircle(-3, 1));
  const HPoint v = project_point(g, Geodesic::semicircle(3, 1));
  CHECK_THAT(u.re(), WithinAbs(v.re(), 1e-12));
  CHECK_THAT(u.im(), WithinAbs(v.im(), 1e-12));

  const Geodesic gamma = Geodesic::semicircle(0, 1), alpha = Geodesic::vertical(3);
  const HPoint foot = project_point(gamma, alpha);
  // Dense sampling oracle: nearest of 10^4 points of gamma to alpha.
  double best = 1e300;
  HPoint arg(0.0, 1.0);
  for (int k = 1; k < 10000; ++k) {
    const double th = M_PI * k / 10000.0;
    const HPoint p(std::cos(th), std::sin(th));
    const double t = golden_min([&](double s) { return dist(p, point_at(alpha, s)); }, -20.0, 20.0);
    const double d = dist(p, point_at(alpha, t));
    if (d < best) {
      best = d;
      arg = p;
    }
  }
  CHECK_THAT(foot.re(), WithinAbs(arg.re(), 1e-4));
  CHECK_THAT(foot.im(), WithinAbs(arg.im(), 1e-4));

  const HPoint apex = project_point(Geodesic::semicircle(0, 2), Geodesic::semicircle(0, 1));
  CHECK_THAT(apex.re(), WithinAbs(0.0, 1e-12));
  CHECK_THAT(apex.im(), WithinAbs(2.0, 1e-12));
}

TEST_CASE("project_point is equivariant", "[hyp2]") {
  std::mt19937_64 rng(41);
  const Geodesic gamma = Geodesic::semicircle(-2, 1), alpha = Geodesic::semicircle(3, 1.5);
  for (int k = 0; k < 200; ++k) {
    const Isometry g = random_isometry(rng);
    const HPoint lhs = g.apply(project_point(gamma, alpha));
    const HPoint rhs = project_point(g.apply(gamma), g.apply(alpha));
    CHECK(dist(lhs, rhs) < 1e-8);
  }
}

TEST_CASE("arc parameters", "[hyp2]") {
  const Geodesic g = Geodesic::semicircle(1.0, 2.0);
  for (double s : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    CHECK_THAT(arc_param(g, point_at(g, s)), WithinAbs(s, 1e-12));
    CHECK_THAT(dist(point_at(g, 0.0), point_at(g, s)), WithinAbs(std::abs(s), 1e-9));
  }
  const Geodesic a = Geodesic::semicircle(6.0, 1.0);
  CHECK_THAT(projection_param(g, a), WithinAbs(arc_param(g, project_point(g, a)), 1e-9));
}
