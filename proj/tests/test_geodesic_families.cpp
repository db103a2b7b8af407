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
#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "hypstruct/geodesic_families.hpp"

using namespace hypstruct;
using namespace hypstruct::geodesic_families;
using hyp2::Geodesic;
using hyp2::HPoint;
using hyp2::Isometry;
using projection_complex::DomainFamily;
using Catch::Matchers::WithinAbs;

namespace {

bool has_code(const std::function<void()>& f, ErrorCode c) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == c;
  }
  return false;
}

// Distance from z to the vertical geodesic over c.
double dist_to_vertical(const HPoint& z, double c) { return std::asinh(std::abs(z.re() - c) / z.im()); }

// cosh d = |(c1 - c2)^2 - r1^2 - r2^2| / (2 r1 r2) for disjoint semicircles.
double semicircle_distance(const Geodesic& a, const Geodesic& b) {
  const double c1 = a.center(), c2 = b.center(), r1 = a.radius(), r2 = b.radius();
  return std::acosh(std::abs((c1 - c2) * (c1 - c2) - r1 * r1 - r2 * r2) / (2.0 * r1 * r2));
}

// Arc parameter on gamma of the point nearest to the vertical line over c, by
// dense sampling then golden-section refinement.
double nearest_param(const Geodesic& gamma, double c) {
  auto f = [&](double s) { return dist_to_vertical(hyp2::point_at(gamma, s), c); };
  double best = -20.0;
  for (double s = -20.0; s <= 20.0; s += 1e-3) {
    if (f(s) < f(best)) best = s;
  }
  double lo = best - 1e-3, hi = best + 1e-3;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 100; ++i) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    (f(m1) < f(m2) ? hi : lo) = f(m1) < f(m2) ? m2 : m1;
  }
  return 0.5 * (lo + hi);
}

bool proper_coloring(const FlipTree& T) {
  for (const auto& nd : T.nodes) {
    if (nd.parent >= 0 && T.node(nd.parent).color == nd.color) return false;
    if ((nd.level % 2 == 0) != (nd.color == Color::black)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("theta constants", "[geodesic_families]") {
  const ThetaConstants c = theta_constants();
  CHECK(c.epsilon == 3.6);
  CHECK(c.R == 0.1);
  CHECK(c.theta == 6.0 * c.epsilon + 2.0 * c.eta);
  // At the closest admissible distance R the 2 eps stretch has half-length acosh(sinh 2eps / sinh R).
  const double closed = 2.0 * std::acosh(std::sinh(2.0 * 3.6) / std::sinh(0.1));
  CHECK_THAT(c.eta, WithinAbs(closed, 1e-4));
  CHECK_THAT(c.eta, WithinAbs(19.0018, 1e-4));
  CHECK_THAT(c.theta, WithinAbs(59.6037, 1e-4));
  CHECK(eta_of(8.0, 3.6) == 0.0);
  CHECK(eta_of(0.05) >= eta_of(0.1));
  CHECK(eta_of(0.1) >= eta_of(0.5));
  CHECK(theta_constants(0.1, 4.0).theta > c.theta);
  CHECK(theta_constants(0.05, 3.6).theta > c.theta);
  CHECK(has_code([] { eta_of(0.0); }, ErrorCode::ConfigError));
}

TEST_CASE("fellow-travelling width", "[geodesic_families]") {
  // Oracle: the distance from a point of a semicircle to the imaginary axis.
  for (const auto& [a, b] : std::vector<std::pair<double, double>>{{1.0, 3.0}, {0.2, 7.0}, {2.0, 2.5}}) {
    const Geodesic v = Geodesic::vertical(0.0), g(hyp2::BoundaryPoint::finite(a), hyp2::BoundaryPoint::finite(b));
    const auto perp = hyp2::common_perpendicular(v, g);
    const double s0 = hyp2::arc_param(g, perp.foot_on_beta);
    for (double s : {0.0, 0.3, 1.0, 2.5}) {
      const HPoint z = hyp2::point_at(g, s0 + s);
      CHECK_THAT(dist_to_vertical(z, 0.0), WithinAbs(fellow_width(perp.length, s), 1e-8));
    }
  }
}

TEST_CASE("random disjoint geodesics", "[geodesic_families]") {
  const GeodesicConfig two = random_disjoint_geodesics(2, 0.1, 1);
  REQUIRE(two.geodesics.size() == 2);
  CHECK(semicircle_distance(two.geodesics[0], two.geodesics[1]) >= 0.1);

  const GeodesicConfig c = random_disjoint_geodesics(50, 0.1, 7);
  REQUIRE(c.geodesics.size() == 50);
  CHECK(c.seed == 7);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = i + 1; j < 50; ++j) {
      const Geodesic &a = c.geodesics[i], &b = c.geodesics[j];
      // Disjoint, with four distinct endpoints and separation >= R.
      const double l1 = a.center() - a.radius(), r1 = a.center() + a.radius();
      const double l2 = b.center() - b.radius(), r2 = b.center() + b.radius();
      const bool nested = (l1 < l2 && r2 < r1) || (l2 < l1 && r1 < r2);
      const bool apart = r1 < l2 || r2 < l1;
      CHECK((nested || apart));
      CHECK(semicircle_distance(a, b) >= 0.1);
      CHECK_THAT(semicircle_distance(a, b), WithinAbs(hyp2::perpendicular_length(a, b), 1e-7));
    }
  }
  const GeodesicConfig again = random_disjoint_geodesics(50, 0.1, 7);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(again.geodesics[i].center() == c.geodesics[i].center());
    CHECK(again.geodesics[i].radius() == c.geodesics[i].radius());
  }
  CHECK(has_code([] { random_disjoint_geodesics(100, 10.0, 1); }, ErrorCode::SaturationFailure));
  CHECK(has_code([] { random_disjoint_geodesics(1, 0.1, 1); }, ErrorCode::ConfigError));
  CHECK(has_code([] { verify_disjoint({Geodesic::semicircle(0, 1), Geodesic::semicircle(1, 1)}); },
                 ErrorCode::DisjointnessViolation));
}

TEST_CASE("projection distance along a geodesic", "[geodesic_families]") {
  const Geodesic gamma = Geodesic::semicircle(0.0, 1.0);
  const Geodesic a = Geodesic::vertical(-5.0), b = Geodesic::vertical(5.0), b6 = Geodesic::vertical(6.0);
  CHECK(d_gamma(gamma, a, a) == 0.0);
  // Reflection in gamma (inversion in the unit circle) fixes gamma pointwise.
  const Geodesic m(hyp2::BoundaryPoint::finite(2.0), hyp2::BoundaryPoint::finite(4.0));
  const Geodesic m_img(hyp2::BoundaryPoint::finite(0.25), hyp2::BoundaryPoint::finite(0.5));
  CHECK_THAT(d_gamma(gamma, m, m_img), WithinAbs(0.0, 1e-12));
  // Reflection in the imaginary axis reverses gamma, so the verticals over -5 and 5
  // project to parameters s and -s.
  const double s5 = nearest_param(gamma, 5.0);
  CHECK_THAT(nearest_param(gamma, -5.0), WithinAbs(-s5, 1e-6));
  CHECK_THAT(d_gamma(gamma, a, b), WithinAbs(2.0 * std::abs(s5), 1e-6));
  const double oracle = std::abs(nearest_param(gamma, -5.0) - nearest_param(gamma, 6.0));
  CHECK_THAT(d_gamma(gamma, a, b6), WithinAbs(oracle, 1e-6));
  CHECK(d_gamma(gamma, a, b6) > 0.01);
  CHECK_THAT(d_gamma(gamma, a, b6), WithinAbs(d_gamma(gamma, b6, a), 1e-15));
  CHECK(has_code([&] { d_gamma(gamma, Geodesic::vertical(0.5), a); }, ErrorCode::AsymptoticOrCrossing));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2, 2);
  const GeodesicConfig c = random_disjoint_geodesics(12, 0.1, 3);
  for (int k = 0; k < 50; ++k) {
    const Isometry g = Isometry::translation(u(rng)) * Isometry::dilation(std::exp(u(rng))) *
                       Isometry::normalized(1.0, u(rng), 0.0, 1.0) * Isometry(0.0, -1.0, 1.0, 0.0);
    const std::size_t i = k % 12, j = (k + 1) % 12, l = (k + 5) % 12;
    const auto &G = c.geodesics[i], &A = c.geodesics[j], &B = c.geodesics[l];
    CHECK_THAT(d_gamma(g.apply(G), g.apply(A), g.apply(B)), WithinAbs(d_gamma(G, A, B), 1e-8));
  }
}

TEST_CASE("axioms hold for geodesic families", "[geodesic_families]") {
  const ThetaConstants c = theta_constants();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GeodesicConfig cfg = random_disjoint_geodesics(20 + seed, 0.1, seed);
    const DomainFamily fam = family_from_config(cfg, c.theta);
    const auto r = projection_complex::verify_axioms(fam);
    CHECK(r.p0_violations.empty());
    CHECK(r.p1_violations.empty());
    CHECK(r.max_p2() <= fam.size());
    // Passing is monotone in theta.
    DomainFamily wider = fam;
    wider.theta = 2.0 * c.theta;
    CHECK(projection_complex::verify_axioms(wider).ok());
    for (std::size_t Y = 0; Y < fam.size(); ++Y) {
      for (std::size_t X = 0; X < fam.size(); ++X) {
        for (std::size_t Z = X + 1; Z < fam.size() && seed < 3; ++Z) {
          if (Y == X || Y == Z) continue;
          CHECK_THAT(projection_complex::dpi(fam, Y, X, Z),
                     WithinAbs(d_gamma(cfg.geodesics[Y], cfg.geodesics[X], cfg.geodesics[Z]), 1e-12));
        }
      }
    }
  }
}

TEST_CASE("chain configuration", "[geodesic_families]") {
  const ThetaConstants c = theta_constants();
  const GeodesicConfig cfg = chain_config(6);
  const DomainFamily fam = family_from_config(cfg, c.theta);
  CHECK(projection_complex::verify_axioms(fam).ok());
  // Below half the smallest dpi_Y(X,Z) with X < Y < Z only consecutive domains stay adjacent.
  double between = std::numeric_limits<double>::infinity();
  for (std::size_t X = 0; X < 6; ++X) {
    for (std::size_t Y = X + 1; Y < 6; ++Y) {
      for (std::size_t Z = Y + 1; Z < 6; ++Z) between = std::min(between, projection_complex::dpi(fam, Y, X, Z));
    }
  }
  REQUIRE(between > 0.1);
  const auto pk = projection_complex::build_projection_graph(fam, 0.5 * between);
  for (const auto& [X, Z] : pk.edges) CHECK(Z == X + 1);
  CHECK(pk.edges.size() == 5);

  // The dilation by 16 carries gamma_k to gamma_{k+1} and preserves arc parameters.
  std::vector<projection_complex::LabelAction> acts;
  for (long k = 0; k < 3; ++k) {
    projection_complex::LabelAction a;
    for (long Y = 0; Y < 6; ++Y) a.image.push_back(Y + k < 6 ? Y + k : -1);
    a.F.assign(6, projection_complex::LineIsometry{});
    acts.push_back(a);
  }
  const auto ok = projection_complex::verify_group_compatibility(fam, acts, {{1, 1, 2}, {0, 1, 1}, {1, 0, 1}});
  CHECK(ok.pass);
  CHECK(ok.checks > 30);
  acts[1].F[2] = projection_complex::LineIsometry{1, 0.25};
  const auto bad = projection_complex::verify_group_compatibility(fam, acts, {{1, 1, 2}});
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.equivariance.empty());
  CHECK_FALSE(bad.cocycle.empty());

  const auto cal = projection_complex::calibrate_K(fam);
  CHECK(cal.report.pass);
  CHECK(cal.embedding_defect <= 1e-9);
  const auto q = projection_complex::build_quasi_tree(fam, cal.K, cal.L, cal.delta);
  const auto sp = projection_complex::all_pairs(q.graph);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const auto& verts = q.domain_vertices[static_cast<std::size_t>(rng() % 6)];
    const auto u = static_cast<std::size_t>(verts[rng() % verts.size()]);
    const auto v = static_cast<std::size_t>(verts[rng() % verts.size()]);
    CHECK_THAT(sp.d(u, v), WithinAbs(std::abs(q.coord[u] - q.coord[v]), 1e-9));
  }
}

TEST_CASE("flip trees", "[geodesic_families]") {
  const FlipTree t1 = schottky_flip_tree({}, 1, 1);
  REQUIRE(t1.nodes.size() == 1);
  CHECK(t1.nodes[0].geometry->boundary.size() == 5);
  CHECK_NOTHROW(verify_disjoint(t1.nodes[0].geometry->boundary));

  const FlipTree t3 = schottky_flip_tree({}, 3, 3);
  // 1 + 4 + 12 + 36 reduced words; the root uses every slot, children all but the parent's.
  const std::size_t slots = 53;
  CHECK(t3.nodes.size() == 1 + slots + slots * (slots - 1));
  CHECK(proper_coloring(t3));
  for (const auto& nd : t3.nodes) {
    if (nd.parent < 0) continue;
    CHECK(t3.node(nd.parent).child_at_slot[static_cast<std::size_t>(nd.slot_in_parent)] == nd.id);
  }
  FlipTreeParams weak;
  weak.ell1 = weak.ell2 = 0.2;
  CHECK(has_code([&] { schottky_flip_tree(weak, 1, 2); }, ErrorCode::DisjointnessViolation));
  CHECK(has_code([] { schottky_flip_tree({}, 0, 1); }, ErrorCode::ConfigError));
}

TEST_CASE("lift projections", "[geodesic_families]") {
  const FlipTree T = schottky_flip_tree({}, 3, 1);
  CHECK(proper_coloring(T));
  const int u = 1;  // a level-1 node
  const auto& kids = T.node(u).child_at_slot;
  std::vector<int> grand;
  for (int k : kids) {
    if (k >= 0) grand.push_back(k);
  }
  REQUIRE(grand.size() >= 3);
  CHECK(has_code([&] { lift_projection(T, u, grand[0]); }, ErrorCode::TooClose));
  // v, w on either side of u: dpi from two lifts equals d_gamma on u's boundary.
  const int w = grand[0], v1 = grand[1], v2 = grand[2];
  const double a = lift_projection(T, v1, w), b = lift_projection(T, v2, w);
  CHECK_THAT(std::abs(a - b),
             WithinAbs(d_gamma(T.glued_geodesic(u, w), T.glued_geodesic(u, v1), T.glued_geodesic(u, v2)), 1e-12));
  // Sources whose tree geodesics enter u through the same neighbour project to one point.
  const int root = 0;
  int other = -1;
  for (int k : T.node(root).child_at_slot) {
    if (k >= 0 && k != u) other = k;
  }
  REQUIRE(other >= 0);
  int cousin = -1;
  for (int k : T.node(other).child_at_slot) {
    if (k >= 0) cousin = k;
  }
  REQUIRE(cousin >= 0);
  CHECK(lift_projection(T, other, w) == lift_projection(T, cousin, w));
}

TEST_CASE("families from trees", "[geodesic_families]") {
  const ThetaConstants c = theta_constants();
  CHECK(has_code([&] { family_from_tree(schottky_flip_tree({}, 1, 1), Color::black, c.theta); },
                 ErrorCode::TooFewDomains));
  const FlipTree T = schottky_flip_tree({}, 3, 1);
  const TreeFamily black = family_from_tree(T, Color::black, c.theta);
  const TreeFamily white = family_from_tree(T, Color::white, c.theta);
  CHECK(projection_complex::verify_axioms(black.family).ok());
  std::set<int> b(black.node_of.begin(), black.node_of.end());
  for (int v : white.node_of) CHECK(b.count(v) == 0);
  CHECK(b.size() + white.node_of.size() == T.nodes.size());
  for (std::size_t i = 0; i < black.node_of.size(); ++i) {
    for (std::size_t j = i + 1; j < black.node_of.size(); ++j) CHECK(T.distance(black.node_of[i], black.node_of[j]) >= 2);
  }
}

TEST_CASE("bounded projection scan", "[geodesic_families]") {
  CHECK(has_code([] { scan_scenario({}, 2); }, ErrorCode::ScenarioUnavailable));
  const ScanScenario sc = scan_scenario({}, 3, 1, 10);
  CHECK(has_code([&] { bounded_projection_scan(sc, 11); }, ErrorCode::ScenarioUnavailable));
  const ProjectionScan s1 = bounded_projection_scan(sc, 1);
  const ProjectionScan s3 = bounded_projection_scan(sc, 3);
  const ProjectionScan s10 = bounded_projection_scan(sc, 10);
  CHECK_THAT(s10.max_spread, WithinAbs(s3.max_spread, 1e-8));
  CHECK(s1.max_spread <= s3.max_spread);
  CHECK(s10.nonadjacent_all_zero);
  CHECK(s10.nonadjacent_pairs > 0);
  CHECK(s10.max_spread <= s10.comparator_double);
  CHECK(s10.evaluations > s3.evaluations);
  // Recompute the maximising entry.
  const double v = std::abs(lift_projection(sc.tree, sc.B.at(s10.argmax_m), s10.argmax_C) -
                            lift_projection(sc.tree, sc.B.at(s10.argmax_n), s10.argmax_C));
  CHECK(v == s10.max_spread);

  // Spread on domains glued along the orbit shrinks as the generators separate.
  double prev = std::numeric_limits<double>::infinity();
  for (double kappa : {30.0, 1e2, 1e3, 1e4, 1e5}) {
    FlipTreeParams p;
    p.ell1 = p.ell2 = std::log(kappa);
    const ProjectionScan s = bounded_projection_scan(scan_scenario(p, 3, 1, 3), 3);
    CHECK(s.orbit_max < prev);
    CHECK(std::isfinite(s.comparator_double));
    CHECK(s.max_spread <= s.comparator_double);
    prev = s.orbit_max;
  }
}

// The total spread is set by the hub's other neighbours and rises towards a limit
// near 1.96611 as the separation grows, so it is not monotone non-increasing.
TEST_CASE("total scan spread is non-increasing in the separation", "[geodesic_families][!shouldfail]") {
  double prev = std::numeric_limits<double>::infinity();
  for (double kappa : {30.0, 1e2, 1e3, 1e4}) {
    FlipTreeParams p;
    p.ell1 = p.ell2 = std::log(kappa);
    const double m = bounded_projection_scan(scan_scenario(p, 3, 1, 3), 3).max_spread;
    CHECK(m <= prev);
    prev = m;
  }
}
