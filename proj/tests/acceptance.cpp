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


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypstruct/actions.hpp"
#include "hypstruct/geodesic_families.hpp"
#include "hypstruct/groups.hpp"
#include "hypstruct/hyp2.hpp"
#include "hypstruct/poset.hpp"
#include "hypstruct/projection_complex.hpp"
#include "hypstruct/quasimorphisms.hpp"

using namespace hypstruct;
using groups::BigInt;
using groups::IntMatrix2;
using groups::TBElement;
using groups::TorusBundle;
using groups::operator+;
using hyp2::HPoint;
using hyp2::Isometry;

namespace {

const IntMatrix2 kCat{2, 1, 1, 1};

struct Result {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget;  // seconds; 0 means no bound
  std::function<Result()> run;
};

bool throws_code(const std::function<void()>& f, ErrorCode c) {
  try {
    f();
  } catch (const Error& e) {
    return e.code() == c;
  }
  return false;
}

IntMatrix2 random_anosov(std::mt19937_64& rng, long long bound) {
  std::uniform_int_distribution<long long> u(-bound, bound);
  for (;;) {
    const long long a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    if (a * d - b * c == 1 && std::llabs(a + d) > 2) return {a, b, c, d};
  }
}

// Random SL(2,R) element with |trace| outside [1.9, 2.1].
Isometry random_matrix(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (std::abs(a) < 0.3) continue;
    const double d = (1.0 + b * c) / a;
    const double tr = std::abs(a + d);
    if (tr >= 1.9 && tr <= 2.1) continue;
    return Isometry(a, b, c, d);
  }
}

std::vector<projection_complex::DomainFamily> sweep_families() {
  const double theta = geodesic_families::theta_constants().theta;
  std::vector<projection_complex::DomainFamily> out;
  for (std::uint64_t seed = 0; seed < 196; ++seed) {
    const auto cfg = geodesic_families::random_disjoint_geodesics(20 + seed % 31, 0.1, 1000 + seed);
    out.push_back(geodesic_families::family_from_config(cfg, theta));
  }
  for (int depth : {3, 4}) {
    const auto T = geodesic_families::schottky_flip_tree({}, depth, 1);
    for (auto color : {geodesic_families::Color::black, geodesic_families::Color::white}) {
      out.push_back(geodesic_families::family_from_tree(T, color, theta).family);
    }
  }
  return out;
}

const std::vector<projection_complex::DomainFamily>& families() {
  static const auto f = sweep_families();
  return f;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// ---------------------------------------------------------------------------

Result distance_formula() {
  const auto data = groups::eigen(kCat);
  const auto act = actions::anosov_action(data, groups::Side::plus);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long long> u(-1000, 1000);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const TBElement p = TorusBundle::lattice(u(rng), u(rng));
    const double x = groups::eigen_coords(p.p, data).pi;
    const double d = hyp2::dist(HPoint(0, 1), act.isometry(p).apply(HPoint(0, 1)));
    worst = std::max(worst, std::abs(d - 2.0 * std::asinh(std::abs(x) / 2.0)));
  }
  return {worst <= 1e-9, "max error " + fmt(worst) + " over 1000 lattice elements"};
}

Result classifier_agreement() {
  std::mt19937_64 rng(2);
  const auto act = actions::detail::from_isometries<Isometry>("matrix", [](const Isometry& g) { return g; });
  int agree = 0, lox = 0;
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Isometry g = random_matrix(rng);
    const auto c = hyp2::classify(g);
    const auto r = actions::classify_orbit_growth(act, g, 64);
    using T = hyp2::IsometryClass::Tag;
    using O = actions::OrbitGrowthReport::Tag;
    bool ok = false;
    if (c.tag == T::loxodromic) {
      ++lox;
      const double err = std::abs(r.rate - c.translation_length);
      worst = std::max(worst, err);
      ok = r.tag == O::loxodromic && err <= 1e-4;
    } else if (c.tag == T::elliptic) {
      ok = r.tag == O::elliptic;
    }
    agree += ok;
  }
  return {agree == 500, std::to_string(agree) + "/500 agree (" + std::to_string(lox) +
                            " loxodromic, max length error " + fmt(worst) + ")"};
}

Result confinement() {
  const auto d = groups::eigen(kCat);
  const auto r = groups::verify_confining(1.0, d, 50, 20);
  bool ok = r.a.pass && r.b.pass && r.c.pass && r.k0 && *r.k0 == 1 && r.strictness_witness.has_value();
  if (r.strictness_witness) {
    // Re-verify: w in Q but phi^-1 w not in Q, so phi(Q) misses w.
    const auto& w = *r.strictness_witness;
    ok = ok && groups::in_Q(w, 1.0, groups::Side::plus, d) &&
         !groups::in_Q(kCat.inverse() * w, 1.0, groups::Side::plus, d);
  }
  return {ok, std::string("(a) ") + (r.a.pass ? "pass" : "fail") + " (b) " + (r.b.pass ? "pass" : "fail") + " (c) " +
              (r.c.pass ? "pass" : "fail") + ", k0 " + (r.k0 ? std::to_string(*r.k0) : "none") +
              (r.strictness_witness ? ", strictness witness re-verified" : ", no witness")};
}

Result density() {
  const auto d = groups::eigen(kCat);
  const auto c = groups::density_claim(d, 1.0, 50, 1);
  // Independent gap scan over rho(x + y), x, y in P.
  std::vector<double> in{0.0, d.lambda * d.lambda * c.a};
  for (const auto& x : c.P) {
    for (const auto& y : c.P) {
      const double v = groups::eigen_coords(x + y, d).rho;
      if (v > 0.0 && v < in[1]) in.push_back(v);
    }
  }
  std::sort(in.begin(), in.end());
  double largest = 0.0;
  for (std::size_t i = 0; i + 1 < in.size(); ++i) largest = std::max(largest, in[i + 1] - in[i]);
  const double allowed = d.lambda * c.a;
  const bool ok = c.r == 2 && c.eps_u <= 1.0 && c.P_inside_Q && c.density.pass && largest <= allowed &&
                  std::abs(largest - c.density.largest_gap) <= 1e-9;
  return {ok, "r = " + std::to_string(c.r) + ", a = " + fmt(c.a) + ", largest gap " + fmt(largest) + " <= " +
                  fmt(allowed) + ", |P| = " + std::to_string(c.P.size())};
}

Result schwarz_milnor() {
  const auto d = groups::eigen(kCat);
  const TorusBundle G(kCat);
  const auto X = actions::anosov_action(d, groups::Side::plus);
  const auto ball = groups::tb_word_ball(G, groups::q_eps_spec(d, 1.0, groups::Side::plus), 2, 6, 2000000);
  const auto w = actions::qi_estimate_word_metric(ball, X);
  // Brute-force the fitted inequality on every ball element.
  std::size_t bad = 0;
  for (const TBElement& g : ball.order) {
    const double d1 = ball.length.at(g), d2 = X.displacement(g);
    bad += !(d1 / w.C - w.C <= d2 + 1e-12 && d2 <= w.C * d1 + w.C + 1e-12);
  }
  const bool ok = std::isfinite(w.C) && w.violations == 0 && bad == 0;
  return {ok, "C = " + fmt(w.C) + " over " + std::to_string(ball.order.size()) + " elements, " +
                  std::to_string(w.violations + bad) + " violations"};
}

Result axiom_sweep() {
  std::size_t p0 = 0, p1 = 0, sizes = 0;
  for (const auto& fam : families()) {
    const auto r = projection_complex::verify_axioms(fam);
    p0 += r.p0_violations.size();
    p1 += r.p1_violations.size();
    sizes += fam.size();
  }
  return {families().size() == 200 && p0 == 0 && p1 == 0,
          std::to_string(families().size()) + " families (" + std::to_string(sizes) + " domains), P0 " +
              std::to_string(p0) + ", P1 " + std::to_string(p1)};
}

Result quasi_tree() {
  const double theta = geodesic_families::theta_constants().theta;
  double lo = 1e300, hi = 0.0, min_lo = 1e300, min_hi = 0.0;
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto cfg = geodesic_families::random_disjoint_geodesics(20, 0.1, 5000 + seed);
    const auto fam = geodesic_families::family_from_config(cfg, theta);
    const auto cal = projection_complex::calibrate_K(fam);
    const auto pk = projection_complex::build_projection_graph(fam, cal.K);
    const auto q = projection_complex::build_quasi_tree(fam, pk, cal.L, cal.delta);
    const auto b = projection_complex::bottleneck_check(q.graph, cal.bottleneck);
    if (b.pass && pk.connected()) ++passed;
    lo = std::min(lo, cal.bottleneck);
    hi = std::max(hi, cal.bottleneck);
    min_lo = std::min(min_lo, b.delta_min);
    min_hi = std::max(min_hi, b.delta_min);
  }
  const auto c12 = projection_complex::MetricGraph::cycle(12);
  bool control = true;
  for (double delta : {0.5, 1.0, 1.5, 1.99}) control = control && !projection_complex::bottleneck_check(c12, delta).pass;
  const bool at3 = projection_complex::bottleneck_check(c12, 3.0).pass;
  const bool ok = passed == 20 && hi / lo <= 4.0 && control && at3;
  return {ok, std::to_string(passed) + "/20 pass, Delta in [" + fmt(lo) + ", " + fmt(hi) + "] ratio " + fmt(hi / lo) +
                  ", exact Delta_min in [" + fmt(min_lo) + ", " + fmt(min_hi) + "], C12 fails below 2: " + (control ? "yes" : "no") + ", passes at 3: " + (at3 ? "yes" : "no")};
}

Result modified_distance() {
  std::size_t triples = 0, bad = 0;
  for (const auto& fam : families()) {
    const auto table = projection_complex::modified_distance_table(fam);
    const std::size_t n = fam.size();
    for (std::size_t X = 0; X < n; ++X) {
      for (std::size_t Z = 0; Z < n; ++Z) {
        for (std::size_t Y = 0; Y < n; ++Y) {
          if (Y == X || Y == Z || X == Z) continue;
          ++triples;
          bad += table[X][Z][Y] > projection_complex::dpi(fam, Y, X, Z);
        }
      }
    }
  }
  return {bad == 0, std::to_string(triples) + " triples, " + std::to_string(bad) + " violations"};
}

Result bs_distortion() {
  const groups::BaumslagSolitar G(1, 2);
  const auto a = G.normal_form("a"), b = G.normal_form("b");
  int ok = 0;
  for (int k = 0; k <= 20; ++k) {
    const auto bk = G.pow(b, k);
    ok += G.mul(G.mul(bk, a), G.inv(bk)) == groups::BaumslagSolitar::a_power(BigInt(1) << k);
  }
  return {ok == 21, std::to_string(ok) + "/21 identities, top exponent 2^20 = 1048576"};
}

Result abelianization() {
  std::mt19937_64 rng(10);
  int ok = 0;
  for (int k = 0; k < 50; ++k) {
    const IntMatrix2 phi = random_anosov(rng, 20);
    const auto ab = groups::abelianization(phi);
    BigInt prod = 1;
    for (const BigInt& t : ab.torsion) prod *= t;
    const BigInt det = (phi.a - 1) * (phi.d - 1) - phi.b * phi.c;
    ok += ab.free_rank == 1 && prod == abs(det);
  }
  const auto special = groups::abelianization(IntMatrix2{3, 4, 2, 3});
  const bool twos = special.free_rank == 1 && special.torsion == std::vector<BigInt>{2, 2};
  return {ok == 50 && twos, std::to_string(ok) + "/50 random, [[3,4],[2,3]] torsion " + (twos ? "[2,2]" : "wrong")};
}

Result poset_assembly() {
  const auto d = poset::anosov_poset(kCat);
  std::size_t witnessed = 0;
  for (const auto& e : d.edges) {
    witnessed += std::isfinite(e.witness.C) && e.witness.lipschitz_ratio <= 100.0 &&
                 e.witness.equivariance_defect <= 10.0 && e.witness.point_pairs > 0 && e.witness.group_samples > 0;
  }
  bool cert = false;
  for (const auto& p : d.incomparable) {
    cert = cert || (p.certificate.strategy == poset::IncomparabilityCertificate::Strategy::fixed_point_pattern &&
                    p.certificate.pattern && d.nodes[p.a].label == "H2+" && d.nodes[p.b].label == "H2-");
  }
  const bool ok = d.nodes.size() == 4 && d.edges.size() == 3 && witnessed == 3 && cert && d.consistent();
  return {ok, std::to_string(d.nodes.size()) + " nodes, " + std::to_string(d.edges.size()) + " edges, " +
                  std::to_string(witnessed) + " witnesses, H2+/H2- certificate " + (cert ? "present" : "missing")};
}

Result main_lemma() {
  using Z2 = std::array<long long, 2>;
  auto zmul = [](const Z2& x, const Z2& y) { return Z2{x[0] + y[0], x[1] + y[1]}; };
  auto zeq = [](const Z2& x, const Z2& y) { return x == y; };
  std::vector<std::pair<Z2, Z2>> zs{{Z2{1, 2}, Z2{-3, 4}}, {Z2{0, 1}, Z2{5, 5}}};
  const auto X = actions::lineal_from_hom<Z2>([](const Z2& x) { return static_cast<double>(x[0]); }, zmul, zs, "x");
  const auto Y = actions::lineal_from_hom<Z2>([](const Z2& x) { return static_cast<double>(x[1]); }, zmul, zs, "y");
  const bool z2 = actions::check_main_lemma(X, Y, Z2{1, 0}, Z2{0, 1}, zmul, zeq).commute;
  const bool broken = throws_code([&] { actions::check_main_lemma(X, Y, Z2{1, 0}, Z2{1, 0}, zmul, zeq); },
                                  ErrorCode::HypothesisFailed);

  const groups::BaumslagSolitar B(2, 2);
  auto bmul = [&B](const groups::BSElement& x, const groups::BSElement& y) { return B.mul(x, y); };
  auto beq = [](const groups::BSElement& x, const groups::BSElement& y) { return x == y; };
  std::vector<std::pair<groups::BSElement, groups::BSElement>> bs;
  for (const char* u : {"ab", "bA", "aab", "Bab"}) {
    for (const char* v : {"b", "a", "BBa"}) bs.push_back({B.normal_form(u), B.normal_form(v)});
  }
  const auto Xa = actions::lineal_from_hom<groups::BSElement>(
      [B](const groups::BSElement& x) { return static_cast<double>(B.a_exponent_sum(x)); }, bmul, bs, "a_sum");
  const auto Yb = actions::lineal_from_hom<groups::BSElement>(
      [](const groups::BSElement& x) { return static_cast<double>(groups::BaumslagSolitar::b_exponent_sum(x)); },
      bmul, bs, "b_sum");
  const bool bs22 = actions::check_main_lemma(Xa, Yb, B.normal_form("aa"), B.normal_form("b"), bmul, beq).commute;
  return {z2 && bs22 && broken, std::string("Z2 ") + (z2 ? "certified" : "failed") + ", BS(2,2) " +
                                    (bs22 ? "certified" : "failed") + ", a = b " +
                                    (broken ? "HypothesisFailed" : "not rejected")};
}

Result busemann() {
  const auto data = groups::eigen(kCat);
  const auto act = actions::anosov_action(data, groups::Side::plus);
  const auto inf = hyp2::BoundaryPoint::infinity();
  double worst = std::abs(quasimorphisms::busemann_value(act, inf, TorusBundle::t(1), 1000).value -
                          std::log(data.lambda));
  const double t_err = worst;
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<long long> u(-50, 50);
  for (int k = 0; k < 10; ++k) {
    const auto p = TorusBundle::lattice(u(rng), u(rng));
    worst = std::max(worst, std::abs(quasimorphisms::busemann_value(act, inf, p, 1000).value));
  }
  return {worst <= 1e-5, "|qm(t) - ln lambda| = " + fmt(t_err) + ", max error " + fmt(worst)};
}

Result projection_scan() {
  const auto sc = geodesic_families::scan_scenario({}, 3, 1, 10);
  const auto s3 = geodesic_families::bounded_projection_scan(sc, 3);
  const auto s10 = geodesic_families::bounded_projection_scan(sc, 10);
  const double diff = std::abs(s10.max_spread - s3.max_spread);
  const bool ok = diff <= 1e-8 && s10.nonadjacent_all_zero && s10.nonadjacent_pairs > 0;
  return {ok, "max spread " + fmt(s10.max_spread) + " (N=10) vs " + fmt(s3.max_spread) + " (N=3), diff " + fmt(diff) +
                  ", " + std::to_string(s10.nonadjacent_pairs) + " non-adjacent pairs all zero: " +
                  (s10.nonadjacent_all_zero ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "distance formula", 1, distance_formula},
      {2, "classifier agreement", 10, classifier_agreement},
      {3, "confinement", 10, confinement},
      {4, "density brute force", 30, density},
      {5, "word metric vs H2 orbit", 60, schwarz_milnor},
      {6, "axiom sweep", 300, axiom_sweep},
      {7, "quasi-tree certification", 0, quasi_tree},
      {8, "modified-distance inequality", 0, modified_distance},
      {9, "BS distortion", 1, bs_distortion},
      {10, "abelianization", 1, abelianization},
      {11, "poset assembly", 10, poset_assembly},
      {12, "main lemma certificates", 5, main_lemma},
      {13, "Busemann values", 5, busemann},
      {14, "bounded projection scan", 60, projection_scan},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget <= 0 || dt < c.budget;
    const bool pass = r.pass && in_time;
    failed += !pass;
    std::printf("%s [%2d] %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str(), dt,
                in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
