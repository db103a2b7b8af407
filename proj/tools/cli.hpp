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

// Command-line front end. Exit codes: 0 all checks pass, 1 violations, 2 bad configuration.

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hypstruct/actions.hpp"
#include "hypstruct/geodesic_families.hpp"
#include "hypstruct/groups.hpp"
#include "hypstruct/hyp2.hpp"
#include "hypstruct/io.hpp"
#include "hypstruct/poset.hpp"
#include "hypstruct/projection_complex.hpp"
#include "hypstruct/quasimorphisms.hpp"

namespace hypstruct::cli {

enum class Format { json, dot, text };

struct RunConfig {
  std::string subcommand;
  std::string phi = "2,1,1,1";
  std::string matrix;  // classify: real entries a,b,c,d
  std::string in;      // optional JSON input (axioms, complex)
  std::string out;
  std::string group = "z2";  // mainlemma: z2 | bs22 | broken
  double eps = 1.0;
  long long box = 50;
  int k_cap = 20;
  int depth = 3;
  int N = 10;
  int count = 20;
  int families = 10;
  std::uint64_t seed = 1;
  std::optional<double> K, L;
  Format format = Format::text;
};

inline constexpr int kPass = 0;
inline constexpr int kViolation = 1;
inline constexpr int kConfigError = 2;

struct Outcome {
  int code = kPass;
  io::Json report;
  std::string text;  // summary, or DOT when requested
};

namespace detail {

inline std::vector<double> parse_reals(const std::string& s, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    try {
      v.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::ConfigError, std::string(flag) + ": entry \"" + item + "\" is not a number");
    }
  }
  return v;
}

inline io::Json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot open " + path);
  try {
    return io::Json::parse(f);
  } catch (const io::Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

inline Outcome classify(const RunConfig& c) {
  const std::vector<double> m = parse_reals(c.matrix.empty() ? c.phi : c.matrix, "--matrix");
  if (m.size() != 4) throw Error(ErrorCode::ConfigError, "--matrix: expected 4 comma-separated numbers");
  const double det = m[0] * m[3] - m[1] * m[2];
  if (!(det > 0.0)) throw Error(ErrorCode::ConfigError, "--matrix: determinant must be positive");
  const hyp2::Isometry g = hyp2::Isometry::normalized(m[0], m[1], m[2], m[3]);
  const hyp2::IsometryClass k = hyp2::classify(g);
  auto act = actions::detail::from_isometries<hyp2::Isometry>("matrix", [](const hyp2::Isometry& h) { return h; });
  const actions::OrbitGrowthReport r = actions::classify_orbit_growth(act, g, 64);
  using T = hyp2::IsometryClass::Tag;
  using O = actions::OrbitGrowthReport::Tag;
  const bool agree = (k.tag == T::loxodromic) == (r.tag == O::loxodromic) &&
                     ((k.tag == T::identity || k.tag == T::elliptic) == (r.tag == O::elliptic));
  Outcome o;
  o.code = agree ? kPass : kViolation;
  o.report = {{"command", "classify"}, {"class", io::to_json(k)}, {"orbit_growth", io::to_json(r)}, {"agree", agree}};
  o.text = std::string("trace class: ") + hyp2::to_string(k.tag) + ", orbit growth: " + actions::to_string(r.tag) +
           (agree ? " (agree)" : " (DISAGREE)") + "\n";
  return o;
}

inline Outcome confining(const RunConfig& c) {
  const groups::AnosovData data = groups::eigen(io::parse_phi(c.phi));
  const groups::ConfinementReport r = groups::verify_confining(c.eps, data, c.box, c.k_cap);
  const groups::DensityClaim d = groups::density_claim(data, c.eps, c.box);
  Outcome o;
  o.code = r.all_pass() && d.density.pass ? kPass : kViolation;
  o.report = {{"command", "confining"}, {"confinement", io::to_json(r)}, {"density", io::to_json(d.density)},
              {"density_gap", d.lambda_n * d.a}, {"density_interval", {0.0, d.lambda_n * d.lambda_n * d.a}}};
  std::ostringstream t;
  t << "conditions (a) " << r.a.pass << " (b) " << r.b.pass << " (c) " << r.c.pass << ", k0 "
    << (r.k0 ? std::to_string(*r.k0) : "none") << ", strict " << (r.strictness_witness ? "yes" : "no")
    << "; density " << (d.density.pass ? "pass" : "FAIL") << " (coverage " << d.density.coverage_radius << ")\n";
  o.text = t.str();
  return o;
}

inline std::vector<projection_complex::DomainFamily> families(const RunConfig& c, double theta) {
  std::vector<projection_complex::DomainFamily> out;
  if (!c.in.empty()) {
    out.push_back(io::family_from_json(read_json(c.in)));
    return out;
  }
  if (c.count < 2 || c.families < 1) throw Error(ErrorCode::ConfigError, "--count >= 2 and --families >= 1 needed");
  for (int i = 0; i < c.families; ++i) {
    const auto cfg = geodesic_families::random_disjoint_geodesics(static_cast<std::size_t>(c.count),
                                                                  geodesic_families::kDefaultR, c.seed + i);
    out.push_back(geodesic_families::family_from_config(cfg, theta));
  }
  return out;
}

inline Outcome axioms(const RunConfig& c) {
  const auto th = geodesic_families::theta_constants();
  Outcome o;
  io::Json reports = io::Json::array();
  std::size_t bad = 0;
  for (const auto& fam : families(c, th.theta)) {
    const auto r = projection_complex::verify_axioms(fam);
    if (!r.ok()) ++bad;
    reports.push_back(io::to_json(r));
  }
  o.code = bad == 0 ? kPass : kViolation;
  o.report = {{"command", "axioms"}, {"constants", io::to_json(th)}, {"reports", reports}};
  o.text = std::to_string(reports.size() - bad) + "/" + std::to_string(reports.size()) +
           " families satisfy P0 and P1 at theta " + std::to_string(th.theta) + "\n";
  return o;
}

inline Outcome complex(const RunConfig& c) {
  const auto th = geodesic_families::theta_constants();
  RunConfig one = c;
  one.families = 1;
  const auto fam = families(one, th.theta).front();
  Outcome o;
  io::Json rep{{"command", "complex"}};
  projection_complex::ProjectionGraph pk;
  if (c.K) {
    const double L = c.L.value_or(*c.K);
    pk = projection_complex::build_projection_graph(fam, *c.K);
    const auto q = projection_complex::build_quasi_tree(fam, pk, L, fam.theta / 4.0);
    const auto sp = projection_complex::all_pairs(q.graph);
    const double radius = 0.5 * *c.K + 2.0 * fam.theta;
    const auto b = projection_complex::bottleneck_check(q.graph, sp, radius);
    rep["K"] = *c.K;
    rep["L"] = L;
    rep["embedding_defect"] = projection_complex::embedding_defect(q, sp);
    rep["bottleneck"] = io::to_json(b);
    o.code = b.pass ? kPass : kViolation;
  } else {
    const auto cal = projection_complex::calibrate_K(fam);
    pk = projection_complex::build_projection_graph(fam, cal.K);
    rep["calibration"] = io::to_json(cal);
  }
  rep["projection_graph_edges"] = pk.edges.size();
  o.report = rep;
  if (c.format == Format::dot) {
    o.text = io::to_dot(pk, fam.labels);
  } else {
    const auto& b = rep.contains("bottleneck") ? rep["bottleneck"] : rep["calibration"]["bottleneck"];
    o.text = "P_K edges " + std::to_string(pk.edges.size()) + ", bottleneck " +
             (b["pass"].get<bool>() ? "pass" : "FAIL") + ", delta_min " + b["delta_min"].dump() + "\n";
  }
  return o;
}

inline Outcome flip(const RunConfig& c) {
  const auto sc = geodesic_families::scan_scenario(geodesic_families::FlipTreeParams{}, c.depth, 1, c.N);
  const auto small = geodesic_families::bounded_projection_scan(sc, std::min(3, c.N));
  const auto full = geodesic_families::bounded_projection_scan(sc, c.N);
  const bool uniform = std::abs(full.max_spread - small.max_spread) <= 1e-9 * (1.0 + full.max_spread);
  Outcome o;
  o.code = uniform && full.nonadjacent_all_zero ? kPass : kViolation;
  o.report = {{"command", "flip"}, {"nodes", sc.tree.nodes.size()}, {"scan_small", io::to_json(small)},
              {"scan", io::to_json(full)}, {"uniform", uniform}};
  std::ostringstream t;
  t.precision(12);
  t << "flip tree depth " << c.depth << ", " << sc.tree.nodes.size() << " nodes; max spread " << small.max_spread
    << " (N=" << small.N << ") vs " << full.max_spread << " (N=" << full.N << "); non-adjacent all zero "
    << (full.nonadjacent_all_zero ? "yes" : "NO") << "\n";
  o.text = t.str();
  return o;
}

inline Outcome poset_cmd(const RunConfig& c) {
  const auto d = poset::anosov_poset(io::parse_phi(c.phi));
  Outcome o;
  o.code = d.consistent() ? kPass : kViolation;
  o.report = io::to_json(d);
  o.report["command"] = "poset";
  if (c.format == Format::dot) {
    o.text = poset::emit_dot(d);
  } else {
    std::ostringstream t;
    for (const auto& e : d.edges) {
      t << d.nodes[e.greater].label << " > " << d.nodes[e.lesser].label << " via " << e.witness.map_name
        << " (C " << e.witness.C << ")\n";
    }
    for (const auto& p : d.incomparable) t << d.nodes[p.a].label << " | " << d.nodes[p.b].label << ": "
                                           << p.certificate.statement << "\n";
    o.text = t.str();
  }
  return o;
}

inline Outcome mainlemma(const RunConfig& c) {
  Outcome o;
  try {
    actions::MainLemmaCertificate cert;
    if (c.group == "bs22") {
      const groups::BaumslagSolitar G(2, 2);
      auto mul = [G](const groups::BSElement& x, const groups::BSElement& y) { return G.mul(x, y); };
      const auto a = G.normal_form("aa"), b = G.normal_form("b");
      std::vector<std::pair<groups::BSElement, groups::BSElement>> pairs;
      for (const char* u : {"a", "b", "aB", "abA", "bba"}) {
        for (const char* v : {"a", "B", "ab", "Aba"}) pairs.emplace_back(G.normal_form(u), G.normal_form(v));
      }
      const auto X = actions::lineal_from_hom<groups::BSElement>(
          [G](const groups::BSElement& g) { return groups::to_double(G.a_exponent_sum(g)); }, mul, pairs, "a_sum");
      const auto Y = actions::lineal_from_hom<groups::BSElement>(
          [](const groups::BSElement& g) { return static_cast<double>(groups::BaumslagSolitar::b_exponent_sum(g)); },
          mul, pairs, "b_sum");
      cert = actions::check_main_lemma(X, Y, a, b, mul, [](const auto& x, const auto& y) { return x == y; });
    } else if (c.group == "z2" || c.group == "broken") {
      using Z2 = std::pair<long long, long long>;
      auto mul = [](const Z2& x, const Z2& y) { return Z2{x.first + y.first, x.second + y.second}; };
      std::vector<std::pair<Z2, Z2>> pairs{{{1, 0}, {0, 1}}, {{2, -1}, {-3, 5}}};
      const auto X = actions::lineal_from_hom<Z2>([](const Z2& g) { return double(g.first); }, mul, pairs, "x_coord");
      const auto Y = actions::lineal_from_hom<Z2>([](const Z2& g) { return double(g.second); }, mul, pairs, "y_coord");
      const Z2 a{1, 0};
      const Z2 b = c.group == "broken" ? a : Z2{0, 1};
      cert = actions::check_main_lemma(X, Y, a, b, mul, [](const Z2& x, const Z2& y) { return x == y; });
    } else {
      throw Error(ErrorCode::ConfigError, "--group must be z2, bs22 or broken");
    }
    o.report = {{"command", "mainlemma"}, {"group", c.group}, {"certificate", io::to_json(cert)}};
    o.text = "certified: " + cert.statement + "\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::HypothesisFailed) throw;
    o.code = kViolation;
    o.report = {{"command", "mainlemma"}, {"group", c.group}, {"error", e.what()}};
    o.text = std::string(e.what()) + "\n";
  }
  return o;
}

inline Outcome qm(const RunConfig& c) {
  const groups::AnosovData data = groups::eigen(io::parse_phi(c.phi));
  const auto act = actions::anosov_action(data, groups::Side::plus);
  const auto inf = hyp2::BoundaryPoint::infinity();
  io::Json values = io::Json::array();
  bool ok = true;
  auto add = [&](const groups::TBElement& g, double expected) {
    const auto v = quasimorphisms::busemann_value(act, inf, g);
    const bool match = std::abs(v.value - expected) <= 1e-5;
    ok = ok && match;
    values.push_back({{"element", groups::to_string(g)}, {"value", v.value}, {"expected", expected},
                      {"depth", v.depth}, {"match", match}});
  };
  add(groups::TorusBundle::t(1), std::log(data.lambda));
  add(groups::TorusBundle::lattice(1, 0), 0.0);
  add(groups::TorusBundle::lattice(0, 1), 0.0);
  Outcome o;
  o.code = ok ? kPass : kViolation;
  o.report = {{"command", "qm"}, {"action", act.name}, {"fixed", "inf"}, {"values", values}};
  std::ostringstream t;
  t.precision(10);
  for (const auto& v : values) t << v["element"].get<std::string>() << ": " << v["value"].get<double>() << "\n";
  o.text = t.str();
  return o;
}

}  // namespace detail

/// Runs one subcommand; library errors from bad input map to exit code 2.
inline Outcome run(const RunConfig& c) {
  try {
    if (c.subcommand == "classify") return detail::classify(c);
    if (c.subcommand == "confining") return detail::confining(c);
    if (c.subcommand == "axioms") return detail::axioms(c);
    if (c.subcommand == "complex") return detail::complex(c);
    if (c.subcommand == "flip") return detail::flip(c);
    if (c.subcommand == "poset") return detail::poset_cmd(c);
    if (c.subcommand == "mainlemma") return detail::mainlemma(c);
    if (c.subcommand == "qm") return detail::qm(c);
    throw Error(ErrorCode::ConfigError, "unknown subcommand \"" + c.subcommand + "\"");
  } catch (const Error& e) {
    Outcome o;
    const bool config = e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::NotAnosov ||
                        e.code() == ErrorCode::DegenerateMatrix || e.code() == ErrorCode::ScenarioUnavailable;
    o.code = config ? kConfigError : kViolation;
    o.report = {{"command", c.subcommand}, {"error", e.what()}};
    o.text = std::string(e.what()) + "\n";
    return o;
  }
}

inline std::string render(const Outcome& o, Format f) {
  if (f == Format::json) return o.report.dump() + "\n";
  return o.text;
}

/// Parses argv into cfg; returns an exit code when parsing ends the run.
inline std::optional<int> parse(int argc, const char* const* argv, RunConfig& cfg) {
  CLI::App app{"hypstruct: hyperbolic structures at desk scale"};
  app.require_subcommand(1);
  std::string format = "text";
  std::optional<double> K, L;
  auto common = [&](CLI::App* s) {
    s->add_option("--phi", cfg.phi, "Anosov matrix a,b,c,d");
    s->add_option("--seed", cfg.seed, "seed for randomized sweeps");
    s->add_option("--format", format, "json | dot | text")->check(CLI::IsMember({"json", "dot", "text"}));
    s->add_option("--out", cfg.out, "write the report to PATH");
  };
  auto* classify = app.add_subcommand("classify", "trace class vs orbit growth of a matrix");
  classify->add_option("--matrix", cfg.matrix, "real entries a,b,c,d (defaults to --phi)");
  auto* confining = app.add_subcommand("confining", "confinement conditions and density");
  confining->add_option("--eps", cfg.eps);
  confining->add_option("--box", cfg.box);
  confining->add_option("--kcap", cfg.k_cap);
  auto* axioms = app.add_subcommand("axioms", "projection axioms on random geodesic families");
  auto* complex = app.add_subcommand("complex", "projection complex, quasi-tree and bottleneck test");
  complex->add_option("--K", K);
  complex->add_option("--L", L);
  for (auto* s : {axioms, complex}) {
    s->add_option("--count", cfg.count, "geodesics per family");
    s->add_option("--in", cfg.in, "DomainFamily JSON");
  }
  axioms->add_option("--families", cfg.families);
  auto* flip = app.add_subcommand("flip", "flip tree and bounded projection scan");
  flip->add_option("--depth", cfg.depth);
  flip->add_option("--N", cfg.N, "orbit cap for the scan");
  auto* poset = app.add_subcommand("poset", "poset of hyperbolic structures of an Anosov mapping torus");
  auto* mainlemma = app.add_subcommand("mainlemma", "Main Lemma certificate");
  mainlemma->add_option("--group", cfg.group, "z2 | bs22 | broken");
  auto* qm = app.add_subcommand("qm", "Busemann quasimorphism values");
  for (auto* s : {classify, confining, axioms, complex, flip, poset, mainlemma, qm}) common(s);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? Format::json : format == "dot" ? Format::dot : Format::text;
  cfg.K = K;
  cfg.L = L;
  return std::nullopt;
}

inline int main(int argc, const char* const* argv) {
  RunConfig cfg;
  if (auto code = parse(argc, argv, cfg)) return *code;
  const Outcome o = run(cfg);
  if (o.code == kConfigError) {
    std::cerr << o.text;
    return o.code;
  }
  const std::string body = render(o, cfg.format);
  if (!cfg.out.empty()) {
    std::ofstream f(cfg.out);
    if (!f) {
      std::cerr << "cannot write " << cfg.out << "\n";
      return kConfigError;
    }
    f << body;
  } else {
    std::cout << body;
  }
  return o.code;
}

}  // namespace hypstruct::cli
