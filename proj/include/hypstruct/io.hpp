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

// JSON and DOT serialization.

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypstruct/actions.hpp"
#include "hypstruct/error.hpp"
#include "hypstruct/geodesic_families.hpp"
#include "hypstruct/groups.hpp"
#include "hypstruct/hyp2.hpp"
#include "hypstruct/poset.hpp"
#include "hypstruct/projection_complex.hpp"

namespace hypstruct::io {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::ConfigError, where + ": missing field \"" + key + "\"");
  }
  return j.at(key);
}

inline double number(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number()) throw Error(ErrorCode::ConfigError, where + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

inline Json boundary(const hyp2::BoundaryPoint& p) {
  return p.is_infinity() ? Json("inf") : Json(p.value());
}

inline Json vec2(const groups::Vec2& p) { return Json::array({p[0].str(), p[1].str()}); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Parsing of small CLI values

/// "a,b,c,d" -> [[a,b],[c,d]].
inline groups::IntMatrix2 parse_phi(const std::string& text) {
  std::vector<long long> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long x = 0;
    try {
      x = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "--phi: entry \"" + item + "\" is not an integer");
    }
    if (used != item.size()) throw Error(ErrorCode::ConfigError, "--phi: entry \"" + item + "\" is not an integer");
    v.push_back(x);
  }
  if (v.size() != 4) throw Error(ErrorCode::ConfigError, "--phi: expected 4 comma-separated integers");
  return {v[0], v[1], v[2], v[3]};
}

// ---------------------------------------------------------------------------
// hyp2

inline Json to_json(const hyp2::Geodesic& g) {
  if (g.is_vertical()) return {{"type", "vertical"}, {"foot", g.foot()}};
  return {{"type", "semicircle"},
          {"center", g.center()},
          {"radius", g.radius()},
          {"endpoints", {g.endpoint(0).value(), g.endpoint(1).value()}}};
}

inline hyp2::Geodesic geodesic_from_json(const Json& j) {
  const std::string where = "geodesic";
  const Json& type = detail::field(j, "type", where);
  if (type == "vertical") return hyp2::Geodesic::vertical(detail::number(j, "foot", where));
  if (type != "semicircle") throw Error(ErrorCode::ConfigError, where + ": unknown type " + type.dump());
  if (j.contains("endpoints")) {
    const Json& e = j.at("endpoints");
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      throw Error(ErrorCode::ConfigError, where + ": endpoints must be two numbers");
    }
    return hyp2::Geodesic(hyp2::BoundaryPoint::finite(e[0].get<double>()),
                          hyp2::BoundaryPoint::finite(e[1].get<double>()));
  }
  return hyp2::Geodesic::semicircle(detail::number(j, "center", where), detail::number(j, "radius", where));
}

inline Json to_json(const hyp2::Isometry& g) {
  return {{"m", {g.a(), g.b(), g.c(), g.d()}}, {"rev", g.reversing()}};
}

inline hyp2::Isometry isometry_from_json(const Json& j) {
  const Json& m = detail::field(j, "m", "isometry");
  if (!m.is_array() || m.size() != 4) throw Error(ErrorCode::ConfigError, "isometry: \"m\" must hold 4 numbers");
  const bool rev = j.value("rev", false);
  return hyp2::Isometry(m[0].get<double>(), m[1].get<double>(), m[2].get<double>(), m[3].get<double>(), rev);
}

inline Json to_json(const hyp2::IsometryClass& c) {
  Json j{{"tag", hyp2::to_string(c.tag)}, {"translation_length", c.translation_length}};
  if (c.attracting) j["attracting"] = detail::boundary(*c.attracting);
  if (c.repelling) j["repelling"] = detail::boundary(*c.repelling);
  if (c.parabolic_fixed) j["parabolic_fixed"] = detail::boundary(*c.parabolic_fixed);
  if (c.elliptic_fixed) j["elliptic_fixed"] = {c.elliptic_fixed->re(), c.elliptic_fixed->im()};
  if (c.tolerance_band) j["tolerance_band"] = true;
  if (c.tag == hyp2::IsometryClass::Tag::reversing_composite) {
    j["reflection"] = c.reflection;
    if (c.square_class) j["square"] = to_json(*c.square_class);
  }
  return j;
}

// ---------------------------------------------------------------------------
// groups and actions

inline Json to_json(const groups::ConfinementReport& r) {
  auto cond = [](const groups::ConditionResult& c) {
    Json j{{"pass", c.pass}};
    if (c.witness) j["witness"] = detail::vec2(*c.witness);
    return j;
  };
  Json j{{"eps", r.eps},         {"side", r.side == groups::Side::plus ? "plus" : "minus"},
         {"box", r.box},         {"k_cap", r.k_cap},
         {"a", cond(r.a)},       {"b", cond(r.b)},
         {"c", cond(r.c)},       {"max_k_b", r.max_k_b},
         {"cap_exceeded", r.cap_exceeded}, {"all_pass", r.all_pass()}};
  j["k0"] = r.k0 ? Json(*r.k0) : Json(nullptr);
  j["strictness_witness"] = r.strictness_witness ? detail::vec2(*r.strictness_witness) : Json(nullptr);
  return j;
}

inline Json to_json(const groups::DensityResult& d) {
  return {{"pass", d.pass}, {"largest_gap", d.largest_gap}, {"coverage_radius", d.coverage_radius}};
}

inline Json to_json(const actions::OrbitGrowthReport& r) {
  return {{"tag", actions::to_string(r.tag)},
          {"rate", r.rate},
          {"offset", r.offset},
          {"max_displacement", r.max_displacement},
          {"powers", r.powers_computed}};
}

inline Json to_json(const actions::MainLemmaCertificate& c) {
  return {{"commute", c.commute},       {"action_X", c.action_X},
          {"action_Y", c.action_Y},     {"a_in_X", to_json(c.a_in_X)},
          {"b_in_X", to_json(c.b_in_X)}, {"b_in_Y", to_json(c.b_in_Y)},
          {"statement", c.statement}};
}

// ---------------------------------------------------------------------------
// projection_complex

inline Json to_json(const projection_complex::DomainFamily& fam) {
  Json domains = Json::array(), projections = Json::array();
  for (std::size_t Y = 0; Y < fam.size(); ++Y) {
    domains.push_back({{"id", fam.labels[Y]}, {"line", true}});
    for (std::size_t X = 0; X < fam.size(); ++X) {
      if (X != Y) projections.push_back({{"on", Y}, {"of", X}, {"points", fam.proj[Y][X]}});
    }
  }
  return {{"theta", fam.theta}, {"domains", domains}, {"projections", projections}};
}

inline projection_complex::DomainFamily family_from_json(const Json& j) {
  const std::string where = "family";
  const double theta = detail::number(j, "theta", where);
  const Json& domains = detail::field(j, "domains", where);
  if (!domains.is_array()) throw Error(ErrorCode::ConfigError, where + ": \"domains\" must be an array");
  projection_complex::DomainFamily fam(domains.size(), theta);
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const Json& id = detail::field(domains[i], "id", where + ".domains[" + std::to_string(i) + "]");
    fam.labels[i] = id.is_string() ? id.get<std::string>() : id.dump();
  }
  const Json& projections = detail::field(j, "projections", where);
  if (!projections.is_array()) throw Error(ErrorCode::ConfigError, where + ": \"projections\" must be an array");
  for (std::size_t i = 0; i < projections.size(); ++i) {
    const std::string at = where + ".projections[" + std::to_string(i) + "]";
    const Json& p = projections[i];
    const Json& on = detail::field(p, "on", at);
    const Json& of = detail::field(p, "of", at);
    const Json& pts = detail::field(p, "points", at);
    if (!on.is_number_unsigned() || !of.is_number_unsigned() || on.get<std::size_t>() >= fam.size() ||
        of.get<std::size_t>() >= fam.size() || on == of) {
      throw Error(ErrorCode::ConfigError, at + ": \"on\" and \"of\" must be distinct domain indices");
    }
    if (!pts.is_array() || pts.empty()) throw Error(ErrorCode::ConfigError, at + ": \"points\" must be nonempty");
    fam.set(on.get<std::size_t>(), of.get<std::size_t>(), pts.get<std::vector<double>>());
  }
  return fam;
}

inline Json to_json(const projection_complex::AxiomReport& r) {
  Json p0 = Json::array(), p1 = Json::array(), p2 = Json::array();
  for (const auto& [Y, X] : r.p0_violations) p0.push_back({{"on", Y}, {"of", X}});
  for (const auto& w : r.p1_violations) p1.push_back({{"triple", w.triple}, {"values", w.values}});
  for (const auto& c : r.p2_counts) p2.push_back({{"X", c.X}, {"Y", c.Y}, {"count", c.count}});
  return {{"theta_used", r.theta_used}, {"ok", r.ok()}, {"p0_violations", p0},
          {"p1_violations", p1},         {"p2_counts", p2}, {"max_p2", r.max_p2()}};
}

inline Json to_json(const projection_complex::BottleneckReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"x", f.x},
                        {"y", f.y},
                        {"midpoint", {{"u", f.midpoint.u}, {"w", f.midpoint.w}, {"s", f.midpoint.s}}},
                        {"detour", f.detour}});
  }
  return {{"delta", r.delta},
          {"pass", r.pass},
          {"delta_pass", r.pass ? Json(r.delta) : Json(nullptr)},
          {"delta_min", r.delta_min},
          {"critical_pair", {r.critical_pair.first, r.critical_pair.second}},
          {"failing_pairs", r.failing_pairs},
          {"pairs", r.pairs},
          {"core_vertices", r.core_vertices},
          {"failures", failures}};
}

inline Json to_json(const projection_complex::Calibration& c) {
  return {{"K", c.K},
          {"L", c.L},
          {"grid", c.delta},
          {"bottleneck_radius", c.bottleneck},
          {"doublings", c.doublings},
          {"tried", c.tried},
          {"embedding_defect", c.embedding_defect},
          {"bottleneck", to_json(c.report)}};
}

inline std::string to_dot(const projection_complex::ProjectionGraph& g, const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "graph projection_complex {\n  // K = " << g.K << "\n";
  for (std::size_t v = 0; v < g.vertices; ++v) {
    out << "  d" << v << " [label=\"" << (v < labels.size() ? labels[v] : std::to_string(v)) << "\"];\n";
  }
  for (const auto& [X, Z] : g.edges) out << "  d" << X << " -- d" << Z << ";\n";
  out << "}\n";
  return out.str();
}

inline std::string to_dot(const projection_complex::QuasiTreeOfSpaces& q) {
  std::ostringstream out;
  out.precision(12);
  out << "graph quasi_tree {\n  // K = " << q.K << ", L = " << q.L << ", grid = " << q.delta << "\n";
  for (std::size_t v = 0; v < q.graph.size(); ++v) {
    out << "  v" << v << " [label=\"" << q.domain_of[v] << ":" << q.coord[v] << "\"];\n";
  }
  for (std::size_t u = 0; u < q.graph.size(); ++u) {
    for (const auto& arc : q.graph.adj[u]) {
      if (static_cast<std::size_t>(arc.to) > u) out << "  v" << u << " -- v" << arc.to << " [len=" << arc.len << "];\n";
    }
  }
  out << "}\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// geodesic_families

inline Json to_json(const geodesic_families::GeodesicConfig& cfg) {
  Json gs = Json::array();
  for (const auto& g : cfg.geodesics) gs.push_back(to_json(g));
  return {{"geodesics", gs}, {"min_separation", cfg.min_separation}, {"seed", cfg.seed}};
}

inline geodesic_families::GeodesicConfig config_from_json(const Json& j) {
  geodesic_families::GeodesicConfig cfg;
  const Json& gs = detail::field(j, "geodesics", "config");
  if (!gs.is_array()) throw Error(ErrorCode::ConfigError, "config: \"geodesics\" must be an array");
  for (const Json& g : gs) cfg.geodesics.push_back(geodesic_from_json(g));
  cfg.min_separation = j.value("min_separation", 0.0);
  cfg.seed = j.value("seed", std::uint64_t{0});
  geodesic_families::verify_disjoint(cfg.geodesics);
  return cfg;
}

inline Json to_json(const geodesic_families::ThetaConstants& c) {
  return {{"epsilon", c.epsilon}, {"R", c.R}, {"eta", c.eta}, {"theta", c.theta}};
}

inline Json to_json(const geodesic_families::FlipTree& t) {
  Json nodes = Json::array();
  for (const auto& n : t.nodes) {
    Json boundary = Json::array();
    for (const auto& g : n.geometry->boundary) boundary.push_back(to_json(g));
    nodes.push_back({{"id", n.id},
                     {"parent", n.parent},
                     {"level", n.level},
                     {"color", geodesic_families::to_string(n.color)},
                     {"slot_in_parent", n.slot_in_parent},
                     {"child_at_slot", n.child_at_slot},
                     {"words", n.geometry->words},
                     {"boundary", boundary}});
  }
  return {{"ell1", t.params.ell1}, {"ell2", t.params.ell2}, {"depth", t.depth},   {"word_cap", t.word_cap},
          {"x", to_json(t.x)},     {"y", to_json(t.y)},     {"seed", to_json(t.seed)}, {"nodes", nodes}};
}

inline Json to_json(const geodesic_families::ProjectionScan& s) {
  return {{"N", s.N},
          {"max_spread", s.max_spread},
          {"argmax", {{"C", s.argmax_C}, {"m", s.argmax_m}, {"n", s.argmax_n}}},
          {"orbit_max", s.orbit_max},
          {"between_max", s.between_max},
          {"comparator_shift", s.comparator_shift},
          {"comparator_double", s.comparator_double},
          {"nonadjacent_pairs", s.nonadjacent_pairs},
          {"nonadjacent_all_zero", s.nonadjacent_all_zero},
          {"evaluations", s.evaluations}};
}

// ---------------------------------------------------------------------------
// poset

inline Json to_json(const poset::PosetDiagram& d) {
  Json nodes = Json::array(), edges = Json::array(), inc = Json::array();
  for (const auto& n : d.nodes) {
    nodes.push_back({{"label", n.label},
                     {"kind", poset::to_string(n.kind)},
                     {"action", n.action},
                     {"target", actions::to_string(n.target)}});
  }
  for (const auto& e : d.edges) {
    edges.push_back({{"greater", d.nodes[e.greater].label},
                     {"lesser", d.nodes[e.lesser].label},
                     {"map", e.witness.map_name},
                     {"C", e.witness.C},
                     {"lipschitz_ratio", e.witness.lipschitz_ratio},
                     {"equivariance_defect", e.witness.equivariance_defect},
                     {"point_pairs", e.witness.point_pairs},
                     {"group_samples", e.witness.group_samples}});
  }
  for (const auto& p : d.incomparable) {
    Json c{{"a", d.nodes[p.a].label},
           {"b", d.nodes[p.b].label},
           {"strategy", poset::to_string(p.certificate.strategy)},
           {"statement", p.certificate.statement}};
    if (p.certificate.pattern) {
      const auto& f = *p.certificate.pattern;
      c["pattern"] = {{"element", f.element},
                      {"conjugators", f.conjugators},
                      {"shared_repelling_in_X", detail::boundary(f.shared_in_X)},
                      {"shared_attracting_in_Y", detail::boundary(f.shared_in_Y)},
                      {"distinct_attracting_in_X", f.distinct_attracting_in_X},
                      {"distinct_repelling_in_Y", f.distinct_repelling_in_Y}};
    }
    if (p.certificate.main_lemma) c["main_lemma"] = to_json(*p.certificate.main_lemma);
    inc.push_back(c);
  }
  return {{"nodes", nodes}, {"hasse_edges", edges}, {"incomparable", inc}, {"metadata", d.metadata}};
}

}  // namespace hypstruct::io
