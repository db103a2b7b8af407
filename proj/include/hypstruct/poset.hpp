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

// Posets of hyperbolic structures: dominance witnesses, incomparability
// certificates and the diagram for an Anosov mapping torus.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hypstruct/actions.hpp"
#include "hypstruct/error.hpp"
#include "hypstruct/groups.hpp"
#include "hypstruct/hyp2.hpp"

namespace hypstruct::poset {

using actions::ActionHandle;
using actions::Point;
using actions::TargetKind;

enum class StructureKind { elliptic, lineal, quasi_parabolic, general_type };

inline const char* to_string(StructureKind k) {
  switch (k) {
    case StructureKind::elliptic: return "elliptic";
    case StructureKind::lineal: return "lineal";
    case StructureKind::quasi_parabolic: return "quasi_parabolic";
    case StructureKind::general_type: return "general_type";
  }
  return "?";
}

inline constexpr double kLipschitzCap = 100.0;
inline constexpr double kEquivarianceCap = 10.0;
inline constexpr double kFixedPointTol = 1e-7;

// ---------------------------------------------------------------------------
// Dominance witnesses

struct DominanceWitness {
  std::string greater, lesser, map_name;
  double C = 0.0;                // d(f x, f y) <= C d(x, y) + C on the samples
  double lipschitz_ratio = 0.0;  // sup d(f x, f y) / d(x, y) over distinct samples
  double equivariance_defect = 0.0;
  std::size_t point_pairs = 0, group_samples = 0;
};

struct WitnessCaps {
  double lipschitz = kLipschitzCap;
  double equivariance = kEquivarianceCap;
};

/// Verifies that f : X -> Y is coarsely Lipschitz and coarsely equivariant on the
/// samples. Throws WitnessFailed naming the first sample past a cap.
template <class G>
DominanceWitness dominance_witness(const ActionHandle<G>& greater, const ActionHandle<G>& lesser,
                                   const std::function<Point(const Point&)>& f, std::string map_name,
                                   const std::vector<G>& group_samples, const std::vector<Point>& points,
                                   WitnessCaps caps = {}) {
  DominanceWitness w;
  w.greater = greater.name;
  w.lesser = lesser.name;
  w.map_name = std::move(map_name);
  std::vector<Point> images;
  images.reserve(points.size());
  for (const Point& x : points) images.push_back(f(x));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = greater.metric(points[i], points[j]);
      const double df = lesser.metric(images[i], images[j]);
      ++w.point_pairs;
      w.C = std::max(w.C, df / (d + 1.0));
      if (d > 0.0) w.lipschitz_ratio = std::max(w.lipschitz_ratio, df / d);
      if (w.C > caps.lipschitz) {
        throw Error(ErrorCode::WitnessFailed, w.map_name + ": Lipschitz fit exceeds " + std::to_string(caps.lipschitz) +
                                                  " at sample pair " + std::to_string(i) + "," + std::to_string(j));
      }
    }
  }
  for (const G& g : group_samples) {
    ++w.group_samples;
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto gx = greater.orbit(g, points[i]);
      auto gfx = lesser.orbit(g, images[i]);
      if (!gx || !gfx) continue;
      const double e = lesser.metric(f(*gx), *gfx);
      w.equivariance_defect = std::max(w.equivariance_defect, e);
      if (e > caps.equivariance) {
        throw Error(ErrorCode::WitnessFailed, w.map_name + ": equivariance defect " + std::to_string(e) +
                                                  " exceeds " + std::to_string(caps.equivariance) +
                                                  " at group sample " + std::to_string(w.group_samples - 1) +
                                                  ", point " + std::to_string(i));
      }
    }
  }
  return w;
}

/// z -> -ln(Im z)/ln(lambda) on the plus side, +ln(Im z)/ln(lambda) on the minus side.
inline std::function<Point(const Point&)> height_map(double lambda, groups::Side side) {
  const double s = (side == groups::Side::plus ? -1.0 : 1.0) / std::log(lambda);
  return [s](const Point& z) { return Point(s * std::log(std::get<hyp2::HPoint>(z).im())); };
}

inline std::function<Point(const Point&)> to_point_map() {
  return [](const Point&) { return Point(0); };
}

struct TemplateMap {
  std::string name;
  std::function<Point(const Point&)> f;
};

/// Candidate maps R -> H^2: constants, exponential heights and horizontal lines.
inline std::vector<TemplateMap> line_to_h2_templates(double lambda) {
  std::vector<TemplateMap> out;
  for (double y : {0.5, 1.0, 2.0}) {
    out.push_back({"const i*" + std::to_string(y), [y](const Point&) { return Point(hyp2::HPoint(0.0, y)); }});
  }
  for (double c : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    for (double a : {0.0, 1.0}) {
      out.push_back({"x -> " + std::to_string(a) + " + i lambda^(" + std::to_string(c) + "x)",
                     [lambda, c, a](const Point& x) {
                       return Point(hyp2::HPoint(a, std::pow(lambda, c * std::get<double>(x))));
                     }});
    }
  }
  for (double c : {0.5, 1.0, 2.0}) {
    out.push_back({"x -> " + std::to_string(c) + "x + i",
                   [c](const Point& x) { return Point(hyp2::HPoint(c * std::get<double>(x), 1.0)); }});
  }
  return out;
}

struct TemplateSweep {
  std::size_t templates = 0, failed = 0;
  std::vector<std::string> reasons;
  bool all_failed() const { return failed == templates; }
};

/// Runs every template candidate through dominance_witness and records failures.
template <class G>
TemplateSweep template_sweep(const ActionHandle<G>& greater, const ActionHandle<G>& lesser,
                             const std::vector<TemplateMap>& templates, const std::vector<G>& group_samples,
                             const std::vector<Point>& points, WitnessCaps caps = {}) {
  TemplateSweep s;
  for (const TemplateMap& t : templates) {
    ++s.templates;
    try {
      dominance_witness(greater, lesser, t.f, t.name, group_samples, points, caps);
      s.reasons.push_back(t.name + ": verified");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WitnessFailed) throw;
      ++s.failed;
      s.reasons.push_back(e.what());
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Incomparability certificates

struct FixedPointPattern {
  std::string element;
  std::size_t conjugators = 0;
  hyp2::BoundaryPoint shared_in_X = hyp2::BoundaryPoint::infinity();  // common repelling point
  hyp2::BoundaryPoint shared_in_Y = hyp2::BoundaryPoint::infinity();  // common attracting point
  std::size_t distinct_attracting_in_X = 0, distinct_repelling_in_Y = 0;
};

struct IncomparabilityCertificate {
  enum class Strategy { main_lemma, fixed_point_pattern };
  Strategy strategy = Strategy::fixed_point_pattern;
  std::string action_X, action_Y;
  std::optional<actions::MainLemmaCertificate> main_lemma;
  std::optional<FixedPointPattern> pattern;
  std::string statement;
};

inline const char* to_string(IncomparabilityCertificate::Strategy s) {
  return s == IncomparabilityCertificate::Strategy::main_lemma ? "main_lemma" : "fixed_point_pattern";
}

namespace detail {

/// Loxodromic class of g or, for an orientation-reversing g, of g^2.
inline std::optional<hyp2::IsometryClass> loxodromic_class(const hyp2::Isometry& g) {
  hyp2::IsometryClass c = hyp2::classify(g);
  if (c.tag == hyp2::IsometryClass::Tag::reversing_composite && c.square_class) c = *c.square_class;
  if (c.tag != hyp2::IsometryClass::Tag::loxodromic) return std::nullopt;
  return c;
}

inline std::size_t count_distinct(const std::vector<hyp2::BoundaryPoint>& pts) {
  std::vector<hyp2::BoundaryPoint> seen;
  for (const auto& p : pts) {
    bool fresh = true;
    for (const auto& q : seen) fresh = fresh && !p.near(q, kFixedPointTol);
    if (fresh) seen.push_back(p);
  }
  return seen.size();
}

}  // namespace detail

template <class G, class Mul, class Eq>
IncomparabilityCertificate main_lemma_certificate(const ActionHandle<G>& X, const ActionHandle<G>& Y, const G& a,
                                                  const G& b, Mul mul, Eq eq) {
  IncomparabilityCertificate c;
  c.strategy = IncomparabilityCertificate::Strategy::main_lemma;
  c.action_X = X.name;
  c.action_Y = Y.name;
  c.main_lemma = actions::check_main_lemma(X, Y, a, b, mul, eq);
  c.statement = c.main_lemma->statement;
  return c;
}

/// For the conjugates h g h^-1: in X every one repels from a common point while the
/// attracting points vary; in Y every one attracts to a common point while the
/// repelling points vary. Throws PatternNotFound otherwise.
template <class G, class Mul, class Inv>
IncomparabilityCertificate fixed_point_certificate(const ActionHandle<G>& X, const ActionHandle<G>& Y, const G& g,
                                                   const std::vector<G>& conjugators, Mul mul, Inv inv,
                                                   std::string element_name = "g") {
  if (!X.isometry || !Y.isometry) {
    throw Error(ErrorCode::PatternNotFound, "fixed-point pattern needs actions on H^2");
  }
  std::vector<hyp2::BoundaryPoint> att_X, rep_X, att_Y, rep_Y;
  for (const G& h : conjugators) {
    const G c = mul(mul(h, g), inv(h));
    auto cx = detail::loxodromic_class(X.isometry(c));
    auto cy = detail::loxodromic_class(Y.isometry(c));
    if (!cx || !cy) {
      throw Error(ErrorCode::PatternNotFound, "a conjugate of " + element_name + " is not loxodromic in both actions");
    }
    att_X.push_back(*cx->attracting);
    rep_X.push_back(*cx->repelling);
    att_Y.push_back(*cy->attracting);
    rep_Y.push_back(*cy->repelling);
  }
  if (conjugators.empty()) throw Error(ErrorCode::PatternNotFound, "no conjugators");
  FixedPointPattern p;
  p.element = std::move(element_name);
  p.conjugators = conjugators.size();
  p.shared_in_X = rep_X.front();
  p.shared_in_Y = att_Y.front();
  p.distinct_attracting_in_X = detail::count_distinct(att_X);
  p.distinct_repelling_in_Y = detail::count_distinct(rep_Y);
  if (detail::count_distinct(rep_X) != 1 || p.distinct_attracting_in_X < 2) {
    throw Error(ErrorCode::PatternNotFound, "conjugates do not share only a repelling point in " + X.name);
  }
  if (detail::count_distinct(att_Y) != 1 || p.distinct_repelling_in_Y < 2) {
    throw Error(ErrorCode::PatternNotFound, "conjugates do not share only an attracting point in " + Y.name);
  }
  IncomparabilityCertificate cert;
  cert.strategy = IncomparabilityCertificate::Strategy::fixed_point_pattern;
  cert.action_X = X.name;
  cert.action_Y = Y.name;
  cert.pattern = p;
  cert.statement = "conjugates of " + p.element + " share a repelling point in " + X.name +
                   " and an attracting point in " + Y.name;
  return cert;
}

// ---------------------------------------------------------------------------
// Kinds of structures

/// Kind read off sampled loxodromics: none, a common pair of fixed points, one
/// common fixed point, or no common point.
template <class G, class Mul, class Inv>
StructureKind infer_kind(const ActionHandle<G>& act, const std::vector<G>& sample, Mul mul, Inv inv) {
  if (act.kind == TargetKind::point) return StructureKind::elliptic;
  if (act.kind != TargetKind::h2) {
    for (const G& g : sample) {
      if (actions::classify_orbit_growth(act, g).tag == actions::OrbitGrowthReport::Tag::loxodromic) {
        return StructureKind::lineal;
      }
    }
    return StructureKind::elliptic;
  }
  std::vector<std::pair<hyp2::BoundaryPoint, hyp2::BoundaryPoint>> fixed;
  for (const G& h : sample) {
    for (const G& g : sample) {
      auto c = detail::loxodromic_class(act.isometry(mul(mul(h, g), inv(h))));
      if (c) fixed.emplace_back(*c->attracting, *c->repelling);
    }
  }
  if (fixed.empty()) return StructureKind::elliptic;
  auto common = [&](const hyp2::BoundaryPoint& p) {
    for (const auto& [a, r] : fixed) {
      if (!a.near(p, kFixedPointTol) && !r.near(p, kFixedPointTol)) return false;
    }
    return true;
  };
  const bool first = common(fixed.front().first), second = common(fixed.front().second);
  if (first && second) return StructureKind::lineal;
  if (first || second) return StructureKind::quasi_parabolic;
  return StructureKind::general_type;
}

// ---------------------------------------------------------------------------
// Diagrams

struct HypStructureNode {
  std::string label;
  StructureKind kind = StructureKind::elliptic;
  std::string action;
  TargetKind target = TargetKind::point;
};

struct HasseEdge {
  std::size_t greater = 0, lesser = 0;
  DominanceWitness witness;
};

struct IncomparablePair {
  std::size_t a = 0, b = 0;
  IncomparabilityCertificate certificate;
};

struct PosetDiagram {
  std::vector<HypStructureNode> nodes;
  std::vector<HasseEdge> edges;  // greater -> lesser
  std::vector<IncomparablePair> incomparable;
  std::map<std::string, std::string> metadata;

  std::optional<std::size_t> find(const std::string& label) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].label == label) return i;
    }
    return std::nullopt;
  }

  /// Directed path greater -> ... -> lesser along Hasse edges.
  bool reaches(std::size_t from, std::size_t to) const {
    std::vector<char> seen(nodes.size(), 0);
    std::vector<std::size_t> stack{from};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = 1;
      for (const auto& e : edges) {
        if (e.greater == v) stack.push_back(e.lesser);
      }
    }
    return false;
  }

  /// Antisymmetric, transitively reduced, and no certified pair is comparable.
  bool consistent() const {
    for (const auto& e : edges) {
      if (e.greater == e.lesser || reaches(e.lesser, e.greater)) return false;
      for (const auto& f : edges) {
        if (&e == &f || f.greater != e.greater) continue;
        if (reaches(f.lesser, e.lesser)) return false;  // e is implied by f
      }
    }
    for (const auto& p : incomparable) {
      if (reaches(p.a, p.b) || reaches(p.b, p.a)) return false;
    }
    return true;
  }
};

struct AnosovSamples {
  std::vector<groups::TBElement> group;
  std::vector<Point> h2_points;
  std::vector<Point> line_points;
  std::vector<groups::TBElement> conjugators;
};

/// Group samples: lattice points in [-2,2]^2 times t^n for n in {0, +-1, +-5, +-20}.
/// Conjugators: all words of length <= 4 in t, e1, e2 and their inverses.
inline AnosovSamples anosov_samples(const groups::TorusBundle& G, const groups::AnosovData& data) {
  AnosovSamples s;
  for (long long n : {0LL, 1LL, -1LL, 5LL, -5LL, 20LL, -20LL}) {
    for (long long x = -2; x <= 2; ++x) {
      for (long long y = -2; y <= 2; ++y) s.group.push_back({{x, y}, n});
    }
  }
  for (int i = -3; i <= 3; ++i) {
    for (int k = -3; k <= 3; ++k) s.h2_points.push_back(hyp2::HPoint(i, std::pow(data.lambda, k)));
  }
  for (int k = -10; k <= 10; ++k) s.line_points.push_back(static_cast<double>(k));
  const std::vector<groups::TBElement> letters{groups::TorusBundle::t(1),       groups::TorusBundle::t(-1),
                                               groups::TorusBundle::lattice(1, 0), groups::TorusBundle::lattice(-1, 0),
                                               groups::TorusBundle::lattice(0, 1), groups::TorusBundle::lattice(0, -1)};
  std::set<groups::TBElement> seen{groups::TorusBundle::identity()};
  std::vector<groups::TBElement> layer{groups::TorusBundle::identity()};
  for (int len = 1; len <= 4; ++len) {
    std::vector<groups::TBElement> next;
    for (const auto& w : layer) {
      for (const auto& l : letters) {
        const auto v = G.mul(w, l);
        if (seen.insert(v).second) next.push_back(v);
      }
    }
    layer = std::move(next);
  }
  s.conjugators.assign(seen.begin(), seen.end());
  return s;
}

/// The four structures: the plus and minus actions on H^2, the line through the
/// t-exponent, and the point.
inline PosetDiagram anosov_poset(const groups::AnosovData& data) {
  const groups::TorusBundle G(data.phi);
  const AnosovSamples s = anosov_samples(G, data);
  auto mul = [&G](const groups::TBElement& x, const groups::TBElement& y) { return G.mul(x, y); };
  auto inv = [&G](const groups::TBElement& x) { return G.inv(x); };

  const auto plus = actions::anosov_action(data, groups::Side::plus);
  const auto minus = actions::anosov_action(data, groups::Side::minus);
  std::vector<std::pair<groups::TBElement, groups::TBElement>> pairs;
  for (std::size_t i = 0; i < s.group.size(); i += 7) {
    for (std::size_t j = 0; j < s.group.size(); j += 11) pairs.emplace_back(s.group[i], s.group[j]);
  }
  const auto line = actions::lineal_from_hom<groups::TBElement>(
      [](const groups::TBElement& g) { return static_cast<double>(g.n); }, mul, pairs, "lineal_t");
  const auto point = actions::point_action<groups::TBElement>();

  const std::vector<groups::TBElement> gens{groups::TorusBundle::t(1), groups::TorusBundle::lattice(1, 0),
                                            groups::TorusBundle::lattice(0, 1)};
  PosetDiagram d;
  d.nodes.push_back({"H2+", infer_kind(plus, gens, mul, inv), plus.name, plus.kind});
  d.nodes.push_back({"H2-", infer_kind(minus, gens, mul, inv), minus.name, minus.kind});
  d.nodes.push_back({"R", infer_kind(line, gens, mul, inv), line.name, line.kind});
  d.nodes.push_back({"point", infer_kind(point, gens, mul, inv), point.name, point.kind});

  d.edges.push_back({0, 2, dominance_witness(plus, line, height_map(data.lambda, groups::Side::plus),
                                             "z -> -ln(Im z)/ln(lambda)", s.group, s.h2_points)});
  d.edges.push_back({1, 2, dominance_witness(minus, line, height_map(data.lambda, groups::Side::minus),
                                             "z -> ln(Im z)/ln(lambda)", s.group, s.h2_points)});
  d.edges.push_back({2, 3, dominance_witness(line, point, to_point_map(), "x -> point", s.group, s.line_points)});

  d.incomparable.push_back({0, 1, fixed_point_certificate(plus, minus, groups::TorusBundle::t(1), s.conjugators, mul,
                                                          inv, "t")});

  bool lattice_elliptic = true;
  for (const auto& g : {groups::TorusBundle::lattice(1, 0), groups::TorusBundle::lattice(0, 1)}) {
    lattice_elliptic = lattice_elliptic &&
                       actions::classify_orbit_growth(line, g).tag == actions::OrbitGrowthReport::Tag::elliptic;
  }
  const TemplateSweep sweep = template_sweep(line, plus, line_to_h2_templates(data.lambda), s.group, s.line_points);

  std::ostringstream lam;
  lam.precision(17);
  lam << data.lambda;
  d.metadata["phi"] = groups::to_string(data.phi);
  d.metadata["lambda"] = lam.str();
  d.metadata["lattice_elliptic_on_R"] = lattice_elliptic ? "true" : "false";
  d.metadata["line_to_h2_templates"] = std::to_string(sweep.failed) + "/" + std::to_string(sweep.templates) + " failed";
  d.metadata["scope"] = "relations certified between the constructed representatives only";
  return d;
}

inline PosetDiagram anosov_poset(const groups::IntMatrix2& phi) { return anosov_poset(groups::eigen(phi)); }

/// Deterministic DOT: one line per node, one per Hasse edge, and a comment per
/// certified incomparable pair.
inline std::string emit_dot(const PosetDiagram& d) {
  std::ostringstream out;
  out << "digraph poset {\n";
  for (std::size_t i = 0; i < d.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << to_string(d.nodes[i].kind) << ": " << d.nodes[i].label << "\"];\n";
  }
  for (const auto& e : d.edges) {
    out << "  n" << e.greater << " -> n" << e.lesser << " [label=\"C=" << e.witness.C << "\"];\n";
  }
  for (const auto& p : d.incomparable) {
    out << "  // incomparable, dashed, no edge: n" << p.a << " n" << p.b << " (" << to_string(p.certificate.strategy)
        << ")\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace hypstruct::poset
