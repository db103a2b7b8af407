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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hypstruct/error.hpp"
#include "hypstruct/hyp2.hpp"
#include "hypstruct/projection_complex.hpp"

/// Disjoint geodesic configurations, the constants epsilon, eta and theta,
/// Schottky flip trees and their export to projection families.
namespace hypstruct::geodesic_families {

using hyp2::Geodesic;
using projection_complex::DomainFamily;

// ---------------------------------------------------------------------------
// Constants

/// Four times the thinness constant ln(1 + sqrt 2) of triangles, rounded up.
inline constexpr double kDefaultEpsilon = 3.6;
inline constexpr double kDefaultR = 0.1;

/// Distance to a geodesic from the point at arc length s past the foot of a
/// common perpendicular of length d.
inline double fellow_width(double d, double s) { return std::asinh(std::sinh(d) * std::cosh(s)); }

namespace detail {

/// Half-length of the stretch on which two geodesics at distance d stay within w.
inline double close_half_length(double d, double w) {
  if (fellow_width(d, 0.0) > w) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (fellow_width(d, hi) <= w) hi *= 2.0;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (fellow_width(d, mid) <= w ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace detail

/// Least eta such that two geodesics that are 2 eps close along segments longer than
/// eta come within R. Pairs are parametrized by their distance d; the close stretch
/// shrinks as d grows, so only d >= R needs scanning.
inline double eta_of(double R, double eps = kDefaultEpsilon) {
  if (!(R > 0.0) || !(eps > 0.0)) throw Error(ErrorCode::ConfigError, "eta_of needs R, eps > 0");
  if (R >= 2.0 * eps) return 0.0;
  double eta = 0.0;
  constexpr int kSteps = 64;
  for (int j = 0; j <= kSteps; ++j) {
    const double d = R + (2.0 * eps - R) * j / kSteps;
    eta = std::max(eta, 2.0 * detail::close_half_length(d, 2.0 * eps));
  }
  return eta;
}

struct ThetaConstants {
  double epsilon = kDefaultEpsilon;
  double R = kDefaultR;
  double eta = 0.0;
  double theta = 0.0;  // 6 epsilon + 2 eta
};

inline ThetaConstants theta_constants(double R = kDefaultR, double eps = kDefaultEpsilon) {
  ThetaConstants c;
  c.epsilon = eps;
  c.R = R;
  c.eta = eta_of(R, eps);
  c.theta = 6.0 * eps + 2.0 * c.eta;
  return c;
}

// ---------------------------------------------------------------------------
// Configurations

struct GeodesicConfig {
  std::vector<Geodesic> geodesics;
  double min_separation = 0.0;
  std::uint64_t seed = 0;
};

/// Throws DisjointnessViolation when two geodesics meet, share an endpoint or
/// come closer than `min_separation`.
inline void verify_disjoint(const std::vector<Geodesic>& gs, double min_separation = 0.0) {
  for (std::size_t i = 0; i < gs.size(); ++i) {
    for (std::size_t j = i + 1; j < gs.size(); ++j) {
      double len = 0.0;
      try {
        len = hyp2::perpendicular_length(gs[i], gs[j]);
      } catch (const Error&) {
        throw Error(ErrorCode::DisjointnessViolation,
                    "geodesics " + std::to_string(i) + " and " + std::to_string(j) + " are not disjoint");
      }
      if (len < min_separation) {
        throw Error(ErrorCode::DisjointnessViolation,
                    "geodesics " + std::to_string(i) + " and " + std::to_string(j) + " are closer than R");
      }
    }
  }
}

/// Rejection sampling of semicircles with centres in [-30, 30] and log-uniform
/// radii in [0.2, 10].
inline GeodesicConfig random_disjoint_geodesics(std::size_t count, double R, std::uint64_t seed,
                                                std::size_t max_retries = 0) {
  if (count < 2 || !(R > 0.0)) throw Error(ErrorCode::ConfigError, "need count >= 2 and R > 0");
  if (max_retries == 0) max_retries = 2000 * count;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-30.0, 30.0);
  std::uniform_real_distribution<double> log_radius(std::log(0.2), std::log(10.0));
  GeodesicConfig cfg;
  cfg.min_separation = R;
  cfg.seed = seed;
  std::size_t tries = 0;
  while (cfg.geodesics.size() < count) {
    if (++tries > max_retries) {
      throw Error(ErrorCode::SaturationFailure, "could not place " + std::to_string(count) +
                                                    " geodesics at separation " + std::to_string(R));
    }
    const Geodesic g = Geodesic::semicircle(centre(rng), std::exp(log_radius(rng)));
    bool ok = true;
    for (const Geodesic& h : cfg.geodesics) {
      try {
        if (hyp2::perpendicular_length(g, h) < R) ok = false;
      } catch (const Error&) {
        ok = false;
      }
      if (!ok) break;
    }
    if (ok) cfg.geodesics.push_back(g);
  }
  verify_disjoint(cfg.geodesics, R);
  return cfg;
}

/// Translates k -> kappa^k gamma0 of the semicircle over [1, 2] along the imaginary axis.
inline GeodesicConfig chain_config(std::size_t count, double kappa = 16.0) {
  GeodesicConfig cfg;
  const Geodesic g0 = Geodesic::semicircle(1.5, 0.5);
  for (std::size_t k = 0; k < count; ++k) {
    cfg.geodesics.push_back(hyp2::Isometry::dilation(std::pow(kappa, static_cast<double>(k))).apply(g0));
  }
  cfg.min_separation = count > 1 ? hyp2::common_perpendicular(cfg.geodesics[0], cfg.geodesics[1]).length : 0.0;
  return cfg;
}

/// Distance along gamma between its nearest points to alpha and to beta.
inline double d_gamma(const Geodesic& gamma, const Geodesic& alpha, const Geodesic& beta) {
  return std::abs(hyp2::projection_param(gamma, alpha) - hyp2::projection_param(gamma, beta));
}

/// One domain per geodesic; pi_Y(X) is the arc parameter on Y of its nearest point to X.
inline DomainFamily family_from_config(const GeodesicConfig& cfg, double theta) {
  const std::size_t n = cfg.geodesics.size();
  DomainFamily fam(n, theta);
  for (std::size_t Y = 0; Y < n; ++Y) {
    for (std::size_t X = 0; X < n; ++X) {
      if (X != Y) fam.set(Y, X, {hyp2::projection_param(cfg.geodesics[Y], cfg.geodesics[X])});
    }
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Schottky flip trees

enum class Color { black, white };

inline const char* to_string(Color c) { return c == Color::black ? "black" : "white"; }

struct FlipTreeParams {
  double ell1 = std::log(1e4);  // translation length of x
  double ell2 = std::log(1e4);  // translation length of y
  double seed_lo = 0.35;
  double seed_hi = 2.5;
};

/// Boundary geodesics of a vertex space: w . seed for each word w.
struct NodeGeometry {
  std::vector<std::string> words;
  std::vector<Geodesic> boundary;
};

struct FlipTreeNode {
  int id = 0;
  int parent = -1;
  int level = 0;
  Color color = Color::black;
  int slot_in_parent = -1;  // boundary slot of the parent glued to this node
  std::shared_ptr<const NodeGeometry> geometry;
  std::vector<int> child_at_slot;  // gluing table: slot -> child id, or -1
};

struct FlipTree {
  FlipTreeParams params;
  int depth = 1;
  int word_cap = 1;
  hyp2::Isometry x, y;
  Geodesic seed = Geodesic::semicircle(1.0, 0.5);
  std::vector<FlipTreeNode> nodes;

  const FlipTreeNode& node(int v) const { return nodes.at(static_cast<std::size_t>(v)); }

  /// Slot of u glued to the neighbour nb; a non-root node meets its parent at slot 0.
  int slot_toward(int u, int nb) const {
    const FlipTreeNode& a = node(u);
    if (nb == a.parent) return 0;
    if (node(nb).parent == u) return node(nb).slot_in_parent;
    throw Error(ErrorCode::ConfigError, "nodes are not adjacent");
  }
  const Geodesic& glued_geodesic(int u, int nb) const {
    return node(u).geometry->boundary.at(static_cast<std::size_t>(slot_toward(u, nb)));
  }

  std::vector<int> path(int v, int w) const {
    std::vector<int> left{v}, right{w};
    while (left.back() != right.back()) {
      if (node(left.back()).level >= node(right.back()).level) {
        left.push_back(node(left.back()).parent);
      } else {
        right.push_back(node(right.back()).parent);
      }
    }
    right.pop_back();
    left.insert(left.end(), right.rbegin(), right.rend());
    return left;
  }
  int distance(int v, int w) const { return static_cast<int>(path(v, w).size()) - 1; }
};

inline hyp2::Isometry word_isometry(const std::string& w, const hyp2::Isometry& x, const hyp2::Isometry& y) {
  hyp2::Isometry g;
  const hyp2::Isometry X = x.inverse(), Y = y.inverse();
  for (char c : w) {
    switch (c) {
      case 'x': g = g * x; break;
      case 'X': g = g * X; break;
      case 'y': g = g * y; break;
      case 'Y': g = g * Y; break;
      default: throw Error(ErrorCode::ConfigError, std::string("bad Schottky letter '") + c + "'");
    }
  }
  return g;
}

/// Reduced words in x, y of length <= cap, shortest first.
inline std::vector<std::string> reduced_words(int cap) {
  auto inverse = [](char c) { return static_cast<char>(c == 'x' ? 'X' : c == 'X' ? 'x' : c == 'y' ? 'Y' : 'y'); };
  std::vector<std::string> out{""};
  std::size_t begin = 0;
  for (int len = 1; len <= cap; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char c : {'x', 'X', 'y', 'Y'}) {
        if (!out[i].empty() && out[i].back() == inverse(c)) continue;
        out.push_back(out[i] + c);
      }
    }
    begin = end;
  }
  return out;
}

/// x^m y as a word.
inline std::string orbit_word(int m) {
  return std::string(static_cast<std::size_t>(m < 0 ? -m : m), m < 0 ? 'X' : 'x') + "y";
}

namespace detail {

inline std::shared_ptr<const NodeGeometry> make_geometry(const std::vector<std::string>& words, const hyp2::Isometry& x,
                                                         const hyp2::Isometry& y, const Geodesic& seed) {
  auto g = std::make_shared<NodeGeometry>();
  g->words = words;
  for (const auto& w : words) g->boundary.push_back(word_isometry(w, x, y).apply(seed));
  verify_disjoint(g->boundary);
  return g;
}

}  // namespace detail

/// Tree of vertex spaces, `depth` levels, alternating colours from a black root.
/// Every space has boundary geodesics w . seed for reduced words w of length <=
/// word_cap; a child is glued along its slot 0 (the empty word) to one slot of its
/// parent. `hub_orbit` = N gives the first child of the root the extra slots x^m y
/// for |m| <= N.
inline FlipTree schottky_flip_tree(const FlipTreeParams& params, int depth, int word_cap,
                                   std::optional<int> hub_orbit = std::nullopt, std::size_t node_cap = 200000) {
  if (depth < 1 || word_cap < 1) throw Error(ErrorCode::ConfigError, "need depth >= 1 and word_cap >= 1");
  if (!(params.ell1 > 0.0) || !(params.ell2 > 0.0)) {
    throw Error(ErrorCode::ConfigError, "translation lengths must be positive");
  }
  FlipTree T;
  T.params = params;
  T.depth = depth;
  T.word_cap = word_cap;
  T.x = hyp2::Isometry::dilation(std::exp(params.ell1));
  const hyp2::Isometry rot = hyp2::Isometry::normalized(1.0, 1.0, -1.0, 1.0);
  T.y = rot * hyp2::Isometry::dilation(std::exp(params.ell2)) * rot.inverse();
  T.seed = Geodesic(hyp2::BoundaryPoint::finite(params.seed_lo), hyp2::BoundaryPoint::finite(params.seed_hi));

  const std::vector<std::string> words = reduced_words(word_cap);
  const auto standard = detail::make_geometry(words, T.x, T.y, T.seed);
  std::shared_ptr<const NodeGeometry> hub = standard;
  if (hub_orbit) {
    std::vector<std::string> extended = words;
    for (int m = -*hub_orbit; m <= *hub_orbit; ++m) {
      const std::string w = orbit_word(m);
      if (std::find(extended.begin(), extended.end(), w) == extended.end()) extended.push_back(w);
    }
    hub = detail::make_geometry(extended, T.x, T.y, T.seed);
  }

  FlipTreeNode root;
  root.geometry = standard;
  root.child_at_slot.assign(standard->words.size(), -1);
  T.nodes.push_back(root);
  for (std::size_t head = 0; head < T.nodes.size(); ++head) {
    if (T.nodes[head].level + 1 >= depth) continue;
    const std::size_t slots = T.nodes[head].geometry->words.size();
    for (std::size_t s = 0; s < slots; ++s) {
      if (T.nodes[head].parent >= 0 && s == 0) continue;  // glued to the parent
      if (T.nodes.size() >= node_cap) throw Error(ErrorCode::ConfigError, "flip tree exceeds node cap");
      FlipTreeNode c;
      c.id = static_cast<int>(T.nodes.size());
      c.parent = static_cast<int>(head);
      c.level = T.nodes[head].level + 1;
      c.color = c.level % 2 == 0 ? Color::black : Color::white;
      c.slot_in_parent = static_cast<int>(s);
      c.geometry = (head == 0 && s == 0) ? hub : standard;
      c.child_at_slot.assign(c.geometry->words.size(), -1);
      T.nodes[head].child_at_slot[s] = c.id;
      T.nodes.push_back(std::move(c));
    }
  }
  return T;
}

/// For the tree geodesic v ... u', u, w: the arc parameter, on the boundary geodesic
/// of u glued to w, of its nearest point to the boundary geodesic of u glued to u'.
inline double lift_projection(const FlipTree& T, int v, int w) {
  const std::vector<int> p = T.path(v, w);
  if (p.size() < 3) throw Error(ErrorCode::TooClose, "lift_projection needs tree distance >= 2");
  const int up = p[p.size() - 3], u = p[p.size() - 2];
  return hyp2::projection_param(T.glued_geodesic(u, w), T.glued_geodesic(u, up));
}

struct TreeFamily {
  DomainFamily family;
  std::vector<int> node_of;  // domain index -> tree node
};

inline TreeFamily family_from_tree(const FlipTree& T, Color color, double theta) {
  TreeFamily out;
  for (const auto& nd : T.nodes) {
    if (nd.color == color) out.node_of.push_back(nd.id);
  }
  if (out.node_of.size() < 2) throw Error(ErrorCode::TooFewDomains, "fewer than two domains of that colour");
  const std::size_t n = out.node_of.size();
  out.family = DomainFamily(n, theta);
  for (std::size_t i = 0; i < n; ++i) out.family.labels[i] = "v" + std::to_string(out.node_of[i]);
  for (std::size_t C = 0; C < n; ++C) {
    for (std::size_t A = 0; A < n; ++A) {
      if (A != C) out.family.set(C, A, {lift_projection(T, out.node_of[A], out.node_of[C])});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bounded projections around a hub

struct ScanScenario {
  FlipTree tree;
  int hub = -1;               // white node W
  std::map<int, int> B;       // m -> node glued to W along x^m alpha_1, alpha_1 = y . seed
  int orbit_cap = 0;
};

inline ScanScenario scan_scenario(const FlipTreeParams& params, int depth = 3, int word_cap = 1, int N = 10) {
  if (depth < 3) throw Error(ErrorCode::ScenarioUnavailable, "the hub needs black neighbours below it (depth >= 3)");
  ScanScenario sc;
  sc.tree = schottky_flip_tree(params, depth, word_cap, N);
  sc.orbit_cap = N;
  sc.hub = sc.tree.node(0).child_at_slot.at(0);
  const FlipTreeNode& W = sc.tree.node(sc.hub);
  for (int m = -N; m <= N; ++m) {
    const auto& ws = W.geometry->words;
    const auto it = std::find(ws.begin(), ws.end(), orbit_word(m));
    const int child = W.child_at_slot.at(static_cast<std::size_t>(it - ws.begin()));
    if (child < 0) throw Error(ErrorCode::ScenarioUnavailable, "orbit slot has no child");
    sc.B[m] = child;
  }
  return sc;
}

struct ProjectionScan {
  int N = 0;
  double max_spread = 0.0;
  int argmax_C = -1, argmax_m = 0, argmax_n = 0;
  double orbit_max = 0.0;    // C glued along some x^k alpha_1
  double between_max = 0.0;  // other neighbours of W
  double comparator_shift = 0.0;   // d(alpha_1, x alpha_1)
  double comparator_double = 0.0;  // d(alpha_1, x^2 alpha_1)
  std::size_t nonadjacent_pairs = 0;
  bool nonadjacent_all_zero = true;
  std::size_t evaluations = 0;
};

/// Max of dpi_C(B_m, B_n) over -N <= m < n <= N and black C outside {B_m, B_n}.
inline ProjectionScan bounded_projection_scan(const ScanScenario& sc, int N) {
  if (N < 1 || N > sc.orbit_cap) throw Error(ErrorCode::ScenarioUnavailable, "N outside the scenario's orbit");
  const FlipTree& T = sc.tree;
  ProjectionScan r;
  r.N = N;
  const Geodesic alpha1 = T.y.apply(T.seed);
  r.comparator_shift = hyp2::perpendicular_length(alpha1, T.x.apply(alpha1));
  r.comparator_double = hyp2::perpendicular_length(alpha1, (T.x * T.x).apply(alpha1));
  std::map<int, int> orbit_index;  // node -> k
  for (const auto& [k, node] : sc.B) orbit_index[node] = k;
  for (const auto& C : T.nodes) {
    if (C.color != Color::black) continue;
    const bool adjacent = C.parent == sc.hub || T.node(sc.hub).parent == C.id;
    for (int m = -N; m <= N; ++m) {
      for (int n = m + 1; n <= N; ++n) {
        const int bm = sc.B.at(m), bn = sc.B.at(n);
        if (C.id == bm || C.id == bn) continue;
        const double v = std::abs(lift_projection(T, bm, C.id) - lift_projection(T, bn, C.id));
        ++r.evaluations;
        if (!adjacent) {
          ++r.nonadjacent_pairs;
          if (v != 0.0) r.nonadjacent_all_zero = false;
        }
        if (orbit_index.count(C.id)) {
          r.orbit_max = std::max(r.orbit_max, v);
        } else {
          r.between_max = std::max(r.between_max, v);
        }
        if (v > r.max_spread) {
          r.max_spread = v;
          r.argmax_C = C.id;
          r.argmax_m = m;
          r.argmax_n = n;
        }
      }
    }
  }
  return r;
}

}  // namespace hypstruct::geodesic_families
