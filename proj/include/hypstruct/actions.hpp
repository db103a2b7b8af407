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
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hypstruct/error.hpp"
#include "hypstruct/groups.hpp"
#include "hypstruct/hyp2.hpp"

/// Group actions on H^2, the line and Bass-Serre tree balls; orbit-growth
/// classification, Main Lemma certificates and quasi-isometry constants.
namespace hypstruct::actions {

enum class TargetKind { h2, line, tree_ball, point };

inline const char* to_string(TargetKind k) {
  switch (k) {
    case TargetKind::h2: return "h2";
    case TargetKind::line: return "line";
    case TargetKind::tree_ball: return "tree_ball";
    case TargetKind::point: return "point";
  }
  return "?";
}

/// A point of the target: H^2, R, or a vertex index of a tree ball.
using Point = std::variant<hyp2::HPoint, double, int>;

template <class G>
struct ActionHandle {
  std::string name;
  TargetKind kind = TargetKind::h2;
  /// Image of a point; nullopt when it leaves a truncated target.
  std::function<std::optional<Point>(const G&, const Point&)> orbit;
  std::function<double(const Point&, const Point&)> metric;
  /// Set for H^2 actions.
  std::function<hyp2::Isometry(const G&)> isometry;
  Point base;

  double displacement(const G& g) const {
    auto y = orbit(g, base);
    if (!y) throw Error(ErrorCode::BallOverflow, "orbit point left the truncated target");
    return metric(base, *y);
  }
};

namespace detail {

inline double h2_metric(const Point& x, const Point& y) {
  return hyp2::dist(std::get<hyp2::HPoint>(x), std::get<hyp2::HPoint>(y));
}
inline double line_metric(const Point& x, const Point& y) {
  return std::abs(std::get<double>(x) - std::get<double>(y));
}

template <class G>
ActionHandle<G> from_isometries(std::string name, std::function<hyp2::Isometry(const G&)> iso) {
  ActionHandle<G> act;
  act.name = std::move(name);
  act.kind = TargetKind::h2;
  act.isometry = iso;
  act.orbit = [iso](const G& g, const Point& x) -> std::optional<Point> {
    return Point(iso(g).apply(std::get<hyp2::HPoint>(x)));
  };
  act.metric = h2_metric;
  act.base = hyp2::HPoint(0.0, 1.0);
  return act;
}

}  // namespace detail

/// Largest sampled |d(g h x, g(h x))| over the given pairs.
template <class G, class Mul>
double homomorphism_defect(const ActionHandle<G>& act, const std::vector<std::pair<G, G>>& pairs, Mul mul,
                           const std::vector<Point>& points) {
  double worst = 0.0;
  for (const auto& [g, h] : pairs) {
    const G gh = mul(g, h);
    for (const Point& x : points) {
      auto lhs = act.orbit(gh, x);
      auto hx = act.orbit(h, x);
      if (!lhs || !hx) continue;
      auto rhs = act.orbit(g, *hx);
      if (!rhs) continue;
      worst = std::max(worst, act.metric(*lhs, *rhs));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Concrete actions

/// Torus bundle on H^2. Plus side: p.z = z + pi(p), t.z = lambda^-1 z; minus side
/// uses rho and t.z = lambda z. A negative trace composes t with z -> -conj(z).
inline ActionHandle<groups::TBElement> anosov_action(const groups::AnosovData& data, groups::Side side) {
  const double scale = side == groups::Side::plus ? 1.0 / data.lambda : data.lambda;
  const hyp2::Isometry t(std::sqrt(scale), 0.0, 0.0, 1.0 / std::sqrt(scale), data.sign < 0);
  auto iso = [data, side, t](const groups::TBElement& g) {
    const groups::EigenCoords e = groups::eigen_coords(g.p, data);
    const double shift = side == groups::Side::plus ? e.pi : e.rho;
    return hyp2::Isometry::translation(shift) * t.power(g.n);
  };
  return detail::from_isometries<groups::TBElement>(
      side == groups::Side::plus ? "anosov_plus" : "anosov_minus", iso);
}

/// Translation action x -> x + h(g) for a homomorphism h, checked on the sample pairs.
template <class G, class Mul>
ActionHandle<G> lineal_from_hom(std::function<double(const G&)> h, Mul mul,
                                const std::vector<std::pair<G, G>>& samples, std::string name = "lineal_hom") {
  for (const auto& [g, k] : samples) {
    const double defect = std::abs(h(mul(g, k)) - h(g) - h(k));
    if (defect > 1e-9) {
      throw Error(ErrorCode::NotHomomorphism, "sampled defect " + std::to_string(defect) + " > 1e-9");
    }
  }
  ActionHandle<G> act;
  act.name = std::move(name);
  act.kind = TargetKind::line;
  act.orbit = [h](const G& g, const Point& x) -> std::optional<Point> {
    return Point(std::get<double>(x) + h(g));
  };
  act.metric = detail::line_metric;
  act.base = 0.0;
  return act;
}

/// Trivial action on a single point.
template <class G>
ActionHandle<G> point_action(std::string name = "point") {
  ActionHandle<G> act;
  act.name = std::move(name);
  act.kind = TargetKind::point;
  act.orbit = [](const G&, const Point&) -> std::optional<Point> { return Point(0); };
  act.metric = [](const Point&, const Point&) { return 0.0; };
  act.base = 0;
  return act;
}

/// a -> [[1,1],[0,1]], b -> diag(sqrt(|n|/m), sqrt(m/|n|)), composed with psi when n < 0.
inline hyp2::Isometry bs_generator_b(long long m, long long n) {
  const double k = static_cast<double>(n < 0 ? -n : n) / static_cast<double>(m);
  return hyp2::Isometry(std::sqrt(k), 0.0, 0.0, 1.0 / std::sqrt(k), n < 0);
}

inline ActionHandle<groups::BSElement> bs_h2_action(long long m, long long n) {
  const long long an = n < 0 ? -n : n;
  if (m < 1 || m >= an) {
    throw Error(ErrorCode::UnsupportedCase, "bs_h2_action needs 1 <= m < |n|");
  }
  const hyp2::Isometry b = bs_generator_b(m, n);
  const hyp2::Isometry binv = b.inverse();
  auto iso = [b, binv](const groups::BSElement& x) {
    hyp2::Isometry g = hyp2::Isometry::translation(groups::to_double(x.s[0]));
    for (std::size_t i = 0; i < x.e.size(); ++i) {
      g = g * (x.e[i] > 0 ? b : binv) * hyp2::Isometry::translation(groups::to_double(x.s[i + 1]));
    }
    return g;
  };
  return detail::from_isometries<groups::BSElement>("bs_h2", iso);
}

/// Action on a truncated Bass-Serre tree; the distance is the path length in the ball.
inline ActionHandle<groups::BSElement> bs_tree_action(const groups::BaumslagSolitar& G,
                                                      std::shared_ptr<const groups::BSTree> tree) {
  ActionHandle<groups::BSElement> act;
  act.name = "bs_tree";
  act.kind = TargetKind::tree_ball;
  act.orbit = [G, tree](const groups::BSElement& g, const Point& x) -> std::optional<Point> {
    auto w = tree->act(G, g, std::get<int>(x));
    if (!w) return std::nullopt;
    return Point(*w);
  };
  act.metric = [tree](const Point& x, const Point& y) {
    int u = std::get<int>(x), v = std::get<int>(y);
    double d = 0;
    while (u != v) {
      if (tree->depth[static_cast<std::size_t>(u)] >= tree->depth[static_cast<std::size_t>(v)]) {
        u = tree->parent[static_cast<std::size_t>(u)];
      } else {
        v = tree->parent[static_cast<std::size_t>(v)];
      }
      d += 1;
    }
    return d;
  };
  act.base = 0;
  return act;
}

// ---------------------------------------------------------------------------
// Orbit growth

struct OrbitGrowthReport {
  enum class Tag { elliptic, parabolic_suspect, loxodromic };
  Tag tag = Tag::elliptic;
  double rate = 0.0;
  double offset = 0.0;          // max |d_k - rate k| over all samples
  double max_displacement = 0.0;
  std::vector<long long> powers;          // geometric subsample 1, 2, 4, ...
  std::vector<double> displacements;      // d(x, g^k x) at those powers
  int powers_computed = 0;                // largest k reached (truncated targets may stop early)
};

inline const char* to_string(OrbitGrowthReport::Tag t) {
  switch (t) {
    case OrbitGrowthReport::Tag::elliptic: return "elliptic";
    case OrbitGrowthReport::Tag::parabolic_suspect: return "parabolic_suspect";
    case OrbitGrowthReport::Tag::loxodromic: return "loxodromic";
  }
  return "?";
}

inline constexpr double kLoxodromicMinSlope = 0.01;
inline constexpr double kLoxodromicBand = 0.2;
inline constexpr double kEllipticMax = 10.0;
inline constexpr double kEllipticDrift = 0.5;

/// Classifies from d_k = d(x, g^k x), k = 1..N (index 0 holds k = 1). Bounded
/// non-drifting orbits are elliptic; loxodromic needs a positive slope that agrees
/// between the second quarter and the second half, with a narrow residual band.
inline OrbitGrowthReport classify_displacements(const std::vector<double>& d) {
  const int N = static_cast<int>(d.size());
  if (N < 16) throw Error(ErrorCode::ConfigError, "orbit growth needs at least 16 powers");
  OrbitGrowthReport r;
  r.powers_computed = N;
  for (long long k = 1; k <= N; k *= 2) {
    r.powers.push_back(k);
    r.displacements.push_back(d[static_cast<std::size_t>(k - 1)]);
  }
  r.max_displacement = *std::max_element(d.begin(), d.end());
  const int half = N / 2;
  const double dN = d[static_cast<std::size_t>(N - 1)];
  const double dh = d[static_cast<std::size_t>(half - 1)];
  const double slope = (dN - dh) / static_cast<double>(N - half);
  const int quarter = N / 4;
  const double early = (dh - d[static_cast<std::size_t>(quarter - 1)]) / static_cast<double>(half - quarter);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < r.powers.size(); ++i) {
    const double res = r.displacements[i] - slope * static_cast<double>(r.powers[i]);
    lo = std::min(lo, res);
    hi = std::max(hi, res);
  }
  double first = 0.0, second = 0.0;
  for (int k = 1; k <= N; ++k) {
    (k <= half ? first : second) = std::max(k <= half ? first : second, d[static_cast<std::size_t>(k - 1)]);
  }

  if (r.max_displacement < kEllipticMax && second <= first + kEllipticDrift) {
    r.tag = OrbitGrowthReport::Tag::elliptic;
    r.offset = r.max_displacement;
  } else if (slope > kLoxodromicMinSlope && hi - lo < kLoxodromicBand * dN &&
             std::abs(early - slope) <= kLoxodromicBand * slope) {
    r.tag = OrbitGrowthReport::Tag::loxodromic;
    r.rate = slope;
    for (int k = 1; k <= N; ++k) {
      r.offset = std::max(r.offset, std::abs(d[static_cast<std::size_t>(k - 1)] - slope * k));
    }
  } else {
    r.tag = OrbitGrowthReport::Tag::parabolic_suspect;
    r.rate = std::max(0.0, slope);
  }
  return r;
}

/// Samples x_k = g x_{k-1} for k <= N. On a truncated target sampling stops when
/// the orbit leaves the ball; fewer than 16 powers is an error.
template <class G>
OrbitGrowthReport classify_orbit_growth(const ActionHandle<G>& act, const G& g, int N = 64,
                                        std::optional<Point> base = std::nullopt) {
  if (N < 16) throw Error(ErrorCode::ConfigError, "classify_orbit_growth needs N >= 16");
  const Point x0 = base ? *base : act.base;
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(N));
  Point x = x0;
  for (int k = 1; k <= N; ++k) {
    auto y = act.orbit(g, x);
    if (!y) break;
    x = *y;
    d.push_back(act.metric(x0, x));
  }
  if (d.size() < 16) {
    throw Error(ErrorCode::BallOverflow, "orbit left the truncated target before 16 powers");
  }
  // Keep a power-of-two prefix so the geometric samples end at N.
  std::size_t n = 16;
  while (n * 2 <= d.size()) n *= 2;
  if (d.size() == static_cast<std::size_t>(N)) n = d.size();
  d.resize(n);
  return classify_displacements(d);
}

// ---------------------------------------------------------------------------
// Main Lemma

struct MainLemmaCertificate {
  bool commute = false;
  OrbitGrowthReport a_in_X, b_in_X, b_in_Y;
  std::string action_X, action_Y;
  std::string statement;
};

/// Checks (i) ab = ba, (ii) a loxodromic and b elliptic in X, (iii) b loxodromic in Y.
template <class G, class Mul, class Eq>
MainLemmaCertificate check_main_lemma(const ActionHandle<G>& X, const ActionHandle<G>& Y, const G& a,
                                      const G& b, Mul mul, Eq eq, int N = 64) {
  MainLemmaCertificate c;
  c.action_X = X.name;
  c.action_Y = Y.name;
  c.commute = eq(mul(a, b), mul(b, a));
  if (!c.commute) throw Error(ErrorCode::HypothesisFailed, "clause (i): a and b do not commute");
  c.a_in_X = classify_orbit_growth(X, a, N);
  c.b_in_X = classify_orbit_growth(X, b, N);
  if (c.a_in_X.tag != OrbitGrowthReport::Tag::loxodromic) {
    throw Error(ErrorCode::HypothesisFailed, "clause (ii): a is not loxodromic in " + X.name);
  }
  if (c.b_in_X.tag != OrbitGrowthReport::Tag::elliptic) {
    throw Error(ErrorCode::HypothesisFailed, "clause (ii): b is not elliptic in " + X.name);
  }
  c.b_in_Y = classify_orbit_growth(Y, b, N);
  if (c.b_in_Y.tag != OrbitGrowthReport::Tag::loxodromic) {
    throw Error(ErrorCode::HypothesisFailed, "clause (iii): b is not loxodromic in " + Y.name);
  }
  c.statement = "no hyperbolic action dominates both " + X.name + " and " + Y.name;
  return c;
}

// ---------------------------------------------------------------------------
// Quasi-isometry constants

struct QIEstimate {
  double C = 1.0;
  std::size_t samples = 0;
  std::size_t violations = 0;  // pairs breaking the inequality at the fitted C
};

/// Least C >= 1 with d1/C - C <= d2 <= C d1 + C on every pair (d1, d2).
inline QIEstimate qi_fit(const std::vector<std::pair<double, double>>& pairs, double cap = 1000.0) {
  QIEstimate q;
  q.samples = pairs.size();
  for (const auto& [x, y] : pairs) {
    q.C = std::max(q.C, y / (x + 1.0));
    q.C = std::max(q.C, 0.5 * (-y + std::sqrt(y * y + 4.0 * x)));
  }
  // Guard against rounding in the closed form.
  q.C *= 1.0 + 1e-12;
  for (const auto& [x, y] : pairs) {
    if (x / q.C - q.C > y || y > q.C * x + q.C) ++q.violations;
  }
  if (q.C > cap) {
    throw Error(ErrorCode::NoFitWithinCap, "QI constant " + std::to_string(q.C) + " exceeds cap");
  }
  return q;
}

/// Orbit distances between all pairs of sampled elements in two actions.
template <class G>
QIEstimate qi_estimate(const ActionHandle<G>& act1, const ActionHandle<G>& act2, const std::vector<G>& elements,
                       double cap = 1000.0) {
  std::vector<Point> p1, p2;
  for (const G& g : elements) {
    auto x = act1.orbit(g, act1.base);
    auto y = act2.orbit(g, act2.base);
    if (!x || !y) throw Error(ErrorCode::BallOverflow, "sample element leaves a truncated target");
    p1.push_back(*x);
    p2.push_back(*y);
  }
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      pairs.emplace_back(act1.metric(p1[i], p1[j]), act2.metric(p2[i], p2[j]));
    }
  }
  return qi_fit(pairs, cap);
}

/// Word metric of a ball against an orbit metric. Both are left-invariant, so the
/// pairs (e, g) over the ball carry all the information the ball has.
template <class Elem, class Hash, class G>
QIEstimate qi_estimate_word_metric(const groups::WordBall<Elem, Hash>& ball, const ActionHandle<G>& act,
                                   double cap = 1000.0) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(ball.order.size());
  for (const Elem& g : ball.order) {
    pairs.emplace_back(static_cast<double>(ball.length.at(g)), act.displacement(g));
  }
  return qi_fit(pairs, cap);
}

}  // namespace hypstruct::actions
