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
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hypstruct/actions.hpp"
#include "hypstruct/error.hpp"
#include "hypstruct/hyp2.hpp"

/// Quasimorphisms: defects, homogenization, Busemann quasimorphisms, induction
/// from finite-index subgroups and the drift action on a line.
namespace hypstruct::quasimorphisms {

template <class G>
struct QMap {
  std::string name;
  std::function<double(const G&)> eval;
  std::optional<double> claimed_defect;

  double operator()(const G& g) const { return eval(g); }
};

/// Largest |q(gh) - q(g) - q(h)| over the pairs; throws if it beats the claim.
template <class G, class Mul>
double defect_estimate(const QMap<G>& q, const std::vector<std::pair<G, G>>& pairs, Mul mul) {
  if (pairs.empty()) throw Error(ErrorCode::EmptySet, "defect_estimate needs sample pairs");
  double worst = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [g, h] = pairs[i];
    const double d = std::abs(q(mul(g, h)) - q(g) - q(h));
    worst = std::max(worst, d);
    if (q.claimed_defect && d > *q.claimed_defect * (1.0 + 1e-12) + 1e-12) {
      std::ostringstream os;
      os << "pair #" << i << " has defect " << d << " > claimed " << *q.claimed_defect;
      throw Error(ErrorCode::DefectClaimViolated, os.str());
    }
  }
  return worst;
}

struct HomogenizationEstimate {
  double value = 0.0;
  double error_bound = 0.0;  // D / power
  long long power = 1;
};

/// q(g^n)/n with the bound D/n from the claimed defect (0 when none is claimed).
template <class G, class Pow>
HomogenizationEstimate homogenize(const QMap<G>& q, const G& g, long long n, Pow pow) {
  if (n < 1) throw Error(ErrorCode::ConfigError, "homogenize needs n >= 1");
  HomogenizationEstimate h;
  h.power = n;
  h.value = q(pow(g, n)) / static_cast<double>(n);
  h.error_bound = q.claimed_defect.value_or(0.0) / static_cast<double>(n);
  return h;
}

// ---------------------------------------------------------------------------
// Busemann quasimorphisms

inline constexpr double kBusemannTol = 1e-6;

namespace detail {

/// Isometry taking infinity to the boundary point xi, so x_n = m(n i) runs to xi.
inline hyp2::Isometry toward(const hyp2::BoundaryPoint& xi) {
  if (xi.is_infinity()) return hyp2::Isometry::identity();
  return hyp2::Isometry(xi.value(), -1.0, 1.0, 0.0);
}

}  // namespace detail

struct BusemannValue {
  double value = 0.0;
  double depth = 0.0;  // depth at which two consecutive values agreed
};

/// d(g s, x_n) - d(s, x_n) along x_n = n i (transported to xi), doubling n from
/// `depth` until two successive values agree within 1e-6.
template <class G>
BusemannValue busemann_value(const actions::ActionHandle<G>& act, const hyp2::BoundaryPoint& xi, const G& g,
                             double depth = 1000.0, int max_doublings = 40) {
  if (!act.isometry) throw Error(ErrorCode::ConfigError, "busemann_qm needs an H^2 action");
  const hyp2::Isometry gi = act.isometry(g);
  if (!gi.apply(xi).near(xi, 1e-9)) throw Error(ErrorCode::NotFixed, "element moves the boundary point");
  const hyp2::Isometry m = detail::toward(xi);
  const hyp2::HPoint s = std::get<hyp2::HPoint>(act.base);
  const hyp2::HPoint gs = gi.apply(s);
  auto v = [&](double n) {
    const hyp2::HPoint x = m.apply(hyp2::HPoint(0.0, n));
    return hyp2::dist(gs, x) - hyp2::dist(s, x);
  };
  double n = depth;
  double prev = v(n);
  for (int i = 0; i < max_doublings; ++i) {
    n *= 2.0;
    const double cur = v(n);
    if (std::abs(cur - prev) <= kBusemannTol) return {cur, n};
    prev = cur;
  }
  throw Error(ErrorCode::NotConverged, "Busemann value did not stabilize");
}

template <class G>
double busemann_qm(const actions::ActionHandle<G>& act, const hyp2::BoundaryPoint& xi, const G& g,
                   double depth = 1000.0) {
  return busemann_value(act, xi, g, depth).value;
}

template <class G>
QMap<G> busemann_qmap(const actions::ActionHandle<G>& act, const hyp2::BoundaryPoint& xi, double depth = 1000.0) {
  QMap<G> q;
  q.name = "busemann(" + act.name + ")";
  q.eval = [act, xi, depth](const G& g) { return busemann_qm(act, xi, g, depth); };
  return q;
}

// ---------------------------------------------------------------------------
// Induction from a finite-index subgroup

/// q(g) = (1/k) sum_i q0(h_i^-1 g^k h_i). Every conjugate must lie in N.
template <class G, class Mul, class Inv, class Pow, class InN>
QMap<G> induce_from_finite_index(const QMap<G>& q0, std::vector<G> reps, long long k, Mul mul, Inv inv, Pow pow,
                                 InN in_N) {
  if (reps.empty() || k < 1) throw Error(ErrorCode::ConfigError, "induction needs reps and k >= 1");
  QMap<G> q;
  q.name = "induced(" + q0.name + ")";
  q.eval = [q0, reps, k, mul, inv, pow, in_N](const G& g) {
    const G gk = pow(g, k);
    double sum = 0.0;
    for (const G& h : reps) {
      const G c = mul(mul(inv(h), gk), h);
      if (!in_N(c)) throw Error(ErrorCode::PowerNotInSubgroup, "conjugate of g^k is outside N");
      sum += q0(c);
    }
    return sum / static_cast<double>(k);
  };
  return q;
}

/// The symmetrization q0'(g) = sum_i q0(h_i^-1 g h_i) on N.
template <class G, class Mul, class Inv>
QMap<G> symmetrize(const QMap<G>& q0, std::vector<G> reps, Mul mul, Inv inv) {
  QMap<G> q;
  q.name = "symmetrized(" + q0.name + ")";
  q.eval = [q0, reps, mul, inv](const G& g) {
    double sum = 0.0;
    for (const G& h : reps) sum += q0(mul(mul(inv(h), g), h));
    return sum;
  };
  return q;
}

// ---------------------------------------------------------------------------
// Drift action on the line

inline constexpr double kDriftZero = 1e-9;

template <class G>
struct DriftMap {
  std::vector<G> elements;
  std::vector<double> translation;  // g -> (x -> x + q(g))
  std::vector<bool> loxodromic;     // q(g) != 0
  std::vector<double> defect_ledger;  // |q(gh) - q(g) - q(h)| per sampled pair
  bool genuine_action = true;        // every ledger entry vanishes

  double max_defect() const {
    return defect_ledger.empty() ? 0.0 : *std::max_element(defect_ledger.begin(), defect_ledger.end());
  }
};

/// Requires |q(g^8) - 8 q(g)| <= 8e-6 (1 + |q(g)|) on the sampled elements.
template <class G, class Mul, class Pow>
DriftMap<G> quasiline_drift(const QMap<G>& q, const std::vector<G>& elements,
                            const std::vector<std::pair<G, G>>& pairs, Mul mul, Pow pow) {
  DriftMap<G> out;
  for (const G& g : elements) {
    const double v = q(g);
    const double v8 = q(pow(g, 8));
    if (std::abs(v8 - 8.0 * v) > 8.0 * 1e-6 * (1.0 + std::abs(v))) {
      throw Error(ErrorCode::NotHomogeneous, "q(g^8) differs from 8 q(g)");
    }
    out.elements.push_back(g);
    out.translation.push_back(v);
    out.loxodromic.push_back(std::abs(v) > kDriftZero);
  }
  for (const auto& [g, h] : pairs) {
    const double d = std::abs(q(mul(g, h)) - q(g) - q(h));
    out.defect_ledger.push_back(d);
    if (d > kDriftZero) out.genuine_action = false;
  }
  return out;
}

}  // namespace hypstruct::quasimorphisms
