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
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypstruct/error.hpp"

/// Exact group arithmetic: torus bundles Z^2 x|_phi Z, Baumslag-Solitar
/// groups, braid images in SL(2,Z), plus confinement and density checks.
namespace hypstruct::groups {

using BigInt = boost::multiprecision::cpp_int;
using Vec2 = std::array<BigInt, 2>;

inline double to_double(const BigInt& x) { return x.convert_to<double>(); }

inline Vec2 operator+(const Vec2& x, const Vec2& y) { return {x[0] + y[0], x[1] + y[1]}; }
inline Vec2 operator-(const Vec2& x) { return {-x[0], -x[1]}; }

struct IntMatrix2 {
  BigInt a{1}, b{0}, c{0}, d{1};

  BigInt det() const { return a * d - b * c; }
  BigInt trace() const { return a + d; }
  bool operator==(const IntMatrix2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  bool operator<(const IntMatrix2& o) const {
    return std::tie(a, b, c, d) < std::tie(o.a, o.b, o.c, o.d);
  }
  IntMatrix2 operator*(const IntMatrix2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Vec2 operator*(const Vec2& v) const { return {a * v[0] + b * v[1], c * v[0] + d * v[1]}; }

  /// Inverse of a determinant-one matrix.
  IntMatrix2 inverse() const {
    if (det() != 1) throw Error(ErrorCode::NotAnosov, "inverse needs determinant one");
    return {d, -b, -c, a};
  }
  IntMatrix2 power(long long n) const {
    IntMatrix2 base = n < 0 ? inverse() : *this;
    unsigned long long e = n < 0 ? static_cast<unsigned long long>(-n) : static_cast<unsigned long long>(n);
    IntMatrix2 acc;
    while (e) {
      if (e & 1ULL) acc = acc * base;
      base = base * base;
      e >>= 1ULL;
    }
    return acc;
  }
};

inline std::string to_string(const IntMatrix2& m) {
  return "[[" + m.a.str() + "," + m.b.str() + "],[" + m.c.str() + "," + m.d.str() + "]]";
}

// ---------------------------------------------------------------------------
// Anosov data and eigen-coordinates

struct AnosovData {
  IntMatrix2 phi;
  double lambda = 1.0;  // modulus of the expanding eigenvalue, > 1
  int sign = 1;         // sign of the trace: phi v+ = sign * lambda * v+
  std::array<double, 2> v_plus{};
  std::array<double, 2> v_minus{};
};

namespace detail {

inline std::array<double, 2> unit_eigenvector(double a, double b, double c, double d, double mu) {
  std::array<double, 2> u{b, mu - a};
  std::array<double, 2> w{mu - d, c};
  auto n2 = [](const std::array<double, 2>& v) { return v[0] * v[0] + v[1] * v[1]; };
  std::array<double, 2> v = n2(u) >= n2(w) ? u : w;
  const double nv = std::sqrt(n2(v));
  v[0] /= nv;
  v[1] /= nv;
  if (v[0] < 0 || (v[0] == 0 && v[1] < 0)) {
    v[0] = -v[0];
    v[1] = -v[1];
  }
  return v;
}

}  // namespace detail

inline AnosovData eigen(const IntMatrix2& phi) {
  if (phi.det() != 1) throw Error(ErrorCode::NotAnosov, "det phi = " + phi.det().str() + ", need 1");
  const BigInt tr = phi.trace();
  if (abs(tr) <= 2) throw Error(ErrorCode::NotAnosov, "|trace| = " + BigInt(abs(tr)).str() + " <= 2");
  AnosovData out;
  out.phi = phi;
  const double t = to_double(tr);
  out.sign = t > 0 ? 1 : -1;
  const double at = std::abs(t);
  out.lambda = 0.5 * (at + std::sqrt(at * at - 4.0));
  const double a = to_double(phi.a), b = to_double(phi.b), c = to_double(phi.c), d = to_double(phi.d);
  out.v_plus = detail::unit_eigenvector(a, b, c, d, out.sign * out.lambda);
  out.v_minus = detail::unit_eigenvector(a, b, c, d, out.sign / out.lambda);
  return out;
}

struct EigenCoords {
  double rho = 0.0;  // coefficient of v+
  double pi = 0.0;   // coefficient of v-
};

inline EigenCoords eigen_coords(const std::array<double, 2>& p, const AnosovData& data) {
  const auto& u = data.v_plus;
  const auto& w = data.v_minus;
  const double det = u[0] * w[1] - u[1] * w[0];
  return {(p[0] * w[1] - p[1] * w[0]) / det, (u[0] * p[1] - u[1] * p[0]) / det};
}
inline EigenCoords eigen_coords(const Vec2& p, const AnosovData& data) {
  return eigen_coords(std::array<double, 2>{to_double(p[0]), to_double(p[1])}, data);
}

enum class Side { plus, minus };

/// Q_eps (plus: |pi| <= eps) or Q^-_eps (minus: |rho| <= eps). eps may be +inf.
inline bool in_Q(const Vec2& p, double eps, Side side, const AnosovData& data) {
  if (std::isinf(eps)) return true;
  const EigenCoords e = eigen_coords(p, data);
  return std::abs(side == Side::plus ? e.pi : e.rho) <= eps;
}

// ---------------------------------------------------------------------------
// Torus bundle Z^2 x|_phi Z with (p,n)(q,m) = (p + phi^n q, n + m)

struct TBElement {
  Vec2 p{0, 0};
  long long n = 0;
  bool operator==(const TBElement& o) const { return n == o.n && p == o.p; }
  bool operator<(const TBElement& o) const { return std::tie(n, p) < std::tie(o.n, o.p); }
};

struct TBElementHash {
  std::size_t operator()(const TBElement& x) const {
    std::size_t h = std::hash<BigInt>()(x.p[0]);
    h ^= std::hash<BigInt>()(x.p[1]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<long long>()(x.n) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

inline std::string to_string(const TBElement& x) {
  return "((" + x.p[0].str() + "," + x.p[1].str() + ")," + std::to_string(x.n) + ")";
}

class TorusBundle {
 public:
  static constexpr long long kCached = 64;

  explicit TorusBundle(IntMatrix2 phi) : phi_(std::move(phi)) {
    if (phi_.det() != 1) throw Error(ErrorCode::NotAnosov, "torus bundle needs det phi = 1");
    powers_.resize(2 * kCached + 1);
    powers_[kCached] = IntMatrix2{};
    const IntMatrix2 inv = phi_.inverse();
    for (long long k = 1; k <= kCached; ++k) {
      powers_[kCached + k] = powers_[kCached + k - 1] * phi_;
      powers_[kCached - k] = powers_[kCached - k + 1] * inv;
    }
  }

  const IntMatrix2& phi() const { return phi_; }
  IntMatrix2 phi_power(long long n) const {
    if (n >= -kCached && n <= kCached) return powers_[static_cast<std::size_t>(n + kCached)];
    return phi_.power(n);
  }

  static TBElement identity() { return {}; }
  static TBElement t(long long k = 1) { return {{0, 0}, k}; }
  static TBElement lattice(const Vec2& p) { return {p, 0}; }
  static TBElement lattice(long long x, long long y) { return {{x, y}, 0}; }

  TBElement mul(const TBElement& x, const TBElement& y) const {
    return {x.p + phi_power(x.n) * y.p, x.n + y.n};
  }
  TBElement inv(const TBElement& x) const { return {-(phi_power(-x.n) * x.p), -x.n}; }
  TBElement conj(const TBElement& g, const TBElement& x) const { return mul(mul(g, x), inv(g)); }
  TBElement pow(const TBElement& x, long long k) const {
    TBElement base = k < 0 ? inv(x) : x;
    unsigned long long e = k < 0 ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
    TBElement acc;
    while (e) {
      if (e & 1ULL) acc = mul(acc, base);
      base = mul(base, base);
      e >>= 1ULL;
    }
    return acc;
  }

 private:
  IntMatrix2 phi_;
  std::vector<IntMatrix2> powers_;
};

// ---------------------------------------------------------------------------
// Word metrics

template <class Elem, class Hash = std::hash<Elem>>
struct WordBall {
  std::unordered_map<Elem, int, Hash> length;
  std::vector<Elem> order;  // BFS order

  std::optional<int> find(const Elem& g) const {
    auto it = length.find(g);
    if (it == length.end()) return std::nullopt;
    return it->second;
  }
};

/// BFS on the Cayley graph (right multiplication by generators). Elements for
/// which `keep` is false are neither recorded nor expanded.
template <class Elem, class Hash = std::hash<Elem>, class Mul, class Keep>
WordBall<Elem, Hash> word_ball(const Elem& identity, const std::vector<Elem>& gens, Mul mul,
                               int radius, std::size_t cap, Keep keep) {
  WordBall<Elem, Hash> ball;
  ball.length.emplace(identity, 0);
  ball.order.push_back(identity);
  std::size_t head = 0;
  while (head < ball.order.size()) {
    const Elem g = ball.order[head++];
    const int lg = ball.length.at(g);
    if (lg >= radius) continue;
    for (const Elem& s : gens) {
      Elem h = mul(g, s);
      if (!keep(h) || ball.length.count(h)) continue;
      if (ball.order.size() >= cap) {
        throw Error(ErrorCode::UniverseOverflow,
                    "word ball exceeded cap of " + std::to_string(cap) + " elements");
      }
      ball.length.emplace(h, lg + 1);
      ball.order.push_back(std::move(h));
    }
  }
  return ball;
}

template <class Elem, class Hash = std::hash<Elem>, class Mul>
WordBall<Elem, Hash> word_ball(const Elem& identity, const std::vector<Elem>& gens, Mul mul,
                               int radius, std::size_t cap) {
  return word_ball<Elem, Hash>(identity, gens, mul, radius, cap, [](const Elem&) { return true; });
}

/// Membership predicate plus a finite enumerator of the members inside the
/// box |p|_inf <= box, with |n| <= 1.
struct GeneratorSpec {
  std::function<bool(const TBElement&)> contains;
  std::function<std::vector<TBElement>(long long box)> enumerate;
};

/// Q_eps (nonzero lattice part) together with t and t^-1.
inline GeneratorSpec q_eps_spec(const AnosovData& data, double eps, Side side, bool with_t = true) {
  GeneratorSpec g;
  g.contains = [data, eps, side, with_t](const TBElement& x) {
    if (x.n != 0) return with_t && (x.n == 1 || x.n == -1) && x.p == Vec2{0, 0};
    return x.p != Vec2{0, 0} && in_Q(x.p, eps, side, data);
  };
  g.enumerate = [data, eps, side, with_t](long long box) {
    std::vector<TBElement> out;
    for (long long x = -box; x <= box; ++x) {
      for (long long y = -box; y <= box; ++y) {
        if (x == 0 && y == 0) continue;
        Vec2 p{x, y};
        if (in_Q(p, eps, side, data)) out.push_back({p, 0});
      }
    }
    if (with_t) {
      out.push_back(TorusBundle::t(1));
      out.push_back(TorusBundle::t(-1));
    }
    return out;
  };
  return g;
}

inline GeneratorSpec finite_spec(std::vector<TBElement> elements) {
  GeneratorSpec g;
  auto shared = std::make_shared<std::vector<TBElement>>(std::move(elements));
  g.contains = [shared](const TBElement& x) {
    return std::find(shared->begin(), shared->end(), x) != shared->end();
  };
  g.enumerate = [shared](long long) { return *shared; };
  return g;
}

inline bool is_symmetric(const TorusBundle& G, const std::vector<TBElement>& gens) {
  std::set<TBElement> s(gens.begin(), gens.end());
  for (const auto& g : gens) {
    if (!s.count(G.inv(g))) return false;
  }
  return true;
}

/// Word ball for a torus bundle with generators enumerated inside `gen_box`.
/// Elements whose lattice part leaves |p|_inf <= universe are dropped.
inline WordBall<TBElement, TBElementHash> tb_word_ball(const TorusBundle& G, const GeneratorSpec& spec,
                                                       long long gen_box, int radius, std::size_t cap,
                                                       std::optional<long long> universe = std::nullopt) {
  const std::vector<TBElement> gens = spec.enumerate(gen_box);
  auto mul = [&G](const TBElement& x, const TBElement& y) { return G.mul(x, y); };
  if (!universe) return word_ball<TBElement, TBElementHash>(TorusBundle::identity(), gens, mul, radius, cap);
  const BigInt u = *universe;
  return word_ball<TBElement, TBElementHash>(
      TorusBundle::identity(), gens, mul, radius, cap,
      [u](const TBElement& x) { return abs(x.p[0]) <= u && abs(x.p[1]) <= u; });
}

// ---------------------------------------------------------------------------
// Confinement

struct ConditionResult {
  bool pass = true;
  std::optional<Vec2> witness;  // counterexample when pass is false
};

/// Results hold on the box |p|_inf <= box only.
struct ConfinementReport {
  double eps = 0.0;
  Side side = Side::plus;
  long long box = 0;
  int k_cap = 0;
  ConditionResult a;
  ConditionResult b;
  ConditionResult c;
  int max_k_b = 0;  // largest absorption time seen for condition (b)
  std::optional<int> k0;
  bool cap_exceeded = false;
  std::optional<Vec2> strictness_witness;

  bool all_pass() const { return a.pass && b.pass && c.pass; }
};

/// Automorphism contracting the chosen side: phi on the plus side, phi^-1 on the minus side.
inline IntMatrix2 confining_automorphism(const AnosovData& data, Side side) {
  return side == Side::plus ? data.phi : data.phi.inverse();
}

inline ConfinementReport verify_confining(double eps, const AnosovData& data, long long box, int k_cap,
                                          Side side = Side::plus) {
  if (!(eps > 0.0) || box <= 0 || k_cap <= 0) {
    throw Error(ErrorCode::ConfigError, "verify_confining needs eps > 0 and positive caps");
  }
  ConfinementReport rep;
  rep.eps = eps;
  rep.side = side;
  rep.box = box;
  rep.k_cap = k_cap;
  const IntMatrix2 alpha = confining_automorphism(data, side);
  std::vector<IntMatrix2> apow(static_cast<std::size_t>(k_cap) + 1);
  for (int k = 1; k <= k_cap; ++k) apow[static_cast<std::size_t>(k)] = apow[static_cast<std::size_t>(k) - 1] * alpha;
  auto inQ = [&](const Vec2& p) { return in_Q(p, eps, side, data); };

  std::vector<Vec2> q_pts;
  for (long long x = -box; x <= box; ++x) {
    for (long long y = -box; y <= box; ++y) {
      const Vec2 p{x, y};
      const bool member = inQ(p);
      if (member) {
        q_pts.push_back(p);
        if (rep.a.pass && !inQ(alpha * p)) {
          rep.a.pass = false;
          rep.a.witness = p;
        }
      }
      int k = 0;
      while (k <= k_cap && !inQ(apow[static_cast<std::size_t>(k)] * p)) ++k;
      if (k > k_cap) {
        if (rep.b.pass) {
          rep.b.pass = false;
          rep.b.witness = p;
        }
        rep.cap_exceeded = true;
      } else {
        rep.max_k_b = std::max(rep.max_k_b, k);
      }
    }
  }

  std::set<Vec2> sums;
  for (std::size_t i = 0; i < q_pts.size(); ++i) {
    for (std::size_t j = i; j < q_pts.size(); ++j) sums.insert(q_pts[i] + q_pts[j]);
  }
  for (int k = 0; k <= k_cap && !rep.k0; ++k) {
    bool ok = true;
    for (const Vec2& s : sums) {
      if (!inQ(apow[static_cast<std::size_t>(k)] * s)) {
        ok = false;
        if (k == k_cap) rep.c.witness = s;
        break;
      }
    }
    if (ok) rep.k0 = k;
  }
  if (!rep.k0) {
    rep.c.pass = false;
    rep.cap_exceeded = true;
  }

  // A point of Q outside alpha(Q), i.e. alpha^-1(p) not in Q; scanned by growing rings.
  const IntMatrix2 alpha_inv = alpha.inverse();
  for (long long r = 1; r <= box && !rep.strictness_witness; ++r) {
    for (long long x = -r; x <= r && !rep.strictness_witness; ++x) {
      for (long long y = -r; y <= r; ++y) {
        if (std::max(std::abs(x), std::abs(y)) != r) continue;
        const Vec2 p{x, y};
        if (inQ(p) && !inQ(alpha_inv * p)) {
          rep.strictness_witness = p;
          break;
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Density of point sets on the line

struct DensityResult {
  bool pass = false;
  double largest_gap = 0.0;       // longest stretch of [x0,x1] free of points
  double coverage_radius = 0.0;   // sup over x in [x0,x1] of the distance to S
};

/// Passes iff every point of [x0,x1] is within delta of S.
inline DensityResult density_scan(std::vector<double> S, double x0, double x1, double delta) {
  if (S.empty()) throw Error(ErrorCode::EmptySet, "density_scan needs a nonempty set");
  if (!(x0 < x1)) throw Error(ErrorCode::ConfigError, "density_scan needs x0 < x1");
  std::sort(S.begin(), S.end());
  auto dist_to_S = [&S](double x) {
    auto it = std::lower_bound(S.begin(), S.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != S.end()) best = *it - x;
    if (it != S.begin()) best = std::min(best, x - *std::prev(it));
    return best;
  };
  DensityResult out;
  out.coverage_radius = std::max(dist_to_S(x0), dist_to_S(x1));
  for (std::size_t i = 0; i + 1 < S.size(); ++i) {
    const double m = std::clamp(0.5 * (S[i] + S[i + 1]), x0, x1);
    out.coverage_radius = std::max(out.coverage_radius, dist_to_S(m));
  }
  std::vector<double> marks{x0, x1};
  for (double s : S) {
    if (s > x0 && s < x1) marks.push_back(s);
  }
  std::sort(marks.begin(), marks.end());
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    out.largest_gap = std::max(out.largest_gap, marks[i + 1] - marks[i]);
  }
  out.pass = out.coverage_radius <= delta * (1.0 + 1e-12);
  return out;
}

/// The set P generated from the seed u (P_0 = {u, -u, 0}, P_{i+1} = P_i u phi^n(P_i + P_i)),
/// and rho of the sums of at most r = floor(lambda^n) elements of P.
struct DensityClaim {
  Vec2 u{0, 0};
  double a = 0.0;             // rho(u) > 0
  double eps_u = 0.0;         // |pi(u)|
  int n = 1;
  int r = 0;
  double lambda_n = 0.0;
  int depth = 0;
  std::vector<Vec2> P;
  bool P_inside_Q = true;     // every element of P has |pi| <= |pi(u)|
  std::vector<double> rho_rP;
  DensityResult density;      // of rho(rP) in [0, lambda^{2n} a] at gap lambda^n a
};

/// Seed u: the nonzero point of the box with least |pi| (at most eps), taken with rho(u) > 0.
/// Elements of P with |rho| above `keep_factor * lambda^{2n} a` are dropped; this only
/// shrinks rP, so a pass remains a pass for the full set.
inline DensityClaim density_claim(const AnosovData& data, double eps, long long box, int n = 1,
                                  int max_depth = 4, double keep_factor = 2.0) {
  DensityClaim out;
  out.n = n;
  out.lambda_n = std::pow(data.lambda, n);
  out.r = static_cast<int>(std::floor(out.lambda_n));
  double best = std::numeric_limits<double>::infinity();
  for (long long x = -box; x <= box; ++x) {
    for (long long y = -box; y <= box; ++y) {
      if (x == 0 && y == 0) continue;
      const double p = std::abs(eigen_coords(Vec2{x, y}, data).pi);
      if (p <= eps && p < best) {
        best = p;
        out.u = {x, y};
      }
    }
  }
  if (!std::isfinite(best)) throw Error(ErrorCode::EmptySet, "no seed with |pi| <= eps in the box");
  if (eigen_coords(out.u, data).rho < 0) out.u = -out.u;
  out.a = eigen_coords(out.u, data).rho;
  out.eps_u = best;
  const IntMatrix2 phin = data.phi.power(n);
  const double keep = keep_factor * out.lambda_n * out.lambda_n * out.a;
  const double x1 = out.lambda_n * out.lambda_n * out.a;

  std::set<Vec2> P{out.u, -out.u, Vec2{0, 0}};
  for (int depth = 0; depth <= max_depth; ++depth) {
    out.depth = depth;
    out.P.assign(P.begin(), P.end());
    // rP: sums of exactly r elements (0 is in P); built as iterated sumsets.
    std::set<Vec2> rP{Vec2{0, 0}};
    for (int i = 0; i < out.r; ++i) {
      std::set<Vec2> next;
      for (const Vec2& s : rP) {
        for (const Vec2& p : out.P) {
          Vec2 v = s + p;
          if (std::abs(eigen_coords(v, data).rho) <= keep) next.insert(v);
        }
      }
      rP = std::move(next);
    }
    out.rho_rP.clear();
    for (const Vec2& v : rP) out.rho_rP.push_back(eigen_coords(v, data).rho);
    out.density = density_scan(out.rho_rP, 0.0, x1, out.lambda_n * out.a);
    if (out.density.pass || depth == max_depth) break;
    std::set<Vec2> grown = P;
    for (const Vec2& x : out.P) {
      for (const Vec2& y : out.P) {
        Vec2 v = phin * (x + y);
        if (std::abs(eigen_coords(v, data).rho) <= keep) grown.insert(v);
      }
    }
    P = std::move(grown);
  }
  for (const Vec2& p : out.P) {
    if (std::abs(eigen_coords(p, data).pi) > out.eps_u * (1.0 + 1e-9)) out.P_inside_Q = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Abelianization via the Smith normal form of phi - I

struct Abelianization {
  int free_rank = 0;
  std::vector<BigInt> torsion;  // invariant factors > 1
};

inline Abelianization abelianization(const IntMatrix2& phi) {
  if (phi.det() != 1) throw Error(ErrorCode::NotAnosov, "abelianization assumes det phi = 1");
  const BigInt m00 = phi.a - 1, m01 = phi.b, m10 = phi.c, m11 = phi.d - 1;
  // For a 2x2 integer matrix the invariant factors are gcd of the entries and |det| / gcd.
  const BigInt g = gcd(gcd(abs(m00), abs(m01)), gcd(abs(m10), abs(m11)));
  std::vector<BigInt> factors;
  if (g == 0) {
    factors = {0, 0};
  } else {
    factors = {g, abs(m00 * m11 - m01 * m10) / g};
  }
  Abelianization out;
  out.free_rank = 1;
  for (const BigInt& f : factors) {
    if (f == 0) {
      ++out.free_rank;
    } else if (f > 1) {
      out.torsion.push_back(f);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Baumslag-Solitar groups BS(m,n) = <a, b | b a^m b^-1 = a^n>

/// Britton normal form a^{s_0} b^{e_1} a^{s_1} ... b^{e_k} a^{s_k}, with a-powers
/// pushed to the right: s_{i-1} lies in [0,|n|) when e_i = +1 and in [0,|m|) when
/// e_i = -1, and no b^{e} a^0 b^{-e} occurs. The final power s_k is unrestricted.
struct BSElement {
  std::vector<BigInt> s{0};
  std::vector<int> e;

  std::size_t syllables() const { return e.size(); }
  bool operator==(const BSElement& o) const { return e == o.e && s == o.s; }
  bool operator<(const BSElement& o) const { return std::tie(e, s) < std::tie(o.e, o.s); }
};

struct BSElementHash {
  std::size_t operator()(const BSElement& x) const {
    std::size_t h = x.e.size();
    for (int v : x.e) h = h * 31 + static_cast<std::size_t>(v + 2);
    for (const BigInt& v : x.s) h ^= std::hash<BigInt>()(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

class BaumslagSolitar {
 public:
  BaumslagSolitar(long long m, long long n) : m_(m), n_(n) {
    if (m == 0 || n == 0) throw Error(ErrorCode::ConfigError, "BS(m,n) needs m, n nonzero");
  }
  long long m() const { return m_; }
  long long n() const { return n_; }

  static BSElement identity() { return {}; }

  void mul_a(BSElement& x, const BigInt& k) const { x.s.back() += k; }

  void mul_b(BSElement& x, int e) const {
    // a^{qn} b = b a^{qm} and a^{qm} b^-1 = b^-1 a^{qn}.
    const long long before = e > 0 ? n_ : m_;
    const long long after = e > 0 ? m_ : n_;
    const BigInt modulus = before < 0 ? -before : before;
    BigInt r = x.s.back() % modulus;
    if (r < 0) r += modulus;
    BigInt q = (x.s.back() - r) / modulus;
    if (before < 0) q = -q;
    const BigInt carry = q * after;
    if (r == 0 && !x.e.empty() && x.e.back() == -e) {
      x.e.pop_back();
      x.s.pop_back();
      x.s.back() += carry;
    } else {
      x.s.back() = r;
      x.e.push_back(e);
      x.s.push_back(carry);
    }
  }

  /// Words over {a, A, b, B}; capitals are inverses.
  BSElement normal_form(std::string_view word) const {
    BSElement x;
    for (char ch : word) {
      switch (ch) {
        case 'a': mul_a(x, 1); break;
        case 'A': mul_a(x, -1); break;
        case 'b': mul_b(x, 1); break;
        case 'B': mul_b(x, -1); break;
        default: throw Error(ErrorCode::ConfigError, std::string("bad BS letter '") + ch + "'");
      }
    }
    return x;
  }

  BSElement mul(const BSElement& x, const BSElement& y) const {
    BSElement z = x;
    mul_a(z, y.s[0]);
    for (std::size_t i = 0; i < y.e.size(); ++i) {
      mul_b(z, y.e[i]);
      mul_a(z, y.s[i + 1]);
    }
    return z;
  }

  BSElement inv(const BSElement& x) const {
    BSElement z;
    mul_a(z, -x.s.back());
    for (std::size_t i = x.e.size(); i-- > 0;) {
      mul_b(z, -x.e[i]);
      mul_a(z, -x.s[i]);
    }
    return z;
  }

  BSElement pow(const BSElement& x, long long k) const {
    BSElement base = k < 0 ? inv(x) : x;
    BSElement acc;
    for (long long i = 0; i < (k < 0 ? -k : k); ++i) acc = mul(acc, base);
    return acc;
  }

  static BSElement a_power(const BigInt& k) {
    BSElement x;
    x.s[0] = k;
    return x;
  }

  /// Exponent sums; the a-sum is a homomorphism only when m = n.
  BigInt a_exponent_sum(const BSElement& x) const {
    if (m_ != n_) throw Error(ErrorCode::NotHomomorphism, "a-exponent sum needs m = n");
    BigInt t = 0;
    for (const BigInt& v : x.s) t += v;
    return t;
  }
  static long long b_exponent_sum(const BSElement& x) {
    long long t = 0;
    for (int v : x.e) t += v;
    return t;
  }

 private:
  long long m_, n_;
};

inline std::string to_string(const BSElement& x) {
  std::string out;
  auto apow = [&out](const BigInt& v) {
    if (v == 0) return;
    out += "a^" + v.str() + " ";
  };
  apow(x.s[0]);
  for (std::size_t i = 0; i < x.e.size(); ++i) {
    out += x.e[i] > 0 ? "b " : "b^-1 ";
    apow(x.s[i + 1]);
  }
  if (out.empty()) return "1";
  out.pop_back();
  return out;
}

/// Finite ball of the Bass-Serre tree. Vertex v is the coset reps[v]<a>; its
/// neighbours are reps[v] a^s b<a> (s in [0,|n|), outgoing) and reps[v] a^s b^-1<a>
/// (s in [0,|m|), incoming).
struct BSTree {
  struct Edge {
    int from;
    int to;
    bool outgoing;
    long long s;
  };

  std::vector<BSElement> reps;
  std::vector<int> depth;
  std::vector<int> parent;
  std::vector<Edge> edges;
  std::map<BSElement, int> index;  // coset key -> vertex
  int radius = 0;

  static BSElement coset_key(const BSElement& g) {
    BSElement k = g;
    k.s.back() = 0;
    if (k.e.empty()) k.s[0] = 0;
    return k;
  }
  std::optional<int> find(const BSElement& g) const {
    auto it = index.find(coset_key(g));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
  /// Image of vertex v under g, if it lies in the ball.
  std::optional<int> act(const BaumslagSolitar& G, const BSElement& g, int v) const {
    return find(G.mul(g, reps[static_cast<std::size_t>(v)]));
  }
  int degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += (e.from == v) + (e.to == v);
    return d;
  }
};

inline BSTree bass_serre_ball(const BaumslagSolitar& G, int radius, std::size_t cap = 200000) {
  if (radius < 1) throw Error(ErrorCode::ConfigError, "bass_serre_ball needs radius >= 1");
  BSTree T;
  T.radius = radius;
  T.reps.push_back(BaumslagSolitar::identity());
  T.depth.push_back(0);
  T.parent.push_back(-1);
  T.index.emplace(BSTree::coset_key(T.reps[0]), 0);
  const long long an = G.n() < 0 ? -G.n() : G.n();
  const long long am = G.m() < 0 ? -G.m() : G.m();
  std::set<std::pair<int, int>> seen_edges;
  for (std::size_t head = 0; head < T.reps.size(); ++head) {
    const int v = static_cast<int>(head);
    if (T.depth[head] >= radius) continue;
    for (int orient = 0; orient < 2; ++orient) {
      const long long count = orient == 0 ? an : am;
      for (long long s = 0; s < count; ++s) {
        BSElement h = T.reps[head];
        G.mul_a(h, s);
        G.mul_b(h, orient == 0 ? 1 : -1);
        h.s.back() = 0;
        const BSElement key = BSTree::coset_key(h);
        int w;
        auto it = T.index.find(key);
        if (it == T.index.end()) {
          if (T.reps.size() >= cap) throw Error(ErrorCode::BallOverflow, "Bass-Serre ball exceeded cap");
          w = static_cast<int>(T.reps.size());
          T.reps.push_back(h);
          T.depth.push_back(T.depth[head] + 1);
          T.parent.push_back(v);
          T.index.emplace(key, w);
        } else {
          w = it->second;
        }
        const auto ek = std::minmax(v, w);
        if (seen_edges.insert({ek.first, ek.second}).second) {
          T.edges.push_back({v, w, orient == 0, s});
        }
      }
    }
  }
  return T;
}

// ---------------------------------------------------------------------------
// Braid group B_3 -> SL(2,Z)

inline IntMatrix2 braid_sigma() { return {1, 1, 0, 1}; }
inline IntMatrix2 braid_tau() { return {1, 0, -1, 1}; }

/// Words over {s, S, t, T} for sigma, sigma^-1, tau, tau^-1.
inline IntMatrix2 braid_to_sl2(std::string_view word) {
  IntMatrix2 m;
  for (char ch : word) {
    switch (ch) {
      case 's': m = m * braid_sigma(); break;
      case 'S': m = m * braid_sigma().inverse(); break;
      case 't': m = m * braid_tau(); break;
      case 'T': m = m * braid_tau().inverse(); break;
      default: throw Error(ErrorCode::ConfigError, std::string("bad braid letter '") + ch + "'");
    }
  }
  return m;
}

struct ChiralityResult {
  bool found = false;   // false means only "not found within the bound"
  IntMatrix2 conjugator;
  std::string word;
  int n = 0;
};

/// Searches conjugators C, words of length <= conj_len in F(sigma)^{+-1}, F(tau)^{+-1},
/// with C A^n C^-1 = A^-n for 1 <= n <= n_max. Equality is exact in SL(2,Z).
inline ChiralityResult chirality_search(const IntMatrix2& A, int n_max, int conj_len) {
  if (n_max < 1 || conj_len < 0) throw Error(ErrorCode::ConfigError, "chirality_search caps must be positive");
  std::vector<IntMatrix2> pos(static_cast<std::size_t>(n_max) + 1), neg(static_cast<std::size_t>(n_max) + 1);
  for (int n = 1; n <= n_max; ++n) {
    pos[static_cast<std::size_t>(n)] = A.power(n);
    neg[static_cast<std::size_t>(n)] = A.power(-n);
  }
  const std::vector<std::pair<char, IntMatrix2>> gens{
      {'s', braid_sigma()}, {'S', braid_sigma().inverse()}, {'t', braid_tau()}, {'T', braid_tau().inverse()}};
  std::map<IntMatrix2, std::string> seen{{IntMatrix2{}, ""}};
  std::vector<IntMatrix2> frontier{IntMatrix2{}};
  for (int len = 0; len <= conj_len; ++len) {
    for (const IntMatrix2& C : frontier) {
      for (int n = 1; n <= n_max; ++n) {
        if (C * pos[static_cast<std::size_t>(n)] == neg[static_cast<std::size_t>(n)] * C) {
          return {true, C, seen.at(C), n};
        }
      }
    }
    if (len == conj_len) break;
    std::vector<IntMatrix2> next;
    for (const IntMatrix2& C : frontier) {
      for (const auto& [ch, g] : gens) {
        IntMatrix2 D = C * g;
        if (seen.emplace(D, seen.at(C) + ch).second) next.push_back(D);
      }
    }
    frontier = std::move(next);
  }
  return {};
}

}  // namespace hypstruct::groups
