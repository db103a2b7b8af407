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
#include <complex>
#include <memory>
#include <optional>
#include <sstream>
#include <utility>

#include "hypstruct/error.hpp"

/// Upper half-plane geometry: points, boundary points, geodesics and
/// isometries acting by Mobius maps, optionally precomposed with z -> -conj(z).
namespace hypstruct::hyp2 {

using Complex = std::complex<double>;

inline constexpr double kAlgebraicTol = 1e-9;
inline constexpr double kParabolicBand = 1e-9;

class HPoint {
 public:
  HPoint() = default;
  HPoint(double re, double im) : re_(re), im_(im) {
    if (!std::isfinite(re) || !std::isfinite(im) || !(im > 0.0)) {
      std::ostringstream os;
      os << "point (" << re << ", " << im << ") is not in the upper half-plane";
      throw Error(ErrorCode::NonPositiveImaginary, os.str());
    }
  }
  explicit HPoint(Complex z) : HPoint(z.real(), z.imag()) {}

  double re() const { return re_; }
  double im() const { return im_; }
  Complex z() const { return {re_, im_}; }

 private:
  double re_ = 0.0;
  double im_ = 1.0;
};

class BoundaryPoint {
 public:
  enum class Kind { finite, infinity };

  static BoundaryPoint finite(double x) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::DegenerateMatrix, "finite boundary point must be a finite real");
    }
    return BoundaryPoint(Kind::finite, x);
  }
  static BoundaryPoint infinity() { return BoundaryPoint(Kind::infinity, 0.0); }

  Kind kind() const { return kind_; }
  bool is_infinity() const { return kind_ == Kind::infinity; }
  double value() const { return value_; }

  bool near(const BoundaryPoint& o, double tol) const {
    if (is_infinity() || o.is_infinity()) return is_infinity() == o.is_infinity();
    return std::abs(value_ - o.value_) <= tol * std::max(1.0, std::abs(value_));
  }

 private:
  BoundaryPoint(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

/// Complete geodesic, stored by its two ideal endpoints. Endpoints are kept
/// ordered: (foot, infinity) for vertical lines, (lo, hi) for semicircles.
class Geodesic {
 public:
  Geodesic(BoundaryPoint u, BoundaryPoint v) : e0_(u), e1_(v) {
    if (e0_.is_infinity()) std::swap(e0_, e1_);
    if (e0_.is_infinity() || (!e1_.is_infinity() && e0_.value() == e1_.value())) {
      throw Error(ErrorCode::AsymptoticOrCrossing, "geodesic endpoints must be distinct");
    }
    if (!e1_.is_infinity() && e1_.value() < e0_.value()) std::swap(e0_, e1_);
  }
  static Geodesic vertical(double foot) {
    return Geodesic(BoundaryPoint::finite(foot), BoundaryPoint::infinity());
  }
  static Geodesic semicircle(double center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::AsymptoticOrCrossing, "radius must be positive");
    return Geodesic(BoundaryPoint::finite(center - radius), BoundaryPoint::finite(center + radius));
  }

  bool is_vertical() const { return e1_.is_infinity(); }
  double foot() const { return e0_.value(); }
  double center() const { return 0.5 * (e0_.value() + e1_.value()); }
  double radius() const { return 0.5 * (e1_.value() - e0_.value()); }
  const BoundaryPoint& endpoint(int i) const { return i == 0 ? e0_ : e1_; }

 private:
  BoundaryPoint e0_;
  BoundaryPoint e1_;
};

inline double dist(const HPoint& p, const HPoint& q) {
  if (!(p.im() > 0.0) || !(q.im() > 0.0)) {
    throw Error(ErrorCode::NonPositiveImaginary, "dist needs points with im > 0");
  }
  const double dx = p.re() - q.re();
  const double dy = p.im() - q.im();
  return 2.0 * std::asinh(std::hypot(dx, dy) / (2.0 * std::sqrt(p.im() * q.im())));
}

/// z -> (a w + b) / (c w + d) with w = z, or w = -conj(z) when reversing.
class Isometry {
 public:
  Isometry() = default;
  Isometry(double a, double b, double c, double d, bool reversing = false)
      : a_(a), b_(b), c_(c), d_(d), rev_(reversing) {
    const double det = a * d - b * c;
    const double scale = std::max({1.0, std::abs(a * d), std::abs(b * c)});
    if (!std::isfinite(det) || std::abs(det - 1.0) > kAlgebraicTol * scale) {
      std::ostringstream os;
      os << "determinant " << det << " differs from 1";
      throw Error(ErrorCode::DegenerateMatrix, os.str());
    }
  }
  static Isometry identity() { return {}; }
  static Isometry psi() { return Isometry(1, 0, 0, 1, true); }
  static Isometry translation(double x) { return Isometry(1, x, 0, 1); }
  static Isometry dilation(double k) {
    const double s = std::sqrt(k);
    return Isometry(s, 0, 0, 1.0 / s);
  }
  /// Rescales a positive-determinant matrix to determinant one.
  static Isometry normalized(double a, double b, double c, double d, bool reversing = false) {
    const double det = a * d - b * c;
    if (!(det > 0.0) || !std::isfinite(det)) {
      throw Error(ErrorCode::DegenerateMatrix, "matrix must have positive determinant");
    }
    const double s = 1.0 / std::sqrt(det);
    Isometry g;
    g.a_ = a * s;
    g.b_ = b * s;
    g.c_ = c * s;
    g.d_ = d * s;
    g.rev_ = reversing;
    return g;
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  bool reversing() const { return rev_; }
  double trace() const { return a_ + d_; }
  double det() const { return a_ * d_ - b_ * c_; }

  Complex apply(Complex z) const {
    const Complex w = rev_ ? Complex(-z.real(), z.imag()) : z;
    const Complex den = c_ * w + d_;
    const double n2 = std::norm(den);
    const double re = (a_ * c_ * std::norm(w) + (a_ * d_ + b_ * c_) * w.real() + b_ * d_) / n2;
    const double im = w.imag() / n2;
    return {re, im};
  }
  HPoint apply(const HPoint& p) const { return HPoint(apply(p.z())); }

  BoundaryPoint apply(const BoundaryPoint& x) const {
    if (x.is_infinity()) {
      if (c_ == 0.0) return BoundaryPoint::infinity();
      return BoundaryPoint::finite(a_ / c_);
    }
    const double w = rev_ ? -x.value() : x.value();
    const double den = c_ * w + d_;
    if (den == 0.0) return BoundaryPoint::infinity();
    return BoundaryPoint::finite((a_ * w + b_) / den);
  }
  Geodesic apply(const Geodesic& g) const {
    return Geodesic(apply(g.endpoint(0)), apply(g.endpoint(1)));
  }

  /// Composite (*this) after h.
  Isometry operator*(const Isometry& h) const {
    // psi N psi = [[a,-b],[-c,d]], so moving psi past h flips b and c.
    const double hb = rev_ ? -h.b_ : h.b_;
    const double hc = rev_ ? -h.c_ : h.c_;
    // Determinants multiply, so the product needs no rescaling; recomputing ad - bc
    // would cancel catastrophically for long words.
    return raw(a_ * h.a_ + b_ * hc, a_ * hb + b_ * h.d_, c_ * h.a_ + d_ * hc, c_ * hb + d_ * h.d_,
               rev_ != h.rev_);
  }
  Isometry inverse() const {
    // (M psi)^-1 = psi M^-1 = (psi M^-1 psi) psi.
    double ia = d_, ib = -b_, ic = -c_, id = a_;
    if (rev_) {
      ib = -ib;
      ic = -ic;
    }
    return raw(ia, ib, ic, id, rev_);
  }
  Isometry power(long long k) const {
    Isometry base = k < 0 ? inverse() : *this;
    unsigned long long e = k < 0 ? static_cast<unsigned long long>(-k) : static_cast<unsigned long long>(k);
    Isometry acc;
    while (e) {
      if (e & 1ULL) acc = acc * base;
      base = base * base;
      e >>= 1ULL;
    }
    return acc;
  }

 private:
  static Isometry raw(double a, double b, double c, double d, bool reversing) {
    Isometry g;
    g.a_ = a;
    g.b_ = b;
    g.c_ = c;
    g.d_ = d;
    g.rev_ = reversing;
    return g;
  }

  double a_ = 1.0, b_ = 0.0, c_ = 0.0, d_ = 1.0;
  bool rev_ = false;
};

struct IsometryClass {
  enum class Tag { identity, elliptic, parabolic, loxodromic, reversing_composite };

  Tag tag = Tag::identity;
  double translation_length = 0.0;
  std::optional<BoundaryPoint> attracting;
  std::optional<BoundaryPoint> repelling;
  std::optional<BoundaryPoint> parabolic_fixed;
  std::optional<HPoint> elliptic_fixed;
  /// Set when |trace| fell inside the parabolic band without equalling 2.
  bool tolerance_band = false;
  /// Reversing case: reflection (square is the identity) or glide reflection.
  bool reflection = false;
  std::optional<Geodesic> fixed_geodesic;
  std::shared_ptr<const IsometryClass> square_class;
};

inline const char* to_string(IsometryClass::Tag t) {
  switch (t) {
    case IsometryClass::Tag::identity: return "identity";
    case IsometryClass::Tag::elliptic: return "elliptic";
    case IsometryClass::Tag::parabolic: return "parabolic";
    case IsometryClass::Tag::loxodromic: return "loxodromic";
    case IsometryClass::Tag::reversing_composite: return "reversing_composite";
  }
  return "?";
}

namespace detail {

inline bool near_identity(const Isometry& g) {
  return std::abs(g.b()) <= kAlgebraicTol && std::abs(g.c()) <= kAlgebraicTol &&
         std::abs(g.a() - g.d()) <= kAlgebraicTol;
}

inline IsometryClass classify_preserving(const Isometry& g) {
  IsometryClass out;
  const double a = g.a(), b = g.b(), c = g.c(), d = g.d();
  const double tr = std::abs(a + d);
  if (near_identity(g)) {
    out.tag = IsometryClass::Tag::identity;
    return out;
  }
  if (tr < 2.0 - kParabolicBand) {
    out.tag = IsometryClass::Tag::elliptic;
    const double s = std::sqrt(4.0 - tr * tr);
    out.elliptic_fixed = HPoint(Complex(a - d, s * (c > 0 ? 1.0 : -1.0)) / (2.0 * c));
    return out;
  }
  if (tr <= 2.0 + kParabolicBand) {
    out.tag = IsometryClass::Tag::parabolic;
    out.tolerance_band = (tr != 2.0);
    out.parabolic_fixed =
        c == 0.0 ? BoundaryPoint::infinity() : BoundaryPoint::finite((a - d) / (2.0 * c));
    return out;
  }
  out.tag = IsometryClass::Tag::loxodromic;
  out.translation_length = 2.0 * std::acosh(tr / 2.0);
  if (c == 0.0) {
    const auto fin = BoundaryPoint::finite(b / (d - a));
    if (std::abs(a) > 1.0) {
      out.attracting = BoundaryPoint::infinity();
      out.repelling = fin;
    } else {
      out.attracting = fin;
      out.repelling = BoundaryPoint::infinity();
    }
    return out;
  }
  const double disc = std::sqrt((a + d) * (a + d) - 4.0);
  const double z1 = ((a - d) + disc) / (2.0 * c);
  const double z2 = ((a - d) - disc) / (2.0 * c);
  // Derivative at a fixed point z is 1 / (c z + d)^2.
  if (std::abs(c * z1 + d) > 1.0) {
    out.attracting = BoundaryPoint::finite(z1);
    out.repelling = BoundaryPoint::finite(z2);
  } else {
    out.attracting = BoundaryPoint::finite(z2);
    out.repelling = BoundaryPoint::finite(z1);
  }
  return out;
}

}  // namespace detail

inline IsometryClass classify(const Isometry& g) {
  const double det = g.det();
  if (!std::isfinite(det) || std::abs(det - 1.0) > kAlgebraicTol * std::max(1.0, std::abs(g.a() * g.d()))) {
    throw Error(ErrorCode::DegenerateMatrix, "classify needs determinant one");
  }
  if (!g.reversing()) return detail::classify_preserving(g);

  IsometryClass out;
  out.tag = IsometryClass::Tag::reversing_composite;
  auto sq = std::make_shared<IsometryClass>(detail::classify_preserving(g * g));
  out.square_class = sq;
  if (sq->tag == IsometryClass::Tag::identity) {
    // Fixed boundary points of w -> M(-w): c x^2 - (a + d) x + b = 0.
    out.reflection = true;
    const double a = g.a(), b = g.b(), c = g.c(), d = g.d();
    if (std::abs(c) <= kAlgebraicTol) {
      out.fixed_geodesic = Geodesic(BoundaryPoint::finite(b / (a + d)), BoundaryPoint::infinity());
    } else {
      const double disc = std::sqrt(std::max(0.0, (a + d) * (a + d) - 4.0 * b * c));
      out.fixed_geodesic = Geodesic(BoundaryPoint::finite((a + d + disc) / (2.0 * c)),
                                    BoundaryPoint::finite((a + d - disc) / (2.0 * c)));
    }
  } else if (sq->tag == IsometryClass::Tag::loxodromic) {
    out.translation_length = 0.5 * sq->translation_length;
    out.attracting = sq->attracting;
    out.repelling = sq->repelling;
    out.fixed_geodesic = Geodesic(*sq->attracting, *sq->repelling);
  }
  return out;
}

/// Isometry sending endpoint(0) to 0, endpoint(1) to infinity and the base
/// point of the geodesic (foot + i, or the apex) to i.
inline Isometry standardize(const Geodesic& g) {
  if (g.is_vertical()) return Isometry::translation(-g.foot());
  const double lo = g.endpoint(0).value();
  const double hi = g.endpoint(1).value();
  return Isometry::normalized(-1.0, lo, 1.0, -hi);
}

/// Signed arc-length coordinate of a point on g, increasing toward endpoint(1).
inline double arc_param(const Geodesic& g, const HPoint& p) {
  return std::log(std::abs(standardize(g).apply(p.z())));
}

inline HPoint point_at(const Geodesic& g, double s) {
  return standardize(g).inverse().apply(HPoint(0.0, std::exp(s)));
}

struct Perpendicular {
  HPoint foot_on_alpha;
  HPoint foot_on_beta;
  double length;
};

namespace detail {

/// beta's endpoints in the frame of standardize(alpha); both on one side of 0.
struct PerpFrame {
  Isometry h;
  double P, Q, sgn;
};

inline PerpFrame perp_frame(const Geodesic& alpha, const Geodesic& beta) {
  const Isometry h = standardize(alpha);
  const BoundaryPoint p = h.apply(beta.endpoint(0));
  const BoundaryPoint q = h.apply(beta.endpoint(1));
  // Only exact (or underflowing) coincidences count as shared; deep Schottky
  // words legitimately produce ratios far beyond 1e12.
  constexpr double kShared = 1e-200;
  constexpr double kFar = 1e200;
  if (p.is_infinity() || q.is_infinity() || std::abs(p.value()) < kShared ||
      std::abs(q.value()) < kShared || std::abs(p.value()) > kFar || std::abs(q.value()) > kFar) {
    throw Error(ErrorCode::AsymptoticOrCrossing, "geodesics share an endpoint");
  }
  if (p.value() * q.value() < 0.0) {
    throw Error(ErrorCode::AsymptoticOrCrossing, "geodesics cross");
  }
  return {h, std::abs(p.value()), std::abs(q.value()), p.value() > 0 ? 1.0 : -1.0};
}

/// ln((1 + s)^2 / u) with s^2 = 1 - u and u = 1 - min(P,Q)/max(P,Q). For four
/// finite endpoints u is the cross-ratio (b1-b2)(a2-a1) / ((b1-a2)(b2-a1)), which
/// stays accurate when P/Q rounds to 1.
inline double perp_length(const Geodesic& alpha, const Geodesic& beta, double P, double Q) {
  double u = 1.0 - std::min(P, Q) / std::max(P, Q);
  if (!alpha.is_vertical() && !beta.is_vertical()) {
    const double a1 = alpha.endpoint(0).value(), a2 = alpha.endpoint(1).value();
    const double b1 = beta.endpoint(0).value(), b2 = beta.endpoint(1).value();
    const double u0 = (b1 - b2) * (a2 - a1) / ((b1 - a2) * (b2 - a1));  // 1 - P/Q
    u = P <= Q ? std::abs(u0) : std::abs(u0 / (1.0 - u0));
  }
  const double s = std::sqrt(1.0 - u);
  return std::log((1.0 + s) * (1.0 + s) / u);
}

}  // namespace detail

inline Perpendicular common_perpendicular(const Geodesic& alpha, const Geodesic& beta) {
  const auto [h, P, Q, sgn] = detail::perp_frame(alpha, beta);
  // The perpendicular is the circle |z| = sqrt(PQ), orthogonal to both.
  const double r = std::sqrt(P) * std::sqrt(Q);
  const double x = 2.0 * r * (r / (P + Q));
  const double y = r * (std::abs(Q - P) / (P + Q));
  const Isometry hinv = h.inverse();
  const HPoint fa = hinv.apply(HPoint(0.0, r));
  const HPoint fb = hinv.apply(HPoint(sgn * x, y));
  return {fa, fb, detail::perp_length(alpha, beta, P, Q)};
}

/// Length of the common perpendicular without constructing its feet; infinite
/// when the two geodesics are too far apart to resolve in double precision.
inline double perpendicular_length(const Geodesic& alpha, const Geodesic& beta) {
  const auto f = detail::perp_frame(alpha, beta);
  return detail::perp_length(alpha, beta, f.P, f.Q);
}

/// arc_param on gamma of its nearest point to alpha, computed in gamma's frame.
inline double projection_param(const Geodesic& gamma, const Geodesic& alpha) {
  const auto f = detail::perp_frame(gamma, alpha);
  return 0.5 * (std::log(f.P) + std::log(f.Q));
}

/// Nearest point of gamma to alpha.
inline HPoint project_point(const Geodesic& gamma, const Geodesic& alpha) {
  return common_perpendicular(gamma, alpha).foot_on_alpha;
}

}  // namespace hypstruct::hyp2
