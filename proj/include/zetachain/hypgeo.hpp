#pragma once

// Real Moebius algebra and hyperbolic trigonometry on the upper half plane.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "zetachain/error.hpp"

namespace zetachain {

using cplx = std::complex<double>;

namespace detail {

/// acosh(1 + x) for x >= 0 without the cancellation of acosh near 1.
inline double acosh1p(double x) { return std::log1p(x + std::sqrt(x * (x + 2.0))); }

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// u -> (a u + b) / (c u + d) with real entries and determinant +1 or -1.
///
/// The stored entries are the true entries divided by exp(log_scale). Long
/// products are renormalized so the largest stored entry stays below 1e150;
/// every quantity derived from the trace (lengths, multipliers) accounts for
/// the scale, so nothing is lost by the renormalization.
struct Moebius {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  int det = 1;
  double log_scale = 0.0;

  static constexpr double kRenormThreshold = 1e150;

  static Moebius identity() { return {}; }

  static Moebius translation(double t) { return {1.0, t, 0.0, 1.0, 1, 0.0}; }

  /// Builds from raw entries; det is taken from the sign of ad - bc.
  static Moebius from_entries(double a, double b, double c, double d) {
    const double det = a * d - b * c;
    return {a, b, c, d, det < 0 ? -1 : 1, 0.0};
  }

  double trace_stored() const { return a + d; }
  double trace() const { return (a + d) * std::exp(log_scale); }

  /// True entries, only meaningful when they fit in a double.
  std::array<double, 4> entries() const {
    const double s = std::exp(log_scale);
    return {a * s, b * s, c * s, d * s};
  }

  /// |det - (ad - bc)| <= 1e-12 max(1, |ad|, |bc|) on the true entries.
  bool det_consistent(double tol = 1e-12) const {
    const auto [ta, tb, tc, td] = entries();
    const double ad = ta * td, bc = tb * tc;
    return std::abs(det - (ad - bc)) <= tol * std::max({1.0, std::abs(ad), std::abs(bc)});
  }

  cplx apply(cplx u) const { return (a * u + b) / (c * u + d); }

  /// Complex derivative det / (c u + d)^2 of the true map.
  cplx derivative(cplx u) const {
    const cplx q = c * u + d;
    return static_cast<double>(det) * std::exp(-2.0 * log_scale) / (q * q);
  }

  Moebius inverse() const {
    const double s = static_cast<double>(det);
    return {s * d, -s * b, -s * c, s * a, det, log_scale};
  }
};

inline Moebius compose(const Moebius& m, const Moebius& n) {
  Moebius r{m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d, m.det * n.det, m.log_scale + n.log_scale};
  const double big = std::max({std::abs(r.a), std::abs(r.b), std::abs(r.c), std::abs(r.d)});
  if (big > Moebius::kRenormThreshold) {
    r.a /= big;
    r.b /= big;
    r.c /= big;
    r.d /= big;
    r.log_scale += std::log(big);
  }
  return r;
}

inline Moebius operator*(const Moebius& m, const Moebius& n) { return compose(m, n); }

/// Euclidean disk with real center; its boundary is orthogonal to the real axis.
struct Disk {
  double center = 0.0;
  double radius = 1.0;

  double left() const { return center - radius; }
  double right() const { return center + radius; }
  bool contains(cplx u) const { return std::abs(u - center) < radius; }
};

enum class IsometryClass { hyperbolic, parabolic, elliptic };

inline constexpr double kParabolicBand = 1e-12;

inline IsometryClass classify(const Moebius& m) {
  if (m.det != 1) {
    throw Error(Errc::NegativeDeterminant, "classification needs an orientation-preserving matrix");
  }
  // A scale this large means |tr| is astronomically far from 2.
  if (m.log_scale > 1.0 && std::abs(m.trace_stored()) > 1e-100) return IsometryClass::hyperbolic;
  const double t = std::abs(m.trace());
  if (t > 2.0 + kParabolicBand) return IsometryClass::hyperbolic;
  if (std::abs(t - 2.0) <= kParabolicBand) return IsometryClass::parabolic;
  return IsometryClass::elliptic;
}

/// Translation length 2 arccosh(|tr|/2), evaluated as
/// 2 [log(|tr|/2) + log(1 + sqrt(1 - 4/tr^2))] so huge traces do not overflow.
inline double displacement_length(const Moebius& m) {
  if (classify(m) != IsometryClass::hyperbolic) {
    throw Error(Errc::NotHyperbolic, "displacement length of a non-hyperbolic element");
  }
  const double ts = std::abs(m.trace_stored());
  const double log_half_tr = std::log(ts) + m.log_scale - std::log(2.0);
  const double inv_t2 = std::exp(-2.0 * (std::log(ts) + m.log_scale));
  const double q = 1.0 - 4.0 * inv_t2;
  if (q > 0.5) return 2.0 * (log_half_tr + std::log1p(std::sqrt(q)));
  // Near |tr| = 2 use the acosh form directly.
  return 2.0 * detail::acosh1p(std::abs(m.trace()) / 2.0 - 1.0);
}

struct FixedPoint {
  double point;
  double derivative;
};

/// Attracting fixed point of a hyperbolic matrix and the multiplier there.
inline FixedPoint fixed_point_attracting(const Moebius& m) {
  if (classify(m) != IsometryClass::hyperbolic) {
    throw Error(Errc::NotHyperbolic, "attracting fixed point of a non-hyperbolic element");
  }
  if (m.c == 0.0) throw Error(Errc::FixedPointAtInfinity, "c = 0");
  // c x + d = lambda where lambda is the eigenvalue of larger modulus.
  const double tr = m.trace_stored();
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * std::exp(-2.0 * m.log_scale)));
  const double lambda = 0.5 * (tr + std::copysign(disc, tr));
  const double x = (lambda - m.d) / m.c;
  const double deriv = std::exp(-2.0 * (std::log(std::abs(lambda)) + m.log_scale));
  return {x, deriv};
}

/// Holomorphic extension of the reflection in the circle |u - center|^2 = power:
/// u -> power / (u - center) + center, i.e. (1/sqrt(power)) [[m, power - m^2], [1, -m]].
inline Moebius reflection_matrix(double center, double power) {
  if (!(power > 0.0)) throw Error(Errc::NonpositiveRadius, "reflection power must be > 0");
  const double s = 1.0 / std::sqrt(power);
  return {center * s, (power - center * center) * s, s, -center * s, -1, 0.0};
}

/// Hyperbolic distance between the geodesics bounding two disjoint disks.
inline double circle_distance(const Disk& c1, const Disk& c2) {
  if (!(c1.radius > 0.0) || !(c2.radius > 0.0)) {
    throw Error(Errc::NonpositiveRadius, "circle radius must be > 0");
  }
  const double dist = std::abs(c1.center - c2.center);
  const double gap = dist - c1.radius - c2.radius;
  if (!(gap > 0.0)) throw Error(Errc::DisksOverlap, "circle closures intersect");
  // cosh(d) - 1 = (D^2 - (r1 + r2)^2) / (2 r1 r2)
  const double x = gap * (dist + c1.radius + c2.radius) / (2.0 * c1.radius * c2.radius);
  return detail::acosh1p(x);
}

struct HexagonSides {
  double A, B, C;
};

namespace detail {
/// Side opposite `opp` in a right-angled hexagon whose alternate sides are
/// (adj1, opp, adj2):  cosh X = (cosh adj1 cosh adj2 + cosh opp) / (sinh adj1 sinh adj2).
inline double hexagon_side(double adj1, double adj2, double opp) {
  // cosh X - 1 = (cosh(adj1 - adj2) + cosh opp) / (sinh adj1 sinh adj2)
  const double x = (std::cosh(adj1 - adj2) + std::cosh(opp)) / (std::sinh(adj1) * std::sinh(adj2));
  return acosh1p(x);
}
}  // namespace detail

/// Remaining sides of the right-angled hexagon with alternate sides alpha, beta, gamma.
/// B is the side between alpha and beta, A the one between beta and gamma, C the
/// one between gamma and alpha.
inline HexagonSides hexagon_right_angled(double alpha, double beta, double gamma) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0)) {
    throw Error(Errc::NonpositiveSide, "hexagon sides must be > 0");
  }
  return {detail::hexagon_side(beta, gamma, alpha), detail::hexagon_side(alpha, beta, gamma),
          detail::hexagon_side(gamma, alpha, beta)};
}

}  // namespace zetachain
