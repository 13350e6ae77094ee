#pragma once

// Iterated function schemes for the three-funnel surfaces X_{l1,l2,l3}:
// the Bowen-Series scheme from the explicit generators and the normalized
// six-symbol flow-adapted scheme built from three reflections.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zetachain/error.hpp"
#include "zetachain/hypgeo.hpp"

namespace zetachain {

enum class SchemeKind { bowen, flow };

inline std::string to_string(SchemeKind k) { return k == SchemeKind::bowen ? "bowen" : "flow"; }

using Triple = std::array<int, 3>;

/// One allowed transition i -> j and its contraction phi_{i,j}.
struct Edge {
  int from = 0;  // 1-based symbols
  int to = 0;
  Moebius map;        // full map, translations folded in
  double offset = 0;  // translation folded into `map` (+offset after, or offset < 0 before)
  int weight = 0;     // n_{i,j}; zero for bowen
};

struct IfsScheme {
  SchemeKind kind = SchemeKind::bowen;
  int symbol_count = 0;
  std::vector<Disk> disks;           // index s-1 for symbol s
  std::vector<int> adjacency;        // row-major, symbol_count^2
  std::vector<Edge> edges;           // sorted by (from, to)
  std::vector<int> edge_index;       // row-major, -1 for forbidden transitions
  std::array<double, 3> lengths{};   // l1, l2, l3
  // flow metadata
  Triple n{0, 0, 0};
  double ell = 0.0;
  std::array<int, 3> kappa_twice{};  // 2 kappa_j, exact
  double delta_offset = 0.0;
  double extended_radius = 0.0;
  // bowen metadata
  double generator_param = 0.0;

  bool allowed(int i, int j) const { return adjacency[(i - 1) * symbol_count + (j - 1)] != 0; }

  const Edge& edge(int i, int j) const {
    const int k = edge_index[(i - 1) * symbol_count + (j - 1)];
    if (k < 0) throw Error(Errc::NotClosed, "transition " + std::to_string(i) + "->" + std::to_string(j) + " is forbidden");
    return edges[k];
  }

  double kappa(int j) const { return 0.5 * kappa_twice[(j - 1) % 3]; }
};

namespace detail {

inline void finalize_edges(IfsScheme& s) {
  s.edge_index.assign(s.symbol_count * s.symbol_count, -1);
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    s.edge_index[(s.edges[k].from - 1) * s.symbol_count + (s.edges[k].to - 1)] = static_cast<int>(k);
  }
}

inline double log_cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x)) - std::numbers::ln2;
}

inline bool triangle_ok(const Triple& n) {
  return n[0] + n[1] > n[2] && n[1] + n[2] > n[0] && n[0] + n[2] > n[1];
}

inline void require_positive_triple(const Triple& n) {
  for (int v : n) {
    if (v <= 0) throw Error(Errc::TriangleConditionViolated, "funnel multiples must be positive");
  }
  if (!triangle_ok(n)) {
    throw Error(Errc::TriangleConditionViolated,
                "n = (" + std::to_string(n[0]) + "," + std::to_string(n[1]) + "," + std::to_string(n[2]) + ")");
  }
}

/// Weight index of the edge between symbol classes p and q (1..3 each, p != q).
inline int pair_funnel(int p, int q) {
  if (p > q) std::swap(p, q);
  if (p == 1 && q == 2) return 0;
  if (p == 2 && q == 3) return 1;
  return 2;  // {1,3}
}

}  // namespace detail

/// The parameter a > 1 of the second generator that makes Tr(S1 S2^-1) = -2 cosh(l3/2).
inline double solve_generator_param(double l1, double l2, double l3) {
  if (!(l1 > 0) || !(l2 > 0) || !(l3 > 0)) throw Error(Errc::NonpositiveLength, "lengths must be > 0");
  const double k = 2.0 * (std::cosh(l1 / 2) * std::cosh(l2 / 2) + std::cosh(l3 / 2)) /
                   (std::sinh(l1 / 2) * std::sinh(l2 / 2));
  // a + 1/a = k, larger root; k - 2 written without cancellation.
  const double km2 = 2.0 * (std::cosh((l1 - l2) / 2) + std::cosh(l3 / 2)) /
                     (std::sinh(l1 / 2) * std::sinh(l2 / 2));
  return 0.5 * (k + std::sqrt(km2 * (k + 2.0)));
}

/// Generators S1, S2 of the Schottky group with funnel lengths l1, l2, l3.
inline std::array<Moebius, 2> schottky_generators(double l1, double l2, double l3) {
  const double a = solve_generator_param(l1, l2, l3);
  const double c1 = std::cosh(l1 / 2), s1 = std::sinh(l1 / 2);
  const double c2 = std::cosh(l2 / 2), s2 = std::sinh(l2 / 2);
  return {Moebius{c1, s1, s1, c1, 1, 0.0}, Moebius{c2, a * s2, s2 / a, c2, 1, 0.0}};
}

/// Four-symbol scheme S1, S2, S1^-1, S2^-1 with phi_{i,j} = S_j^-1 on the isometric circles.
inline IfsScheme build_bowen_series(double l1, double l2, double l3) {
  const auto [g1, g2] = schottky_generators(l1, l2, l3);
  IfsScheme s;
  s.kind = SchemeKind::bowen;
  s.symbol_count = 4;
  s.lengths = {l1, l2, l3};
  s.generator_param = solve_generator_param(l1, l2, l3);
  const std::array<Moebius, 4> gens{g1, g2, g1.inverse(), g2.inverse()};
  for (const auto& g : gens) s.disks.push_back({-g.d / g.c, 1.0 / std::abs(g.c)});
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (s.disks[i].right() >= s.disks[j].left() && s.disks[j].right() >= s.disks[i].left()) {
        throw Error(Errc::IsometricCirclesOverlap,
                    "isometric circles " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " intersect");
      }
    }
  }
  s.adjacency.assign(16, 0);
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      if (std::abs(i - j) == 2) continue;
      s.adjacency[(i - 1) * 4 + (j - 1)] = 1;
      s.edges.push_back({i, j, gens[(j + 1) % 4], 0.0, 0});  // S_j^-1 = S_{j+2}
    }
  }
  detail::finalize_edges(s);
  return s;
}

struct FlowRadii {
  std::array<double, 3> r{};
  int iterations = 0;
  double residual = 0.0;  // max relative residual of the trace equations
};

namespace detail {

struct RadiiSystem {
  Triple n;
  double ell;

  // residual_k = log(Q_k) - log 2 - (x_i + x_j)/2 - log cosh(n_k ell / 2)
  bool eval(const std::array<double, 3>& x, std::array<double, 3>& g, std::array<std::array<double, 3>, 3>* jac) const {
    static constexpr std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {1, 2}, {0, 2}}};
    std::array<double, 3> r, m;
    for (int j = 0; j < 3; ++j) {
      r[j] = std::exp(x[j]);
      m[j] = 2.0 * j + r[j];
    }
    for (int k = 0; k < 3; ++k) {
      const auto [i, j] = pairs[k];
      const double dm = m[i] - m[j];
      const double q = dm * dm - r[i] - r[j];
      if (!(q > 0.0)) return false;
      g[k] = std::log(q) - std::numbers::ln2 - 0.5 * (x[i] + x[j]) - log_cosh(n[k] * ell / 2.0);
      if (jac) {
        auto& row = (*jac)[k];
        row = {0.0, 0.0, 0.0};
        row[i] = (2.0 * dm - 1.0) * r[i] / q - 0.5;
        row[j] = (-2.0 * dm - 1.0) * r[j] / q - 0.5;
      }
    }
    return true;
  }
};

inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
  for (int c = 0; c < 3; ++c) {
    int p = c;
    for (int r = c + 1; r < 3; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    for (int r = c + 1; r < 3; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double v = b[r];
    for (int k = r + 1; k < 3; ++k) v -= a[r][k] * x[k];
    x[r] = v / a[r][r];
  }
  return x;
}

inline double max_abs(const std::array<double, 3>& v) {
  return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

}  // namespace detail

/// Radii of the reflections R_1, R_2, R_3 with left disk endpoints pinned at 0, 2, 4
/// (m_j = 2(j-1) + r_j) such that l(R1R2) = n1 ell, l(R2R3) = n2 ell, l(R1R3) = n3 ell.
/// Damped Newton in log-radius coordinates from the large-ell asymptotics.
inline FlowRadii solve_flow_radii(const Triple& n, double ell) {
  detail::require_positive_triple(n);
  if (!(ell > 0.0)) throw Error(Errc::NonpositiveLength, "ell must be > 0");
  const detail::RadiiSystem sys{n, ell};
  const std::array<double, 3> kap{0.5 * (n[0] + n[2] - n[1]), 0.5 * (n[0] + n[1] - n[2]),
                                   0.5 * (n[1] + n[2] - n[0])};
  std::array<double, 3> x{std::log(16.0) - kap[0] * ell, -kap[1] * ell, std::log(16.0) - kap[2] * ell};
  std::array<double, 3> g{};
  std::array<std::array<double, 3>, 3> jac{};
  if (!sys.eval(x, g, &jac)) throw Error(Errc::NewtonDivergence, "invalid initial guess");

  constexpr int kMaxIter = 100;
  constexpr double kTol = 1e-14;
  int it = 0;
  for (; it < kMaxIter && detail::max_abs(g) > kTol; ++it) {
    const auto step = detail::solve3(jac, {-g[0], -g[1], -g[2]});
    double t = 1.0;
    std::array<double, 3> xn{}, gn{};
    bool accepted = false;
    for (int half = 0; half < 40; ++half, t *= 0.5) {
      for (int j = 0; j < 3; ++j) xn[j] = x[j] + t * step[j];
      if (sys.eval(xn, gn, nullptr) && detail::max_abs(gn) < detail::max_abs(g)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    x = xn;
    sys.eval(x, g, &jac);
    if (t * detail::max_abs(step) < 1e-16) break;
  }
  FlowRadii out;
  for (int j = 0; j < 3; ++j) out.r[j] = std::exp(x[j]);
  out.iterations = it;
  out.residual = std::abs(std::expm1(detail::max_abs(g)));
  if (!(out.residual < 1e-12)) {
    std::ostringstream os;
    os << "radii solve stalled after " << it << " iterations, last iterate r = (" << out.r[0] << ", " << out.r[1]
       << ", " << out.r[2] << "), residual " << out.residual;
    throw Error(Errc::NewtonDivergence, os.str());
  }
  return out;
}

struct ValidationReport {
  double min_disk_gap = 0.0;          // min over pairs of |m_i - m_j| - r_i - r_j
  double min_containment_margin = 0.0;  // min over edges and samples of r_j - |phi(u) - m_j|
  double min_image_gap = 0.0;         // min gap between images sharing a target disk
  std::optional<double> min_extended_gap;  // flow: min over j != i of |m_i - m_j| - r_E - r_i
  double contraction_theta = 0.0;     // sampled sup |phi_w'| over words of length 2
  std::optional<double> max_radius;   // flow: max r_j

  bool disks_disjoint() const { return min_disk_gap > 0.0; }
  bool images_contained() const { return min_containment_margin > 0.0; }
  bool images_disjoint() const { return min_image_gap > 0.0; }
  bool extended_disks_clear() const { return !min_extended_gap || *min_extended_gap > 0.0; }
  bool contracting() const { return contraction_theta < 1.0; }
  /// r_j < 0.5, the regime of the normalized family.
  bool small_radii() const { return !max_radius || *max_radius < 0.5; }
  /// Conditions for a well-defined holomorphic IFS.
  bool ifs_valid() const { return disks_disjoint() && images_contained() && images_disjoint() && contracting(); }
  bool all_pass() const { return ifs_valid() && extended_disks_clear() && small_radii(); }
};

namespace detail {

inline constexpr int kBoundarySamples = 64;

inline cplx boundary_point(const Disk& d, int k, int count) {
  const double t = 2.0 * std::numbers::pi * k / count;
  return d.center + d.radius * cplx(std::cos(t), std::sin(t));
}

/// phi_e(u) - center of the target disk for u = center + radius * dir on the
/// source boundary. Flow maps are a reflection u -> r / (u - m) + m composed with
/// a translation; evaluating r / (u - m) from center differences keeps full
/// relative accuracy for tiny disks far from the origin.
inline cplx image_offset(const IfsScheme& s, const Edge& e, cplx dir) {
  const Disk& src = s.disks[e.from - 1];
  const Disk& dst = s.disks[e.to - 1];
  if (s.kind == SchemeKind::flow && e.map.det == -1) {
    Moebius R = e.map;
    if (e.offset > 0) R = Moebius::translation(-e.offset) * R;
    if (e.offset < 0) R = R * Moebius::translation(-e.offset);
    if (R.c != 0.0) {
      const double c = R.c * std::exp(R.log_scale);
      const double m = R.a / R.c;
      const double r = 1.0 / (c * c);
      const double pre = e.offset < 0 ? e.offset : 0.0;
      const double post = e.offset > 0 ? e.offset : 0.0;
      double drift = m + post - dst.center;
      if (std::abs(drift) <= 1e-13 * std::max(1.0, std::abs(dst.center))) drift = 0.0;
      return r / ((src.center + pre - m) + src.radius * dir) + drift;
    }
  }
  return e.map.apply(src.center + src.radius * dir) - dst.center;
}

/// Image of the source disk in coordinates centered at the target disk.
inline Disk local_image_disk(const IfsScheme& s, const Edge& e) {
  const double p = image_offset(s, e, 1.0).real();
  const double q = image_offset(s, e, -1.0).real();
  return {0.5 * (p + q), 0.5 * std::abs(p - q)};
}

}  // namespace detail

inline ValidationReport validate_scheme(const IfsScheme& s) {
  ValidationReport rep;
  const int ns = s.symbol_count;
  rep.min_disk_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ns; ++i) {
    for (int j = i + 1; j < ns; ++j) {
      const double gap = std::abs(s.disks[i].center - s.disks[j].center) - s.disks[i].radius - s.disks[j].radius;
      rep.min_disk_gap = std::min(rep.min_disk_gap, gap);
    }
  }

  rep.min_containment_margin = std::numeric_limits<double>::infinity();
  for (const auto& e : s.edges) {
    const Disk& dst = s.disks[e.to - 1];
    for (int k = 0; k < detail::kBoundarySamples; ++k) {
      const double t = 2.0 * std::numbers::pi * k / detail::kBoundarySamples;
      const cplx v = detail::image_offset(s, e, cplx(std::cos(t), std::sin(t)));
      rep.min_containment_margin = std::min(rep.min_containment_margin, dst.radius - std::abs(v));
    }
  }

  rep.min_image_gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < s.edges.size(); ++a) {
    for (std::size_t b = a + 1; b < s.edges.size(); ++b) {
      if (s.edges[a].to != s.edges[b].to) continue;
      const Disk da = detail::local_image_disk(s, s.edges[a]);
      const Disk db = detail::local_image_disk(s, s.edges[b]);
      rep.min_image_gap = std::min(rep.min_image_gap, std::abs(da.center - db.center) - da.radius - db.radius);
    }
  }

  if (s.kind == SchemeKind::flow) {
    double gap = std::numeric_limits<double>::infinity();
    double rmax = 0.0;
    for (int j = 0; j < ns; ++j) {
      rmax = std::max(rmax, s.disks[j].radius);
      for (int i = 0; i < ns; ++i) {
        if (i == j) continue;
        gap = std::min(gap, std::abs(s.disks[i].center - s.disks[j].center) - s.extended_radius - s.disks[i].radius);
      }
    }
    rep.min_extended_gap = gap;
    rep.max_radius = rmax;
  }

  double theta = 0.0;
  for (const auto& e1 : s.edges) {
    for (const auto& e2 : s.edges) {
      if (e2.from != e1.to) continue;
      const Disk& src = s.disks[e1.from - 1];
      for (int k = 0; k < detail::kBoundarySamples; ++k) {
        const cplx u = detail::boundary_point(src, k, detail::kBoundarySamples);
        theta = std::max(theta, std::abs(e2.map.derivative(e1.map.apply(u)) * e1.map.derivative(u)));
      }
    }
  }
  rep.contraction_theta = theta;
  return rep;
}

inline constexpr double kFlowOffset = 6.0;
inline constexpr double kExtendedRadius = 1.2;

/// Six-symbol flow-adapted scheme for X_{n1 ell, n2 ell, n3 ell} with disk left
/// endpoints at 0, 2, 4 and their translates by 6.
inline IfsScheme build_flow_adapted(const Triple& n, double ell) {
  detail::require_positive_triple(n);
  FlowRadii radii;
  try {
    radii = solve_flow_radii(n, ell);
  } catch (const Error& e) {
    if (e.code() != Errc::NewtonDivergence) throw;
    throw Error(Errc::BelowLengthThreshold, std::string("no normalized radii: ") + e.what());
  }
  IfsScheme s;
  s.kind = SchemeKind::flow;
  s.symbol_count = 6;
  s.n = n;
  s.ell = ell;
  s.lengths = {n[0] * ell, n[1] * ell, n[2] * ell};
  s.kappa_twice = {n[0] + n[2] - n[1], n[0] + n[1] - n[2], n[1] + n[2] - n[0]};
  s.delta_offset = kFlowOffset;
  s.extended_radius = kExtendedRadius;
  std::array<double, 3> m{};
  std::array<Moebius, 3> refl;
  for (int j = 0; j < 3; ++j) {
    m[j] = 2.0 * j + radii.r[j];
    refl[j] = reflection_matrix(m[j], radii.r[j]);
  }
  for (int j = 0; j < 6; ++j) s.disks.push_back({m[j % 3] + (j >= 3 ? kFlowOffset : 0.0), radii.r[j % 3]});

  s.adjacency.assign(36, 0);
  const Moebius fwd = Moebius::translation(kFlowOffset), back = Moebius::translation(-kFlowOffset);
  for (int i = 1; i <= 6; ++i) {
    for (int j = 1; j <= 6; ++j) {
      const bool lower = i <= 3;
      if (lower == (j <= 3)) continue;
      const int ci = (i - 1) % 3 + 1, cj = (j - 1) % 3 + 1;
      if (ci == cj) continue;
      s.adjacency[(i - 1) * 6 + (j - 1)] = 1;
      Edge e;
      e.from = i;
      e.to = j;
      e.weight = n[detail::pair_funnel(ci, cj)];
      if (lower) {
        e.map = fwd * refl[cj - 1];
        e.offset = kFlowOffset;
      } else {
        e.map = refl[cj - 1] * back;
        e.offset = -kFlowOffset;
      }
      s.edges.push_back(e);
    }
  }
  detail::finalize_edges(s);

  const auto rep = validate_scheme(s);
  if (!rep.ifs_valid()) {
    std::ostringstream os;
    os << "scheme for ell = " << ell << " is not a valid disk system (disk gap " << rep.min_disk_gap
       << ", containment " << rep.min_containment_margin << ", image gap " << rep.min_image_gap << ")";
    throw Error(Errc::BelowLengthThreshold, os.str());
  }
  return s;
}

/// Rows of r_j(ell) e^{kappa_j ell}, j = 1..3, one row per ell.
inline std::vector<std::array<double, 3>> asymptotic_radii_table(const Triple& n, const std::vector<double>& ells) {
  detail::require_positive_triple(n);
  const std::array<double, 3> kap{0.5 * (n[0] + n[2] - n[1]), 0.5 * (n[0] + n[1] - n[2]),
                                   0.5 * (n[1] + n[2] - n[0])};
  std::vector<std::array<double, 3>> out;
  for (double ell : ells) {
    const auto r = solve_flow_radii(n, ell).r;
    out.push_back({r[0] * std::exp(kap[0] * ell), r[1] * std::exp(kap[1] * ell), r[2] * std::exp(kap[2] * ell)});
  }
  return out;
}

}  // namespace zetachain
