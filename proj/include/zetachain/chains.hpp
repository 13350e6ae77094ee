#pragma once

// The chain polynomial P_{n1,n2,n3}, its roots, the s-plane chain lattice, and
// comparisons of rescaled resonances and zeta values against it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "zetachain/error.hpp"
#include "zetachain/parallel.hpp"
#include "zetachain/roots.hpp"
#include "zetachain/schemes.hpp"
#include "zetachain/zeta.hpp"

namespace zetachain {

struct ChainPolynomial {
  Triple n{1, 1, 1};
  std::vector<long long> coeffs;  // index = degree

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  cplx operator()(cplx x) const {
    cplx r = 0.0;
    for (int k = degree(); k >= 0; --k) r = r * x + static_cast<double>(coeffs[k]);
    return r;
  }

  /// k-th derivative at x.
  cplx derivative(cplx x, int k = 1) const {
    cplx r = 0.0;
    for (int j = degree(); j >= k; --j) {
      double f = 1.0;
      for (int t = 0; t < k; ++t) f *= j - t;
      r = r * x + f * static_cast<double>(coeffs[j]);
    }
    return r;
  }
};

/// 1 - 2 sum x^{n_i} + sum x^{2 n_i} + 2 sum_{i<j} x^{n_i + n_j} - 4 x^{n1+n2+n3}.
inline ChainPolynomial build_polynomial(const Triple& n) {
  for (int v : n) {
    if (v <= 0) throw Error(Errc::NonpositiveEntry, "polynomial triple entries must be positive");
  }
  ChainPolynomial p;
  p.n = n;
  const int deg = n[0] + n[1] + n[2];
  const int top = std::max(deg, 2 * std::max({n[0], n[1], n[2]}));
  p.coeffs.assign(top + 1, 0);
  p.coeffs[0] += 1;
  for (int i = 0; i < 3; ++i) {
    p.coeffs[n[i]] -= 2;
    p.coeffs[2 * n[i]] += 1;
    for (int j = i + 1; j < 3; ++j) p.coeffs[n[i] + n[j]] += 2;
  }
  p.coeffs[deg] -= 4;
  while (p.coeffs.size() > 1 && p.coeffs.back() == 0) p.coeffs.pop_back();
  return p;
}

struct PolyRoot {
  cplx z;
  int multiplicity = 1;
};

namespace detail {

using BigInt = boost::multiprecision::cpp_int;
using IntPoly = std::vector<BigInt>;  // index = degree, trimmed

inline void trim(IntPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

inline IntPoly primitive(IntPoly p) {
  trim(p);
  BigInt g = 0;
  for (const auto& c : p) g = boost::multiprecision::gcd(g, c);
  if (g > 1) {
    for (auto& c : p) c /= g;
  }
  if (p.back() < 0) {
    for (auto& c : p) c = -c;
  }
  return p;
}

inline IntPoly derivative(const IntPoly& p) {
  IntPoly d;
  for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * static_cast<long>(k));
  if (d.empty()) d.push_back(0);
  return d;
}

/// Pseudo-remainder of a by b.
inline IntPoly prem(IntPoly a, const IntPoly& b) {
  const std::size_t db = b.size() - 1;
  while (a.size() - 1 >= db && !(a.size() == 1 && a[0] == 0)) {
    const BigInt lead = a.back();
    const std::size_t shift = a.size() - 1 - db;
    for (auto& c : a) c *= b.back();
    for (std::size_t k = 0; k <= db; ++k) a[k + shift] -= lead * b[k];
    a.pop_back();
    trim(a);
    if (a.empty()) a.push_back(0);
    if (db == 0) {
      a.assign(1, 0);
      break;
    }
  }
  return a;
}

inline bool is_zero(const IntPoly& p) { return p.size() == 1 && p[0] == 0; }

inline IntPoly gcd(IntPoly a, IntPoly b) {
  a = primitive(a);
  b = primitive(b);
  while (!is_zero(b)) {
    IntPoly r = prem(a, b);
    a = b;
    b = is_zero(r) ? r : primitive(r);
  }
  return primitive(a);
}

/// Exact quotient a / b in Z[x]; b must be primitive and divide a.
inline IntPoly divide(IntPoly a, const IntPoly& b) {
  const std::size_t db = b.size() - 1;
  if (a.size() - 1 < db) return {1};
  IntPoly q(a.size() - db, 0);
  for (std::size_t k = a.size(); k-- > db;) {
    const std::size_t shift = k - db;
    if (a[k] % b.back() != 0) throw Error(Errc::IterationStalled, "inexact polynomial division");
    const BigInt f = a[k] / b.back();
    q[shift] = f;
    for (std::size_t j = 0; j <= db; ++j) a[j + shift] -= f * b[j];
  }
  trim(q);
  return q;
}

/// Yun's square-free decomposition: returns factors[i] with multiplicity i + 1.
inline std::vector<IntPoly> squarefree_factors(const IntPoly& p) {
  std::vector<IntPoly> out;
  IntPoly a = primitive(p);
  IntPoly d = derivative(a);
  IntPoly g = gcd(a, d);
  IntPoly b = divide(a, g);
  IntPoly c = divide(d, g);
  // c - b'
  auto sub = [](IntPoly x, const IntPoly& y) {
    if (x.size() < y.size()) x.resize(y.size(), 0);
    for (std::size_t k = 0; k < y.size(); ++k) x[k] -= y[k];
    trim(x);
    return x;
  };
  IntPoly e = sub(c, derivative(b));
  while (b.size() > 1) {
    IntPoly f = is_zero(e) ? b : gcd(b, e);
    out.push_back(f);
    IntPoly nb = divide(b, f);
    if (is_zero(e)) {
      c = IntPoly{0};
    } else {
      c = divide(e, f);
    }
    b = nb;
    e = sub(c, derivative(b));
  }
  return out;
}

inline cplx horner(const std::vector<double>& c, cplx x) {
  cplx r = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
  return r;
}

inline cplx horner_deriv(const std::vector<double>& c, cplx x) {
  cplx r = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) r = r * x + static_cast<double>(k) * c[k];
  return r;
}

/// Aberth iteration for the roots of a polynomial with simple roots.
inline std::vector<cplx> aberth(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  if (n == 1) return {cplx(-c[0] / c[1], 0.0)};
  double radius = 0.0;
  for (int k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(c[k] / c[n]), 1.0 / (n - k)));
  radius = std::max(radius, 1e-3);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double p0 = attempt == 0 ? 0.4 : phase(rng);
    std::vector<cplx> z(n);
    for (int k = 0; k < n; ++k) z[k] = std::polar(radius, p0 + 2.0 * std::numbers::pi * k / n);
    for (int it = 0; it < 2000; ++it) {
      double max_step = 0.0;
      for (int k = 0; k < n; ++k) {
        const cplx ratio = horner(c, z[k]) / horner_deriv(c, z[k]);
        cplx sum = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j != k) sum += 1.0 / (z[k] - z[j]);
        }
        const cplx w = ratio / (1.0 - ratio * sum);
        if (std::isfinite(std::abs(w))) {
          z[k] -= w;
          max_step = std::max(max_step, std::abs(w) / std::max(1.0, std::abs(z[k])));
        }
      }
      if (max_step < 1e-15) {
        for (auto& x : z) {
          for (int p = 0; p < 3; ++p) {
            const cplx d = horner_deriv(c, x);
            if (std::abs(d) == 0.0) break;
            x -= horner(c, x) / d;
          }
        }
        return z;
      }
    }
  }
  throw Error(Errc::IterationStalled, "simultaneous root iteration did not converge");
}

}  // namespace detail

/// All complex roots with multiplicities. Repeated factors are split off exactly
/// (square-free decomposition over the integers) before the numerical iteration,
/// so repeated roots come out at full precision.
inline std::vector<PolyRoot> polynomial_roots(const ChainPolynomial& p, double cluster = 1e-8) {
  detail::IntPoly ip;
  for (long long c : p.coeffs) ip.emplace_back(c);
  detail::trim(ip);
  const auto factors = detail::squarefree_factors(ip);
  std::vector<PolyRoot> found;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].size() <= 1) continue;
    std::vector<double> c;
    for (const auto& v : factors[i]) c.push_back(v.convert_to<double>());
    for (const cplx& z : detail::aberth(c)) {
      bool merged = false;
      for (auto& r : found) {
        if (std::abs(r.z - z) < cluster) {
          r.multiplicity += static_cast<int>(i) + 1;
          merged = true;
          break;
        }
      }
      if (!merged) found.push_back({z, static_cast<int>(i) + 1});
    }
  }
  // exact conjugate symmetry and real roots
  for (auto& r : found) {
    if (std::abs(r.z.imag()) < 1e-14 * std::max(1.0, std::abs(r.z))) r.z.imag(0.0);
  }
  std::sort(found.begin(), found.end(), [](const PolyRoot& a, const PolyRoot& b) {
    return std::make_pair(a.z.real(), a.z.imag()) < std::make_pair(b.z.real(), b.z.imag());
  });
  return found;
}

/// Number of derivatives of p vanishing at z (relative to their scale), i.e. the
/// numerical root order.
inline int vanishing_order(const ChainPolynomial& p, cplx z, double tol = 1e-9) {
  int k = 0;
  while (k < p.degree()) {
    double scale = 0.0;
    for (int j = k; j <= p.degree(); ++j) {
      double f = 1.0;
      for (int t = 0; t < k; ++t) f *= j - t;
      scale += f * std::abs(static_cast<double>(p.coeffs[j])) * std::pow(std::abs(z), j - k);
    }
    if (std::abs(p.derivative(z, k)) > tol * scale) break;
    ++k;
  }
  return k;
}

struct ChainPoint {
  cplx s;
  int multiplicity = 1;
  int k = 0;  // 2 pi i k shift from the principal branch
  cplx root;
};

struct ChainSet {
  std::vector<PolyRoot> roots;
  std::vector<ChainPoint> points;
  Window window;

  int count() const {
    int c = 0;
    for (const auto& p : points) c += p.multiplicity;
    return c;
  }
};

/// s = -Log z_m + 2 pi i k inside w for every root z_m.
inline ChainSet chain_points(const std::vector<PolyRoot>& roots, const Window& w) {
  require_valid(w);
  ChainSet cs;
  cs.roots = roots;
  cs.window = w;
  const double two_pi = 2.0 * std::numbers::pi;
  for (const auto& r : roots) {
    const cplx s0 = -std::log(r.z);
    if (s0.real() < w.re_min || s0.real() > w.re_max) continue;
    const int k_lo = static_cast<int>(std::ceil((w.im_min - s0.imag()) / two_pi));
    const int k_hi = static_cast<int>(std::floor((w.im_max - s0.imag()) / two_pi));
    for (int k = k_lo; k <= k_hi; ++k) {
      const cplx s(s0.real(), s0.imag() + two_pi * k);
      if (w.contains(s)) cs.points.push_back({s, r.multiplicity, k, r.z});
    }
  }
  std::sort(cs.points.begin(), cs.points.end(), [](const ChainPoint& a, const ChainPoint& b) {
    return std::make_pair(a.s.real(), a.s.imag()) < std::make_pair(b.s.real(), b.s.imag());
  });
  return cs;
}

inline ChainSet chain_points(const ChainPolynomial& p, const Window& w) { return chain_points(polynomial_roots(p), w); }

enum class Region { main, near_zero_chain };

inline std::string to_string(Region r) { return r == Region::main ? "main" : "near_zero_chain"; }

struct MatchRow {
  cplx resonance;  // rescaled
  std::optional<cplx> match;
  double dist = std::numeric_limits<double>::infinity();
  Region region = Region::main;
};

struct MatchReport {
  std::vector<MatchRow> rows;
  std::vector<ChainPoint> unmatched_chain;  // one entry per missing multiplicity unit
  int resonance_count = 0;                  // #(U ∩ rescaled Res)
  int chain_count = 0;                      // #(U ∩ N) with multiplicity
  int main_resonance_count = 0;
  int main_chain_count = 0;
  int unmatched_resonances = 0;
  double max_main_distance = 0.0;
  double near_zero_band = 0.0;
};

inline constexpr double kMatchCutoff = 0.1;
inline constexpr double kBoundaryClearance = 1e-6;

/// Greedy nearest matching of rescaled resonances (x ell) against the chain
/// points of p in the rescaled window U.
inline MatchReport compare_rescaled(const ResonanceSet& res, double ell, const ChainPolynomial& p, const Window& U,
                                    double cutoff = kMatchCutoff) {
  require_valid(U);
  const Window expect = U.scaled(1.0 / ell);
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  if (!close(res.window.re_min, expect.re_min) || !close(res.window.re_max, expect.re_max) ||
      !close(res.window.im_min, expect.im_min) || !close(res.window.im_max, expect.im_max)) {
    throw Error(Errc::WindowMismatch, "resonance window is not U / ell");
  }
  const auto roots = polynomial_roots(p);
  const ChainSet cs = chain_points(roots, U);
  // boundary clearance of the chain lattice (points just outside count too)
  {
    Window wide{U.re_min - 1.0, U.re_max + 1.0, U.im_min - 7.0, U.im_max + 7.0};
    for (const auto& pt : chain_points(roots, wide).points) {
      const bool in = U.contains(pt.s);
      const double d = U.boundary_distance(pt.s);
      if ((in && d < kBoundaryClearance) || (!in && d < kBoundaryClearance)) {
        throw Error(Errc::BoundaryTouchesChain, "window boundary passes within 1e-6 of a chain point");
      }
    }
  }
  MatchReport rep;
  double band = 0.5;
  for (const auto& r : roots) {
    const double re = -std::log(std::abs(r.z));
    if (std::abs(re) > 1e-9) band = std::min(band, 0.5 * std::abs(re));
  }
  rep.near_zero_band = band;
  auto region_of = [&](cplx s) { return std::abs(s.real()) < band ? Region::near_zero_chain : Region::main; };

  std::vector<cplx> scaled;
  // a zero of multiplicity m occupies m rows
  for (const auto& e : res.entries) scaled.insert(scaled.end(), std::max(1, e.multiplicity), e.s * ell);
  rep.resonance_count = static_cast<int>(scaled.size());
  rep.chain_count = cs.count();
  std::vector<int> capacity;
  for (const auto& pt : cs.points) {
    capacity.push_back(pt.multiplicity);
    if (region_of(pt.s) == Region::main) rep.main_chain_count += pt.multiplicity;
  }
  struct Pair {
    double d;
    std::size_t r, c;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    for (std::size_t j = 0; j < cs.points.size(); ++j) {
      const double d = std::abs(scaled[i] - cs.points[j].s);
      if (d < cutoff) pairs.push_back({d, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [&](const Pair& a, const Pair& b) {
    return std::make_tuple(a.d, scaled[a.r].real(), scaled[a.r].imag()) <
           std::make_tuple(b.d, scaled[b.r].real(), scaled[b.r].imag());
  });
  rep.rows.resize(scaled.size());
  std::vector<bool> used(scaled.size(), false);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    rep.rows[i].resonance = scaled[i];
    rep.rows[i].region = region_of(scaled[i]);
  }
  for (const auto& pr : pairs) {
    if (used[pr.r] || capacity[pr.c] == 0) continue;
    used[pr.r] = true;
    --capacity[pr.c];
    rep.rows[pr.r].match = cs.points[pr.c].s;
    rep.rows[pr.r].dist = pr.d;
  }
  for (const auto& row : rep.rows) {
    if (row.region == Region::main) {
      ++rep.main_resonance_count;
      if (row.match) rep.max_main_distance = std::max(rep.max_main_distance, row.dist);
    }
    if (!row.match) ++rep.unmatched_resonances;
  }
  for (std::size_t j = 0; j < cs.points.size(); ++j) {
    for (int k = 0; k < capacity[j]; ++k) rep.unmatched_chain.push_back(cs.points[j]);
  }
  return rep;
}

/// max over an nx x ny grid on s_grid and the given z of |d(s / ell, z) - P(z e^{-s})|.
inline double theorem3_supnorm(const OrbitDatabase& db, double ell, const ChainPolynomial& p, const Window& s_grid,
                               const std::vector<cplx>& z_values, int order = -1, int nx = 41, int ny = 41,
                               unsigned threads = default_thread_count()) {
  require_valid(s_grid);
  if (db.kind != SchemeKind::flow) throw Error(Errc::WrongKind, "theorem 3 check needs a flow-adapted database");
  if (order < 0) order = std::min(db.n_max, default_order(db.kind));
  std::vector<double> row_max(ny, 0.0);
  parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t j) {
    const double im = s_grid.im_min + (s_grid.im_max - s_grid.im_min) * static_cast<double>(j) / (ny - 1);
    double m = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double re = s_grid.re_min + (s_grid.re_max - s_grid.re_min) * static_cast<double>(i) / (nx - 1);
      const cplx s(re, im);
      for (const cplx& z : z_values) {
        const cplx d = evaluate(db, s / ell, z, order).value;
        m = std::max(m, std::abs(d - p(z * std::exp(-s))));
      }
    }
    row_max[j] = m;
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

}  // namespace zetachain
