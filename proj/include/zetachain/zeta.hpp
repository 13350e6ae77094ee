#pragma once

// Cycle expansion of the generalized dynamical zeta function d_n(s, z).
//
// With a_m(s, z) = sum over closed words of length m of z^{n_w} e^{-s l_w} / (1 - e^{-l_w}),
// the Fredholm determinant expands as sum_N D^(N) with D^(0) = 1 and
// N D^(N) = -sum_{m=1..N} a_m D^(N-m). The multiplier at the fixed point of a
// closed word is exactly e^{-l_w}, so only (l_w, n_w, class size) enter.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "zetachain/error.hpp"
#include "zetachain/hypgeo.hpp"
#include "zetachain/schemes.hpp"
#include "zetachain/symdyn.hpp"

namespace zetachain {

inline constexpr int kDefaultFlowOrder = 14;
inline constexpr int kDefaultBowenOrder = 12;

inline int default_order(SchemeKind k) { return k == SchemeKind::flow ? kDefaultFlowOrder : kDefaultBowenOrder; }

namespace detail {

inline cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  cplx b = z;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

inline void check_order(const OrbitDatabase& db, int n) {
  if (n > db.n_max) {
    throw Error(Errc::OrderExceedsDatabase,
                "order " + std::to_string(n) + " exceeds database order " + std::to_string(db.n_max));
  }
}

struct TracePair {
  cplx value;
  cplx s_derivative;
};

/// Pairwise summation over records [lo, hi) in their stored order.
template <class Term>
TracePair pairwise_sum(const std::vector<OrbitRecord>& recs, std::size_t lo, std::size_t hi, const Term& term) {
  if (hi - lo <= 32) {
    TracePair acc{0.0, 0.0};
    for (std::size_t i = lo; i < hi; ++i) {
      const TracePair t = term(recs[i]);
      acc.value += t.value;
      acc.s_derivative += t.s_derivative;
    }
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  const TracePair l = pairwise_sum(recs, lo, mid, term);
  const TracePair r = pairwise_sum(recs, mid, hi, term);
  return {l.value + r.value, l.s_derivative + r.s_derivative};
}

inline TracePair trace_sum_with_derivative(const OrbitDatabase& db, int n, cplx s, cplx z) {
  check_order(db, n);
  if (n < 1) return {0.0, 0.0};
  const bool weighted = db.kind == SchemeKind::flow;
  const auto& recs = db.records[n];
  return pairwise_sum(recs, 0, recs.size(), [&](const OrbitRecord& r) -> TracePair {
    const double l = r.length;
    const cplx zn = weighted ? ipow(z, r.weight) : cplx(1.0);
    const cplx v = static_cast<double>(r.class_size) * zn * std::exp(-s * l) / (-std::expm1(-l));
    return {v, -l * v};
  });
}

}  // namespace detail

/// a_n(s, z): the closed-word trace sum of word length n.
inline cplx trace_sum(const OrbitDatabase& db, int n, cplx s, cplx z) {
  return detail::trace_sum_with_derivative(db, n, s, z).value;
}

struct CycleCoefficients {
  std::vector<cplx> value;         // D^(N), N = 0..n_max
  std::vector<cplx> s_derivative;  // d/ds D^(N)
  cplx s, z;
  int n_max = 0;
  SchemeKind kind = SchemeKind::bowen;
  /// max relative gap between recursion and partition formula over N <= 6
  double partition_discrepancy = 0.0;
};

/// D^(N) from the explicit sum over compositions (n_1..n_m) of N:
/// sum_m (-1)^m / m! prod_l a_{n_l} / n_l.
inline cplx partition_coefficient(const std::vector<cplx>& traces, int order) {
  cplx total = 0.0;
  std::vector<int> parts;
  auto rec = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      const int m = static_cast<int>(parts.size());
      cplx prod = (m % 2 == 0) ? 1.0 : -1.0;
      double fact = 1.0;
      for (int k = 2; k <= m; ++k) fact *= k;
      for (int p : parts) prod *= traces[p] / static_cast<double>(p);
      total += prod / fact;
      return;
    }
    for (int p = 1; p <= remaining; ++p) {
      parts.push_back(p);
      self(self, remaining - p);
      parts.pop_back();
    }
  };
  if (order == 0) return 1.0;
  rec(rec, order);
  return total;
}

inline CycleCoefficients cycle_coefficients(const OrbitDatabase& db, cplx s, cplx z, int n_max) {
  detail::check_order(db, n_max);
  CycleCoefficients cc;
  cc.s = s;
  cc.z = z;
  cc.n_max = n_max;
  cc.kind = db.kind;
  std::vector<cplx> a(n_max + 1, 0.0), da(n_max + 1, 0.0);
  for (int m = 1; m <= n_max; ++m) {
    const auto t = detail::trace_sum_with_derivative(db, m, s, z);
    a[m] = t.value;
    da[m] = t.s_derivative;
  }
  cc.value.assign(n_max + 1, 0.0);
  cc.s_derivative.assign(n_max + 1, 0.0);
  cc.value[0] = 1.0;
  for (int N = 1; N <= n_max; ++N) {
    cplx v = 0.0, dv = 0.0;
    for (int m = 1; m <= N; ++m) {
      v += a[m] * cc.value[N - m];
      dv += da[m] * cc.value[N - m] + a[m] * cc.s_derivative[N - m];
    }
    cc.value[N] = -v / static_cast<double>(N);
    cc.s_derivative[N] = -dv / static_cast<double>(N);
  }
  for (int N = 1; N <= std::min(n_max, 6); ++N) {
    const cplx p = partition_coefficient(a, N);
    const double scale = std::max(std::abs(p), std::abs(cc.value[N]));
    if (scale > 0.0) cc.partition_discrepancy = std::max(cc.partition_discrepancy, std::abs(p - cc.value[N]) / scale);
  }
  return cc;
}

struct ZetaValue {
  cplx value;
  cplx s_derivative;
  double last_term = 0.0;  // |D^(n_max)| + |D^(n_max - 1)|
  int order = 0;
};

inline ZetaValue evaluate(const OrbitDatabase& db, cplx s, cplx z, int n_max) {
  const auto cc = cycle_coefficients(db, s, z, n_max);
  ZetaValue out;
  out.order = n_max;
  for (int N = 0; N <= n_max; ++N) {
    out.value += cc.value[N];
    out.s_derivative += cc.s_derivative[N];
  }
  out.last_term = std::abs(cc.value[n_max]) + (n_max >= 1 ? std::abs(cc.value[n_max - 1]) : 0.0);
  return out;
}

inline ZetaValue evaluate(const OrbitDatabase& db, cplx s, cplx z) { return evaluate(db, s, z, db.n_max); }

/// Raises the order from `start` until the truncation indicator drops below
/// `tol` or the database is exhausted.
inline ZetaValue evaluate_adaptive(const OrbitDatabase& db, cplx s, cplx z, int start, double tol = 1e-10) {
  const int step = db.kind == SchemeKind::flow ? 2 : 1;
  int order = std::min(start, db.n_max);
  ZetaValue v = evaluate(db, s, z, order);
  while (v.last_term >= tol && order + step <= db.n_max) {
    order += step;
    v = evaluate(db, s, z, order);
  }
  return v;
}

/// Coefficients b_k(s) of the truncated zeta as a polynomial in z.
inline std::vector<cplx> z_polynomial(const OrbitDatabase& db, cplx s, int n_max) {
  if (db.kind != SchemeKind::flow) throw Error(Errc::WrongKind, "z-polynomial needs a flow-adapted database");
  detail::check_order(db, n_max);
  using Poly = std::vector<cplx>;
  auto mul_add = [](Poly& acc, const Poly& p, const Poly& q) {
    if (p.empty() || q.empty()) return;
    if (acc.size() < p.size() + q.size() - 1) acc.resize(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      for (std::size_t j = 0; j < q.size(); ++j) acc[i + j] += p[i] * q[j];
    }
  };
  std::vector<Poly> a(n_max + 1);
  for (int m = 1; m <= n_max; ++m) {
    for (const auto& r : db.records[m]) {
      if (a[m].size() <= static_cast<std::size_t>(r.weight)) a[m].resize(r.weight + 1, 0.0);
      a[m][r.weight] += static_cast<double>(r.class_size) * std::exp(-s * r.length) / (-std::expm1(-r.length));
    }
  }
  std::vector<Poly> D(n_max + 1);
  D[0] = {1.0};
  for (int N = 1; N <= n_max; ++N) {
    Poly acc;
    for (int m = 1; m <= N; ++m) mul_add(acc, a[m], D[N - m]);
    for (auto& c : acc) c /= -static_cast<double>(N);
    D[N] = std::move(acc);
  }
  Poly b;
  for (const auto& d : D) {
    if (b.size() < d.size()) b.resize(d.size(), 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) b[k] += d[k];
  }
  return b;
}

/// Truncated Euler product over prime classes with l_w <= l_cut and k <= k_max.
/// Only meaningful where the product converges absolutely.
inline cplx euler_product(const OrbitDatabase& db, cplx s, cplx z, int k_max,
                          double l_cut = std::numeric_limits<double>::infinity()) {
  if (s.real() < 1.5) throw Error(Errc::ConvergenceRegionViolated, "Euler product needs Re(s) >= 1.5");
  const bool weighted = db.kind == SchemeKind::flow;
  cplx log_prod = 0.0;
  for (const auto& bucket : db.records) {
    for (const auto& r : bucket) {
      if (!r.prime || r.length > l_cut) continue;
      const cplx zn = weighted ? detail::ipow(z, r.weight) : cplx(1.0);
      for (int k = 0; k <= k_max; ++k) log_prod += std::log(1.0 - zn * std::exp(-(s + static_cast<double>(k)) * r.length));
    }
  }
  return std::exp(log_prod);
}

struct TailBound {
  double r = 0.0;  // max solved radius
  double K = 0.0;
  std::vector<int> orders;
  std::vector<double> log_bound;  // natural log of the per-order bound
  std::vector<double> bound;
  bool extended_disks_clear = false;
};

inline constexpr int kTailBoundSamples = 720;
inline constexpr double kTailBoundSafety = 1.01;

/// k^{k/2} K^k sum_{m_1<..<m_k} r^{floor(m_1/6)+..}, with the inner sum replaced by
/// rt^{-5k} rt^{k(k-1)/2} / prod_{i<=k} (1 - rt^i), rt = r^{1/6}.
inline TailBound rigorous_tail_bound(const IfsScheme& sch, cplx s, cplx z, const std::vector<int>& orders) {
  if (sch.kind != SchemeKind::flow) throw Error(Errc::WrongKind, "tail bound needs a flow-adapted scheme");
  TailBound tb;
  for (const auto& d : sch.disks) tb.r = std::max(tb.r, d.radius);
  double sup = 0.0;
  for (const auto& e : sch.edges) {
    const Disk ext{sch.disks[e.from - 1].center, sch.extended_radius};
    const Moebius& m = e.map;
    // branch: (c u + d) * sign is in the right half plane on E_j
    const double sign = (m.c * ext.center + m.d) < 0 ? -1.0 : 1.0;
    const double logz = std::log(std::abs(z));
    for (int k = 0; k < kTailBoundSamples; ++k) {
      const cplx u = detail::boundary_point(ext, k, kTailBoundSamples);
      const cplx q = (m.c * u + m.d) * sign;
      const cplx log_neg_deriv = -2.0 * std::log(q) - 2.0 * m.log_scale;
      const double log_abs = e.weight * logz + (s * log_neg_deriv).real();
      sup = std::max(sup, std::exp(log_abs));
    }
  }
  tb.K = kTailBoundSafety * sup / (2.0 * std::numbers::pi);
  const double rt = std::pow(tb.r, 1.0 / 6.0);
  const double log_rt = std::log(rt);
  for (int k : orders) {
    double lb = 0.5 * k * std::log(static_cast<double>(k)) + k * std::log(tb.K) + (-5.0 * k + 0.5 * k * (k - 1)) * log_rt;
    for (int i = 1; i <= k; ++i) lb -= std::log1p(-std::pow(rt, i));
    tb.orders.push_back(k);
    tb.log_bound.push_back(lb);
    tb.bound.push_back(std::exp(lb));
  }
  tb.extended_disks_clear = validate_scheme(sch).extended_disks_clear();
  return tb;
}

}  // namespace zetachain
