#pragma once

// Zeros of the truncated zeta in rectangles of the s-plane: Newton from a seed
// grid, argument-principle counts on circles, and the leading real zero.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <limits>
#include <optional>
#include <vector>

#include "zetachain/error.hpp"
#include "zetachain/parallel.hpp"
#include "zetachain/symdyn.hpp"
#include "zetachain/zeta.hpp"

namespace zetachain {

struct Window {
  double re_min = 0.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;

  bool valid() const { return re_min < re_max && im_min < im_max; }
  bool contains(cplx s) const {
    return s.real() >= re_min && s.real() <= re_max && s.imag() >= im_min && s.imag() <= im_max;
  }
  Window scaled(double f) const { return {re_min * f, re_max * f, im_min * f, im_max * f}; }
  /// Distance from s to the boundary of the rectangle.
  double boundary_distance(cplx s) const {
    const double dx = std::max({re_min - s.real(), s.real() - re_max, 0.0});
    const double dy = std::max({im_min - s.imag(), s.imag() - im_max, 0.0});
    if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
    return std::min({s.real() - re_min, re_max - s.real(), s.imag() - im_min, im_max - s.imag()});
  }
};

inline void require_valid(const Window& w) {
  if (!w.valid()) throw Error(Errc::UsageError, "window needs re_min < re_max and im_min < im_max");
}

/// Zeta restricted to one z value and one truncation order.
struct ZetaFunction {
  const OrbitDatabase* db;
  cplx z = 1.0;
  int order = 0;

  ZetaFunction(const OrbitDatabase& d, cplx zv = 1.0, int ord = -1)
      : db(&d), z(zv), order(ord < 0 ? std::min(d.n_max, default_order(d.kind)) : ord) {}

  ZetaValue operator()(cplx s) const { return evaluate(*db, s, z, order); }
};

struct RootOptions {
  double h = 0.0;  // seed spacing; 0 selects min(0.1, 0.5 / ell)
  int max_iter = 50;
  double step_tol = 1e-12;
  double accept_tol = 1e-10;
  double dedupe = 1e-8;
  bool verify = true;
  double verify_radius = 1e-4;
  unsigned threads = default_thread_count();
};

struct Resonance {
  cplx s;
  double residual = 0.0;
  int newton_iters = 0;
  bool verified = false;
  bool possibly_topological = false;  // near a negative integer
  int multiplicity = 1;               // contour count at the verification radius
};

struct ResonanceSet {
  std::vector<Resonance> entries;
  Window window;
  RootOptions options;
  int order = 0;
  cplx z = 1.0;
  int seeds = 0;
  int seeds_derivative_vanished = 0;
};

namespace detail {

struct NewtonResult {
  cplx s;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
  bool stalled = false;  // steps stopped shrinking at the noise floor (clustered zeros)
  bool derivative_vanished = false;
};

inline NewtonResult newton(const ZetaFunction& F, cplx s, int max_iter, double step_tol) {
  constexpr int kStallWindow = 8;
  NewtonResult r;
  cplx best = s;
  double best_res = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const ZetaValue v = F(s);
    if (!std::isfinite(std::abs(v.value)) || !std::isfinite(std::abs(v.s_derivative))) return r;
    if (std::abs(v.value) < best_res) {
      best_res = std::abs(v.value);
      best = s;
      since_best = 0;
    } else if (++since_best >= kStallWindow) {
      r.stalled = true;
      break;
    }
    if (std::abs(v.s_derivative) == 0.0) {
      r.derivative_vanished = true;
      return r;
    }
    const cplx step = v.value / v.s_derivative;
    s -= step;
    r.iters = it;
    if (!std::isfinite(std::abs(s))) return r;
    if (std::abs(step) < step_tol * std::max(1.0, std::abs(s))) {
      r.converged = true;
      break;
    }
  }
  if (!r.converged) {
    r.stalled = true;
    r.s = best;
    r.residual = best_res;
    return r;
  }
  r.s = s;
  r.residual = std::abs(F(s).value);
  return r;
}

inline bool near_negative_integer(cplx s) {
  const double k = std::round(s.real());
  return k <= 0.0 && std::abs(s - cplx(k, 0.0)) < 1e-6;
}

}  // namespace detail

/// (1 / 2 pi i) * contour integral of F'/F over |s - center| = radius.
inline int count_zeros_contour(const ZetaFunction& F, cplx center, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::UsageError, "contour radius must be > 0");
  constexpr int kStart = 256;
  constexpr int kMaxNodes = 1 << 16;
  std::vector<cplx> ratio;  // F'/F * (s - c) at the current nodes
  double min_abs = std::numeric_limits<double>::infinity();
  auto node = [&](int k, int n) {
    const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    const ZetaValue v = F(center + radius * e);
    min_abs = std::min(min_abs, std::abs(v.value));
    return v.s_derivative / v.value * (radius * e);
  };
  int n = kStart;
  ratio.resize(n);
  for (int k = 0; k < n; ++k) ratio[k] = node(k, n);
  if (min_abs <= 1e-8) throw Error(Errc::ContourTooCloseToZero, "zeta nearly vanishes on the contour");
  auto integral = [&] {
    cplx sum = 0.0;
    for (const auto& r : ratio) sum += r;
    return (sum / static_cast<double>(ratio.size())).real();
  };
  double prev = integral();
  while (n < kMaxNodes) {
    std::vector<cplx> next(2 * n);
    for (int k = 0; k < n; ++k) {
      next[2 * k] = ratio[k];
      next[2 * k + 1] = node(2 * k + 1, 2 * n);
    }
    if (min_abs <= 1e-8) throw Error(Errc::ContourTooCloseToZero, "zeta nearly vanishes on the contour");
    ratio.swap(next);
    n *= 2;
    const double cur = integral();
    if (std::round(cur) == std::round(prev) && std::abs(cur - std::round(cur)) < 0.05) {
      return std::max(0, static_cast<int>(std::round(cur)));
    }
    prev = cur;
  }
  throw Error(Errc::NonIntegerResult, "argument-principle quadrature did not settle");
}

inline ResonanceSet find_resonances(const ZetaFunction& F, const Window& w, const RootOptions& opts = {}) {
  require_valid(w);
  ResonanceSet out;
  out.window = w;
  out.options = opts;
  out.order = F.order;
  out.z = F.z;
  double h = opts.h;
  if (!(h > 0.0)) h = F.db->ell > 0.0 ? std::min(0.1, 0.5 / F.db->ell) : 0.1;
  out.options.h = h;
  const double margin = 2.0 * h;
  const int nx = static_cast<int>(std::floor((w.re_max - w.re_min + 2.0 * margin) / h)) + 1;
  const int ny = static_cast<int>(std::floor((w.im_max - w.im_min + 2.0 * margin) / h)) + 1;
  std::vector<cplx> seeds;
  seeds.reserve(static_cast<std::size_t>(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) seeds.emplace_back(w.re_min - margin + i * h, w.im_min - margin + j * h);
  }
  out.seeds = static_cast<int>(seeds.size());
  std::vector<detail::NewtonResult> results(seeds.size());
  parallel_for(seeds.size(), opts.threads, [&](std::size_t k) {
    results[k] = detail::newton(F, seeds[k], opts.max_iter, opts.step_tol);
  });

  std::vector<Resonance> cand;
  for (const auto& r : results) {
    if (r.derivative_vanished) ++out.seeds_derivative_vanished;
    if (!(r.converged || r.stalled) || !(r.residual < opts.accept_tol) || !w.contains(r.s)) continue;
    cand.push_back({r.s, r.residual, r.iters, false, detail::near_negative_integer(r.s)});
  }
  auto by_position = [](const Resonance& a, const Resonance& b) {
    return std::make_pair(a.s.real(), a.s.imag()) < std::make_pair(b.s.real(), b.s.imag());
  };
  auto dedupe = [&](std::vector<Resonance>& v) {
    std::sort(v.begin(), v.end(), by_position);
    std::vector<Resonance> kept;
    for (const auto& c : v) {
      bool dup = false;
      for (auto& k : kept) {
        if (std::abs(k.s - c.s) < opts.dedupe) {
          if (c.residual < k.residual) k = c;
          dup = true;
          break;
        }
      }
      if (!dup) kept.push_back(c);
    }
    v.swap(kept);
  };
  dedupe(cand);

  // conjugate closure
  std::vector<Resonance> extra;
  for (const auto& c : cand) {
    const cplx cs = std::conj(c.s);
    if (!w.contains(cs)) continue;
    const bool present = std::any_of(cand.begin(), cand.end(),
                                     [&](const Resonance& o) { return std::abs(o.s - cs) < opts.dedupe; });
    if (present) continue;
    const auto r = detail::newton(F, cs, opts.max_iter, opts.step_tol);
    if ((r.converged || r.stalled) && r.residual < opts.accept_tol && std::abs(r.s - cs) < opts.dedupe) {
      extra.push_back({r.s, r.residual, r.iters, false, detail::near_negative_integer(r.s)});
    } else {
      extra.push_back({cs, std::abs(F(cs).value), c.newton_iters, false, c.possibly_topological});
    }
  }
  cand.insert(cand.end(), extra.begin(), extra.end());
  dedupe(cand);

  if (opts.verify) {
    // a multiple zero leaves a cloud of stalled Newton endpoints; keep the best
    // one and let the contour count carry the multiplicity
    std::vector<Resonance> by_residual = cand;
    std::stable_sort(by_residual.begin(), by_residual.end(),
                     [](const Resonance& a, const Resonance& b) { return a.residual < b.residual; });
    std::vector<Resonance> kept;
    for (const auto& c : by_residual) {
      const bool absorbed = std::any_of(kept.begin(), kept.end(), [&](const Resonance& k) {
        return std::abs(k.s - c.s) < 0.5 * opts.verify_radius;
      });
      if (!absorbed) kept.push_back(c);
    }
    for (const auto& up : kept) {
      if (up.s.imag() <= 0.0) continue;
      for (auto& down : kept) {
        if (down.s.imag() < 0.0 && std::abs(down.s - std::conj(up.s)) < 0.5 * opts.verify_radius) {
          down.s = std::conj(up.s);
          down.residual = std::abs(F(down.s).value);
        }
      }
    }
    std::sort(kept.begin(), kept.end(), by_position);
    cand.swap(kept);
    parallel_for(cand.size(), opts.threads, [&](std::size_t k) {
      try {
        cand[k].multiplicity = count_zeros_contour(F, cand[k].s, opts.verify_radius);
        cand[k].verified = cand[k].multiplicity >= 1;
      } catch (const Error&) {
        cand[k].verified = false;
      }
    });
  }
  out.entries = std::move(cand);
  return out;
}

/// Largest real zero in (0, 1], by a downward sign-change scan, bisection and a Newton polish.
inline double find_delta(const ZetaFunction& F, double step = 1e-3) {
  auto f = [&](double x) { return F(cplx(x, 0.0)).value.real(); };
  double hi = 1.0;
  double f_hi = f(hi);
  double lo = hi;
  double f_lo = f_hi;
  bool found = false;
  while (hi > step * 0.5) {
    lo = std::max(hi - step, 1e-9);
    f_lo = f(lo);
    if ((f_lo <= 0.0) != (f_hi <= 0.0) || f_lo == 0.0) {
      found = true;
      break;
    }
    if (lo <= 1e-9) break;
    hi = lo;
    f_hi = f_lo;
  }
  if (!found) throw Error(Errc::NoSignChange, "no sign change of zeta on (0, 1]");
  if (f_lo == 0.0) return lo;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm <= 0.0) == (f_lo <= 0.0)) {
      lo = mid;
      f_lo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 20; ++it) {
    const ZetaValue v = F(cplx(x, 0.0));
    if (v.s_derivative.real() == 0.0) break;
    const double dx = v.value.real() / v.s_derivative.real();
    const double nx = x - dx;
    if (nx < lo - 1e-10 || nx > hi + 1e-10) break;
    x = nx;
    if (std::abs(dx) < 1e-12) break;
  }
  return x;
}

}  // namespace zetachain
