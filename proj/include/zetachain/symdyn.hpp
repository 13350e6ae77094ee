#pragma once

// Closed words over a scheme's adjacency, their cyclic classes, and the
// orbit database of (length, weight) records that every zeta evaluation sums over.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "zetachain/error.hpp"
#include "zetachain/hypgeo.hpp"
#include "zetachain/parallel.hpp"
#include "zetachain/schemes.hpp"

namespace zetachain {

inline constexpr int kDefaultWordCap = 20;

/// Symbols w_0 .. w_n (1-based); the word length is n, the number of transitions.
struct Word {
  std::vector<int> symbols;

  int length() const { return static_cast<int>(symbols.size()) - 1; }
  bool closed() const { return symbols.size() >= 2 && symbols.front() == symbols.back(); }
  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;
};

/// sigma_L: (w_0, ..., w_{n-1}, w_0) -> (w_1, ..., w_{n-1}, w_0, w_1).
inline Word shift_left(const Word& w) {
  if (!w.closed()) throw Error(Errc::NotClosed, "shift of an open word");
  Word out;
  const int n = w.length();
  for (int k = 1; k <= n; ++k) out.symbols.push_back(w.symbols[k]);
  out.symbols.push_back(w.symbols[1]);
  return out;
}

/// w^k for a closed word.
inline Word repeat(const Word& w, int k) {
  if (!w.closed()) throw Error(Errc::NotClosed, "repetition of an open word");
  Word out{{w.symbols.front()}};
  for (int r = 0; r < k; ++r) out.symbols.insert(out.symbols.end(), w.symbols.begin() + 1, w.symbols.end());
  return out;
}

struct OrbitRecord {
  int word_length = 0;
  double length = 0.0;  // l_w
  int weight = 0;       // n_w
  bool prime = true;
  int class_size = 1;   // number of distinct cyclic shifts
  int rep_index = 1;    // w = v^k
  std::vector<int> representative;  // lexicographically least rotation, w_0..w_{n-1}
};

struct OrbitDatabase {
  SchemeKind kind = SchemeKind::bowen;
  int n_max = 0;
  std::array<double, 3> lengths{};
  Triple n{0, 0, 0};
  double ell = 0.0;
  /// records[k] holds the classes of word length k (records[0] is empty).
  std::vector<std::vector<OrbitRecord>> records;
  /// closed-word counts per word length, equal to trace(A^k).
  std::vector<long long> closed_counts;
};

namespace detail {

inline Moebius word_matrix(const IfsScheme& s, const std::vector<int>& cyc) {
  // phi_w = phi_{w_{n-1},w_n} o ... o phi_{w_0,w_1}
  Moebius m;
  const std::size_t n = cyc.size();
  for (std::size_t k = 0; k < n; ++k) m = s.edge(cyc[k], cyc[(k + 1) % n]).map * m;
  return m;
}

inline int word_weight_twice(const IfsScheme& s, const std::vector<int>& cyc) {
  int sum = 0;
  const std::size_t n = cyc.size();
  for (std::size_t k = 0; k < n; ++k) sum += s.edge(cyc[k], cyc[(k + 1) % n]).weight;
  return sum;
}

/// Smallest rotation period of a cyclic sequence.
inline int cyclic_period(const std::vector<int>& cyc) {
  const int n = static_cast<int>(cyc.size());
  for (int p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool same = true;
    for (int k = 0; k < n && same; ++k) same = cyc[k] == cyc[(k + p) % n];
    if (same) return p;
  }
  return n;
}

inline bool is_least_rotation(const std::vector<int>& cyc) {
  const int n = static_cast<int>(cyc.size());
  for (int r = 1; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      const int a = cyc[(k + r) % n], b = cyc[k];
      if (a < b) return false;
      if (a > b) break;
    }
  }
  return true;
}

/// Depth-first enumeration of cyclic sequences (w_0..w_{n-1}) with all
/// transitions, including w_{n-1} -> w_0, allowed. `min_first` restricts to
/// sequences whose first symbol is their smallest.
template <class Visit>
void for_each_cycle(const IfsScheme& s, int n, bool min_first, Visit&& visit) {
  std::vector<int> cyc(n);
  const int ns = s.symbol_count;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      if (s.allowed(cyc[n - 1], cyc[0])) visit(cyc);
      return;
    }
    for (int sym = min_first ? cyc[0] : 1; sym <= ns; ++sym) {
      if (s.allowed(cyc[depth - 1], sym)) {
        cyc[depth] = sym;
        self(self, depth + 1);
      }
    }
  };
  for (int first = 1; first <= ns; ++first) {
    cyc[0] = first;
    rec(rec, 1);
  }
}

inline void check_cap(int n, int cap) {
  if (n < 1 || n > cap) {
    throw Error(Errc::CapExceeded, "word length " + std::to_string(n) + " outside [1, " + std::to_string(cap) + "]");
  }
}

}  // namespace detail

/// All closed words of length n in lexicographic order.
inline std::vector<Word> enumerate_closed(const IfsScheme& s, int n, int cap = kDefaultWordCap) {
  detail::check_cap(n, cap);
  std::vector<Word> out;
  detail::for_each_cycle(s, n, false, [&](const std::vector<int>& cyc) {
    Word w{cyc};
    w.symbols.push_back(cyc[0]);
    out.push_back(std::move(w));
  });
  return out;
}

inline OrbitRecord orbit_record(const IfsScheme& s, const Word& w) {
  if (!w.closed()) throw Error(Errc::NotClosed, "orbit record of an open word");
  std::vector<int> cyc(w.symbols.begin(), w.symbols.end() - 1);
  for (std::size_t k = 0; k < cyc.size(); ++k) {
    if (!s.allowed(cyc[k], cyc[(k + 1) % cyc.size()])) throw Error(Errc::NotClosed, "word violates adjacency");
  }
  OrbitRecord rec;
  rec.word_length = static_cast<int>(cyc.size());
  rec.length = displacement_length(detail::word_matrix(s, cyc));
  const int twice = detail::word_weight_twice(s, cyc);
  rec.weight = twice / 2;
  const int p = detail::cyclic_period(cyc);
  rec.class_size = p;
  rec.rep_index = rec.word_length / p;
  rec.prime = p == rec.word_length;
  auto best = cyc;
  for (int r = 1; r < rec.word_length; ++r) {
    std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
    best = std::min(best, cyc);
  }
  rec.representative = best;
  return rec;
}

inline bool record_less(const OrbitRecord& a, const OrbitRecord& b) {
  return std::tie(a.word_length, a.length, a.weight, a.representative) <
         std::tie(b.word_length, b.length, b.weight, b.representative);
}

/// One record per cyclic class for word lengths 1..n_max, sorted per length.
inline OrbitDatabase compile_database(const IfsScheme& s, int n_max, int cap = kDefaultWordCap,
                                      unsigned threads = default_thread_count()) {
  if (n_max > cap) {
    throw Error(Errc::CapExceeded, "order " + std::to_string(n_max) + " exceeds cap " + std::to_string(cap));
  }
  OrbitDatabase db;
  db.kind = s.kind;
  db.n_max = std::max(n_max, 0);
  db.lengths = s.lengths;
  db.n = s.n;
  db.ell = s.ell;
  db.records.resize(db.n_max + 1);
  db.closed_counts.assign(db.n_max + 1, 0);
  parallel_for(static_cast<std::size_t>(db.n_max), threads, [&](std::size_t idx) {
    const int n = static_cast<int>(idx) + 1;
    auto& bucket = db.records[n];
    long long total = 0;
    detail::for_each_cycle(s, n, true, [&](const std::vector<int>& cyc) {
      if (!detail::is_least_rotation(cyc)) return;
      OrbitRecord rec;
      rec.word_length = n;
      const int p = detail::cyclic_period(cyc);
      rec.class_size = p;
      rec.rep_index = n / p;
      rec.prime = p == n;
      const int twice = detail::word_weight_twice(s, cyc);
      if (twice % 2 != 0) throw Error(Errc::NotClosed, "odd edge-weight sum on a closed word");
      rec.weight = twice / 2;
      rec.length = displacement_length(detail::word_matrix(s, cyc));
      rec.representative = cyc;
      total += p;
      bucket.push_back(std::move(rec));
    });
    std::sort(bucket.begin(), bucket.end(), record_less);
    db.closed_counts[n] = total;
  });
  return db;
}

/// Closed-word counts (not classes) of length n keyed by total weight.
inline std::map<int, long long> class_census(const IfsScheme& s, int n, int cap = kDefaultWordCap) {
  if (s.kind != SchemeKind::flow) throw Error(Errc::WrongKind, "census needs a flow-adapted scheme");
  detail::check_cap(n, cap);
  std::map<int, long long> out;
  detail::for_each_cycle(s, n, false, [&](const std::vector<int>& cyc) {
    ++out[detail::word_weight_twice(s, cyc) / 2];
  });
  return out;
}

/// Lower bound on the length gained per symbolic step:
/// min over edges of -log sup_{D_from} |phi'|.
inline double min_step_length(const IfsScheme& s) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : s.edges) {
    const Disk& d = s.disks[e.from - 1];
    const Moebius& m = e.map;
    double sup_deriv;
    if (m.c == 0.0) {
      sup_deriv = std::exp(-2.0 * m.log_scale) / (m.d * m.d);
    } else {
      const double pole = -m.d / m.c;
      const double dist = std::abs(d.center - pole) - d.radius;
      sup_deriv = std::exp(-2.0 * m.log_scale) / std::pow(std::abs(m.c) * dist, 2);
    }
    best = std::min(best, -std::log(sup_deriv));
  }
  return best;
}

struct SpectrumEntry {
  double length = 0.0;
  std::optional<int> weight;  // absent for bowen schemes
  int multiplicity = 0;       // number of prime classes (oriented geodesics)
};

/// Primitive closed geodesic lengths up to l_max from the prime word classes.
/// Entries with equal weight and lengths within 1e-9 (1 + l) are merged.
inline std::vector<SpectrumEntry> length_spectrum(const IfsScheme& s, double l_max, int cap = kDefaultWordCap,
                                                  unsigned threads = default_thread_count()) {
  const double step = min_step_length(s);
  if (!(step > 0.0)) throw Error(Errc::CapExceeded, "scheme is not contracting in one step");
  const int needed = static_cast<int>(std::floor(l_max / step));
  if (needed > cap) {
    throw Error(Errc::CapExceeded, "length " + std::to_string(l_max) + " needs words up to length " +
                                       std::to_string(needed));
  }
  std::vector<SpectrumEntry> out;
  if (needed < 1) return out;
  const auto db = compile_database(s, needed, cap, threads);
  struct Item {
    double length;
    int weight;
  };
  std::vector<Item> items;
  for (const auto& bucket : db.records) {
    for (const auto& r : bucket) {
      if (r.prime && r.length <= l_max) items.push_back({r.length, s.kind == SchemeKind::flow ? r.weight : 0});
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Item& a, const Item& b) { return std::tie(a.weight, a.length) < std::tie(b.weight, b.length); });
  for (const auto& it : items) {
    if (!out.empty() && out.back().weight.value_or(0) == it.weight &&
        std::abs(out.back().length - it.length) <= 1e-9 * (1.0 + it.length)) {
      ++out.back().multiplicity;
      continue;
    }
    SpectrumEntry e{it.length, std::nullopt, 1};
    if (s.kind == SchemeKind::flow) e.weight = it.weight;
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const SpectrumEntry& a, const SpectrumEntry& b) {
    return std::make_tuple(a.length, a.weight.value_or(0)) < std::make_tuple(b.length, b.weight.value_or(0));
  });
  return out;
}

}  // namespace zetachain
