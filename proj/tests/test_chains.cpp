#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "zetachain/chains.hpp"

using namespace zetachain;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::UsageError;
}

using Coeffs = std::vector<long long>;

Coeffs mul(const Coeffs& a, const Coeffs& b) {
  Coeffs c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// (1 - x^{n1} - x^{n2} - x^{n3})^2 - 4 x^{n1+n2+n3}
Coeffs square_form(const Triple& n) {
  const int deg = n[0] + n[1] + n[2];
  Coeffs q(deg + 1, 0);
  q[0] = 1;
  for (int v : n) q[v] -= 1;
  Coeffs p = mul(q, q);
  p[deg] -= 4;
  while (p.back() == 0) p.pop_back();
  return p;
}

const OrbitDatabase& db_for(double ell) {
  static std::map<double, OrbitDatabase> cache;
  auto it = cache.find(ell);
  if (it == cache.end()) it = cache.emplace(ell, compile_database(build_flow_adapted({1, 1, 1}, ell), 14)).first;
  return it->second;
}

MatchReport run_compare(double ell, const Window& U) {
  const auto rs = find_resonances(ZetaFunction(db_for(ell)), U.scaled(1.0 / ell));
  return compare_rescaled(rs, ell, build_polynomial({1, 1, 1}), U);
}

}  // namespace

TEST(Polynomial, Displays) {
  EXPECT_EQ(build_polynomial({1, 1, 1}).coeffs, (Coeffs{1, -6, 9, -4}));
  EXPECT_EQ(build_polynomial({4, 4, 5}).coeffs, (Coeffs{1, 0, 0, 0, -4, -2, 0, 0, 4, 4, 1, 0, 0, -4}));
  EXPECT_EQ(build_polynomial({4, 5, 6}).coeffs, (Coeffs{1, 0, 0, 0, -2, -2, -2, 0, 1, 2, 3, 2, 1, 0, 0, -4}));
}

TEST(Polynomial, StructuralIdentities) {
  const auto p111 = build_polynomial({1, 1, 1}).coeffs;
  const auto p222 = build_polynomial({2, 2, 2}).coeffs;
  for (std::size_t k = 0; k < p222.size(); ++k) EXPECT_EQ(p222[k], k % 2 ? 0 : p111[k / 2]);
  for (int a = 1; a <= 6; ++a) {
    for (int b = 1; b <= 6; ++b) {
      for (int c = 1; c <= 6; ++c) {
        const Triple n{a, b, c};
        const auto p = build_polynomial(n);
        EXPECT_EQ(p.coeffs, square_form(n));
        EXPECT_EQ(p.coeffs.front(), 1);
        const int big = std::max({a, b, c});
        // the top monomial is x^{n1+n2+n3} only under the strict triangle inequality
        EXPECT_EQ(p.coeffs.back(), 2 * big < a + b + c ? -4 : (2 * big == a + b + c ? -3 : 1));
        long long sum = 0;
        for (long long v : p.coeffs) sum += v;
        EXPECT_EQ(sum, 0);
        std::array<int, 3> perm{a, b, c};
        std::sort(perm.begin(), perm.end());
        do {
          EXPECT_EQ(build_polynomial({perm[0], perm[1], perm[2]}).coeffs, p.coeffs);
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  }
  EXPECT_EQ(error_of([] { build_polynomial({0, 1, 1}); }), Errc::NonpositiveEntry);
  EXPECT_EQ(error_of([] { build_polynomial({1, -2, 1}); }), Errc::NonpositiveEntry);
}

TEST(Roots, FactorizationOfP111) {
  const auto roots = polynomial_roots(build_polynomial({1, 1, 1}));
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].z.real(), 0.25, 1e-12);
  EXPECT_EQ(roots[0].z.imag(), 0.0);
  EXPECT_EQ(roots[0].multiplicity, 1);
  EXPECT_NEAR(roots[1].z.real(), 1.0, 1e-12);
  EXPECT_EQ(roots[1].z.imag(), 0.0);
  EXPECT_EQ(roots[1].multiplicity, 2);
}

TEST(Roots, SquareRootImages) {
  const auto roots = polynomial_roots(build_polynomial({2, 2, 2}));
  ASSERT_EQ(roots.size(), 4u);
  const double want[] = {-1.0, -0.5, 0.5, 1.0};
  const int mult[] = {2, 1, 1, 2};
  for (int k = 0; k < 4; ++k) {
    EXPECT_LT(std::abs(roots[k].z - want[k]), 1e-12);
    EXPECT_EQ(roots[k].multiplicity, mult[k]);
  }
}

TEST(Roots, MultisetReconstructsPolynomial) {
  for (Triple n : {Triple{1, 1, 1}, Triple{4, 4, 5}, Triple{4, 5, 6}, Triple{1, 2, 2}, Triple{3, 5, 7}, Triple{2, 4, 6}}) {
    const auto p = build_polynomial(n);
    const auto roots = polynomial_roots(p);
    int total = 0;
    // lead * prod (x - z)^m, expanded in complex arithmetic
    std::vector<cplx> prod{static_cast<double>(p.coeffs.back())};
    for (const auto& r : roots) {
      total += r.multiplicity;
      EXPECT_LT(std::abs(p(r.z)), 1e-10 * std::pow(1.0 + std::abs(r.z), p.degree()));
      EXPECT_EQ(vanishing_order(p, r.z), r.multiplicity);
      const bool conj_present = std::any_of(roots.begin(), roots.end(), [&](const PolyRoot& o) {
        return std::abs(o.z - std::conj(r.z)) < 1e-12 && o.multiplicity == r.multiplicity;
      });
      EXPECT_TRUE(conj_present);
      for (int m = 0; m < r.multiplicity; ++m) {
        std::vector<cplx> next(prod.size() + 1, 0.0);
        for (std::size_t k = 0; k < prod.size(); ++k) {
          next[k + 1] += prod[k];
          next[k] -= r.z * prod[k];
        }
        prod = next;
      }
    }
    EXPECT_EQ(total, p.degree());
    ASSERT_EQ(prod.size(), p.coeffs.size());
    for (std::size_t k = 0; k < prod.size(); ++k) EXPECT_LT(std::abs(prod[k] - static_cast<double>(p.coeffs[k])), 1e-9);
  }
}

TEST(Chains, LatticeExamples) {
  const auto cs = chain_points(build_polynomial({1, 1, 1}), Window{-1.0, 2.0, -7.0, 7.0});
  int near_ln4 = 0, near_zero = 0;
  for (const auto& pt : cs.points) {
    if (std::abs(pt.s.real() - std::log(4.0)) < 1e-12) {
      EXPECT_EQ(pt.multiplicity, 1);
      EXPECT_NEAR(pt.s.imag(), 2.0 * kPi * pt.k, 1e-12);
      ++near_ln4;
    } else {
      EXPECT_NEAR(pt.s.real(), 0.0, 1e-12);
      EXPECT_EQ(pt.multiplicity, 2);
      EXPECT_NEAR(pt.s.imag(), 2.0 * kPi * pt.k, 1e-12);
      ++near_zero;
    }
  }
  EXPECT_EQ(near_ln4, 3);
  EXPECT_EQ(near_zero, 3);
  EXPECT_EQ(cs.count(), 9);
}

TEST(Chains, Periodicity) {
  const auto p = build_polynomial({4, 5, 6});
  const Window w{-3.0, 3.0, -5.0, 5.0};
  const Window shifted{-3.0, 3.0, -5.0 + 2.0 * kPi, 5.0 + 2.0 * kPi};
  const auto a = chain_points(p, w), b = chain_points(p, shifted);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (const auto& pt : a.points) {
    const bool hit = std::any_of(b.points.begin(), b.points.end(), [&](const ChainPoint& q) {
      return std::abs(q.s - (pt.s + cplx(0.0, 2.0 * kPi))) < 1e-12 && q.multiplicity == pt.multiplicity;
    });
    EXPECT_TRUE(hit);
  }
}

TEST(Chains, HeightTwoPiWindowCountsDegree) {
  for (Triple n : {Triple{1, 1, 1}, Triple{4, 4, 5}, Triple{4, 5, 6}}) {
    const auto p = build_polynomial(n);
    const auto cs = chain_points(p, Window{-20.0, 20.0, -kPi + 0.123, kPi + 0.123});
    EXPECT_EQ(cs.count(), p.degree());
  }
}

TEST(Compare, CardinalitiesAtTwelve) {
  const Window U{1.0, 1.8, -3.0 * kPi, 3.0 * kPi};
  const auto rep = run_compare(12.0, U);
  EXPECT_EQ(rep.resonance_count, rep.chain_count);
  EXPECT_EQ(rep.chain_count, 3);
  EXPECT_EQ(rep.unmatched_resonances, 0);
  EXPECT_TRUE(rep.unmatched_chain.empty());
}

TEST(Compare, PrecisionAtTwelve) {
  const auto rep = run_compare(12.0, Window{1.0, 1.8, -3.0 * kPi, 3.0 * kPi});
  EXPECT_LT(rep.max_main_distance, 1e-3);
}

TEST(Compare, DistanceShrinksWithEll) {
  const Window U{1.0, 1.8, -3.0 * kPi, 3.0 * kPi};
  EXPECT_LT(run_compare(12.0, U).max_main_distance, run_compare(8.0, U).max_main_distance);
}

TEST(Compare, ZeroFreeStrip) {
  const auto rep = run_compare(12.0, Window{0.4, 1.0, -3.0, 3.0});
  EXPECT_EQ(rep.resonance_count, 0);
  EXPECT_EQ(rep.chain_count, 0);
}

TEST(Compare, Errors) {
  const auto p = build_polynomial({1, 1, 1});
  const Window U{1.0, 1.8, -3.0 * kPi, 3.0 * kPi};
  const auto rs = find_resonances(ZetaFunction(db_for(12.0)), U.scaled(1.0 / 10.0));
  EXPECT_EQ(error_of([&] { compare_rescaled(rs, 12.0, p, U); }), Errc::WindowMismatch);
  const Window touching{std::log(4.0), 1.8, -1.0, 1.0};
  const auto rt = find_resonances(ZetaFunction(db_for(12.0)), touching.scaled(1.0 / 12.0));
  EXPECT_EQ(error_of([&] { compare_rescaled(rt, 12.0, p, touching); }), Errc::BoundaryTouchesChain);
}

TEST(Theorem3, ZeroZIsExact) {
  const auto p = build_polynomial({1, 1, 1});
  EXPECT_EQ(theorem3_supnorm(db_for(8.0), 8.0, p, Window{-1.0, 2.0, -8.0, 8.0}, {0.0}), 0.0);
}

TEST(Theorem3, TrendAndRefinement) {
  const auto p = build_polynomial({1, 1, 1});
  const Window g{-1.0, 2.0, -8.0, 8.0};
  const double s8 = theorem3_supnorm(db_for(8.0), 8.0, p, g, {1.0});
  const double s12 = theorem3_supnorm(db_for(12.0), 12.0, p, g, {1.0});
  EXPECT_GE(s8 / s12, 2.0);
  const double fine = theorem3_supnorm(db_for(12.0), 12.0, p, g, {1.0}, -1, 81, 81);
  EXPECT_LT(std::abs(fine - s12), 0.1 * s12);
  EXPECT_EQ(error_of([&] { theorem3_supnorm(compile_database(build_bowen_series(8, 8, 8), 4), 8.0, p, g, {1.0}); }),
            Errc::WrongKind);
}
