#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zetachain/schemes.hpp"
#include "zetachain/symdyn.hpp"

using namespace zetachain;

namespace {

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::UsageError;
}

// cosh(l(R_i R_j)/2) from the trace of the product, written out by hand
double half_cosh(double mi, double ri, double mj, double rj) {
  return ((mi - mj) * (mi - mj) - ri - rj) / (2.0 * std::sqrt(ri * rj));
}

}  // namespace

TEST(GeneratorParam, TraceCondition) {
  const double a = solve_generator_param(2.0, 2.0, 2.0);
  const double c = std::cosh(1.0), s = std::sinh(1.0);
  const Moebius S1 = Moebius::from_entries(c, s, s, c);
  const Moebius S2 = Moebius::from_entries(c, a * s, s / a, c);
  EXPECT_NEAR((S1 * S2.inverse()).trace(), -2.0 * std::cosh(1.0), 1e-12);
  EXPECT_GT(a, 1.0);
}

TEST(GeneratorParam, SymmetricAndAboveOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  for (int k = 0; k < 100; ++k) {
    const double l1 = u(rng), l2 = u(rng), l3 = u(rng);
    const double a = solve_generator_param(l1, l2, l3);
    EXPECT_GT(a, 1.0);
    EXPECT_NEAR(solve_generator_param(l2, l1, l3), a, 1e-12 * a);
    EXPECT_NEAR(a + 1.0 / a,
                2.0 * (std::cosh(l1 / 2) * std::cosh(l2 / 2) + std::cosh(l3 / 2)) / (std::sinh(l1 / 2) * std::sinh(l2 / 2)),
                1e-12 * a);
  }
  EXPECT_EQ(error_of([] { solve_generator_param(1.0, 0.0, 1.0); }), Errc::NonpositiveLength);
}

TEST(BowenSeries, Examples) {
  const auto s = build_bowen_series(12, 12, 12);
  EXPECT_EQ(s.kind, SchemeKind::bowen);
  EXPECT_EQ(s.symbol_count, 4);
  int forbidden = 0;
  for (int i = 1; i <= 4; ++i) {
    for (int j = 1; j <= 4; ++j) {
      if (!s.allowed(i, j)) {
        ++forbidden;
        EXPECT_EQ(std::abs(i - j), 2);
      }
    }
  }
  EXPECT_EQ(forbidden, 4);
  EXPECT_NEAR(orbit_record(s, Word{{1, 1}}).length, 12.0, 1e-10);
  EXPECT_NEAR(orbit_record(s, Word{{2, 2}}).length, 12.0, 1e-10);
  EXPECT_NEAR(orbit_record(s, Word{{1, 4, 1}}).length, 12.0, 1e-10);  // S2 S1 conjugate to S1 S2^-1
  for (const auto& e : s.edges) EXPECT_EQ(e.weight, 0);
  EXPECT_TRUE(validate_scheme(s).all_pass());
}

TEST(BowenSeries, ShortLengthsStillDisjoint) {
  // the right-hand circles of S1 and S2 are [tanh(l1/4), coth(l1/4)] and a [tanh(l2/4), coth(l2/4)];
  // a tanh(l2/4) > coth(l1/4) holds for all positive lengths, so short lengths stay valid
  const auto s = build_bowen_series(0.1, 0.1, 0.1);
  EXPECT_GT(s.generator_param * std::tanh(0.025), 1.0 / std::tanh(0.025));
  EXPECT_TRUE(validate_scheme(s).disks_disjoint());
}

TEST(BowenSeries, AsymmetricLengths) {
  const auto s = build_bowen_series(10, 13, 16);
  EXPECT_NEAR(orbit_record(s, Word{{1, 1}}).length, 10.0, 1e-10);
  EXPECT_NEAR(orbit_record(s, Word{{2, 2}}).length, 13.0, 1e-10);
  // l(S1 S2^{-1}) = l3: the cycle 4 -> 1 uses S1^{-1}, 1 -> 4 uses S2; S2 S1^{-1} ~ (S1 S2^{-1})^{-1}
  EXPECT_NEAR(orbit_record(s, Word{{1, 4, 1}}).length, 16.0, 1e-9);
}

// independent oracle: 40-digit root of the same trace system (mpmath findroot)
struct RadiiOracle {
  double ell;
  std::array<double, 3> r;
};
const RadiiOracle kRadii111[] = {
    {8.0, {0.17319744957966829764, 0.020038806391894058593, 0.8239946746351108396}},
    {10.0, {0.088855699344026521214, 0.0065557275548648791833, 0.13297309586759069255}},
    {12.0, {0.036766808198211082821, 0.0024445256877707004432, 0.042606125169702923242}},
    {14.0, {0.014177828158943104172, 0.00090676646308277370234, 0.014971600893711835588}},
};

TEST(FlowRadii, MatchHighPrecisionOracle) {
  for (const auto& o : kRadii111) {
    const auto fr = solve_flow_radii({1, 1, 1}, o.ell);
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(fr.r[j], o.r[j], 1e-12 * o.r[j]) << "ell " << o.ell << " j " << j;
    EXPECT_LT(fr.residual, 1e-12);
  }
}

TEST(FlowRadii, MiddleRadiusByBisection) {
  // with r1 fixed, the pair-(1,2) equation is monotone in r2 on (0, r_peak)
  const double ell = 10.0;
  const auto fr = solve_flow_radii({1, 1, 1}, ell);
  const double r1 = fr.r[0];
  auto g = [&](double r2) { return half_cosh(r1, r1, 2.0 + r2, r2) - std::cosh(ell / 2); };
  double lo = 1e-8, hi = 0.05;
  ASSERT_GT(g(lo), 0.0);
  ASSERT_LT(g(hi), 0.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(fr.r[1], 0.5 * (lo + hi), 1e-12 * fr.r[1]);
}

TEST(FlowRadii, TraceEquationsAcrossFamilies) {
  for (Triple n : {Triple{1, 1, 1}, Triple{4, 4, 5}, Triple{4, 5, 6}}) {
    for (double ell : {8.0, 10.0, 12.0, 14.0}) {
      const auto r = solve_flow_radii(n, ell).r;
      const double m1 = r[0], m2 = 2.0 + r[1], m3 = 4.0 + r[2];
      const double want[3] = {std::cosh(n[0] * ell / 2), std::cosh(n[1] * ell / 2), std::cosh(n[2] * ell / 2)};
      EXPECT_NEAR(half_cosh(m1, r[0], m2, r[1]) / want[0], 1.0, 1e-12);
      EXPECT_NEAR(half_cosh(m2, r[1], m3, r[2]) / want[1], 1.0, 1e-12);
      EXPECT_NEAR(half_cosh(m1, r[0], m3, r[2]) / want[2], 1.0, 1e-12);
      for (double x : r) EXPECT_GT(x, 0.0);
    }
  }
}

TEST(FlowRadii, Errors) {
  EXPECT_EQ(error_of([] { solve_flow_radii({1, 1, 3}, 10.0); }), Errc::TriangleConditionViolated);
  EXPECT_EQ(error_of([] { solve_flow_radii({1, 1, 2}, 10.0); }), Errc::TriangleConditionViolated);
  EXPECT_EQ(error_of([] { solve_flow_radii({1, 1, 1}, 0.0); }), Errc::NonpositiveLength);
}

TEST(FlowAdapted, BelowThreshold) {
  EXPECT_EQ(error_of([] { build_flow_adapted({1, 1, 1}, 6.0); }), Errc::BelowLengthThreshold);
  EXPECT_EQ(error_of([] { build_flow_adapted({1, 1, 3}, 10.0); }), Errc::TriangleConditionViolated);
}

TEST(FlowAdapted, StructureAndLengths) {
  for (Triple n : {Triple{1, 1, 1}, Triple{4, 4, 5}, Triple{4, 5, 6}}) {
    for (double ell : {8.0, 10.0, 12.0, 14.0}) {
      const auto s = build_flow_adapted(n, ell);
      ASSERT_EQ(s.symbol_count, 6);
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(s.disks[j].left(), 2.0 * j, 1e-15);
        EXPECT_NEAR(s.disks[j + 3].center, s.disks[j].center + 6.0, 1e-15);
        EXPECT_EQ(s.disks[j + 3].radius, s.disks[j].radius);
      }
      for (int i = 1; i <= 6; ++i) {
        for (int j = 1; j <= 6; ++j) {
          const bool expect = (i <= 3) != (j <= 3) && (i - 1) % 3 != (j - 1) % 3;
          EXPECT_EQ(s.allowed(i, j), expect);
          if (expect) {
            EXPECT_EQ(s.edge(i, j).weight, s.edge(j, i).weight);
            EXPECT_EQ(s.kappa_twice[(i - 1) % 3] + s.kappa_twice[(j - 1) % 3], 2 * s.edge(i, j).weight);
          }
        }
      }
      // weight table
      EXPECT_EQ(s.edge(1, 5).weight, n[0]);
      EXPECT_EQ(s.edge(4, 2).weight, n[0]);
      EXPECT_EQ(s.edge(2, 6).weight, n[1]);
      EXPECT_EQ(s.edge(5, 3).weight, n[1]);
      EXPECT_EQ(s.edge(3, 4).weight, n[2]);
      EXPECT_EQ(s.edge(6, 1).weight, n[2]);
      // l(R_i R_j) = n_k ell
      for (auto [p, q, k] : {std::tuple{0, 1, 0}, {1, 2, 1}, {0, 2, 2}}) {
        const Moebius R = reflection_matrix(s.disks[p].center, s.disks[p].radius) *
                          reflection_matrix(s.disks[q].center, s.disks[q].radius);
        EXPECT_NEAR(displacement_length(R), n[k] * ell, 1e-9 * (1 + n[k] * ell));
      }
      EXPECT_TRUE(validate_scheme(s).ifs_valid());
    }
  }
}

TEST(FlowAdapted, PhiMapsMatchDefinition) {
  const auto s = build_flow_adapted({1, 1, 1}, 10.0);
  const cplx u(0.3, 0.01);
  for (const auto& e : s.edges) {
    const int cj = (e.to - 1) % 3;
    const double m = s.disks[cj].center, r = s.disks[cj].radius;
    const cplx want = e.from <= 3 ? r / (u - m) + m + 6.0 : r / (u - 6.0 - m) + m;
    EXPECT_NEAR(std::abs(e.map.apply(u) - want), 0.0, 1e-12);
  }
}

TEST(FlowAdapted, EllEightIsValidWithLargeThirdDisk) {
  const auto s = build_flow_adapted({1, 1, 1}, 8.0);
  const auto rep = validate_scheme(s);
  EXPECT_TRUE(rep.ifs_valid());
  EXPECT_FALSE(rep.small_radii());
  EXPECT_NEAR(displacement_length(reflection_matrix(s.disks[0].center, s.disks[0].radius) *
                                  reflection_matrix(s.disks[1].center, s.disks[1].radius)),
              8.0, 1e-9);
}

TEST(Validate, Examples) {
  EXPECT_TRUE(validate_scheme(build_flow_adapted({1, 1, 1}, 10.0)).all_pass());
  EXPECT_TRUE(validate_scheme(build_bowen_series(12, 12, 12)).all_pass());
  auto s = build_flow_adapted({1, 1, 1}, 10.0);
  s.disks[1].radius *= 10.0;
  s.disks[4].radius *= 10.0;
  s.disks[1].center = 1.0;  // 2 + r2 pushed left, now overlapping disk 1
  s.disks[4].center = 7.0;
  const auto rep = validate_scheme(s);
  EXPECT_FALSE(rep.all_pass());
}

TEST(Validate, InflatedRadius) {
  auto s = build_flow_adapted({1, 1, 1}, 10.0);
  auto grown = s;
  for (int j : {1, 4}) grown.disks[j].radius *= 10.0;
  // still clear of the neighbours at 10x
  EXPECT_TRUE(validate_scheme(grown).disks_disjoint());
  for (int j : {1, 4}) s.disks[j].radius *= 300.0;
  const auto rep = validate_scheme(s);
  EXPECT_FALSE(rep.disks_disjoint());
  EXPECT_FALSE(rep.all_pass());
}

TEST(Validate, TinyDisksFarFromOrigin) {
  // r3 is of order 1e-20 here, far below the spacing of doubles near 4
  const auto s = build_flow_adapted({4, 5, 6}, 14.0);
  EXPECT_LT(s.disks[2].radius, 1e-18);
  const auto rep = validate_scheme(s);
  EXPECT_TRUE(rep.ifs_valid());
  EXPECT_GT(rep.min_containment_margin, 0.0);
}

TEST(Asymptotics, KappaAndCauchy) {
  const auto s = build_flow_adapted({4, 4, 5}, 10.0);
  EXPECT_EQ(s.kappa(1), 2.5);
  EXPECT_EQ(s.kappa(2), 1.5);
  EXPECT_EQ(s.kappa(3), 2.5);
  for (Triple n : {Triple{1, 1, 1}, Triple{4, 4, 5}, Triple{4, 5, 6}, Triple{2, 3, 4}}) {
    for (int k : {n[0] + n[2] - n[1], n[0] + n[1] - n[2], n[1] + n[2] - n[0]}) EXPECT_GT(k, 0);
  }
  const auto t = asymptotic_radii_table({1, 1, 1}, {8.0, 10.0, 12.0, 14.0});
  for (int j = 0; j < 3; ++j) {
    double prev = INFINITY;
    for (std::size_t k = 1; k < t.size(); ++k) {
      const double d = std::abs(t[k][j] - t[k - 1][j]);
      EXPECT_LT(d, prev);
      prev = d;
    }
  }
  // r1 e^{ell/2} approaches 16 from below
  EXPECT_LT(t.back()[0], 16.0);
  EXPECT_GT(t.back()[0], t.front()[0]);
}
