// Truncated zeta of X_{4,4,5}(ell) along the real axis, and its z-polynomial at s = delta.

#include <cstdio>

#include "zetachain.hpp"

using namespace zetachain;

int main() {
  const double ell = 8.0;
  const auto scheme = build_flow_adapted({4, 4, 5}, ell);
  const auto db = compile_database(scheme, 14);
  std::printf("radii:");
  for (int j = 0; j < 3; ++j) std::printf(" %.6e", scheme.disks[j].radius);
  std::printf("\n\n%8s %22s %22s\n", "s", "zeta(s)", "zeta'(s)");
  for (double s = 0.0; s <= 0.5001; s += 0.05) {
    const auto v = evaluate(db, s, 1.0);
    std::printf("%8.3f %22.15f %22.15f\n", s, v.value.real(), v.s_derivative.real());
  }
  const double delta = find_delta(ZetaFunction(db));
  std::printf("\ndelta = %.12f\n", delta);
  const auto b = z_polynomial(db, delta, 14);
  std::printf("z-coefficients at s = delta:\n");
  for (std::size_t k = 0; k < b.size(); ++k) {
    if (std::abs(b[k]) > 1e-14) std::printf("  z^%-3zu %+.6e\n", k, b[k].real());
  }
}
