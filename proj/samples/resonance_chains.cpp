// Resonances of X_{1,1,1}(ell) next to the chain points of P_{1,1,1}.
//   sample_resonance_chains [ell]

#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "zetachain.hpp"

using namespace zetachain;

int main(int argc, char** argv) {
  const double ell = argc > 1 ? std::atof(argv[1]) : 12.0;
  const Triple n{1, 1, 1};
  const auto db = compile_database(build_flow_adapted(n, ell), 14);
  const ZetaFunction F(db);
  std::printf("delta = %.12f   (ln 4 / ell = %.12f)\n", find_delta(F), std::log(4.0) / ell);

  const double pi = std::numbers::pi;
  const Window U{-0.5, 1.8, -2.0 * pi - 0.5, 2.0 * pi + 0.5};
  const auto rs = find_resonances(F, U.scaled(1.0 / ell));
  const auto rep = compare_rescaled(rs, ell, build_polynomial(n), U);
  std::printf("%d resonances, %d chain points (with multiplicity)\n", rep.resonance_count, rep.chain_count);
  std::printf("%12s %12s   %12s %12s %10s  %s\n", "ell*Re s", "ell*Im s", "chain re", "chain im", "dist", "region");
  for (const auto& r : rep.rows) {
    if (r.match) {
      std::printf("%12.6f %12.6f   %12.6f %12.6f %10.2e  %s\n", r.resonance.real(), r.resonance.imag(), r.match->real(),
                  r.match->imag(), r.dist, to_string(r.region).c_str());
    } else {
      std::printf("%12.6f %12.6f   %12s %12s %10s  %s\n", r.resonance.real(), r.resonance.imag(), "-", "-", "-",
                  to_string(r.region).c_str());
    }
  }
}
