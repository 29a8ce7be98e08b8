// Box counts for the cover of Bad(1/(N+2)) and the resulting slope.
#include <cstdio>
#include <cstdlib>

#include "jarnik/cf.hpp"
#include "jarnik/euclid.hpp"

int main(int argc, char** argv) {
  using namespace jarnik;
  const long long N = argc > 1 ? std::atoll(argv[1]) : 4;
  const unsigned depth = argc > 2 ? static_cast<unsigned>(std::atoi(argv[2])) : 12;

  cover::Limits lim;
  lim.workers = 4;
  const auto res = euclid::bad1_boxcount(N, depth, lim, 2.0);
  for (std::size_t k = 0; k < res.counts.size(); ++k)
    std::printf("level %2zu  cells %llu\n", k, static_cast<unsigned long long>(res.counts[k]));
  if (res.truncated) std::printf("cell budget reached\n");

  const auto lo = cf::dim_mn_oracle(N), hi = cf::dim_mn_oracle(N + 2);
  std::printf("slope %.6f  ratio %.6f\n", res.estimate.slope, res.estimate.ratio);
  std::printf("dim M_%lld in [%.6f, %.6f], dim M_%lld in [%.6f, %.6f]\n", N, lo.lower, lo.upper, N + 2, hi.lower,
              hi.upper);
}
