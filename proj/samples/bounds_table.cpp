// Prints the Lebesgue bounds for Bad(e^{-c}) in dimensions 1 and 2 next to
// the Jarnik bracket for M_N.
#include <cmath>
#include <cstdio>

#include "jarnik/cf.hpp"
#include "jarnik/euclid.hpp"

int main() {
  using namespace jarnik;
  std::printf("%3s %6s %14s %14s\n", "n", "c", "n - lower", "n - upper");
  for (std::size_t n : {1u, 2u}) {
    const auto w = euclid::WeightVector::uniform(n);
    for (double c : {4.0, 6.0, 8.0, 12.0}) {
      const auto lo = euclid::thm31_lower(w, c);
      const auto hi = euclid::thm31_upper(w, c);
      std::printf("%3zu %6.1f %14.6e %14.6e\n", n, c, lo.deficit, hi.deficit);
    }
  }

  std::printf("\n%3s %10s %10s %10s\n", "N", "lower", "dim M_N", "upper");
  for (long long N = 9; N <= 12; ++N) {
    const auto b = cf::jarnik_bounds_thm11(N);
    const auto d = cf::dim_mn_oracle(N);
    std::printf("%3lld %10.6f %10.6f %10.6f\n", N, b.lower, d.value, b.upper);
  }
}
