#include "secdsc/random.hpp"

#include <cmath>

#include "secdsc/error.hpp"

namespace secdsc {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::size_t Rng::categorical(std::span<const double> probs) {
  const double u = uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

std::vector<double> Rng::simplex_point(std::size_t k) {
  std::vector<double> x(k);
  double total = 0.0;
  for (auto& xi : x) {
    xi = -std::log1p(-uniform());
    total += xi;
  }
  for (auto& xi : x) xi /= total;
  return x;
}

}  // namespace secdsc
