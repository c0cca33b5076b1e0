#include "chainmix/traject.hpp"

namespace chainmix {

std::size_t dtmc_step(const DenseKernel& k, std::size_t i, Rng& rng) {
  const auto row = k.row(i);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < row.size(); ++j) {
    acc += row[j];
    if (u < acc) return j;
  }
  return row.size() - 1;
}

std::vector<std::size_t> simulate_dtmc(const DenseKernel& k, std::size_t x0,
                                       long r, SeedSpec seed) {
  if (x0 >= k.size()) throw std::invalid_argument("simulate_dtmc: x0");
  if (r < 0) throw std::invalid_argument("simulate_dtmc: r < 0");
  Rng rng(seed);
  std::vector<std::size_t> path;
  path.reserve(static_cast<std::size_t>(r) + 1);
  path.push_back(x0);
  std::size_t x = x0;
  for (long step = 0; step < r; ++step) {
    x = dtmc_step(k, x, rng);
    path.push_back(x);
  }
  return path;
}

}  // namespace chainmix
