#include "chainmix/prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chainmix {

namespace {
constexpr double kMassTol = 1e-12;
}

void ProbVector::validate() const {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0))
      throw std::invalid_argument("ProbVector: negative entry " +
                                  std::to_string(x));
    sum += x;
  }
  if (std::abs(sum - 1.0) > kMassTol)
    throw std::invalid_argument("ProbVector: mass " + std::to_string(sum));
}

ProbVector ProbVector::point_mass(std::size_t n_states, std::size_t at) {
  if (at >= n_states) throw std::invalid_argument("point_mass: index");
  ProbVector v{std::vector<double>(n_states, 0.0)};
  v.p[at] = 1.0;
  return v;
}

void DenseKernel::validate() const {
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double x = at(i, j);
      if (!(x >= 0.0) || x > 1.0 + kMassTol)
        throw std::invalid_argument("DenseKernel: entry out of [0,1] at row " +
                                    std::to_string(i));
      sum += x;
    }
    if (std::abs(sum - 1.0) > kMassTol)
      throw std::invalid_argument("DenseKernel: row " + std::to_string(i) +
                                  " sums to " + std::to_string(sum));
  }
}

double tv_distance(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p.p[i] - q.p[i]);
  // Accumulated rounding can push the sum an ulp past 2 when the laws are
  // nearly disjoint; the true distance is in [0, 1].
  return std::min(1.0, 0.5 * s);
}

ProbVector evolve_distribution(const DenseKernel& k, const ProbVector& p0,
                               long r) {
  if (k.size() != p0.size())
    throw std::invalid_argument("evolve_distribution: dimension mismatch");
  if (r < 0) throw std::invalid_argument("evolve_distribution: r < 0");
  const std::size_t n = k.size();
  std::vector<double> cur = p0.p, next(n);
  for (long step = 0; step < r; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double pi = cur[i];
      if (pi == 0.0) continue;
      const auto row = k.row(i);
      for (std::size_t j = 0; j < n; ++j) next[j] += pi * row[j];
    }
    cur.swap(next);
  }
  ProbVector out{std::move(cur)};
  out.validate();
  return out;
}

ProbVector stationary_power_iteration(const DenseKernel& k, double tol,
                                      long max_iters) {
  const std::size_t n = k.size();
  ProbVector cur{std::vector<double>(n, 1.0 / static_cast<double>(n))};
  for (long it = 0; it < max_iters; ++it) {
    ProbVector next = evolve_distribution(k, cur, 1);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff += std::abs(next.p[i] - cur.p[i]);
    cur = std::move(next);
    if (diff < tol) return cur;
  }
  throw std::runtime_error("stationary_power_iteration: no convergence");
}

double distribution_mean(const ProbVector& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    m += static_cast<double>(i) * p.p[i];
  return m;
}

double distribution_variance(const ProbVector& p) {
  const double m = distribution_mean(p);
  double v = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(i) - m;
    v += d * d * p.p[i];
  }
  return v;
}

}  // namespace chainmix
