#ifndef CHAINMIX_PROB_HPP
#define CHAINMIX_PROB_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace chainmix {

/// Finite probability distribution over indexed states.
struct ProbVector {
  std::vector<double> p;

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }

  /// Throws std::invalid_argument unless all entries are >= 0 and the total
  /// mass is 1 within 1e-12.
  void validate() const;

  static ProbVector point_mass(std::size_t n_states, std::size_t at);
};

/// Row-stochastic one-step transition matrix of a finite chain.
class DenseKernel {
 public:
  explicit DenseKernel(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {a_.data() + i * n_, n_};
  }

  /// Entries in [0,1] and every row sums to 1 within 1e-12.
  void validate() const;

 private:
  std::size_t n_;
  std::vector<double> a_;
};

/// Total variation distance, (1/2) sum_i |p_i - q_i|.
double tv_distance(const ProbVector& p, const ProbVector& q);

/// Left action of the kernel, r-fold: the law of the chain after r steps
/// when started from p0.
ProbVector evolve_distribution(const DenseKernel& k, const ProbVector& p0,
                               long r);

/// Stationary distribution by power iteration, for small kernels.
ProbVector stationary_power_iteration(const DenseKernel& k,
                                      double tol = 1e-14,
                                      long max_iters = 2000000);

/// Mean and variance of the state index under p.
double distribution_mean(const ProbVector& p);
double distribution_variance(const ProbVector& p);

}  // namespace chainmix

#endif
