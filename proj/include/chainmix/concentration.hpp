#ifndef CHAINMIX_CONCENTRATION_HPP
#define CHAINMIX_CONCENTRATION_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "chainmix/rng.hpp"

namespace chainmix {

// All bound evaluators clamp to [0, 1]: the raw expressions exceed 1 for
// small m, and clamping keeps monotonicity in m assertable.

/// Martingale parameters: delta bounds the sum of conditional variances,
/// gamma the increments.
struct MartingaleBoundParams {
  double delta = 0.0;
  double gamma = 0.0;
};

/// min(1, 2 exp(-m^2 / (2 delta + 2 gamma m / 3))).
/// For m > 0 with delta = gamma = 0 the bound degenerates and 0 is returned.
double mg_tail_bound(double m, const MartingaleBoundParams& p);

/// Discrete-time chain bound: a_k is the summed one-step conditional
/// variance bound, beta the one-step shift bound on P^i f.
struct DiscreteChainBoundParams {
  double a_k = 0.0;
  double beta = 0.0;
  long k = 0;  // informational
};

/// Equals mg_tail_bound with delta = a_k, gamma = 2 beta.
double discrete_chain_tail_bound(double m, const DiscreteChainBoundParams& p);

struct ContinuousChainBoundParams {
  double a_hat_t = 0.0;
  double beta_hat = 0.0;
  double t = 0.0;  // informational
};

/// Equals mg_tail_bound with delta = a_hat_t, gamma = beta_hat.
double continuous_chain_tail_bound(double m,
                                   const ContinuousChainBoundParams& p);

enum class ContractiveMode { discrete_a, discrete_b, continuous_a, continuous_b };

struct ContractiveParams {
  double L = 0.0;    // Lipschitz constant of f w.r.t. the metric
  double D = 0.0;    // max jump distance
  double rho = 0.0;  // contraction constant
  std::optional<double> q;        // max total exit rate (continuous modes)
  std::optional<double> b;        // excursion correction b_k / b_t ((b) modes)
  std::optional<double> horizon;  // k steps or t time ((b) modes)
};

/// Tail bounds under a contractive coupling.  Denominators per mode:
///   discrete_a:   2 L^2 D^2 / (2 rho - rho^2) + 4 L D m / 3
///   discrete_b:   adds 16 k b^2 and replaces L D by L D + 2 b in the m term
///   continuous_a: q L^2 D^2 / rho + 2 L D m / 3
///   continuous_b: adds 16 q t b^2 and replaces L D by L D + 2 b
double contractive_bound(double m, const ContractiveParams& p,
                         ContractiveMode mode);

/// Heuristic stand-in for the excursion constant b_k / b_t: the largest
/// observed excursion value.  The exact constant is a supremum over the
/// state space and is not computable in general.
double heuristic_excursion_constant(std::span<const double> excursion_values);

struct HittingBoundParams {
  double phi = 0.0;  // scaled start height
  double t0 = 0.0;   // time horizon
  double B = 0.0;    // max jump magnitude of f
  double eta = 0.0;  // min guaranteed jump magnitude
  double r = 0.0;    // half the guaranteed jump rate
  double K_H = 1.0;  // universal constant, exposed as a parameter
};

/// min(1, phi / sqrt(t0) + K_H (B / (eta sqrt(r t0)))^{1/4}),
/// an upper bound on P(T* >= t0).
double hitting_time_bound(const HittingBoundParams& p);

struct WalkHittingRow {
  double t0 = 0.0;
  double empirical = 0.0;  // P(T* >= t0) over the trials
  double se = 0.0;
  double bound = 0.0;  // hitting_time_bound at this t0
};

/// Desk experiment behind hitting_time_bound: a continuous-time +-1 walk
/// with rate `rate` in each direction, started at round(phi sqrt(rate)),
/// T* the first visit to 0.  Reports the empirical miss probability
/// P(T* >= t0) for each t0 against the bound with B = eta = 1.
std::vector<WalkHittingRow> walk_hitting_experiment(
    double phi, double rate, std::span<const double> t0_grid,
    std::size_t trials, SeedSpec seed, double K_H = 1.0,
    std::size_t threads = 1);

struct TailVerifyRow {
  double m = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct TailVerifyReport {
  std::vector<TailVerifyRow> rows;
  bool all_pass() const;
};

/// Falsification harness: draws n_samples values (one independent stream per
/// sample), and for each m reports the empirical tail P(|value - center| >= m)
/// against bound_fn(m), with a binomial standard error.  A row passes iff
/// empirical <= bound + 3 SE, so Monte-Carlo noise cannot spuriously fail a
/// true inequality at these sample sizes.
TailVerifyReport empirical_tail_verify(
    const std::function<double(SeedSpec)>& sampler, double center,
    std::span<const double> m_grid,
    const std::function<double(double)>& bound_fn, std::size_t n_samples,
    SeedSpec seed, std::size_t threads = 1);

}  // namespace chainmix

#endif
