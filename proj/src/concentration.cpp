#include "chainmix/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chainmix/parallel.hpp"

namespace chainmix {

namespace {
double clamped_tail(double m, double denominator) {
  if (m < 0.0) throw std::invalid_argument("tail bound: m < 0");
  if (m == 0.0) return 1.0;
  if (denominator <= 0.0) return 0.0;  // degenerate bound
  return std::min(1.0, 2.0 * std::exp(-m * m / denominator));
}
}  // namespace

double mg_tail_bound(double m, const MartingaleBoundParams& p) {
  if (p.delta < 0.0 || p.gamma < 0.0)
    throw std::invalid_argument("mg_tail_bound: negative parameter");
  return clamped_tail(m, 2.0 * p.delta + 2.0 * p.gamma * m / 3.0);
}

double discrete_chain_tail_bound(double m, const DiscreteChainBoundParams& p) {
  if (p.a_k < 0.0 || p.beta < 0.0)
    throw std::invalid_argument("discrete_chain_tail_bound: negative parameter");
  return mg_tail_bound(m, MartingaleBoundParams{p.a_k, 2.0 * p.beta});
}

double continuous_chain_tail_bound(double m,
                                   const ContinuousChainBoundParams& p) {
  if (p.a_hat_t < 0.0 || p.beta_hat < 0.0)
    throw std::invalid_argument(
        "continuous_chain_tail_bound: negative parameter");
  return mg_tail_bound(m, MartingaleBoundParams{p.a_hat_t, p.beta_hat});
}

double contractive_bound(double m, const ContractiveParams& p,
                         ContractiveMode mode) {
  if (!(p.L > 0.0) || !(p.D > 0.0) || !(p.rho > 0.0))
    throw std::invalid_argument("contractive_bound: L, D, rho must be > 0");
  const bool continuous = mode == ContractiveMode::continuous_a ||
                          mode == ContractiveMode::continuous_b;
  const bool excursion = mode == ContractiveMode::discrete_b ||
                         mode == ContractiveMode::continuous_b;
  if (!continuous && p.rho > 1.0)
    throw std::invalid_argument("contractive_bound: discrete rho > 1");
  if (continuous && !p.q)
    throw std::invalid_argument("contractive_bound: q required");
  if (excursion && !p.horizon)
    throw std::invalid_argument("contractive_bound: horizon required");
  const double LD = p.L * p.D;
  const double b = excursion ? p.b.value_or(0.0) : 0.0;
  if (b < 0.0) throw std::invalid_argument("contractive_bound: b < 0");

  double denom;
  if (continuous) {
    if (!(*p.q > 0.0)) throw std::invalid_argument("contractive_bound: q <= 0");
    denom = *p.q * LD * LD / p.rho + 2.0 * (LD + 2.0 * b) * m / 3.0;
    if (excursion) denom += 16.0 * *p.q * *p.horizon * b * b;
  } else {
    denom = 2.0 * LD * LD / (2.0 * p.rho - p.rho * p.rho) +
            4.0 * (LD + 2.0 * b) * m / 3.0;
    if (excursion) denom += 16.0 * *p.horizon * b * b;
  }
  return clamped_tail(m, denom);
}

double heuristic_excursion_constant(std::span<const double> excursion_values) {
  double b = 0.0;
  for (double v : excursion_values) b = std::max(b, std::abs(v));
  return b;
}

double hitting_time_bound(const HittingBoundParams& p) {
  if (!(p.B >= p.eta) || !(p.eta > 0.0) || !(p.r > 0.0) || !(p.t0 > 0.0))
    throw std::invalid_argument("hitting_time_bound: invalid parameters");
  const double raw = p.phi / std::sqrt(p.t0) +
                     p.K_H * std::pow(p.B / (p.eta * std::sqrt(p.r * p.t0)),
                                      0.25);
  return std::min(1.0, raw);
}

std::vector<WalkHittingRow> walk_hitting_experiment(
    double phi, double rate, std::span<const double> t0_grid,
    std::size_t trials, SeedSpec seed, double K_H, std::size_t threads) {
  if (!(phi > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("walk_hitting_experiment: phi, rate must be > 0");
  if (trials < 1000)
    throw std::invalid_argument("walk_hitting_experiment: trials < 1e3");
  if (t0_grid.empty())
    throw std::invalid_argument("walk_hitting_experiment: empty t0 grid");
  double horizon = 0.0;
  for (double t0 : t0_grid) {
    if (!(t0 > 0.0))
      throw std::invalid_argument("walk_hitting_experiment: t0 <= 0");
    horizon = std::max(horizon, t0);
  }
  const long x0 = std::lround(phi * std::sqrt(rate));
  const double total_rate = 2.0 * rate;
  std::vector<double> hit_times(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed.stream(i));
    long x = x0;
    double t = 0.0;
    while (x != 0) {
      t += rng.exponential(total_rate);
      if (t > horizon) {
        t = std::numeric_limits<double>::infinity();
        break;
      }
      x += rng.uniform() < 0.5 ? 1 : -1;
    }
    hit_times[i] = t;
  });
  std::vector<WalkHittingRow> rows;
  const double n = static_cast<double>(trials);
  for (double t0 : t0_grid) {
    std::size_t misses = 0;
    for (double tau : hit_times)
      if (tau >= t0) ++misses;
    WalkHittingRow row;
    row.t0 = t0;
    row.empirical = static_cast<double>(misses) / n;
    row.se = std::sqrt(row.empirical * (1.0 - row.empirical) / n);
    row.bound = hitting_time_bound({phi, t0, 1.0, 1.0, rate, K_H});
    rows.push_back(row);
  }
  return rows;
}

bool TailVerifyReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const TailVerifyRow& r) { return r.pass; });
}

TailVerifyReport empirical_tail_verify(
    const std::function<double(SeedSpec)>& sampler, double center,
    std::span<const double> m_grid,
    const std::function<double(double)>& bound_fn, std::size_t n_samples,
    SeedSpec seed, std::size_t threads) {
  if (n_samples < 1000)
    throw std::invalid_argument("empirical_tail_verify: n_samples < 1e3");
  std::vector<double> deviations(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    deviations[i] = std::abs(sampler(seed.stream(i)) - center);
  });

  TailVerifyReport report;
  const double n = static_cast<double>(n_samples);
  for (double m : m_grid) {
    std::size_t hits = 0;
    for (double d : deviations)
      if (d >= m) ++hits;
    TailVerifyRow row;
    row.m = m;
    row.empirical = static_cast<double>(hits) / n;
    row.bound = bound_fn(m);
    row.se = std::sqrt(row.empirical * (1.0 - row.empirical) / n);
    row.pass = row.empirical <= row.bound + 3.0 * row.se;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace chainmix
