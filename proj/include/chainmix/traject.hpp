#ifndef CHAINMIX_TRAJECT_HPP
#define CHAINMIX_TRAJECT_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "chainmix/prob.hpp"
#include "chainmix/rng.hpp"

namespace chainmix {

/// Map from a state to its outgoing (target, rate) pairs; rates must be > 0
/// and the listed targets must differ from the state (self-loops are not
/// part of a continuous-time description).
template <class State>
using RateFunction =
    std::function<std::vector<std::pair<State, double>>(const State&)>;

/// Realized trajectory of a continuous-time chain.  states has one more
/// entry than times; states[0] is the initial state, states[i+1] is the
/// state entered at times[i].
template <class State>
struct JumpPath {
  std::vector<double> times;
  std::vector<State> states;
  double t_end = 0.0;

  std::size_t jump_count() const { return times.size(); }

  const State& state_at(double t) const {
    if (t < 0.0 || t > t_end) throw std::out_of_range("JumpPath::state_at");
    std::size_t i = 0;
    while (i < times.size() && times[i] <= t) ++i;
    return states[i];
  }
};

/// Default cap on the number of jumps in one continuous-time run.  The
/// models here are non-explosive; exceeding the cap means a modelling or
/// parameter error, and we fail loudly instead of looping forever.
inline constexpr std::size_t kDefaultJumpCap = 100000000;

/// Exact event-driven simulation: exponential holding time with the total
/// exit rate, jump chosen proportionally to the rates.  on_jump(t, state) is
/// invoked after each jump; return false from it to stop early.
template <class State, class OnJump>
State run_ctmc(const RateFunction<State>& rates, State x0, double t_end,
               Rng& rng, OnJump&& on_jump,
               std::size_t jump_cap = kDefaultJumpCap) {
  if (t_end < 0.0) throw std::invalid_argument("run_ctmc: t_end < 0");
  State x = std::move(x0);
  double t = 0.0;
  std::size_t jumps = 0;
  std::vector<double> weights;
  while (true) {
    const auto out = rates(x);
    double total = 0.0;
    weights.clear();
    for (const auto& [target, rate] : out) {
      if (!(rate > 0.0))
        throw std::invalid_argument("run_ctmc: non-positive rate");
      weights.push_back(rate);
      total += rate;
    }
    if (total == 0.0) return x;  // absorbing
    t += rng.exponential(total);
    if (t > t_end) return x;
    if (++jumps > jump_cap)
      throw std::runtime_error("run_ctmc: jump cap exceeded (explosion guard)");
    x = out[rng.categorical(weights, total)].first;
    if (!on_jump(t, x)) return x;
  }
}

template <class State>
JumpPath<State> simulate_ctmc(const RateFunction<State>& rates, State x0,
                              double t_end, SeedSpec seed,
                              std::size_t jump_cap = kDefaultJumpCap) {
  Rng rng(seed);
  JumpPath<State> path;
  path.t_end = t_end;
  path.states.push_back(x0);
  run_ctmc<State>(
      rates, x0, t_end, rng,
      [&path](double t, const State& s) {
        path.times.push_back(t);
        path.states.push_back(s);
        return true;
      },
      jump_cap);
  return path;
}

/// States of the chain sampled at the given increasing times, simulating up
/// to grid.back().
template <class State>
std::vector<State> simulate_ctmc_at(const RateFunction<State>& rates, State x0,
                                    std::span<const double> grid, Rng& rng,
                                    std::size_t jump_cap = kDefaultJumpCap) {
  std::vector<State> out;
  out.reserve(grid.size());
  if (grid.empty()) return out;
  std::size_t next = 0;
  State last = x0;
  while (next < grid.size() && grid[next] <= 0.0) out.push_back(x0), ++next;
  if (next < grid.size()) {
    run_ctmc<State>(
        rates, x0, grid.back(), rng,
        [&](double t, const State& s) {
          while (next < grid.size() && grid[next] < t) {
            out.push_back(last);
            ++next;
          }
          last = s;
          return next < grid.size();
        },
        jump_cap);
    while (next < grid.size()) out.push_back(last), ++next;
  }
  return out;
}

/// Discrete-time trajectory of length r + 1, each step sampled from the row
/// of the current state.
std::vector<std::size_t> simulate_dtmc(const DenseKernel& k, std::size_t x0,
                                       long r, SeedSpec seed);

/// One step of the discrete chain from state i.
std::size_t dtmc_step(const DenseKernel& k, std::size_t i, Rng& rng);

template <class State>
std::map<State, double> empirical_distribution(std::span<const State> samples) {
  if (samples.empty())
    throw std::invalid_argument("empirical_distribution: empty input");
  std::map<State, double> freq;
  for (const State& s : samples) freq[s] += 1.0;
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& [_, f] : freq) f *= inv;
  return freq;
}

/// Lower bound on the TV distance between the laws behind two sample sets:
/// the maximal frequency discrepancy over a family of test sets.
template <class State>
double tv_lower_bound_from_samples(
    std::span<const State> s1, std::span<const State> s2,
    std::span<const std::function<bool(const State&)>> tests) {
  if (s1.empty() || s2.empty())
    throw std::invalid_argument("tv_lower_bound_from_samples: empty samples");
  if (tests.empty())
    throw std::invalid_argument("tv_lower_bound_from_samples: no tests");
  double best = 0.0;
  for (const auto& test : tests) {
    double f1 = 0.0, f2 = 0.0;
    for (const State& s : s1) f1 += test(s) ? 1.0 : 0.0;
    for (const State& s : s2) f2 += test(s) ? 1.0 : 0.0;
    f1 /= static_cast<double>(s1.size());
    f2 /= static_cast<double>(s2.size());
    const double d = f1 > f2 ? f1 - f2 : f2 - f1;
    if (d > best) best = d;
  }
  return best;
}

}  // namespace chainmix

#endif
