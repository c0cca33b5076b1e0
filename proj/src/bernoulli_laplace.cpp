#include "chainmix/bernoulli_laplace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chainmix {

void BLParams::validate() const {
  if (n < 2) throw std::invalid_argument("BLParams: n must be >= 2");
}

DenseKernel bl_kernel(const BLParams& p) {
  p.validate();
  const int n = p.n;
  DenseKernel k(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const double frac = static_cast<double>(j) / n;
    const double up = (1.0 - frac) * (1.0 - frac);
    const double down = frac * frac;
    if (j < n) k.at(j, j + 1) = up;
    if (j > 0) k.at(j, j - 1) = down;
    k.at(j, j) = 1.0 - up - down;
  }
  k.validate();
  return k;
}

ProbVector bl_equilibrium(const BLParams& p) {
  p.validate();
  const int n = p.n;
  // log pi(j) = log C(n,j) + log C(n,n-j) - log C(2n,n); the constant term
  // cancels in the renormalization.
  std::vector<double> logs(static_cast<std::size_t>(n) + 1);
  auto log_choose = [](int a, int b) {
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) -
           std::lgamma(a - b + 1.0);
  };
  double max_log = -1e300;
  for (int j = 0; j <= n; ++j) {
    logs[j] = 2.0 * log_choose(n, j);  // C(n,j) C(n,n-j) = C(n,j)^2
    max_log = std::max(max_log, logs[j]);
  }
  ProbVector pi{std::vector<double>(static_cast<std::size_t>(n) + 1)};
  double sum = 0.0;
  for (int j = 0; j <= n; ++j) {
    pi.p[j] = std::exp(logs[j] - max_log);
    sum += pi.p[j];
  }
  for (double& x : pi.p) x /= sum;
  pi.validate();
  return pi;
}

double bl_mean(int j, const BLParams& p, long r) {
  p.validate();
  if (j < 0 || j > p.n) throw std::invalid_argument("bl_mean: j out of range");
  if (r < 0) throw std::invalid_argument("bl_mean: r < 0");
  const double n = p.n;
  return n * ((j / n - 0.5) * std::pow(1.0 - 2.0 / n, static_cast<double>(r)) +
              0.5);
}

long bl_r_n(double delta, const BLParams& p) {
  p.validate();
  const double n = p.n;
  const double raw = std::floor(0.25 * n * std::log(n) + delta * n);
  if (raw < 0.0)
    throw std::invalid_argument("bl_r_n: negative step count");
  return static_cast<long>(raw);
}

TVProfile bl_tv_profile(const BLParams& p, int j0, long r_max) {
  p.validate();
  if (j0 < 0 || j0 > p.n) throw std::invalid_argument("bl_tv_profile: j0");
  if (r_max < 0) throw std::invalid_argument("bl_tv_profile: r_max < 0");
  const DenseKernel k = bl_kernel(p);
  const ProbVector pi = bl_equilibrium(p);
  ProbVector cur = ProbVector::point_mass(k.size(), j0);
  TVProfile prof;
  prof.kind = ProfileKind::exact;
  for (long r = 0; r <= r_max; ++r) {
    prof.times.push_back(static_cast<double>(r));
    prof.values.push_back(tv_distance(cur, pi));
    if (r < r_max) cur = evolve_distribution(k, cur, 1);
  }
  prof.validate();
  return prof;
}

std::vector<double> bl_variance_profile(const BLParams& p, int j0,
                                        long r_max) {
  const DenseKernel k = bl_kernel(p);
  ProbVector cur = ProbVector::point_mass(k.size(), j0);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r_max) + 1);
  for (long r = 0; r <= r_max; ++r) {
    out.push_back(distribution_variance(cur));
    if (r < r_max) cur = evolve_distribution(k, cur, 1);
  }
  return out;
}

void BLCoupledState::validate(const BLParams& p) const {
  if (!(0 <= lo && lo <= hi && hi <= p.n && hi - lo <= 1))
    throw std::invalid_argument("BLCoupledState: invalid");
}

BLCoupledState bl_coupled_step(const BLCoupledState& s, const BLParams& p,
                               Rng& rng) {
  s.validate(p);
  const double n = p.n;
  if (s.coalesced()) {
    const int j = s.lo;
    const double frac = j / n;
    const double up = (1.0 - frac) * (1.0 - frac);
    const double down = frac * frac;
    const double u = rng.uniform();
    if (u < up) return {j + 1, j + 1};
    if (u < up + down) return {j - 1, j - 1};
    return s;
  }
  const int j = s.lo;  // hi = j + 1
  const double fj = j / n, fj1 = (j + 1) / n;
  const double joint_up = (1.0 - fj1) * (1.0 - fj1);
  const double joint_down = fj * fj;
  // Residual singleton moves; at the edges they overlap into a simultaneous
  // opposite move of mass 1/n^2 (see header).
  const double overlap =
      std::max(0.0, (1.0 - fj) * (1.0 - fj) + fj1 * fj1 - 1.0);
  const double lo_up_alone =
      (1.0 - fj) * (1.0 - fj) - joint_up - overlap;  // coalesce at j+1
  const double hi_down_alone = fj1 * fj1 - joint_down - overlap;  // at j
  const double u = rng.uniform();
  double acc = joint_up;
  if (u < acc) return {j + 1, j + 2};
  acc += joint_down;
  if (u < acc) return {j - 1, j};
  acc += lo_up_alone;
  if (u < acc) return {j + 1, j + 1};
  acc += hi_down_alone;
  if (u < acc) return {j, j};
  // overlap (ordered pair unchanged) or both stay
  return s;
}

long bl_coalescence_time(BLCoupledState s, const BLParams& p, Rng& rng,
                         long step_cap) {
  long steps = 0;
  while (!s.coalesced()) {
    if (++steps > step_cap)
      throw std::runtime_error("bl_coalescence_time: step cap exceeded");
    s = bl_coupled_step(s, p, rng);
  }
  return steps;
}

void EhrenfestParams::validate() const {
  if (k < 1) throw std::invalid_argument("EhrenfestParams: k must be >= 1");
}

DenseKernel ehrenfest_kernel(const EhrenfestParams& p) {
  p.validate();
  const int k = p.k;
  DenseKernel kern(static_cast<std::size_t>(2 * k) + 1);
  for (int j = -k; j <= k; ++j) {
    const std::size_t idx = static_cast<std::size_t>(j + k);
    const double up = 0.25 - static_cast<double>(j) / (4.0 * k);
    const double down = 0.25 + static_cast<double>(j) / (4.0 * k);
    if (j < k) kern.at(idx, idx + 1) = up;
    if (j > -k) kern.at(idx, idx - 1) = down;
    kern.at(idx, idx) = 1.0 - (j < k ? up : 0.0) - (j > -k ? down : 0.0);
  }
  kern.validate();
  return kern;
}

ProbVector ehrenfest_equilibrium(const EhrenfestParams& p) {
  p.validate();
  const int k = p.k;
  const int balls = 2 * k;
  std::vector<double> logs(static_cast<std::size_t>(balls) + 1);
  double max_log = -1e300;
  for (int i = 0; i <= balls; ++i) {
    logs[i] = std::lgamma(balls + 1.0) - std::lgamma(i + 1.0) -
              std::lgamma(balls - i + 1.0) - balls * std::log(2.0);
    max_log = std::max(max_log, logs[i]);
  }
  ProbVector pi{std::vector<double>(static_cast<std::size_t>(balls) + 1)};
  double sum = 0.0;
  for (int i = 0; i <= balls; ++i) {
    pi.p[i] = std::exp(logs[i] - max_log);
    sum += pi.p[i];
  }
  for (double& x : pi.p) x /= sum;
  pi.validate();
  return pi;
}

std::vector<EhrenfestCheckRow> ehrenfest_tv_bound_check(
    const EhrenfestParams& p, int y0, std::span<const long> r_grid) {
  p.validate();
  if (y0 < -p.k || y0 > p.k)
    throw std::invalid_argument("ehrenfest_tv_bound_check: y0 out of range");
  const DenseKernel kern = ehrenfest_kernel(p);
  const ProbVector pi = ehrenfest_equilibrium(p);
  const double k = p.k;
  const double n = 4.0 * k;
  const double prefactor =
      (std::abs(static_cast<double>(y0)) + std::sqrt(k / 2.0)) / std::sqrt(k) +
      8.0;
  long r_max = 0;
  for (long r : r_grid) r_max = std::max(r_max, r);
  ProbVector cur =
      ProbVector::point_mass(kern.size(), static_cast<std::size_t>(y0 + p.k));
  std::vector<EhrenfestCheckRow> rows;
  std::vector<long> sorted(r_grid.begin(), r_grid.end());
  std::sort(sorted.begin(), sorted.end());
  long r = 0;
  for (long target : sorted) {
    if (target < 0)
      throw std::invalid_argument("ehrenfest_tv_bound_check: r < 0");
    for (; r < target; ++r) cur = evolve_distribution(kern, cur, 1);
    EhrenfestCheckRow row;
    row.r = target;
    row.tv = tv_distance(cur, pi);
    row.bound = prefactor * std::exp(-2.0 * static_cast<double>(target) / n);
    row.pass = row.tv <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

WindowFitReport bl_window_fit(std::span<const int> ns,
                              std::span<const TVProfile> profiles,
                              std::span<const double> delta_grid) {
  if (ns.size() != profiles.size())
    throw std::invalid_argument("bl_window_fit: size mismatch");
  WindowFitReport report;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const BLParams p{ns[i]};
    WindowFitEntry entry;
    entry.n = ns[i];
    for (double d : delta_grid) {
      long r;
      try {
        r = bl_r_n(d, p);
      } catch (const std::invalid_argument&) {
        continue;  // delta below -log(n)/4: no step count to test
      }
      const double tv = profiles[i].value_at(static_cast<double>(r));
      if (d < 0.0) {
        entry.c1 = std::max(entry.c1, (1.0 - tv) * std::exp(4.0 * d));
      } else {
        entry.c2 = std::max(entry.c2, tv * std::exp(2.0 * d));
      }
    }
    report.c1_max = std::max(report.c1_max, entry.c1);
    report.c2_max = std::max(report.c2_max, entry.c2);
    report.per_n.push_back(entry);
  }
  return report;
}

std::vector<double> bl_default_delta_grid() {
  std::vector<double> grid;
  for (int i = -12; i <= 12; ++i) grid.push_back(0.25 * i);
  return grid;
}

}  // namespace chainmix
