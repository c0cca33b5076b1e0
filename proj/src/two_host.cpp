#include "chainmix/two_host.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "chainmix/parallel.hpp"

namespace chainmix {

namespace {

double norm2(const Vec2& z) { return std::sqrt(z[0] * z[0] + z[1] * z[1]); }

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }

/// Coordinates (lambda, lambda') of z in the eigenbasis (v, v').
Vec2 eigen_coords(const Spectral& s, const Vec2& z) {
  const double det =
      s.v[0] * s.v_prime[1] - s.v[1] * s.v_prime[0];
  return {(z[0] * s.v_prime[1] - z[1] * s.v_prime[0]) / det,
          (s.v[0] * z[1] - s.v[1] * z[0]) / det};
}

Vec2 flow(const Spectral& s, const Vec2& z, double t) {
  const Vec2 lam = eigen_coords(s, z);
  const double a = lam[0] * std::exp(-s.rho * t);
  const double b = lam[1] * std::exp(-s.rho_prime * t);
  return {a * s.v[0] + b * s.v_prime[0], a * s.v[1] + b * s.v_prime[1]};
}

}  // namespace

void EpiParams::validate() const {
  if (!(alpha > 0 && beta > 0 && gamma > 0 && delta > 0 && mu > 0 && nu > 0))
    throw std::invalid_argument("EpiParams: all rate constants must be > 0");
  if (n < 1) throw std::invalid_argument("EpiParams: n must be >= 1");
  if (!(R() < 1.0))
    throw std::invalid_argument("EpiParams: R >= 1 (supercritical)");
}

Spectral spectral_decompose(const EpiParams& p) {
  p.validate();
  Spectral s;
  // theta solves beta t^2 + (delta - gamma) t - alpha = 0; the positive root
  // lies in (alpha/delta, gamma/beta).
  const double disc = (p.delta - p.gamma) * (p.delta - p.gamma) +
                      4.0 * p.beta * p.alpha;
  const double root = std::sqrt(disc);
  s.theta = (-(p.delta - p.gamma) + root) / (2.0 * p.beta);
  s.theta_prime = (-(p.delta - p.gamma) - root) / (2.0 * p.beta);
  s.rho = p.gamma - p.beta * s.theta;
  s.rho_prime = p.gamma - p.beta * s.theta_prime;
  if (!(s.rho > 0.0) || !(s.rho < s.rho_prime))
    throw std::runtime_error("spectral_decompose: defective or non-subcritical"
                             " drift matrix");
  auto unit = [](Vec2 z) {
    const double nz = norm2(z);
    return Vec2{z[0] / nz, z[1] / nz};
  };
  // (A + rho I) v = 0 with A = [[-gamma, alpha], [beta, -delta]].
  s.v = unit({p.alpha, p.gamma - s.rho});
  s.v_prime = unit({p.alpha, p.gamma - s.rho_prime});
  const double scale = 1.0 / (p.gamma * p.delta * (1.0 - p.R()));
  s.c = {scale * (p.alpha * p.nu + p.delta * p.mu),
         scale * (p.beta * p.mu + p.gamma * p.nu)};
  return s;
}

double theta_norm(const Vec2& z, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta_norm: theta <= 0");
  return std::abs(z[0]) + theta * std::abs(z[1]);
}

Vec2 mean_trajectory(const EpiParams& p, const EpiState& x, double t) {
  if (t < 0.0) throw std::invalid_argument("mean_trajectory: t < 0");
  const Spectral s = spectral_decompose(p);
  if (t == 0.0)
    return {static_cast<double>(x.x1), static_cast<double>(x.x2)};
  const double n = p.n;
  const Vec2 z = sub({x.x1 / n, x.x2 / n}, s.c);
  const Vec2 e = flow(s, z, t);
  return {n * (s.c[0] + e[0]), n * (s.c[1] + e[1])};
}

double travel_time(const EpiParams& p, const EpiState& x) {
  const Spectral s = spectral_decompose(p);
  const double n = p.n;
  const double target = 1.0 / std::sqrt(n);
  const Vec2 z = sub({x.x1 / n, x.x2 / n}, s.c);
  if (norm2(z) <= target) return 0.0;
  auto g = [&](double t) { return norm2(flow(s, z, t)); };
  // First crossing by grid scan: |e^{At}z| need not be monotone for
  // non-normal A, so we bracket the first sub-target point and bisect.
  const double step = 0.01 / s.rho;
  const Vec2 lam = eigen_coords(s, z);
  const double amp = std::abs(lam[0]) + std::abs(lam[1]);
  const double t_cap = (std::log(amp * std::sqrt(n) + 1.0) + 40.0) / s.rho;
  double lo = 0.0, hi = step;
  while (g(hi) > target) {
    lo = hi;
    hi += step;
    if (hi > t_cap)
      throw std::runtime_error("travel_time: no crossing found (unexpected)");
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) <= target ? hi : lo) = mid;
  }
  return hi;
}

RateFunction<EpiState> epi_rates(const EpiParams& p) {
  p.validate();
  return [p](const EpiState& x) {
    std::vector<std::pair<EpiState, double>> out;
    out.reserve(4);
    const double n = p.n;
    out.push_back({{x.x1 + 1, x.x2}, p.alpha * x.x2 + p.mu * n});
    out.push_back({{x.x1, x.x2 + 1}, p.beta * x.x1 + p.nu * n});
    if (x.x1 > 0) out.push_back({{x.x1 - 1, x.x2}, p.gamma * x.x1});
    if (x.x2 > 0) out.push_back({{x.x1, x.x2 - 1}, p.delta * x.x2});
    return out;
  };
}

namespace {

constexpr std::array<std::array<long, 2>, 4> kJumps{
    {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

double jump_rate(const EpiParams& p, const EpiState& x, std::size_t j) {
  switch (j) {
    case 0: return p.alpha * x.x2 + p.mu * p.n;
    case 1: return p.beta * x.x1 + p.nu * p.n;
    case 2: return x.x1 > 0 ? p.gamma * x.x1 : 0.0;
    default: return x.x2 > 0 ? p.delta * x.x2 : 0.0;
  }
}

EpiState apply_jump(const EpiState& x, std::size_t j) {
  return {x.x1 + kJumps[j][0], x.x2 + kJumps[j][1]};
}

template <class Emit>
void enumerate_coupled(const EpiParams& p, const CoupledEpiState& s,
                       Emit&& emit) {
  for (std::size_t j = 0; j < 4; ++j) {
    const bool coord1 = kJumps[j][0] != 0;
    const bool agree = coord1 ? s.u.x1 == s.v.x1 : s.u.x2 == s.v.x2;
    const double ru = jump_rate(p, s.u, j);
    const double rv = jump_rate(p, s.v, j);
    if (agree) {
      const double joint = std::min(ru, rv);
      if (joint > 0.0)
        emit(CoupledEpiState{apply_jump(s.u, j), apply_jump(s.v, j)}, joint);
      if (ru > joint)
        emit(CoupledEpiState{apply_jump(s.u, j), s.v}, ru - joint);
      if (rv > joint)
        emit(CoupledEpiState{s.u, apply_jump(s.v, j)}, rv - joint);
    } else {
      if (ru > 0.0) emit(CoupledEpiState{apply_jump(s.u, j), s.v}, ru);
      if (rv > 0.0) emit(CoupledEpiState{s.u, apply_jump(s.v, j)}, rv);
    }
  }
}

}  // namespace

RateFunction<CoupledEpiState> coupled_rates(const EpiParams& p) {
  p.validate();
  return [p](const CoupledEpiState& s) {
    std::vector<std::pair<CoupledEpiState, double>> out;
    out.reserve(8);
    enumerate_coupled(p, s, [&out](const CoupledEpiState& next, double rate) {
      out.push_back({next, rate});
    });
    return out;
  };
}

double coupling_generator_on_distance(const EpiParams& p,
                                      const CoupledEpiState& s) {
  const Spectral spec = spectral_decompose(p);
  auto dist = [&](const CoupledEpiState& c) {
    return theta_norm({static_cast<double>(c.u.x1 - c.v.x1),
                       static_cast<double>(c.u.x2 - c.v.x2)},
                      spec.theta);
  };
  const double d0 = dist(s);
  double drift = 0.0;
  enumerate_coupled(p, s, [&](const CoupledEpiState& next, double rate) {
    drift += rate * (dist(next) - d0);
  });
  return drift;
}

std::vector<ContractionRow> contraction_check(const EpiParams& p,
                                              const EpiState& u0,
                                              const EpiState& v0,
                                              std::span<const double> t_grid,
                                              std::size_t trials, SeedSpec seed,
                                              std::size_t threads) {
  if (trials < 1000)
    throw std::invalid_argument("contraction_check: trials < 1e3");
  const Spectral spec = spectral_decompose(p);
  const double d0 = theta_norm({static_cast<double>(u0.x1 - v0.x1),
                                static_cast<double>(u0.x2 - v0.x2)},
                               spec.theta);
  const RateFunction<CoupledEpiState> rates = coupled_rates(p);
  const std::size_t m = t_grid.size();
  std::vector<double> distances(trials * m);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed.stream(i));
    const auto states =
        simulate_ctmc_at<CoupledEpiState>(rates, {u0, v0}, t_grid, rng);
    for (std::size_t j = 0; j < m; ++j)
      distances[i * m + j] =
          theta_norm({static_cast<double>(states[j].u.x1 - states[j].v.x1),
                      static_cast<double>(states[j].u.x2 - states[j].v.x2)},
                     spec.theta);
  });
  std::vector<ContractionRow> rows;
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      const double d = distances[i * m + j];
      sum += d;
      sumsq += d * d;
    }
    const double nt = static_cast<double>(trials);
    ContractionRow row;
    row.t = t_grid[j];
    row.empirical_mean = sum / nt;
    const double var = std::max(0.0, sumsq / nt - row.empirical_mean *
                                                      row.empirical_mean);
    row.se = std::sqrt(var / nt);
    row.bound = std::exp(-spec.rho * row.t) * d0;
    const double rel_se =
        row.empirical_mean > 0.0 ? row.se / row.empirical_mean : 0.0;
    row.pass = row.empirical_mean <= row.bound * (1.0 + 3.0 * rel_se);
    rows.push_back(row);
  }
  return rows;
}

std::vector<EpiState> equilibrium_sample(const EpiParams& p,
                                         std::size_t trials, SeedSpec seed,
                                         std::size_t threads) {
  if (trials < 1) throw std::invalid_argument("equilibrium_sample: trials");
  const Spectral spec = spectral_decompose(p);
  const double burn_in = (std::log(static_cast<double>(p.n)) + 10.0) /
                         spec.rho;
  const EpiState start{std::lround(p.n * spec.c[0]),
                       std::lround(p.n * spec.c[1])};
  const RateFunction<EpiState> rates = epi_rates(p);
  std::vector<EpiState> samples(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed.stream(i));
    samples[i] = run_ctmc<EpiState>(rates, start, burn_in, rng,
                                    [](double, const EpiState&) { return true; });
  });
  return samples;
}

TVProfile coalescence_tv_upper(const EpiParams& p, const EpiState& x,
                               std::span<const double> s_grid,
                               std::span<const EpiState> equilibrium_pool,
                               SeedSpec seed, std::size_t threads) {
  if (equilibrium_pool.size() < 1000)
    throw std::invalid_argument("coalescence_tv_upper: trials < 1e3");
  const double t_n = travel_time(p, x);
  std::vector<double> s_sorted(s_grid.begin(), s_grid.end());
  std::sort(s_sorted.begin(), s_sorted.end());
  const double horizon = t_n + s_sorted.back();
  const RateFunction<CoupledEpiState> rates = coupled_rates(p);
  const std::size_t trials = equilibrium_pool.size();
  // Coalescence is absorbing under this coupling, so the coalescence time
  // of each pair determines the indicator at every s.
  std::vector<double> coalesce_at(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(seed.stream(i));
    CoupledEpiState s0{x, equilibrium_pool[i]};
    double tau = std::numeric_limits<double>::infinity();
    if (s0.coalesced()) {
      tau = 0.0;
    } else {
      run_ctmc<CoupledEpiState>(rates, s0, horizon, rng,
                                [&tau](double t, const CoupledEpiState& s) {
                                  if (s.coalesced()) {
                                    tau = t;
                                    return false;
                                  }
                                  return true;
                                });
    }
    coalesce_at[i] = tau;
  });
  TVProfile prof;
  prof.kind = ProfileKind::mc_upper;
  const double nt = static_cast<double>(trials);
  for (double s : s_sorted) {
    std::size_t not_coalesced = 0;
    for (double tau : coalesce_at)
      if (tau > t_n + s) ++not_coalesced;
    const double est = static_cast<double>(not_coalesced) / nt;
    prof.times.push_back(t_n + s);
    prof.values.push_back(est);
    prof.se.push_back(std::sqrt(est * (1.0 - est) / nt));
  }
  prof.validate();
  return prof;
}

std::vector<TVLowerRow> tv_lower_profile(const EpiParams& p, const EpiState& x,
                                         std::span<const double> s_grid,
                                         std::size_t trials,
                                         std::span<const EpiState> equilibrium_pool,
                                         SeedSpec seed, std::size_t threads) {
  if (trials < 1000)
    throw std::invalid_argument("tv_lower_profile: trials < 1e3");
  if (equilibrium_pool.empty())
    throw std::invalid_argument("tv_lower_profile: empty equilibrium pool");
  const Spectral spec = spectral_decompose(p);
  const double t_n = travel_time(p, x);
  const double n = p.n;
  const Vec2 center{n * spec.c[0], n * spec.c[1]};
  std::vector<double> radii;
  const double r_lo = 0.5 * std::sqrt(n), r_hi = 0.5 * n;
  for (int i = 0; i < 20; ++i)
    radii.push_back(r_lo + (r_hi - r_lo) * i / 19.0);
  auto in_ball = [&center](const EpiState& w, double radius) {
    const double dx = w.x1 - center[0], dy = w.x2 - center[1];
    return dx * dx + dy * dy <= radius * radius;
  };
  const RateFunction<EpiState> rates = epi_rates(p);
  std::vector<TVLowerRow> rows;
  std::size_t stream_base = 0;
  for (double s : s_grid) {
    TVLowerRow row;
    row.s = s;
    const double t = t_n - s;
    if (t < 0.0) {
      row.skipped = true;
      rows.push_back(row);
      continue;
    }
    std::vector<EpiState> endpoints(trials);
    parallel_for(trials, threads, [&](std::size_t i) {
      Rng rng(seed.stream(stream_base + i));
      endpoints[i] = run_ctmc<EpiState>(
          rates, x, t, rng, [](double, const EpiState&) { return true; });
    });
    stream_base += trials;
    // Max discrepancy over the radius grid of centered balls; a max over
    // radii is still a valid TV lower bound.
    const double n1 = static_cast<double>(endpoints.size());
    const double n2 = static_cast<double>(equilibrium_pool.size());
    for (double radius : radii) {
      double f1 = 0.0, f2 = 0.0;
      for (const EpiState& w : endpoints) f1 += in_ball(w, radius) ? 1 : 0;
      for (const EpiState& w : equilibrium_pool)
        f2 += in_ball(w, radius) ? 1 : 0;
      f1 /= n1;
      f2 /= n2;
      const double d = std::abs(f1 - f2);
      if (d > row.lower_bound) {
        row.lower_bound = d;
        row.se = std::sqrt(f1 * (1.0 - f1) / n1 + f2 * (1.0 - f2) / n2);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

RegionPredicates region_predicates(const EpiParams& p, double zeta, double H) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("region_predicates: zeta outside (0,1)");
  const Spectral s = spectral_decompose(p);
  const double theta_cap = std::max(1.0, s.theta);
  const double b_norm = p.mu + s.theta * p.nu;
  RegionPredicates preds;
  preds.H = H > 0.0 ? H
                    : std::max(theta_cap * (1.0 / zeta + norm2(s.c)),
                               4.0 * b_norm / s.rho);
  const double n = p.n;
  const Vec2 center{n * s.c[0], n * s.c[1]};
  const double theta = s.theta;
  const double Hn = preds.H * n;
  preds.in_E = [center, n, zeta](const EpiState& x) {
    const double dx = x.x1 - center[0], dy = x.x2 - center[1];
    const double d = std::sqrt(dx * dx + dy * dy);
    return n * zeta <= d && d <= n / zeta;
  };
  preds.in_D = [theta, Hn](const EpiState& x) {
    return std::abs(static_cast<double>(x.x1)) +
               theta * std::abs(static_cast<double>(x.x2)) <=
           Hn;
  };
  return preds;
}

double kappa_estimate(const EpiParams& p, double s_max, int circle_points,
                      int s_points) {
  const Spectral spec = spectral_decompose(p);
  double kappa = std::numeric_limits<double>::infinity();
  for (int i = 0; i < circle_points; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / circle_points;
    const Vec2 z{std::cos(phi), std::sin(phi)};
    const Vec2 lam = eigen_coords(spec, z);
    for (int j = 0; j <= s_points; ++j) {
      const double s = s_max * j / s_points;
      // e^{-As} z grows along the eigenbasis with rates rho, rho'.
      const double a = lam[0] * std::exp(spec.rho * s);
      const double b = lam[1] * std::exp(spec.rho_prime * s);
      const Vec2 grown{a * spec.v[0] + b * spec.v_prime[0],
                       a * spec.v[1] + b * spec.v_prime[1]};
      kappa = std::min(kappa, norm2(grown) * std::exp(-spec.rho * s));
    }
  }
  return kappa;
}

std::vector<EpiState> cutoff_start_grid(const EpiParams& p, double zeta) {
  const Spectral s = spectral_decompose(p);
  const RegionPredicates preds = region_predicates(p, zeta);
  const double n = p.n;
  std::set<EpiState> starts;
  for (double radius : {n * zeta, n / zeta}) {
    for (int j = 0; j < 8; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / 8.0;
      EpiState x{std::lround(n * s.c[0] + radius * std::cos(phi)),
                 std::lround(n * s.c[1] + radius * std::sin(phi))};
      x.x1 = std::max(x.x1, 0L);
      x.x2 = std::max(x.x2, 0L);
      if (preds.in_E(x)) starts.insert(x);
    }
  }
  return {starts.begin(), starts.end()};
}

}  // namespace chainmix
