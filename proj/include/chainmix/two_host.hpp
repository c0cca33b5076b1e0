#ifndef CHAINMIX_TWO_HOST_HPP
#define CHAINMIX_TWO_HOST_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "chainmix/cutoff.hpp"
#include "chainmix/rng.hpp"
#include "chainmix/traject.hpp"

namespace chainmix {

/// Cross-infection / recovery rates of the two-host chain, with immigration
/// at rates mu*n and nu*n.  Subcriticality R = alpha*beta/(gamma*delta) < 1
/// is required throughout.
struct EpiParams {
  double alpha = 1.0, beta = 1.0;   // cross-infection
  double gamma = 2.0, delta = 2.0;  // recovery
  double mu = 1.0, nu = 1.0;        // immigration coefficients
  int n = 100;                      // scale parameter

  double R() const { return alpha * beta / (gamma * delta); }
  void validate() const;
};

using Vec2 = std::array<double, 2>;

/// Eigen-data of the drift matrix A = [[-gamma, alpha], [beta, -delta]].
struct Spectral {
  double rho = 0.0;        // slow decay rate, eigenvalue -rho
  double rho_prime = 0.0;  // fast decay rate, rho < rho_prime
  double theta = 0.0;        // positive root of beta t^2 + (delta-gamma) t - alpha
  double theta_prime = 0.0;  // negative root
  Vec2 v{};        // unit right eigenvector for -rho
  Vec2 v_prime{};  // unit right eigenvector for -rho_prime
  Vec2 c{};        // equilibrium point, -A^{-1} b with b = (mu, nu)
};

Spectral spectral_decompose(const EpiParams& p);

/// |z1| + theta |z2|.
double theta_norm(const Vec2& z, double theta);

/// Counts of infected hosts of each type.
struct EpiState {
  long x1 = 0;
  long x2 = 0;

  bool operator==(const EpiState&) const = default;
  auto operator<=>(const EpiState&) const = default;
};

/// Exact mean n*m_x(t) = n c + e^{At}(x - n c), via the eigen-expansion.
Vec2 mean_trajectory(const EpiParams& p, const EpiState& x, double t);

/// First time |e^{At}(x/n - c)| drops to n^{-1/2}: grid scan with step
/// 0.01/rho, then bisection to 1e-9 inside the first bracketing interval.
/// Returns 0 if the start is already within n^{-1/2}.
double travel_time(const EpiParams& p, const EpiState& x);

/// The four transitions of the chain: +e1 at alpha x2 + mu n, +e2 at
/// beta x1 + nu n, -e1 at gamma x1, -e2 at delta x2.
RateFunction<EpiState> epi_rates(const EpiParams& p);

struct CoupledEpiState {
  EpiState u;
  EpiState v;

  bool coalesced() const { return u == v; }
  bool operator==(const CoupledEpiState&) const = default;
  auto operator<=>(const CoupledEpiState&) const = default;
};

/// Contractive pair coupling: per coordinate, joint moves at the smaller
/// rate where the copies agree, fully independent moves where they differ.
/// The marginal rate of every move of each copy equals epi_rates exactly.
RateFunction<CoupledEpiState> coupled_rates(const EpiParams& p);

/// Generator of the coupling applied to the theta-distance at (u, v):
/// sum of rate * (d(after) - d(before)) over all coupled transitions.
double coupling_generator_on_distance(const EpiParams& p,
                                      const CoupledEpiState& s);

struct ContractionRow {
  double t = 0.0;
  double empirical_mean = 0.0;
  double se = 0.0;
  double bound = 0.0;  // e^{-rho t} d(u0, v0)
  bool pass = false;   // empirical <= bound (1 + 3 relative SE)
};

std::vector<ContractionRow> contraction_check(const EpiParams& p,
                                              const EpiState& u0,
                                              const EpiState& v0,
                                              std::span<const double> t_grid,
                                              std::size_t trials, SeedSpec seed,
                                              std::size_t threads = 1);

/// Endpoint of a burn-in run of length (log n + 10)/rho started from the
/// rounded equilibrium point n c.
std::vector<EpiState> equilibrium_sample(const EpiParams& p,
                                         std::size_t trials, SeedSpec seed,
                                         std::size_t threads = 1);

/// Empirical P(U(t_n(x) + s) != V(t_n(x) + s)) for each s, with U started
/// at x and V started from the provided equilibrium samples (one per trial),
/// coupled as in coupled_rates.  This upper-bounds the TV distance to
/// equilibrium at time t_n(x) + s.
TVProfile coalescence_tv_upper(const EpiParams& p, const EpiState& x,
                               std::span<const double> s_grid,
                               std::span<const EpiState> equilibrium_pool,
                               SeedSpec seed, std::size_t threads = 1);

struct TVLowerRow {
  double s = 0.0;
  bool skipped = false;  // t_n(x) - s < 0
  double lower_bound = 0.0;
  double se = 0.0;
};

/// TV lower bounds at times t_n(x) - s: maximal discrepancy between the
/// simulated law of X(t_n(x) - s) and the equilibrium samples over a radius
/// grid of Euclidean balls centered at n c (20 radii spanning
/// [sqrt(n)/2, n/2]).
std::vector<TVLowerRow> tv_lower_profile(const EpiParams& p, const EpiState& x,
                                         std::span<const double> s_grid,
                                         std::size_t trials,
                                         std::span<const EpiState> equilibrium_pool,
                                         SeedSpec seed,
                                         std::size_t threads = 1);

struct RegionPredicates {
  double H = 0.0;  // the D_n threshold actually used
  std::function<bool(const EpiState&)> in_E;  // n zeta <= |x - nc| <= n/zeta
  std::function<bool(const EpiState&)> in_D;  // ||x||_theta <= H n
};

/// Membership tests for E_n(zeta) and D_n(H); by default
/// H = max((1 v theta)(1/zeta + |c|), 4 ||b||_theta / rho), which makes
/// E_n(zeta) a subset of D_n(H).
RegionPredicates region_predicates(const EpiParams& p, double zeta,
                                   double H = 0.0);

/// Numerical estimate of the smallest ratio |e^{-As} z| e^{-rho s} / |z|
/// over the unit circle and s in [0, s_max] (diagnostic only).
double kappa_estimate(const EpiParams& p, double s_max = 5.0,
                      int circle_points = 360, int s_points = 200);

/// Starting states for the cut-off experiment: an 8-point angular grid
/// around n c on the two radii n zeta and n / zeta, clamped to non-negative
/// coordinates; clamped points that leave E_n(zeta) are dropped, and
/// duplicates removed.
std::vector<EpiState> cutoff_start_grid(const EpiParams& p, double zeta);

}  // namespace chainmix

#endif
