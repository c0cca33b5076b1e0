#ifndef CHAINMIX_BERNOULLI_LAPLACE_HPP
#define CHAINMIX_BERNOULLI_LAPLACE_HPP

#include <span>
#include <vector>

#include "chainmix/cutoff.hpp"
#include "chainmix/prob.hpp"
#include "chainmix/rng.hpp"

namespace chainmix {

/// Two urns with n balls of each colour; the state is the number of red
/// balls in the left urn.
struct BLParams {
  int n = 2;

  void validate() const;
};

/// Lazy birth-death kernel on {0..n}: from j, up with probability
/// (1 - j/n)^2, down with (j/n)^2, stay with the remainder.
DenseKernel bl_kernel(const BLParams& p);

/// Hypergeometric(2n, n, n) equilibrium, computed via log-gamma sums and
/// renormalized (direct factorials overflow near n = 90).
ProbVector bl_equilibrium(const BLParams& p);

/// Exact expectation E_j X(r) = n ((j/n - 1/2)(1 - 2/n)^r + 1/2).
double bl_mean(int j, const BLParams& p, long r);

/// r_n(delta) = floor(n log n / 4 + delta n); throws if negative.
long bl_r_n(double delta, const BLParams& p);

/// Exact TV profile of the chain started at j0 against the equilibrium,
/// for r = 0..r_max.
TVProfile bl_tv_profile(const BLParams& p, int j0, long r_max);

/// Exact per-step variance profile Var_j X(r), r = 0..r_max.
std::vector<double> bl_variance_profile(const BLParams& p, int j0, long r_max);

/// Two coupled copies, at distance 0 or 1 in the monotone coupling.
struct BLCoupledState {
  int lo = 0;
  int hi = 0;

  bool coalesced() const { return lo == hi; }
  void validate(const BLParams& p) const;
};

/// One step of the monotone coupling.  From a split state (j, j+1) the
/// copies move together up with probability (1 - (j+1)/n)^2 and down with
/// (j/n)^2, and coalesce with probability exactly 2/n for 1 <= j <= n-2.
/// At the edge states j = 0 and j = n-1 the literal construction has a mass
/// deficit of 1/n^2: there the residual up- and down-moves overlap in a
/// simultaneous opposite move (which leaves the ordered pair unchanged), and
/// the coalescence probability is 2/n - 2/n^2, forced by the marginals.
BLCoupledState bl_coupled_step(const BLCoupledState& s, const BLParams& p,
                               Rng& rng);

/// Number of steps until a split state coalesces.
long bl_coalescence_time(BLCoupledState s, const BLParams& p, Rng& rng,
                         long step_cap = 100000000);

/// Ehrenfest surrogate with 2k balls, n = 4k.
struct EhrenfestParams {
  int k = 1;

  void validate() const;
};

/// Kernel on {-k..k} stored at index j + k: up 1/4 - j/4k, down 1/4 + j/4k,
/// stay 1/2.  Stationary law is Binomial(2k, 1/2) shifted by -k.
DenseKernel ehrenfest_kernel(const EhrenfestParams& p);

/// Binomial(2k, 1/2) * delta_{-k} as a ProbVector over {-k..k}.
ProbVector ehrenfest_equilibrium(const EhrenfestParams& p);

struct EhrenfestCheckRow {
  long r = 0;
  double tv = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Exact TV of the surrogate chain from y0 to its stationary law at each r,
/// against the bound {k^{-1/2}(|y0| + sqrt(k/2)) + 8} e^{-2r/n}, n = 4k.
std::vector<EhrenfestCheckRow> ehrenfest_tv_bound_check(
    const EhrenfestParams& p, int y0, std::span<const long> r_grid);

struct WindowFitEntry {
  int n = 0;
  double c1 = 0.0;  // smallest C1 with 1 - TV(r_n(d)) <= C1 e^{-4d}, d < 0
  double c2 = 0.0;  // smallest C2 with TV(r_n(d)) <= C2 e^{-2d}, d >= 0
};

struct WindowFitReport {
  std::vector<WindowFitEntry> per_n;
  double c1_max = 0.0;
  double c2_max = 0.0;
};

/// Fits the window constants from exact profiles computed from j0 = n.
/// profiles[i] must cover r up to bl_r_n(max delta, n[i]).
WindowFitReport bl_window_fit(std::span<const int> ns,
                              std::span<const TVProfile> profiles,
                              std::span<const double> delta_grid);

/// Default delta grid: 0.25 spacing on [-3, 3].
std::vector<double> bl_default_delta_grid();

}  // namespace chainmix

#endif
