#ifndef CHAINMIX_CUTOFF_HPP
#define CHAINMIX_CUTOFF_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chainmix {

enum class ProfileKind { exact, mc_upper, mc_lower };

/// Time-indexed total-variation distances (steps or continuous time), with
/// per-point standard errors for Monte-Carlo profiles.
struct TVProfile {
  std::vector<double> times;   // strictly increasing
  std::vector<double> values;  // in [0, 1]
  ProfileKind kind = ProfileKind::exact;
  std::vector<double> se;  // empty iff kind == exact

  void validate() const;

  /// Linear interpolation between grid times.  Times below the first grid
  /// point return the first value (the profiles here start at time 0 from a
  /// point mass, where TV is maximal); times beyond the last grid point are
  /// an error naming the missing time.
  double value_at(double t) const;

  double max_spacing() const;
};

/// One tested start: the profile(s) around its travel time.  For exact
/// profiles, lower and upper are the same curve; for Monte-Carlo input the
/// "-s" inequality is checked on a TV lower bound and the "+s" inequality on
/// a TV upper bound, which makes a pass conservative.
struct CutoffEntry {
  std::string label;
  TVProfile lower;
  TVProfile upper;
  double t_center = 0.0;  // travel / mixing time for this start
};

struct CutoffReport {
  std::vector<double> epsilon_grid;
  std::vector<std::optional<double>> s_of_eps;  // smallest passing s, per eps
  std::vector<bool> pass;
  std::vector<std::string> tested_starts;
  double window = 0.0;
  double min_center_over_window = 0.0;  // reported, not enforced

  bool all_pass() const;
};

/// Executable form of the cut-off definition: for each epsilon, the smallest
/// s in s_grid such that every tested start has lower-bound value > 1 - eps
/// at t_center - s * window and upper-bound value < eps at t_center +
/// s * window.
CutoffReport check_cutoff(std::span<const CutoffEntry> entries, double window,
                          std::span<const double> epsilon_grid,
                          std::span<const double> s_grid);

struct WindowExponentFit {
  double lower_slope = 0.0;  // log(1 - TV) vs delta on delta < 0
  double upper_slope = 0.0;  // log(TV) vs delta on delta >= 0
  double lower_residual = 0.0;
  double upper_residual = 0.0;
  std::size_t lower_points = 0;  // points used (exact 0/1 values excluded)
  std::size_t upper_points = 0;
};

/// Least-squares slopes of the profile tails on a delta grid; the input is
/// the exact TV value at each delta.
WindowExponentFit fit_window_exponents(std::span<const double> deltas,
                                       std::span<const double> tv_values);

}  // namespace chainmix

#endif
