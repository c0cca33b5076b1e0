#include "chainmix/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace chainmix {

void TVProfile::validate() const {
  if (times.size() != values.size())
    throw std::invalid_argument("TVProfile: times/values size mismatch");
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i] < times[i + 1]))
      throw std::invalid_argument("TVProfile: times not increasing");
  for (double v : values)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("TVProfile: value outside [0,1]");
  if (kind == ProfileKind::exact) {
    if (!se.empty())
      throw std::invalid_argument("TVProfile: exact profile carries SEs");
  } else if (se.size() != values.size()) {
    throw std::invalid_argument("TVProfile: MC profile without SEs");
  }
}

double TVProfile::value_at(double t) const {
  if (times.empty()) throw std::invalid_argument("TVProfile: empty");
  if (t <= times.front()) return values.front();
  if (t > times.back())
    throw std::out_of_range("TVProfile: time " + std::to_string(t) +
                            " beyond profile end " +
                            std::to_string(times.back()));
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  if (times[hi] == t) return values[hi];
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

double TVProfile::max_spacing() const {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i)
    m = std::max(m, times[i + 1] - times[i]);
  return m;
}

bool CutoffReport::all_pass() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

CutoffReport check_cutoff(std::span<const CutoffEntry> entries, double window,
                          std::span<const double> epsilon_grid,
                          std::span<const double> s_grid) {
  if (entries.empty()) throw std::invalid_argument("check_cutoff: no entries");
  if (!(window > 0.0)) throw std::invalid_argument("check_cutoff: window");
  CutoffReport report;
  report.window = window;
  report.epsilon_grid.assign(epsilon_grid.begin(), epsilon_grid.end());
  double min_center = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) {
    e.lower.validate();
    e.upper.validate();
    // Interpolated profiles must resolve the window.
    if (e.lower.max_spacing() > window / 4.0 ||
        e.upper.max_spacing() > window / 4.0)
      throw std::invalid_argument("check_cutoff: profile grid coarser than "
                                  "window/4 for start " + e.label);
    report.tested_starts.push_back(e.label);
    min_center = std::min(min_center, e.t_center);
  }
  report.min_center_over_window = min_center / window;

  std::vector<double> s_sorted(s_grid.begin(), s_grid.end());
  std::sort(s_sorted.begin(), s_sorted.end());

  for (double eps : epsilon_grid) {
    std::optional<double> found;
    for (double s : s_sorted) {
      bool ok = true;
      for (const auto& e : entries) {
        const double before = e.lower.value_at(e.t_center - s * window);
        const double after = e.upper.value_at(e.t_center + s * window);
        if (!(before > 1.0 - eps && after < eps)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        found = s;
        break;
      }
    }
    report.s_of_eps.push_back(found);
    report.pass.push_back(found.has_value());
  }
  return report;
}

namespace {
struct SlopeFit {
  double slope = 0.0, residual = 0.0;
  std::size_t points = 0;
};

SlopeFit least_squares_slope(const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  SlopeFit fit;
  fit.points = xs.size();
  if (xs.size() < 2) return fit;
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}
}  // namespace

WindowExponentFit fit_window_exponents(std::span<const double> deltas,
                                       std::span<const double> tv_values) {
  if (deltas.size() != tv_values.size())
    throw std::invalid_argument("fit_window_exponents: size mismatch");
  std::vector<double> xlo, ylo, xhi, yhi;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double tv = tv_values[i];
    if (deltas[i] < 0.0) {
      if (tv < 1.0 && tv > 0.0) {  // exact 0/1 excluded, noted via counts
        xlo.push_back(deltas[i]);
        ylo.push_back(std::log(1.0 - tv));
      }
    } else {
      if (tv > 0.0 && tv < 1.0) {
        xhi.push_back(deltas[i]);
        yhi.push_back(std::log(tv));
      }
    }
  }
  const SlopeFit lo = least_squares_slope(xlo, ylo);
  const SlopeFit hi = least_squares_slope(xhi, yhi);
  WindowExponentFit out;
  out.lower_slope = lo.slope;
  out.lower_residual = lo.residual;
  out.lower_points = lo.points;
  out.upper_slope = hi.slope;
  out.upper_residual = hi.residual;
  out.upper_points = hi.points;
  return out;
}

}  // namespace chainmix
