#ifndef WALKGUIDE_ANALYSIS_H_
#define WALKGUIDE_ANALYSIS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "walkguide/controller.h"
#include "walkguide/simulator.h"

namespace walkguide {

inline double lyapunov(double l_norm, double theta_tilde) {
  return 0.5 * (l_norm * l_norm + theta_tilde * theta_tilde);
}

// Largest increase of V between two manifold crossings that discretisation
// alone can produce: half the band width squared plus the drift of l/R over
// one control step.
double ripple_bound(double l_norm, double eps_theta, double dt, double v,
                    double turning_radius);

// Thresholds on |l/R| and |theta_tilde| for a row to count as on the path.
inline constexpr double kConvergedL = 0.05;
inline constexpr double kConvergedTheta = 0.05;

struct RunSummary {
  bool converged = false;
  // Time from which every row stays inside the convergence box.
  std::optional<double> t_converge;
  double path_length = 0.0;
  std::size_t switch_count = 0;
  double max_V = 0.0;
  double final_V = 0.0;
  std::size_t lyapunov_violations = 0;
  std::size_t rows = 0;
  double t_final = 0.0;
};

// Converged when every row of the last 5% (at least one row) is inside the
// convergence box. Throws Error(kEmptyTrace) for a trace with no rows.
RunSummary summarize(const Trace& trace);

struct LyapunovSample {
  std::size_t row = 0;    // row at or just after the crossing
  double t = 0.0;
  double l_norm = 0.0;
  double V = 0.0;
};

// V at entries into the Controlled state and at the instants the tracking
// phase crosses theta_tilde = delta(l/R) (interpolated between the
// bracketing rows), in time order.
std::vector<LyapunovSample> lyapunov_samples(const Trace& trace);

// Consecutive samples where V grows by more than ripple_bound (evaluated at
// the larger |l/R| of the pair).
std::size_t count_lyapunov_violations(const Trace& trace);

// A return to the band |theta_tilde - delta(l/R)| <= eps_theta after leaving
// it at a point where the profile asks for more turn rate than available.
struct ReentryEvent {
  double t_depart = 0.0;
  double l_depart = 0.0;
  double theta_depart = 0.0;
  double t_reenter = 0.0;
  double l_reenter = 0.0;
  double theta_reenter = 0.0;
};

std::vector<ReentryEvent> manifold_reentries(const Trace& trace);

struct FieldSpec {
  int resolution = 101;
  double l_max = 3.0;
  double delta = kPi / 3.0;
  double band = 1e-2;
};

// resolution^2 rows over l/R in [-l_max, l_max] and theta_tilde in
// [-pi, pi]: l_norm,theta_tilde,sigma_R,sigma_L,sigma_N,sigma_P,region.
// Throws Error(kEmptyGrid) when resolution < 2.
std::string field_csv(const FieldSpec& spec);

}  // namespace walkguide

#endif  // WALKGUIDE_ANALYSIS_H_
