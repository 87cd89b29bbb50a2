#ifndef WALKGUIDE_CONTROLLER_H_
#define WALKGUIDE_CONTROLLER_H_

#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include "walkguide/path.h"
#include "walkguide/vehicle.h"

namespace walkguide {

// Approach angle as a function of the normalised lateral offset l/R.
//
// With l positive to the left and l' = v sin(theta_tilde), convergence needs
// the commanded heading error to oppose the offset, so every profile here
// satisfies sign(delta(l)) == -sign(l) for l != 0:
//   Constant: delta(l) = -sign(l) * delta0           (delta(0) = 0)
//   Tanh:     delta(l) = -amplitude * tanh(gain * l)
//   Custom:   delta(l) = -sign(l) * table(|l|), piecewise linear, clamped
//             beyond the last knot.
class DeltaProfile {
 public:
  enum class Kind { kConstant, kTanh, kCustom };

  static DeltaProfile constant(double delta0);
  static DeltaProfile tanh(double amplitude, double gain);
  // Knots (|l|, |delta|) with |l| strictly increasing from 0, |delta|
  // non-decreasing from 0 and below pi.
  static DeltaProfile custom(std::vector<std::pair<double, double>> knots);

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double gain() const { return gain_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

  double value(double l_norm) const;
  double derivative(double l_norm) const;

 private:
  Kind kind_ = Kind::kTanh;
  double amplitude_ = kPi / 2.0;
  double gain_ = 1.0;
  std::vector<std::pair<double, double>> knots_;
};

const char* delta_kind_name(DeltaProfile::Kind kind);

enum class BoundaryCurve { kR, kL, kN, kP };

// Switching curves in the (l/R, theta_tilde) plane.
//   sigma_R = l + 1 - cos(th)          sigma_L = l - 1 + cos(th)
//   sigma_N = l + 1 - 2cos(d) + cos(th)
//   sigma_P = l - 1 + 2cos(d) - cos(th)
// sigma_R and sigma_P are constant along right turns, sigma_L and sigma_N
// along left turns.
double sigma(BoundaryCurve curve, double l_norm, double theta_tilde,
             double delta = 0.0);

enum class Region {
  kRightTurnFirst,  // right turn, then the final left turn
  kLeftTurnFirst,   // left turn, then the final right turn
  kOnSigmaR,
  kOnSigmaL,
  kOnDeltaLine,
  kInterior,
};

const char* region_name(Region region);

// Labels a point of the phase plane for approach angle |delta|. Boundary
// curves have half-thickness `band`. The labelling is odd-symmetric:
// classify(-l, -th, -d) is the left/right mirror of classify(l, th, d).
Region classify(double l_norm, double theta_tilde, double delta, double band);

enum class Phase { kApproach, kTrack };
enum class HybridState { kTurning, kStraight, kControlled, kStopped };

const char* phase_name(Phase phase);
const char* hybrid_state_name(HybridState state);

struct ControllerConfig {
  double delta_approach = kPi / 3.0;
  DeltaProfile delta_profile = DeltaProfile::tanh(kPi / 2.0, 1.0);
  double eps_theta = 0.02;
  double eps_b = 1e-3;
  double threshold_l = 1.0;
  double re_approach_factor = 2.0;

  void validate() const;
};

struct ControllerState {
  Phase phase = Phase::kApproach;
  HybridState hybrid_state = HybridState::kStraight;
  Maneuver last_maneuver = Maneuver::kGoStraight;
  // Set once the final turn of an approach sequence has brought the heading
  // error back to zero.
  bool arrived = false;
};

// Initial controller state for a vehicle at normalised offset `l_norm`.
ControllerState initial_controller_state(double l_norm,
                                         const ControllerConfig& config);

// Approach <-> Track switching with hysteresis on |l/R|.
ControllerState phase_switch(const FrenetState& frenet, ControllerState ctrl,
                             double turning_radius, double threshold_l,
                             double re_approach_factor);

struct ManeuverDecision {
  BrakeCommand command;
  ControllerState state;
};

// One controller transition. Never emits Stop; throws
// Error(kProjectionLost) if the Frenet state is not finite.
ManeuverDecision select_maneuver(const FrenetState& frenet,
                                 const ControllerState& ctrl,
                                 const ControllerConfig& config,
                                 double turning_radius);

// phase_switch followed by select_maneuver.
ManeuverDecision controller_step(const FrenetState& frenet,
                                 const ControllerState& ctrl,
                                 const ControllerConfig& config,
                                 double turning_radius);

struct FeasibilityReport {
  bool feasible = true;
  // Smallest |l/R| at which the profile demands more turn rate than v/R
  // allows; infinity when feasible everywhere.
  double l_hat = std::numeric_limits<double>::infinity();
  // Largest |l/R| on the grid that is infeasible (0 if none).
  double l_infeasible_max = 0.0;
  // max |delta'(l) sin(delta(l))| over the grid; <= 1 means feasible.
  double max_ratio = 0.0;
};

// Checks |d/dt delta(l(t))| <= v/R along theta_tilde = delta(l) on a dense
// grid of |l/R| in [0, l_max].
FeasibilityReport curvature_feasible(const DeltaProfile& profile, double v,
                                     double turning_radius,
                                     double l_max = 20.0, double step = 1e-4);

}  // namespace walkguide

#endif  // WALKGUIDE_CONTROLLER_H_
