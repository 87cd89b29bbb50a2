#include "walkguide/controller.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "walkguide/errors.h"

namespace walkguide {

namespace {

double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

Maneuver mirror(Maneuver m) {
  if (m == Maneuver::kTurnRight) return Maneuver::kTurnLeft;
  if (m == Maneuver::kTurnLeft) return Maneuver::kTurnRight;
  return m;
}

Region mirror(Region r) {
  switch (r) {
    case Region::kRightTurnFirst:
      return Region::kLeftTurnFirst;
    case Region::kLeftTurnFirst:
      return Region::kRightTurnFirst;
    case Region::kOnSigmaR:
      return Region::kOnSigmaL;
    case Region::kOnSigmaL:
      return Region::kOnSigmaR;
    default:
      return r;
  }
}

// theta_tilde -> -theta_tilde on [-pi, pi); -pi maps to itself.
double negate_angle(double th) { return th == -kPi ? -kPi : -th; }

// The approach analysis is written for a vehicle on the right of the path
// (l <= 0), approaching along theta = +delta and finishing with a right turn
// along sigma_R = 0. Other states are mirrored into that half.
bool needs_mirror(double l, double th) {
  return l > 0.0 || (l == 0.0 && th < 0.0 && th != -kPi);
}

ManeuverDecision approach_automaton(double l, double th, double delta,
                                    const ControllerState& ctrl,
                                    const ControllerConfig& cfg) {
  ManeuverDecision out{BrakeCommand(Maneuver::kGoStraight), ctrl};
  ControllerState& next = out.state;

  auto emit = [&](Maneuver m, HybridState hs) {
    out.command = BrakeCommand(m);
    next.hybrid_state = hs;
    next.last_maneuver = m;
  };

  // Final turn in progress: hold it until the heading error has been
  // turned back through zero.
  if (ctrl.hybrid_state == HybridState::kControlled && !ctrl.arrived &&
      (ctrl.last_maneuver == Maneuver::kTurnRight ||
       ctrl.last_maneuver == Maneuver::kTurnLeft)) {
    const bool done = ctrl.last_maneuver == Maneuver::kTurnRight ? th <= 0.0
                                                                 : th >= 0.0;
    if (!done) {
      emit(ctrl.last_maneuver, HybridState::kControlled);
      return out;
    }
    next.arrived = true;
    emit(Maneuver::kGoStraight, HybridState::kControlled);
    return out;
  }
  if (ctrl.arrived && std::abs(th) <= cfg.eps_theta) {
    emit(Maneuver::kGoStraight, HybridState::kControlled);
    return out;
  }
  next.arrived = false;

  if (std::abs(l) <= cfg.eps_b && std::abs(th) <= cfg.eps_theta) {
    next.arrived = true;
    emit(Maneuver::kGoStraight, HybridState::kControlled);
    return out;
  }

  const bool mirrored = needs_mirror(l, th);
  const double cl = mirrored ? -l : l;
  const double ct = mirrored ? negate_angle(th) : th;
  const Maneuver prev =
      mirrored ? mirror(ctrl.last_maneuver) : ctrl.last_maneuver;
  const double da = std::abs(delta);
  const double s_r = sigma(BoundaryCurve::kR, cl, ct);

  Maneuver canonical = Maneuver::kGoStraight;
  HybridState hs = HybridState::kStraight;
  if (ct > 0.0 && s_r >= -cfg.eps_b) {
    canonical = Maneuver::kTurnRight;
    const bool reached_curve = std::abs(s_r) <= cfg.eps_b ||
                               ctrl.hybrid_state == HybridState::kStraight ||
                               prev == Maneuver::kTurnLeft;
    hs = reached_curve ? HybridState::kControlled : HybridState::kTurning;
  } else if (ct > da + cfg.eps_theta) {
    canonical = Maneuver::kTurnRight;
    hs = HybridState::kTurning;
  } else if (ct < da - cfg.eps_theta) {
    canonical = Maneuver::kTurnLeft;
    hs = HybridState::kTurning;
  }
  emit(mirrored ? mirror(canonical) : canonical, hs);
  return out;
}

ManeuverDecision tracking_law(double l, double th, const ControllerState& ctrl,
                              const ControllerConfig& cfg) {
  ManeuverDecision out{BrakeCommand(Maneuver::kGoStraight), ctrl};
  ControllerState& next = out.state;
  const double d = cfg.delta_profile.value(l);

  Maneuver m = Maneuver::kGoStraight;
  if (th > d + cfg.eps_theta) {
    m = Maneuver::kTurnRight;
  } else if (th < d - cfg.eps_theta) {
    m = Maneuver::kTurnLeft;
  }

  HybridState hs = HybridState::kStraight;
  next.arrived = false;
  if (m == Maneuver::kGoStraight) {
    if (std::abs(l) <= cfg.eps_b && std::abs(th) <= cfg.eps_theta) {
      hs = HybridState::kControlled;
      next.arrived = true;
    }
  } else {
    // A turn that follows the arrival circle through the origin is the
    // controlled state; the arrival curve is invariant under that turn.
    const bool on_arrival =
        (m == Maneuver::kTurnRight && th > 0.0 &&
         std::abs(sigma(BoundaryCurve::kR, l, th)) <= cfg.eps_b) ||
        (m == Maneuver::kTurnLeft && th < 0.0 &&
         std::abs(sigma(BoundaryCurve::kL, l, th)) <= cfg.eps_b);
    const bool latched = ctrl.hybrid_state == HybridState::kControlled &&
                         ctrl.last_maneuver == m && !ctrl.arrived;
    hs = (on_arrival || latched) ? HybridState::kControlled
                                 : HybridState::kTurning;
  }
  out.command = BrakeCommand(m);
  next.hybrid_state = hs;
  next.last_maneuver = m;
  return out;
}

}  // namespace

DeltaProfile DeltaProfile::constant(double delta0) {
  if (!(std::abs(delta0) > 0.0 && std::abs(delta0) < kPi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "constant approach angle must satisfy 0 < |delta| < pi");
  }
  DeltaProfile p;
  p.kind_ = Kind::kConstant;
  p.amplitude_ = std::abs(delta0);
  p.gain_ = 0.0;
  return p;
}

DeltaProfile DeltaProfile::tanh(double amplitude, double gain) {
  if (!(amplitude > 0.0 && amplitude < kPi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "tanh amplitude must lie in (0, pi)");
  }
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    throw Error(ErrorCode::kInvalidArgument, "tanh gain must be > 0");
  }
  DeltaProfile p;
  p.kind_ = Kind::kTanh;
  p.amplitude_ = amplitude;
  p.gain_ = gain;
  return p;
}

DeltaProfile DeltaProfile::custom(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "custom profile needs >= 2 knots");
  }
  if (knots.front().first != 0.0 || knots.front().second != 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "custom profile must start at (0, 0)");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i].first > knots[i - 1].first)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "custom profile abscissae must increase");
    }
    if (!(knots[i].second >= knots[i - 1].second) || !(knots[i].second < kPi)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "custom profile magnitude must be non-decreasing and < pi");
    }
  }
  DeltaProfile p;
  p.kind_ = Kind::kCustom;
  p.amplitude_ = knots.back().second;
  p.gain_ = 0.0;
  p.knots_ = std::move(knots);
  return p;
}

double DeltaProfile::value(double l) const {
  switch (kind_) {
    case Kind::kConstant:
      return -sign_of(l) * amplitude_;
    case Kind::kTanh:
      return -amplitude_ * std::tanh(gain_ * l);
    case Kind::kCustom: {
      const double a = std::abs(l);
      if (a >= knots_.back().first) return -sign_of(l) * knots_.back().second;
      auto it = std::upper_bound(
          knots_.begin(), knots_.end(), a,
          [](double x, const auto& k) { return x < k.first; });
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      return -sign_of(l) * (y0 + (y1 - y0) * (a - x0) / (x1 - x0));
    }
  }
  return 0.0;
}

double DeltaProfile::derivative(double l) const {
  switch (kind_) {
    case Kind::kConstant:
      return 0.0;
    case Kind::kTanh: {
      const double c = std::cosh(gain_ * l);
      return -amplitude_ * gain_ / (c * c);
    }
    case Kind::kCustom: {
      const double a = std::abs(l);
      if (a >= knots_.back().first) return 0.0;
      auto it = std::upper_bound(
          knots_.begin(), knots_.end(), a,
          [](double x, const auto& k) { return x < k.first; });
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      return -(y1 - y0) / (x1 - x0);
    }
  }
  return 0.0;
}

const char* delta_kind_name(DeltaProfile::Kind kind) {
  switch (kind) {
    case DeltaProfile::Kind::kConstant:
      return "constant";
    case DeltaProfile::Kind::kTanh:
      return "tanh";
    case DeltaProfile::Kind::kCustom:
      return "custom";
  }
  return "unknown";
}

double sigma(BoundaryCurve curve, double l, double th, double delta) {
  switch (curve) {
    case BoundaryCurve::kR:
      return l + 1.0 - std::cos(th);
    case BoundaryCurve::kL:
      return l - 1.0 + std::cos(th);
    case BoundaryCurve::kN:
      return l + (1.0 - 2.0 * std::cos(delta)) + std::cos(th);
    case BoundaryCurve::kP:
      return l + (2.0 * std::cos(delta) - 1.0) - std::cos(th);
  }
  return 0.0;
}

const char* region_name(Region region) {
  switch (region) {
    case Region::kRightTurnFirst:
      return "RightTurnFirst";
    case Region::kLeftTurnFirst:
      return "LeftTurnFirst";
    case Region::kOnSigmaR:
      return "OnSigmaR";
    case Region::kOnSigmaL:
      return "OnSigmaL";
    case Region::kOnDeltaLine:
      return "OnDeltaLine";
    case Region::kInterior:
      return "Interior";
  }
  return "Unknown";
}

Region classify(double l, double th, double delta, double band) {
  th = wrap_angle(th);
  const double da = std::abs(delta);

  // Fixed points of the mirror map must get a self-symmetric label.
  const bool self_mirror = l == 0.0 && (th == 0.0 || th == -kPi);

  if (!self_mirror && needs_mirror(l, th)) {
    return mirror(classify(-l, negate_angle(th), -delta, band));
  }

  const double s_r = sigma(BoundaryCurve::kR, l, th);
  const double s_l = sigma(BoundaryCurve::kL, l, th);
  const bool on_r = std::abs(s_r) <= band;
  const bool on_l = std::abs(s_l) <= band;
  if (on_r && on_l) return Region::kOnDeltaLine;  // converged corner
  if (on_r) return Region::kOnSigmaR;
  if (on_l) return Region::kOnSigmaL;
  if (self_mirror) return Region::kInterior;
  if (std::abs(wrap_angle(th - da)) <= band) return Region::kOnDeltaLine;

  // Canonical half (l <= 0): predict the first turn and whether it ends on
  // an arrival curve before reaching the approach line.
  if (th > 0.0 && s_r > 0.0) {
    // Right turn crosses the path; on the far side it meets sigma_L before
    // the line theta = -delta iff sigma_P < 0 (sigma_P is right-turn
    // invariant).
    return sigma(BoundaryCurve::kP, l, th, da) < 0.0 ? Region::kRightTurnFirst
                                                     : Region::kInterior;
  }
  if (th < da) {
    // Left turn towards +delta meets sigma_R first iff sigma_N > 0.
    return sigma(BoundaryCurve::kN, l, th, da) > 0.0 ? Region::kLeftTurnFirst
                                                     : Region::kInterior;
  }
  return Region::kInterior;
}

const char* phase_name(Phase phase) {
  return phase == Phase::kApproach ? "Approach" : "Track";
}

const char* hybrid_state_name(HybridState state) {
  switch (state) {
    case HybridState::kTurning:
      return "Turning";
    case HybridState::kStraight:
      return "Straight";
    case HybridState::kControlled:
      return "Controlled";
    case HybridState::kStopped:
      return "Stopped";
  }
  return "Unknown";
}

void ControllerConfig::validate() const {
  if (!(delta_approach > 0.0 && delta_approach < kPi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "delta_approach must lie in (0, pi)");
  }
  if (!(eps_theta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps_theta must be > 0");
  }
  if (!(eps_b > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps_b must be > 0");
  }
  if (!(threshold_l > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold_l must be > 0");
  }
  if (!(re_approach_factor >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "re_approach_factor must be >= 1");
  }
}

ControllerState initial_controller_state(double l_norm,
                                         const ControllerConfig& cfg) {
  ControllerState s;
  s.phase = std::abs(l_norm) > cfg.threshold_l ? Phase::kApproach : Phase::kTrack;
  return s;
}

ControllerState phase_switch(const FrenetState& frenet, ControllerState ctrl,
                             double turning_radius, double threshold_l,
                             double re_approach_factor) {
  if (!(threshold_l > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold_l must be > 0");
  }
  const double l = std::abs(frenet.l_norm(turning_radius));
  if (ctrl.phase == Phase::kApproach && l <= threshold_l) {
    ctrl.phase = Phase::kTrack;
    ctrl.arrived = false;
  } else if (ctrl.phase == Phase::kTrack && l > re_approach_factor * threshold_l) {
    ctrl.phase = Phase::kApproach;
    ctrl.arrived = false;
    ctrl.hybrid_state = HybridState::kTurning;
  }
  return ctrl;
}

ManeuverDecision select_maneuver(const FrenetState& frenet,
                                 const ControllerState& ctrl,
                                 const ControllerConfig& cfg,
                                 double turning_radius) {
  if (!std::isfinite(frenet.s) || !std::isfinite(frenet.l) ||
      !std::isfinite(frenet.theta_tilde)) {
    throw Error(ErrorCode::kProjectionLost, "Frenet state is not finite");
  }
  const double l = frenet.l_norm(turning_radius);
  const double th = wrap_angle(frenet.theta_tilde);
  if (ctrl.phase == Phase::kApproach) {
    return approach_automaton(l, th, cfg.delta_approach, ctrl, cfg);
  }
  if (cfg.delta_profile.kind() == DeltaProfile::Kind::kConstant) {
    return approach_automaton(l, th, cfg.delta_profile.amplitude(), ctrl, cfg);
  }
  return tracking_law(l, th, ctrl, cfg);
}

ManeuverDecision controller_step(const FrenetState& frenet,
                                 const ControllerState& ctrl,
                                 const ControllerConfig& cfg,
                                 double turning_radius) {
  const ControllerState switched = phase_switch(
      frenet, ctrl, turning_radius, cfg.threshold_l, cfg.re_approach_factor);
  return select_maneuver(frenet, switched, cfg, turning_radius);
}

FeasibilityReport curvature_feasible(const DeltaProfile& profile, double v,
                                     double turning_radius, double l_max,
                                     double step) {
  if (!(v > 0.0) || !(turning_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "feasibility needs v > 0 and R > 0");
  }
  if (!(l_max > 0.0) || !(step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bad feasibility grid");
  }
  // Along theta = delta(l): d/dt delta = delta'(l) * v sin(delta) / R, to be
  // compared with the turn-rate limit v / R.
  const double limit = v / turning_radius;
  FeasibilityReport rep;
  const auto n = static_cast<long>(std::ceil(l_max / step));
  for (long i = 0; i <= n; ++i) {
    const double l = std::min(l_max, static_cast<double>(i) * step);
    const double demand = std::abs(profile.derivative(l) * v *
                                   std::sin(profile.value(l)) / turning_radius);
    const double ratio = demand / limit;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > 1.0) {
      if (rep.feasible) rep.l_hat = l;
      rep.feasible = false;
      rep.l_infeasible_max = l;
    }
  }
  return rep;
}

}  // namespace walkguide
