#ifndef WALKGUIDE_ANGLE_H_
#define WALKGUIDE_ANGLE_H_

#include <cmath>
#include <numbers>

namespace walkguide {

inline constexpr double kPi = std::numbers::pi;

// Wraps to [-pi, pi). wrap_angle(pi) == -pi.
inline double wrap_angle(double a) {
  if (a >= -kPi && a < kPi) return a;
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  r -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (r >= kPi) r -= 2.0 * kPi;
  return r;
}

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

}  // namespace walkguide

#endif  // WALKGUIDE_ANGLE_H_
