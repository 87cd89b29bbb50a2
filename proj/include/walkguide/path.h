#ifndef WALKGUIDE_PATH_H_
#define WALKGUIDE_PATH_H_

#include <optional>
#include <span>
#include <vector>

#include "walkguide/angle.h"

namespace walkguide {

enum class SegmentKind { kLine, kArc, kClothoid };

const char* segment_kind_name(SegmentKind kind);

// Input description of one segment. When `start` is set it must agree with
// the end pose of the previous segment (or the path start for the first one).
struct SegmentSpec {
  SegmentKind kind = SegmentKind::kLine;
  double length = 0.0;
  double curvature_start = 0.0;
  double curvature_end = 0.0;
  std::optional<Pose2> start;
};

struct PathSegment {
  SegmentKind kind = SegmentKind::kLine;
  double length = 0.0;
  Pose2 start_pose;
  double curvature_start = 0.0;
  double curvature_end = 0.0;

  double curvature_at(double u) const {
    return curvature_start + (curvature_end - curvature_start) * u / length;
  }
  double curvature_rate() const {
    return (curvature_end - curvature_start) / length;
  }
};

// Path-relative coordinates. l is positive to the left of the tangent.
struct FrenetState {
  double s = 0.0;
  double l = 0.0;
  double theta_tilde = 0.0;

  double l_norm(double turning_radius) const { return l / turning_radius; }
};

struct Curvature {
  double c = 0.0;
  double c_prime = 0.0;
};

inline constexpr double kJointPositionTol = 1e-9;
inline constexpr double kJointHeadingTol = 1e-9;

// Arc-length parameterised chain of lines, arcs and clothoids. Immutable
// after construction.
class Path {
 public:
  const std::vector<PathSegment>& segments() const { return segments_; }
  double total_length() const { return total_length_; }
  const std::vector<double>& cumulative_s() const { return cumulative_s_; }
  Pose2 start_pose() const { return segments_.front().start_pose; }
  Pose2 end_pose() const;

  Pose2 pose_at(double s) const;
  Curvature curvature(double s) const;
  double max_abs_curvature() const;

  // Projects a world pose. Without a hint the whole path is scanned; with a
  // hint only [hint - search_radius, hint + search_radius] is searched.
  // `search_radius` is the vehicle turning radius R.
  FrenetState frenet_project(const Pose2& pose, std::optional<double> hint_s,
                             double search_radius) const;

 private:
  friend Path build_path(const Pose2& start, std::span<const SegmentSpec> specs);

  struct ClothoidCache {
    double knot_spacing = 0.0;
    std::vector<Pose2> knots;  // pose at u = i * knot_spacing
  };

  std::size_t segment_index(double s) const;
  Pose2 segment_pose(std::size_t index, double u) const;
  double tangent_residual(double s, double px, double py) const;

  std::vector<PathSegment> segments_;
  std::vector<double> cumulative_s_;
  std::vector<ClothoidCache> clothoid_cache_;
  double total_length_ = 0.0;
};

Path build_path(const Pose2& start, std::span<const SegmentSpec> specs);

// Pose reached after travelling `u` along a segment from its start pose.
Pose2 integrate_segment(const PathSegment& segment, double u);

}  // namespace walkguide

#endif  // WALKGUIDE_PATH_H_
