#include "walkguide/path.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "walkguide/errors.h"

namespace walkguide {

namespace {

constexpr double kRootTolerance = 1e-10;
constexpr double kTieTolerance = 1e-9;
constexpr int kHintSamples = 32;
constexpr double kSingularTolerance = 1e-9;

double clothoid_knot_spacing(const PathSegment& seg) {
  const double cmax =
      std::max(std::abs(seg.curvature_start), std::abs(seg.curvature_end));
  const double rate = std::sqrt(std::abs(seg.curvature_rate()));
  double h = 0.5;
  if (cmax > 0.0) h = std::min(h, 0.5 / cmax);
  if (rate > 0.0) h = std::min(h, 0.5 / rate);
  return h;
}

double clothoid_heading(const PathSegment& seg, double u) {
  return seg.start_pose.theta + seg.curvature_start * u +
         0.5 * seg.curvature_rate() * u * u;
}

// Advances a clothoid from `from` (local abscissa u0) to u1 with one
// 10-point Gauss-Legendre panel per knot interval.
Pose2 clothoid_advance(const PathSegment& seg, const Pose2& from, double u0,
                       double u1) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  Pose2 out = from;
  if (u1 > u0) {
    out.x += Rule::integrate(
        [&](double u) { return std::cos(clothoid_heading(seg, u)); }, u0, u1);
    out.y += Rule::integrate(
        [&](double u) { return std::sin(clothoid_heading(seg, u)); }, u0, u1);
  }
  out.theta = clothoid_heading(seg, u1);
  return out;
}

std::string pose_str(const Pose2& p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ", " << p.theta << ")";
  return os.str();
}

}  // namespace

const char* segment_kind_name(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kLine:
      return "line";
    case SegmentKind::kArc:
      return "arc";
    case SegmentKind::kClothoid:
      return "clothoid";
  }
  return "unknown";
}

Pose2 integrate_segment(const PathSegment& seg, double u) {
  const Pose2& p0 = seg.start_pose;
  switch (seg.kind) {
    case SegmentKind::kLine:
      return {p0.x + u * std::cos(p0.theta), p0.y + u * std::sin(p0.theta),
              p0.theta};
    case SegmentKind::kArc: {
      const double c = seg.curvature_start;
      const double th = p0.theta + c * u;
      return {p0.x + (std::sin(th) - std::sin(p0.theta)) / c,
              p0.y - (std::cos(th) - std::cos(p0.theta)) / c, th};
    }
    case SegmentKind::kClothoid: {
      const double h = clothoid_knot_spacing(seg);
      Pose2 p = p0;
      double u0 = 0.0;
      while (u0 < u) {
        const double u1 = std::min(u, u0 + h);
        p = clothoid_advance(seg, p, u0, u1);
        u0 = u1;
      }
      p.theta = clothoid_heading(seg, u);
      return p;
    }
  }
  return p0;
}

Path build_path(const Pose2& start, std::span<const SegmentSpec> specs) {
  if (specs.empty()) throw Error(ErrorCode::kEmptyPath, "path has no segments");

  Path path;
  Pose2 cursor = start;
  double s = 0.0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SegmentSpec& spec = specs[i];
    if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "segment " + std::to_string(i) + ": length must be > 0");
    }
    if (spec.kind == SegmentKind::kLine &&
        (spec.curvature_start != 0.0 || spec.curvature_end != 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "segment " + std::to_string(i) + ": line with curvature");
    }
    if (spec.kind == SegmentKind::kArc &&
        (spec.curvature_start != spec.curvature_end ||
         spec.curvature_start == 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "segment " + std::to_string(i) +
                      ": arc needs equal nonzero curvatures");
    }
    if (spec.start) {
      const double dpos =
          std::hypot(spec.start->x - cursor.x, spec.start->y - cursor.y);
      const double dth = std::abs(wrap_angle(spec.start->theta - cursor.theta));
      if (dpos > kJointPositionTol || dth > kJointHeadingTol) {
        throw Error(ErrorCode::kContinuity,
                    "segment " + std::to_string(i) + " starts at " +
                        pose_str(*spec.start) + " but previous geometry ends at " +
                        pose_str(cursor));
      }
    }

    PathSegment seg{spec.kind, spec.length, cursor, spec.curvature_start,
                    spec.curvature_end};
    Path::ClothoidCache cache;
    if (seg.kind == SegmentKind::kClothoid) {
      cache.knot_spacing = clothoid_knot_spacing(seg);
      cache.knots.push_back(seg.start_pose);
      double u0 = 0.0;
      while (u0 < seg.length) {
        const double u1 = std::min(seg.length, u0 + cache.knot_spacing);
        cache.knots.push_back(clothoid_advance(seg, cache.knots.back(), u0, u1));
        u0 = u1;
      }
    }
    path.segments_.push_back(seg);
    path.clothoid_cache_.push_back(std::move(cache));
    path.cumulative_s_.push_back(s);
    s += seg.length;
    cursor = path.segment_pose(path.segments_.size() - 1, seg.length);
  }
  path.total_length_ = s;
  return path;
}

Pose2 Path::end_pose() const {
  return segment_pose(segments_.size() - 1, segments_.back().length);
}

std::size_t Path::segment_index(double s) const {
  auto it = std::upper_bound(cumulative_s_.begin(), cumulative_s_.end(), s);
  if (it == cumulative_s_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(cumulative_s_.begin(), it)) - 1;
}

Pose2 Path::segment_pose(std::size_t index, double u) const {
  const PathSegment& seg = segments_[index];
  if (seg.kind != SegmentKind::kClothoid) return integrate_segment(seg, u);
  const ClothoidCache& cache = clothoid_cache_[index];
  const auto k = std::min(cache.knots.size() - 1,
                          static_cast<std::size_t>(u / cache.knot_spacing));
  const double uk = static_cast<double>(k) * cache.knot_spacing;
  if (u <= uk) return cache.knots[k];
  return clothoid_advance(seg, cache.knots[k], uk, u);
}

Pose2 Path::pose_at(double s) const {
  if (!(s >= 0.0 && s <= total_length_)) {
    throw Error(ErrorCode::kOutOfRange,
                "s = " + std::to_string(s) + " outside [0, " +
                    std::to_string(total_length_) + "]");
  }
  const std::size_t i = segment_index(s);
  const double u = std::min(s - cumulative_s_[i], segments_[i].length);
  return segment_pose(i, u);
}

Curvature Path::curvature(double s) const {
  if (!(s >= 0.0 && s <= total_length_)) {
    throw Error(ErrorCode::kOutOfRange,
                "s = " + std::to_string(s) + " outside path domain");
  }
  const std::size_t i = segment_index(s);
  const PathSegment& seg = segments_[i];
  const double u = std::min(s - cumulative_s_[i], seg.length);
  if (seg.kind == SegmentKind::kClothoid) {
    return {seg.curvature_at(u), seg.curvature_rate()};
  }
  return {seg.curvature_start, 0.0};
}

double Path::max_abs_curvature() const {
  double m = 0.0;
  for (const auto& seg : segments_) {
    m = std::max({m, std::abs(seg.curvature_start), std::abs(seg.curvature_end)});
  }
  return m;
}

double Path::tangent_residual(double s, double px, double py) const {
  const Pose2 p = pose_at(s);
  return (p.x - px) * std::cos(p.theta) + (p.y - py) * std::sin(p.theta);
}

FrenetState Path::frenet_project(const Pose2& pose,
                                 std::optional<double> hint_s,
                                 double search_radius) const {
  if (!std::isfinite(pose.x) || !std::isfinite(pose.y) ||
      !std::isfinite(pose.theta)) {
    throw Error(ErrorCode::kInvalidArgument, "pose is not finite");
  }
  if (!(search_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "search radius must be > 0");
  }

  double lo = 0.0;
  double hi = total_length_;
  int intervals = 0;
  if (hint_s) {
    if (!(*hint_s >= 0.0 && *hint_s <= total_length_)) {
      throw Error(ErrorCode::kOutOfRange, "hint outside path domain");
    }
    lo = std::max(0.0, *hint_s - search_radius);
    hi = std::min(total_length_, *hint_s + search_radius);
    intervals = kHintSamples;
  } else {
    const double step = std::min(search_radius, total_length_ / 1000.0);
    intervals = std::max(1, static_cast<int>(std::ceil(total_length_ / step)));
  }

  std::vector<double> ss(intervals + 1);
  std::vector<double> gs(intervals + 1);
  for (int j = 0; j <= intervals; ++j) {
    ss[j] = j == intervals ? hi : lo + (hi - lo) * j / intervals;
    gs[j] = tangent_residual(ss[j], pose.x, pose.y);
  }

  std::vector<double> candidates;
  if (gs.front() >= 0.0) candidates.push_back(ss.front());
  if (gs.back() <= 0.0) candidates.push_back(ss.back());
  for (int j = 0; j < intervals; ++j) {
    if (gs[j] < 0.0 && gs[j + 1] >= 0.0) {
      if (gs[j + 1] == 0.0) {
        candidates.push_back(ss[j + 1]);
        continue;
      }
      std::uintmax_t iters = 200;
      auto root = boost::math::tools::toms748_solve(
          [&](double s) { return tangent_residual(s, pose.x, pose.y); }, ss[j],
          ss[j + 1], gs[j], gs[j + 1],
          [](double a, double b) { return std::abs(b - a) < kRootTolerance; },
          iters);
      candidates.push_back(0.5 * (root.first + root.second));
    }
  }

  auto dist = [&](double s) {
    const Pose2 p = pose_at(s);
    return std::hypot(pose.x - p.x, pose.y - p.y);
  };
  double best_s = candidates.front();
  double best_d = dist(best_s);
  for (double s : candidates) {
    const double d = dist(s);
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }

  const Pose2 p = pose_at(best_s);
  FrenetState fs;
  fs.s = best_s;
  fs.l = -(pose.x - p.x) * std::sin(p.theta) + (pose.y - p.y) * std::cos(p.theta);
  fs.theta_tilde = wrap_angle(pose.theta - p.theta);

  if (1.0 - curvature(best_s).c * fs.l <= kSingularTolerance) {
    throw Error(ErrorCode::kSingularProjection,
                "pose lies at or beyond the centre of curvature (s = " +
                    std::to_string(best_s) + ")");
  }
  if (!hint_s) {
    for (double s : candidates) {
      if (std::abs(s - best_s) > search_radius &&
          std::abs(dist(s) - best_d) <= kTieTolerance) {
        throw Error(ErrorCode::kAmbiguousProjection,
                    "equidistant projections at s = " + std::to_string(best_s) +
                        " and s = " + std::to_string(s));
      }
    }
  }
  return fs;
}

}  // namespace walkguide
