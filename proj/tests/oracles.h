// Reference computations used by the tests. Everything here is written
// without calling into the library's geometry or controller code.
#ifndef WALKGUIDE_TESTS_ORACLES_H_
#define WALKGUIDE_TESTS_ORACLES_H_

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double kPi = std::numbers::pi;

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

inline double wrap(double a) {
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r - kPi;
}

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, double tol) {
  struct Step {
    static double run(const std::function<double(double)>& f, double a,
                      double b, double fa, double fm, double fb, double whole,
                      double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const double flm = f(lm);
      const double frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double diff = left + right - whole;
      if (depth <= 0 || std::abs(diff) <= 15.0 * tol) {
        return left + right + diff / 15.0;
      }
      return run(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
             run(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Step::run(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Pose after distance u along a segment with linearly varying curvature.
inline Pose clothoid_pose(const Pose& start, double k0, double k1,
                          double length, double u, double tol = 1e-13) {
  const double rate = (k1 - k0) / length;
  auto heading = [&](double s) {
    return start.theta + k0 * s + 0.5 * rate * s * s;
  };
  const double x = simpson([&](double s) { return std::cos(heading(s)); }, 0.0,
                           u, tol);
  const double y = simpson([&](double s) { return std::sin(heading(s)); }, 0.0,
                           u, tol);
  return {start.x + x, start.y + y, heading(u)};
}

struct Segment {
  double length = 0.0;
  double k0 = 0.0;
  double k1 = 0.0;
};

// Dense polyline of a segment chain sampled every `ds` (plus each endpoint),
// built by marching with closed forms for constant curvature and Simpson
// steps for clothoid pieces.
struct Sample {
  double s;
  Pose pose;
};

inline std::vector<Sample> dense_samples(const Pose& start,
                                         const std::vector<Segment>& segs,
                                         double ds) {
  std::vector<Sample> out;
  Pose p = start;
  double s0 = 0.0;
  out.push_back({0.0, p});
  for (const Segment& seg : segs) {
    const auto n = static_cast<long>(std::ceil(seg.length / ds - 1e-9));
    const double rate = (seg.k1 - seg.k0) / seg.length;
    Pose q = p;
    double u_prev = 0.0;
    for (long i = 1; i <= n; ++i) {
      const double u = std::min(seg.length, static_cast<double>(i) * ds);
      const double h = u - u_prev;
      const double k_a = seg.k0 + rate * u_prev;
      if (rate == 0.0) {
        if (k_a == 0.0) {
          q = {q.x + h * std::cos(q.theta), q.y + h * std::sin(q.theta), q.theta};
        } else {
          const double th1 = q.theta + k_a * h;
          q = {q.x + (std::sin(th1) - std::sin(q.theta)) / k_a,
               q.y - (std::cos(th1) - std::cos(q.theta)) / k_a, th1};
        }
      } else {
        // Composite Simpson with four panels on the tiny step.
        auto th = [&](double t) { return q.theta + k_a * t + 0.5 * rate * t * t; };
        double cx = 0.0;
        double cy = 0.0;
        const int m = 4;
        const double w = h / m;
        for (int j = 0; j < m; ++j) {
          const double a = j * w;
          const double b = a + w;
          const double c = 0.5 * (a + b);
          cx += w / 6.0 * (std::cos(th(a)) + 4.0 * std::cos(th(c)) + std::cos(th(b)));
          cy += w / 6.0 * (std::sin(th(a)) + 4.0 * std::sin(th(c)) + std::sin(th(b)));
        }
        q = {q.x + cx, q.y + cy, th(h)};
      }
      u_prev = u;
      out.push_back({s0 + u, q});
    }
    p = q;
    s0 += seg.length;
  }
  return out;
}

struct Projection {
  double s = 0.0;
  double l = 0.0;
  double distance = std::numeric_limits<double>::infinity();
};

// Nearest sample, with the signed offset measured against its tangent.
inline Projection brute_force_project(const std::vector<Sample>& samples,
                                      double x, double y) {
  Projection best;
  for (const Sample& smp : samples) {
    const double dx = x - smp.pose.x;
    const double dy = y - smp.pose.y;
    const double d = std::hypot(dx, dy);
    if (d < best.distance) {
      best.distance = d;
      best.s = smp.s;
      best.l = -std::sin(smp.pose.theta) * dx + std::cos(smp.pose.theta) * dy;
    }
  }
  return best;
}

// Boundary functions written out directly from their definitions.
inline double sigma_r(double l, double th) { return l + 1.0 - std::cos(th); }
inline double sigma_l(double l, double th) { return l - 1.0 + std::cos(th); }
inline double sigma_n(double l, double th, double d) {
  return l + 1.0 - 2.0 * std::cos(d) + std::cos(th);
}
inline double sigma_p(double l, double th, double d) {
  return l - 1.0 + 2.0 * std::cos(d) - std::cos(th);
}

inline double lyapunov(double l, double th) { return 0.5 * (l * l + th * th); }

}  // namespace oracle

#endif  // WALKGUIDE_TESTS_ORACLES_H_
