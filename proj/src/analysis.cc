#include "walkguide/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "walkguide/errors.h"

namespace walkguide {

namespace {

void append_number(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  out += buf;
}

bool in_box(const TraceRow& r, double R) {
  return std::abs(r.l / R) < kConvergedL &&
         std::abs(r.theta_tilde) < kConvergedTheta;
}

double manifold_gap(const TraceRow& r, const DeltaProfile& profile, double R) {
  return r.theta_tilde - profile.value(r.l / R);
}

}  // namespace

double ripple_bound(double l_norm, double eps_theta, double dt, double v,
                    double turning_radius) {
  return 0.5 * (eps_theta * eps_theta +
                2.0 * std::abs(l_norm) * dt * v / turning_radius);
}

RunSummary summarize(const Trace& trace) {
  if (trace.rows.empty()) {
    throw Error(ErrorCode::kEmptyTrace, "trace has no rows");
  }
  const auto& rows = trace.rows;
  const double R = trace.info.turning_radius;
  RunSummary s;
  s.rows = rows.size();
  s.t_final = rows.back().t;
  s.final_V = rows.back().V;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    s.max_V = std::max(s.max_V, rows[i].V);
    if (i == 0) continue;
    s.path_length +=
        std::hypot(rows[i].x - rows[i - 1].x, rows[i].y - rows[i - 1].y);
    if (rows[i].maneuver != rows[i - 1].maneuver) ++s.switch_count;
  }

  const std::size_t tail = std::max<std::size_t>(1, rows.size() / 20);
  s.converged = std::all_of(rows.end() - static_cast<std::ptrdiff_t>(tail),
                            rows.end(),
                            [R](const TraceRow& r) { return in_box(r, R); });
  if (s.converged) {
    std::size_t first = rows.size();
    while (first > 0 && in_box(rows[first - 1], R)) --first;
    s.t_converge = rows[first].t;
  }
  s.lyapunov_violations = count_lyapunov_violations(trace);
  return s;
}

std::vector<LyapunovSample> lyapunov_samples(const Trace& trace) {
  std::vector<LyapunovSample> out;
  const auto& rows = trace.rows;
  const double R = trace.info.turning_radius;
  const DeltaProfile& profile = trace.info.controller.delta_profile;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const TraceRow& a = rows[k - 1];
    const TraceRow& b = rows[k];
    if (b.hybrid_state == HybridState::kStopped) continue;
    if (b.hybrid_state == HybridState::kControlled &&
        a.hybrid_state != HybridState::kControlled) {
      out.push_back({k, b.t, b.l / R, b.V});
      continue;
    }
    if (a.phase != Phase::kTrack || b.phase != Phase::kTrack) continue;
    const double ga = manifold_gap(a, profile, R);
    const double gb = manifold_gap(b, profile, R);
    if (ga == 0.0 || !((ga < 0.0) != (gb < 0.0))) continue;
    const double f = ga / (ga - gb);
    LyapunovSample smp;
    smp.row = k;
    smp.t = a.t + f * (b.t - a.t);
    smp.l_norm = (a.l + f * (b.l - a.l)) / R;
    smp.V = a.V + f * (b.V - a.V);
    out.push_back(smp);
  }
  return out;
}

std::size_t count_lyapunov_violations(const Trace& trace) {
  const auto samples = lyapunov_samples(trace);
  const TraceInfo& info = trace.info;
  std::size_t violations = 0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double l = std::max(std::abs(samples[i - 1].l_norm),
                              std::abs(samples[i].l_norm));
    const double bound =
        ripple_bound(l, info.controller.eps_theta, info.dt_control,
                     info.v_nominal, info.turning_radius);
    if (samples[i].V > samples[i - 1].V + bound) ++violations;
  }
  return violations;
}

std::vector<ReentryEvent> manifold_reentries(const Trace& trace) {
  std::vector<ReentryEvent> out;
  const auto& rows = trace.rows;
  const double R = trace.info.turning_radius;
  const ControllerConfig& cfg = trace.info.controller;
  const DeltaProfile& profile = cfg.delta_profile;
  auto in_band = [&](const TraceRow& r) {
    return std::abs(manifold_gap(r, profile, R)) <= cfg.eps_theta;
  };
  auto infeasible_at = [&](const TraceRow& r) {
    const double l = r.l / R;
    return std::abs(profile.derivative(l) * std::sin(profile.value(l))) > 1.0;
  };

  std::optional<ReentryEvent> pending;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const TraceRow& a = rows[k - 1];
    const TraceRow& b = rows[k];
    if (b.phase != Phase::kTrack) {
      pending.reset();
      continue;
    }
    const bool was_in = in_band(a);
    const bool is_in = in_band(b);
    if (was_in && !is_in) {
      if (infeasible_at(a)) {
        ReentryEvent e;
        e.t_depart = a.t;
        e.l_depart = a.l / R;
        e.theta_depart = a.theta_tilde;
        pending = e;
      } else {
        pending.reset();
      }
    } else if (!was_in && is_in && pending) {
      pending->t_reenter = b.t;
      pending->l_reenter = b.l / R;
      pending->theta_reenter = b.theta_tilde;
      out.push_back(*pending);
      pending.reset();
    }
  }
  return out;
}

std::string field_csv(const FieldSpec& spec) {
  if (spec.resolution < 2) {
    throw Error(ErrorCode::kEmptyGrid, "field resolution must be >= 2");
  }
  if (!(spec.l_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "field l_max must be > 0");
  }
  const int n = spec.resolution;
  std::string out = "l_norm,theta_tilde,sigma_R,sigma_L,sigma_N,sigma_P,region\n";
  out.reserve(out.size() + static_cast<std::size_t>(n) * n * 110);
  for (int i = 0; i < n; ++i) {
    const double l = -spec.l_max + 2.0 * spec.l_max * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double th = -kPi + 2.0 * kPi * j / (n - 1);
      append_number(out, l);
      out += ',';
      append_number(out, th);
      for (BoundaryCurve c : {BoundaryCurve::kR, BoundaryCurve::kL,
                              BoundaryCurve::kN, BoundaryCurve::kP}) {
        out += ',';
        append_number(out, sigma(c, l, th, spec.delta));
      }
      out += ',';
      out += region_name(classify(l, th, spec.delta, spec.band));
      out += '\n';
    }
  }
  return out;
}

}  // namespace walkguide
