#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "oracles.h"
#include "walkguide/analysis.h"
#include "walkguide/errors.h"

namespace walkguide {
namespace {

Trace synthetic(const std::vector<std::pair<double, double>>& l_th,
                Phase phase = Phase::kTrack) {
  Trace tr;
  const double R = tr.info.turning_radius;
  double t = 0.0;
  for (const auto& [l, th] : l_th) {
    TraceRow r;
    r.t = t;
    r.x = t;
    r.l = l * R;
    r.theta_tilde = th;
    r.phase = phase;
    r.V = lyapunov(l, th);
    tr.rows.push_back(r);
    t += tr.info.dt_control;
  }
  return tr;
}

TEST(Lyapunov, Examples) {
  EXPECT_EQ(lyapunov(0.0, 0.0), 0.0);
  EXPECT_EQ(lyapunov(1.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(lyapunov(3.0, -kPi / 2), 0.5 * (9.0 + kPi * kPi / 4.0));
}

TEST(Lyapunov, EvenAndPositive) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    EXPECT_EQ(lyapunov(a, b), lyapunov(-a, b));
    EXPECT_EQ(lyapunov(a, b), lyapunov(a, -b));
    EXPECT_EQ(lyapunov(a, b), oracle::lyapunov(a, b));
    EXPECT_GT(lyapunov(a, b), 0.0);
  }
  // Radially unbounded on the tested grid.
  EXPECT_GT(lyapunov(100.0, 0.0), 4999.0);
}

TEST(RippleBound, Formula) {
  EXPECT_DOUBLE_EQ(ripple_bound(0.0, 0.02, 0.01, 1.0, 0.3), 0.5 * 0.02 * 0.02);
  EXPECT_DOUBLE_EQ(ripple_bound(-2.0, 0.02, 0.01, 1.0, 0.3),
                   0.5 * (0.0004 + 2.0 * 2.0 * 0.01 / 0.3));
}

TEST(Summarize, EmptyTrace) {
  try {
    summarize(Trace{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTrace);
  }
}

TEST(Summarize, EquilibriumTrace) {
  const Trace tr = synthetic(std::vector<std::pair<double, double>>(100, {0.0, 0.0}));
  const RunSummary s = summarize(tr);
  EXPECT_TRUE(s.converged);
  ASSERT_TRUE(s.t_converge);
  EXPECT_EQ(*s.t_converge, 0.0);
  EXPECT_EQ(s.switch_count, 0u);
  EXPECT_EQ(s.final_V, 0.0);
  EXPECT_EQ(s.lyapunov_violations, 0u);
}

TEST(Summarize, TruncatedBeforeConvergence) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 100; ++i) pts.push_back({2.0 - 0.01 * i, -0.5});
  const RunSummary s = summarize(synthetic(pts));
  EXPECT_FALSE(s.converged);
  EXPECT_FALSE(s.t_converge);
}

TEST(Summarize, ConvergenceWindowIsLastFivePercent) {
  std::vector<std::pair<double, double>> pts(100, {1.0, 0.0});
  for (int i = 95; i < 100; ++i) pts[i] = {0.01, 0.01};
  RunSummary s = summarize(synthetic(pts));
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(*s.t_converge, 0.95, 1e-12);
  pts[95] = {0.06, 0.0};
  s = summarize(synthetic(pts));
  EXPECT_FALSE(s.converged);
}

TEST(Summarize, SwitchCountAndPathLength) {
  Trace tr = synthetic(std::vector<std::pair<double, double>>(5, {0.0, 0.0}));
  const Maneuver seq[5] = {Maneuver::kGoStraight, Maneuver::kTurnLeft,
                           Maneuver::kTurnLeft, Maneuver::kGoStraight,
                           Maneuver::kTurnRight};
  for (int i = 0; i < 5; ++i) {
    tr.rows[i].maneuver = seq[i];
    tr.rows[i].x = 3.0 * i;
    tr.rows[i].y = 4.0 * i;
  }
  const RunSummary s = summarize(tr);
  EXPECT_EQ(s.switch_count, 3u);
  EXPECT_DOUBLE_EQ(s.path_length, 20.0);
}

TEST(Summarize, IsPure) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({std::sin(i * 0.3), std::cos(i * 0.2)});
  const Trace tr = synthetic(pts);
  const RunSummary a = summarize(tr);
  const RunSummary b = summarize(tr);
  EXPECT_EQ(a.max_V, b.max_V);
  EXPECT_EQ(a.lyapunov_violations, b.lyapunov_violations);
  EXPECT_EQ(a.switch_count, b.switch_count);
}

TEST(LyapunovSamples, CrossingsAreInterpolated) {
  // theta_tilde crosses delta(l) between rows 1 and 2.
  Trace tr = synthetic({{0.5, 0.0}, {0.5, -0.6}, {0.5, -0.8}, {0.5, -0.9}});
  const double d = tr.info.controller.delta_profile.value(0.5);
  const auto smp = lyapunov_samples(tr);
  ASSERT_EQ(smp.size(), 1u);
  EXPECT_EQ(smp[0].row, 2u);
  const double f = (-0.6 - d) / (-0.6 - -0.8);
  EXPECT_NEAR(smp[0].V, tr.rows[1].V + f * (tr.rows[2].V - tr.rows[1].V), 1e-15);
}

TEST(LyapunovSamples, ViolationCounted) {
  // Two crossings with V growing far beyond the ripple bound.
  std::vector<std::pair<double, double>> pts{{0.1, 0.0}, {0.1, -0.3}, {2.0, -0.3},
                                             {2.0, -1.5}};
  const Trace tr = synthetic(pts);
  EXPECT_EQ(lyapunov_samples(tr).size(), 2u);
  EXPECT_EQ(count_lyapunov_violations(tr), 1u);
}

TEST(Field, RowCountAndHeader) {
  FieldSpec spec;
  spec.resolution = 7;
  const std::string csv = field_csv(spec);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "l_norm,theta_tilde,sigma_R,sigma_L,sigma_N,sigma_P,region");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 49);
}

TEST(Field, ResolutionTooSmall) {
  FieldSpec spec;
  spec.resolution = 1;
  try {
    field_csv(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyGrid);
  }
}

TEST(Field, ZeroDeltaCollapse) {
  FieldSpec spec;
  spec.resolution = 21;
  spec.delta = 0.0;
  std::istringstream in(field_csv(spec));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    ASSERT_EQ(cols.size(), 7u);
    EXPECT_EQ(cols[4], cols[3]);
    EXPECT_EQ(cols[5], cols[2]);
  }
}

TEST(Reentries, DetectedOnlyAfterInfeasibleDeparture) {
  Trace tr;
  tr.info.controller.delta_profile = DeltaProfile::tanh(kPi / 2, 10.0);
  const DeltaProfile& p = tr.info.controller.delta_profile;
  const double R = tr.info.turning_radius;
  auto row = [&](double l, double th) {
    TraceRow r;
    r.t = static_cast<double>(tr.rows.size()) * 0.01;
    r.l = l * R;
    r.theta_tilde = th;
    r.phase = Phase::kTrack;
    tr.rows.push_back(r);
  };
  row(0.1, p.value(0.1));        // in band, infeasible point
  row(0.08, p.value(0.08) + 0.3);  // out
  row(0.02, p.value(0.02));      // back in
  row(1.0, p.value(1.0));        // in band, feasible point
  row(0.9, p.value(0.9) + 0.3);  // out after a feasible departure
  row(0.8, p.value(0.8));        // back in: not counted
  const auto ev = manifold_reentries(tr);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_NEAR(ev[0].l_depart, 0.1, 1e-12);
  EXPECT_NEAR(ev[0].l_reenter, 0.02, 1e-12);
}

}  // namespace
}  // namespace walkguide
