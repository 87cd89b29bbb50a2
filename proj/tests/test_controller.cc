#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <set>

#include "oracles.h"
#include "walkguide/controller.h"
#include "walkguide/errors.h"

namespace walkguide {
namespace {

constexpr double kR = 0.3;

FrenetState frenet(double l_norm, double th) { return {0.0, l_norm * kR, th}; }

ControllerState in_phase(Phase p) {
  ControllerState s;
  s.phase = p;
  return s;
}

TEST(Sigma, Examples) {
  EXPECT_EQ(sigma(BoundaryCurve::kR, 0.0, 0.0), 0.0);
  EXPECT_EQ(sigma(BoundaryCurve::kL, 0.0, 0.0), 0.0);
  EXPECT_NEAR(sigma(BoundaryCurve::kN, 0.0, 0.0, kPi / 3), 1.0, 1e-15);
  EXPECT_NEAR(sigma(BoundaryCurve::kP, 2.0, kPi / 2, kPi / 2), 1.0, 1e-15);
}

TEST(Sigma, MatchesDefinitionsOnRandomPoints) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ul(-5.0, 5.0);
  std::uniform_real_distribution<double> ua(-kPi, kPi);
  for (int i = 0; i < 10000; ++i) {
    const double l = ul(rng);
    const double th = ua(rng);
    const double d = ua(rng);
    EXPECT_NEAR(sigma(BoundaryCurve::kR, l, th), oracle::sigma_r(l, th), 1e-12);
    EXPECT_NEAR(sigma(BoundaryCurve::kL, l, th), oracle::sigma_l(l, th), 1e-12);
    EXPECT_NEAR(sigma(BoundaryCurve::kN, l, th, d), oracle::sigma_n(l, th, d), 1e-12);
    EXPECT_NEAR(sigma(BoundaryCurve::kP, l, th, d), oracle::sigma_p(l, th, d), 1e-12);
    // cos(0) = 1 reduces the generalised pair to the base pair.
    EXPECT_EQ(sigma(BoundaryCurve::kN, l, th, 0.0), sigma(BoundaryCurve::kL, l, th));
    EXPECT_EQ(sigma(BoundaryCurve::kP, l, th, 0.0), sigma(BoundaryCurve::kR, l, th));
  }
}

TEST(Sigma, InvariantAlongTurns) {
  // Along a right turn l' = sin(th) (in units of R per radian turned) while
  // th decreases one for one; sigma_R and sigma_P stay constant.
  const double d = 1.0;
  double l = -0.7;
  double th = 2.0;
  const double r0 = sigma(BoundaryCurve::kR, l, th);
  const double p0 = sigma(BoundaryCurve::kP, l, th, d);
  const double l0 = l;
  const double th0 = th;
  for (double a = 0.0; a <= 3.0; a += 0.25) {
    const double t = th0 - a;
    const double ll = l0 + std::cos(t) - std::cos(th0);
    EXPECT_NEAR(sigma(BoundaryCurve::kR, ll, t), r0, 1e-12);
    EXPECT_NEAR(sigma(BoundaryCurve::kP, ll, t, d), p0, 1e-12);
  }
  l = 0.4;
  th = -1.0;
  const double s_l = sigma(BoundaryCurve::kL, l, th);
  const double s_n = sigma(BoundaryCurve::kN, l, th, d);
  for (double a = 0.0; a <= 3.0; a += 0.25) {
    const double t = th + a;
    const double ll = l - (std::cos(t) - std::cos(th));
    EXPECT_NEAR(sigma(BoundaryCurve::kL, ll, t), s_l, 1e-12);
    EXPECT_NEAR(sigma(BoundaryCurve::kN, ll, t, d), s_n, 1e-12);
  }
}

TEST(DeltaProfile, SignOddAndMonotone) {
  const std::vector<DeltaProfile> profiles{
      DeltaProfile::constant(kPi / 3), DeltaProfile::tanh(kPi / 2, 1.0),
      DeltaProfile::tanh(1.0, 10.0),
      DeltaProfile::custom({{0.0, 0.0}, {1.0, 0.8}, {3.0, 1.2}})};
  for (const auto& p : profiles) {
    EXPECT_EQ(p.value(0.0), 0.0);
    double prev = 0.0;
    for (double l = 0.01; l < 6.0; l += 0.01) {
      const double d = p.value(l);
      EXPECT_LT(d, 0.0);
      EXPECT_GT(d, -kPi);
      EXPECT_EQ(p.value(-l), -d);
      EXPECT_GE(std::abs(d), prev - 1e-15);
      prev = std::abs(d);
    }
  }
  EXPECT_NEAR(DeltaProfile::tanh(kPi / 2, 1.0).value(1.0), -kPi / 2 * std::tanh(1.0), 1e-15);
}

TEST(DeltaProfile, RejectsBadParameters) {
  EXPECT_THROW(DeltaProfile::constant(0.0), Error);
  EXPECT_THROW(DeltaProfile::constant(4.0), Error);
  EXPECT_THROW(DeltaProfile::tanh(kPi, 1.0), Error);
  EXPECT_THROW(DeltaProfile::tanh(1.0, 0.0), Error);
  EXPECT_THROW(DeltaProfile::custom({{0.0, 0.0}}), Error);
  EXPECT_THROW(DeltaProfile::custom({{0.0, 0.0}, {1.0, 0.5}, {0.5, 0.6}}), Error);
  EXPECT_THROW(DeltaProfile::custom({{0.0, 0.0}, {1.0, 0.5}, {2.0, 0.4}}), Error);
}

TEST(Feasibility, ConstantProfile) {
  const auto r = curvature_feasible(DeltaProfile::constant(kPi / 3), 1.0, kR);
  EXPECT_TRUE(r.feasible);
  EXPECT_TRUE(std::isinf(r.l_hat));
}

double grid_max_ratio(double a, double k) {
  double best = 0.0;
  for (double l = 0.0; l <= 20.0; l += 1e-5) {
    const double sech = 1.0 / std::cosh(k * l);
    best = std::max(best, a * k * sech * sech * std::abs(std::sin(a * std::tanh(k * l))));
  }
  return best;
}

TEST(Feasibility, TanhGainOneIsFeasible) {
  const auto r = curvature_feasible(DeltaProfile::tanh(kPi / 2, 1.0), 1.0, kR);
  EXPECT_TRUE(r.feasible);
  EXPECT_TRUE(std::isinf(r.l_hat));
  const double oracle_max = grid_max_ratio(kPi / 2, 1.0);
  EXPECT_LT(oracle_max, 1.0);
  EXPECT_NEAR(r.max_ratio, oracle_max, 1e-6);
}

TEST(Feasibility, TanhGainTenIsInfeasible) {
  const auto r = curvature_feasible(DeltaProfile::tanh(kPi / 2, 10.0), 1.0, kR);
  EXPECT_FALSE(r.feasible);
  EXPECT_TRUE(std::isfinite(r.l_hat));
  EXPECT_NEAR(r.max_ratio, grid_max_ratio(kPi / 2, 10.0), 1e-4);
  // Independent bracket of where a*k*sech^2(kl)*|sin(a tanh(kl))| crosses 1.
  auto f = [](double l) {
    const double s = 1.0 / std::cosh(10.0 * l);
    return kPi / 2 * 10.0 * s * s * std::abs(std::sin(kPi / 2 * std::tanh(10.0 * l)));
  };
  EXPECT_LE(f(r.l_hat - 1e-4), 1.0);
  EXPECT_GT(f(r.l_hat), 1.0);
  EXPECT_GT(f(r.l_infeasible_max), 1.0);
  EXPECT_LE(f(r.l_infeasible_max + 1e-4), 1.0);
  EXPECT_GT(r.l_hat, 0.0);
  EXPECT_LT(r.l_hat, 0.01);
  EXPECT_GT(r.l_infeasible_max, 0.15);
  EXPECT_LT(r.l_infeasible_max, 0.3);
  // Ratio is invariant under v and R.
  const auto r2 = curvature_feasible(DeltaProfile::tanh(kPi / 2, 10.0), 2.5, 0.7);
  EXPECT_EQ(r2.l_hat, r.l_hat);
}

TEST(Classify, OriginIsConverged) {
  for (double d : {0.0, kPi / 3, -kPi / 3, kPi / 2}) {
    EXPECT_EQ(classify(0.0, 0.0, d, 1e-3), Region::kOnDeltaLine);
  }
}

TEST(Classify, TurnSequenceRegions) {
  const double d = kPi / 3;
  // Right of the path, heading steeply towards it: one right turn crosses
  // the path and lands on the left arrival curve.
  EXPECT_EQ(classify(-0.2, 1.2, d, 1e-3), Region::kRightTurnFirst);
  EXPECT_EQ(classify(0.2, -1.2, d, 1e-3), Region::kLeftTurnFirst);
  // Right of the path, heading below the approach line but close enough
  // that a left turn reaches the right arrival curve first.
  EXPECT_EQ(classify(-0.3, 0.3, d, 1e-3), Region::kLeftTurnFirst);
  EXPECT_EQ(classify(0.3, -0.3, d, 1e-3), Region::kRightTurnFirst);
  // Far away: the full turn-straight-turn sequence.
  EXPECT_EQ(classify(-3.0, 0.0, d, 1e-3), Region::kInterior);
  EXPECT_EQ(classify(-3.0, d, d, 1e-3), Region::kOnDeltaLine);
  EXPECT_EQ(classify(3.0, -d, d, 1e-3), Region::kOnDeltaLine);
  EXPECT_EQ(classify(-1.0 + std::cos(0.5), 0.5, d, 1e-3), Region::kOnSigmaR);
  EXPECT_EQ(classify(1.0 - std::cos(0.5), -0.5, d, 1e-3), Region::kOnSigmaL);
}

TEST(Classify, PartitionAndExactSymmetryOnMillionPointGrid) {
  const int n = 1000;
  const double d = kPi / 3;
  std::map<Region, long> counts;
  for (int i = 0; i < n; ++i) {
    const double l = -4.0 + 8.0 * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double th = -kPi + 2.0 * kPi * j / n;
      const Region r = classify(l, th, d, 1e-3);
      ++counts[r];
      const double mth = th == -kPi ? -kPi : -th;
      const Region m = classify(-l, mth, -d, 1e-3);
      Region expect = r;
      if (r == Region::kRightTurnFirst) expect = Region::kLeftTurnFirst;
      if (r == Region::kLeftTurnFirst) expect = Region::kRightTurnFirst;
      if (r == Region::kOnSigmaR) expect = Region::kOnSigmaL;
      if (r == Region::kOnSigmaL) expect = Region::kOnSigmaR;
      ASSERT_EQ(m, expect) << "at " << l << "," << th;
    }
  }
  long total = 0;
  for (const auto& [r, c] : counts) total += c;
  EXPECT_EQ(total, static_cast<long>(n) * n);
  EXPECT_EQ(counts[Region::kRightTurnFirst], counts[Region::kLeftTurnFirst]);
  EXPECT_GT(counts[Region::kRightTurnFirst], 0);
  EXPECT_GT(counts[Region::kInterior], 0);
}

// Number of 4-connected components of a label on a grid that wraps in theta.
int components(const std::vector<std::vector<Region>>& g, Region label) {
  const int n = static_cast<int>(g.size());
  const int m = static_cast<int>(g[0].size());
  std::vector<std::vector<char>> seen(n, std::vector<char>(m, 0));
  int count = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (seen[i][j] || g[i][j] != label) continue;
      ++count;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      seen[i][j] = 1;
      while (!q.empty()) {
        auto [a, b] = q.front();
        q.pop();
        const int nbr[4][2] = {{a + 1, b}, {a - 1, b}, {a, (b + 1) % m}, {a, (b + m - 1) % m}};
        for (const auto& nb : nbr) {
          if (nb[0] < 0 || nb[0] >= n || seen[nb[0]][nb[1]] ||
              g[nb[0]][nb[1]] != label) {
            continue;
          }
          seen[nb[0]][nb[1]] = 1;
          q.push({nb[0], nb[1]});
        }
      }
    }
  }
  return count;
}

TEST(Classify, TurnFirstRegionsAreConnected) {
  const int n = 400;
  std::vector<std::vector<Region>> g(n, std::vector<Region>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g[i][j] = classify(-4.0 + 8.0 * i / (n - 1), -kPi + 2.0 * kPi * j / n,
                         kPi / 3, 1e-3);
    }
  }
  EXPECT_EQ(components(g, Region::kRightTurnFirst), 1);
  EXPECT_EQ(components(g, Region::kLeftTurnFirst), 1);
}

TEST(Controller, FarStateTurnsTowardsPath) {
  ControllerConfig cfg;
  const auto d = select_maneuver(frenet(4.0, 0.0), in_phase(Phase::kApproach), cfg, kR);
  EXPECT_EQ(d.command.maneuver(), Maneuver::kTurnRight);
  EXPECT_EQ(d.state.hybrid_state, HybridState::kTurning);
  const auto e = select_maneuver(frenet(-4.0, 0.0), in_phase(Phase::kApproach), cfg, kR);
  EXPECT_EQ(e.command.maneuver(), Maneuver::kTurnLeft);
}

TEST(Controller, OnManifoldGoesStraight) {
  ControllerConfig cfg;
  for (double l : {-3.0, -0.5, 0.2, 1.0, 2.5}) {
    const double th = cfg.delta_profile.value(l);
    const auto d = select_maneuver(frenet(l, th), in_phase(Phase::kTrack), cfg, kR);
    EXPECT_EQ(d.command.maneuver(), Maneuver::kGoStraight) << l;
  }
}

TEST(Controller, TrackBandLaw) {
  ControllerConfig cfg;
  const double l = 0.5;
  const double d = cfg.delta_profile.value(l);
  const auto up = select_maneuver(frenet(l, d + 0.05), in_phase(Phase::kTrack), cfg, kR);
  EXPECT_EQ(up.command.maneuver(), Maneuver::kTurnRight);
  const auto down = select_maneuver(frenet(l, d - 0.05), in_phase(Phase::kTrack), cfg, kR);
  EXPECT_EQ(down.command.maneuver(), Maneuver::kTurnLeft);
  const auto in = select_maneuver(frenet(l, d + 0.015), in_phase(Phase::kTrack), cfg, kR);
  EXPECT_EQ(in.command.maneuver(), Maneuver::kGoStraight);
}

TEST(Controller, OriginIsControlledAndStays) {
  ControllerConfig cfg;
  for (Phase p : {Phase::kApproach, Phase::kTrack}) {
    auto d = select_maneuver(frenet(0.0, 0.0), in_phase(p), cfg, kR);
    EXPECT_EQ(d.command.maneuver(), Maneuver::kGoStraight);
    EXPECT_EQ(d.state.hybrid_state, HybridState::kControlled);
    d = select_maneuver(frenet(0.0, 0.0), d.state, cfg, kR);
    EXPECT_EQ(d.command.maneuver(), Maneuver::kGoStraight);
    EXPECT_EQ(d.state.hybrid_state, HybridState::kControlled);
  }
}

TEST(Controller, NonFiniteInputIsProjectionLost) {
  ControllerConfig cfg;
  try {
    select_maneuver({0.0, std::nan(""), 0.0}, {}, cfg, kR);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProjectionLost);
  }
}

TEST(Controller, NeverEmitsStop) {
  ControllerConfig cfg;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ul(-6.0, 6.0);
  std::uniform_real_distribution<double> ua(-kPi, kPi);
  ControllerState s;
  for (int i = 0; i < 20000; ++i) {
    const auto d = controller_step(frenet(ul(rng), ua(rng)), s, cfg, kR);
    EXPECT_NE(d.command.maneuver(), Maneuver::kStop);
    s = d.state;
  }
}

TEST(PhaseSwitch, Hysteresis) {
  ControllerState a = in_phase(Phase::kApproach);
  EXPECT_EQ(phase_switch(frenet(0.5, 0.0), a, kR, 1.0, 2.0).phase, Phase::kTrack);
  EXPECT_EQ(phase_switch(frenet(1.5, 0.0), a, kR, 1.0, 2.0).phase, Phase::kApproach);
  ControllerState t = in_phase(Phase::kTrack);
  EXPECT_EQ(phase_switch(frenet(1.05, 0.0), t, kR, 1.0, 2.0).phase, Phase::kTrack);
  EXPECT_EQ(phase_switch(frenet(-1.9, 0.0), t, kR, 1.0, 2.0).phase, Phase::kTrack);
  EXPECT_EQ(phase_switch(frenet(2.5, 0.0), t, kR, 1.0, 2.0).phase, Phase::kApproach);
  EXPECT_THROW(phase_switch(frenet(0.0, 0.0), t, kR, 0.0, 2.0), Error);
}

TEST(PhaseSwitch, InitialState) {
  ControllerConfig cfg;
  EXPECT_EQ(initial_controller_state(3.0, cfg).phase, Phase::kApproach);
  EXPECT_EQ(initial_controller_state(-0.5, cfg).phase, Phase::kTrack);
}

TEST(Controller, ConfigValidation) {
  ControllerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eps_theta = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = ControllerConfig{};
  cfg.re_approach_factor = 0.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = ControllerConfig{};
  cfg.delta_approach = kPi;
  EXPECT_THROW(cfg.validate(), Error);
}

}  // namespace
}  // namespace walkguide
