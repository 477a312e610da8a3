#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stepscatter/times.hpp"

using namespace stepscatter;

namespace {

StepPotential step_of(int beta, double a = 7.0) { return StepPotential(0.5 * beta, a); }

std::vector<double> k_grid(int beta, int n) {
  std::vector<double> ks;
  const double lo = beta == 1 ? std::log(1.02) : std::log(0.05);
  const double hi = std::log(20.0);
  for (int i = 0; i < n; ++i) ks.push_back(std::exp(lo + (hi - lo) * i / (n - 1)));
  return ks;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST(FlowVelocity, PlaneWaveRegions) {
  const StepPotential s = step_of(1);
  const double xc = turning_point(s, 1.5).x_c;
  EXPECT_NEAR(flow_velocity(s, 1.5, s.a() - 1.0), 1.5, 1e-12);
  EXPECT_NEAR(flow_velocity(s, 1.5, xc + 1.0), std::sqrt(1.25), 1e-12);
}

TEST(FlowVelocity, MonotoneAcrossTransitionalRegion) {
  for (int beta : {1, -1}) {
    const StepPotential s = step_of(beta);
    const SwfDecomposition d = decompose(s, 1.5);
    const double v_kap = d.stationary.kappa;
    double prev = flow_velocity(s, d, s.a());
    EXPECT_NEAR(prev, 1.5, 1e-10);
    for (int i = 1; i < 1000; ++i) {
      const double v = flow_velocity(s, d, s.a() + d.region.length * i / 999.0);
      if (beta == 1) {
        EXPECT_LT(v, prev) << i;
        EXPECT_GT(v, v_kap - 1e-12);
      } else {
        EXPECT_GT(v, prev) << i;
        EXPECT_LT(v, v_kap + 1e-12);
      }
      prev = v;
    }
    EXPECT_NEAR(prev, v_kap, 1e-10);
  }
}

TEST(DwellTimes, ReferencePoint) {
  const DwellReport r = dwell_times(step_of(1), 1.5);
  EXPECT_NEAR(r.tau_tr_dwell, 0.47655262064902764, 1e-13);
  EXPECT_NEAR(r.tau_ref_dwell, 0.34806082799656519, 1e-13);
  EXPECT_NEAR(r.tau_free, 0.56975026717682441, 1e-13);
  EXPECT_NEAR(r.tau_tr_dwell_delay, -0.093197646527796772, 1e-13);
  EXPECT_NEAR(r.l_depth, 0.26104562099742390, 1e-13);
  EXPECT_NEAR(r.tau_tr_dwell_delay, r.tau_tr_dwell - r.tau_free, 1e-12);
}

TEST(DwellTimes, ClosedFormsMatchQuadratureOnGrid) {
  for (int beta : {1, -1}) {
    const StepPotential s = step_of(beta);
    for (double k : k_grid(beta, 20)) {
      const DwellReport r = dwell_times(s, k);
      EXPECT_LT(rel(dwell_time_oracle(s, k, DwellChannel::Transmission), r.tau_tr_dwell), 1e-8) << beta << " " << k;
      EXPECT_LT(rel(dwell_time_oracle(s, k, DwellChannel::Reflection), r.tau_ref_dwell), 1e-8) << beta << " " << k;
    }
  }
}

TEST(DwellTimes, AttractiveReflectionReference) {
  const StepPotential s = step_of(-1);
  EXPECT_NEAR(dwell_times(s, 0.7).tau_ref_dwell, 0.59245456065297887, 1e-13);
  EXPECT_LT(rel(dwell_time_oracle(s, 0.7, DwellChannel::Reflection), 0.59245456065297887), 1e-8);
}

TEST(DwellTimes, AlternativeRootFailsTheOracle) {
  const StepPotential s = step_of(1);
  const SwfDecomposition d = decompose(s, 1.5);
  auto density = [&](double x) { return std::norm(alternative_reflection(s, d, x).value); };
  const double alt = numerics::adaptive_integrate(density, s.a(), d.region.x_c).value / (1.5 * d.stationary.refl_coef);
  EXPECT_GT(std::abs(alt - dwell_times(s, 1.5).tau_ref_dwell), 1e-3);
}

TEST(DwellTimes, SignLawsAndOrdering) {
  for (int beta : {1, -1}) {
    const StepPotential s = step_of(beta);
    for (double k : k_grid(beta, 60)) {
      const DwellReport r = dwell_times(s, k);
      EXPECT_LT(beta * r.tau_tr_dwell_delay, 0.0) << beta << " " << k;
      EXPECT_LE(s.a() + r.l_depth, turning_point(s, k).x_c) << beta << " " << k;
      EXPECT_GT(r.l_depth, 0.0);
    }
  }
}

TEST(DwellTimes, HighEnergyDepthLimit) {
  for (int beta : {1, -1}) {
    const StepPotential s = step_of(beta);
    const double kap = kappa_of_k(s, 100.0).kappa;
    EXPECT_NEAR(kap * dwell_times(s, 100.0).l_depth, (pi - 2.0) / 4.0, 1e-3);
  }
}

TEST(DwellTimes, SmallAngleSeriesContinuity) {
  // The series branch of atan(u) - u/(1+u^2) switches at u = 1e-3.
  const double u = 1e-3;
  const double below = detail::arctan_minus_rational(std::nextafter(u, 0.0));
  const double above = detail::arctan_minus_rational(u);
  EXPECT_LT(rel(below, above), 1e-9);
  EXPECT_NEAR(detail::arctan_minus_rational(0.5), std::atan(0.5) - 0.4, 1e-16);
}

TEST(DwellTimes, UnitScaling) {
  const StepPotential unit = step_of(1);
  // hbar = 2, m = 3, V0 chosen so that kappa0 = 1 again.
  const PhysicalConfig cfg{2.0, 3.0};
  const StepPotential scaled(4.0 / 6.0, 7.0, cfg);
  ASSERT_NEAR(scaled.kappa0(), 1.0, 1e-15);
  EXPECT_NEAR(dwell_times(scaled, 1.5).tau_tr_dwell, 1.5 * dwell_times(unit, 1.5).tau_tr_dwell, 1e-14);
  EXPECT_NEAR(dwell_times(scaled, 1.5).l_depth, dwell_times(unit, 1.5).l_depth, 1e-15);
  EXPECT_NEAR(group_times(scaled, 1.5, 10.0).t_dep, 1.5 * group_times(unit, 1.5, 10.0).t_dep, 1e-14);
}

TEST(GroupTimes, ReferencePoint) {
  const GroupReport g = group_times(step_of(1, 10.0), 1.5, 100.0);
  EXPECT_NEAR(g.t_dep, 0.17587549030157414, 1e-14);
  EXPECT_NEAR(g.tau_group_delay, -0.17587549030157414, 1e-14);
  EXPECT_NEAR(g.t_arr_ref, 20.0 / 1.5, 1e-13);
  EXPECT_NEAR(g.t_arr_tr, 10.0 / 1.5 + 100.0 / std::sqrt(1.25), 1e-12);
  EXPECT_NEAR(g.x_start, -1.5 * g.t_dep, 1e-15);
  EXPECT_NEAR(g.tau_tr_group, g.davies_tau_tr - g.t_dep, 1e-12);
  EXPECT_EQ(g.tau_ref_group, -g.t_dep);
  EXPECT_EQ(g.davies_tau_ref, 0.0);
  EXPECT_THROW(group_times(step_of(1), 1.5, 0.0), ScatterError);
}

TEST(GroupTimes, DepartureTimeIsPhaseDerivative) {
  for (int beta : {1, -1}) {
    const StepPotential s = step_of(beta);
    for (double k : {0.4, 1.5, 3.0}) {
      if (beta == 1 && k < 1.0) continue;
      const double h = 1e-5;
      const double dlam = (lambda_phase(s, k + h) - lambda_phase(s, k - h)) / (2.0 * h);
      EXPECT_NEAR(beta * dlam / k, group_times(s, k, 1.0).t_dep, 1e-8) << beta << " " << k;
    }
  }
}

TEST(GroupTimes, DelaySignLaw) {
  for (int beta : {1, -1}) {
    const StepPotential s = step_of(beta);
    for (double k : k_grid(beta, 60)) EXPECT_LT(beta * group_times(s, k, 1.0).tau_group_delay, 0.0);
  }
}

TEST(TotalReflection, ReferencePoint) {
  const StepPotential s = step_of(1);
  const TotalReflectionReport r = total_reflection_times(s, 0.6);
  EXPECT_NEAR(r.l_depth, 0.45, 1e-15);
  EXPECT_NEAR(r.tau_ref_dwell, 1.5, 1e-14);
  EXPECT_NEAR(r.tau_ref_group, 2.0 / (0.6 * 0.8), 1e-14);
  EXPECT_NEAR(r.davies_depth, 1.25, 1e-15);
  EXPECT_NEAR(r.tau_ref_dwell, 2.0 * r.l_depth / 0.6, 1e-12);
  EXPECT_LT(rel(dwell_time_oracle(s, 0.6, DwellChannel::Reflection), r.tau_ref_dwell), 1e-8);
  EXPECT_THROW(total_reflection_times(s, 1.5), ScatterError);
  EXPECT_THROW(dwell_time_oracle(s, 0.6, DwellChannel::Transmission), ScatterError);
}

TEST(TotalReflection, OracleOnGrid) {
  const StepPotential s = step_of(1);
  for (double k : {0.05, 0.2, 0.5, 0.9, 0.99}) {
    EXPECT_LT(rel(dwell_time_oracle(s, k, DwellChannel::Reflection), total_reflection_times(s, k).tau_ref_dwell), 1e-8)
        << k;
  }
}

TEST(TotalReflection, DepthDivergesOnBothSidesOfThreshold) {
  const StepPotential s = step_of(1);
  const double kap = 1e-3;
  const double below = total_reflection_times(s, std::sqrt(1.0 - kap * kap)).l_depth;
  const double above = dwell_times(s, std::sqrt(1.0 + kap * kap)).l_depth;
  EXPECT_GT(below, 10.0);
  EXPECT_GT(above, 10.0);
  EXPECT_GT(total_reflection_times(s, std::sqrt(1.0 - kap * kap)).davies_depth, 10.0);
}

TEST(TotalReflection, LowEnergyLimit) {
  const TotalReflectionReport r = total_reflection_times(step_of(1), 1e-4);
  EXPECT_LT(r.l_depth, 1e-7);
  EXPECT_NEAR(r.davies_depth, 1.0, 1e-8);
}
