#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stepscatter/packet.hpp"

using namespace stepscatter;

namespace {

StepPotential reference_step() { return StepPotential(0.5, 500.0); }
SpectralProfile reference_profile() { return SpectralProfile::gaussian(50.0, 1.5); }

}  // namespace

TEST(SpectralAmplitude, PeakAndNormalization) {
  const SpectralProfile p = reference_profile();
  EXPECT_NEAR(spectral_amplitude(p, 1.5), std::pow(2.0 * 2500.0 / pi, 0.25), 1e-14);
  const numerics::QuadratureRule r = numerics::gauss_legendre(p.nodes, p.k_min(), p.k_max());
  numerics::CompensatedSum mass;
  for (std::size_t i = 0; i < r.size(); ++i) mass.add(r.weights[i] * std::pow(spectral_amplitude(p, r.nodes[i]), 2));
  // |A|^2 is a normal density with standard deviation sigma_k.
  EXPECT_NEAR(mass.value(), std::erf(8.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(mass.value(), 1.0, 1e-8);
}

TEST(SpectralAmplitude, WindowEdgeTail) {
  const SpectralProfile p = reference_profile();
  EXPECT_DOUBLE_EQ(p.window, 0.08);
  EXPECT_DOUBLE_EQ(p.sigma_k(), 0.01);
  const double ratio = std::pow(spectral_amplitude(p, p.k_max()) / spectral_amplitude(p, p.k_bar), 2);
  EXPECT_NEAR(ratio / std::exp(-32.0), 1.0, 1e-12);
  // Probability mass beyond the window is erfc(8/sqrt 2).
  EXPECT_LT(std::erfc(8.0 / std::sqrt(2.0)), 1e-8);
}

TEST(SpectralGuard, RejectsWindowsReachingThreshold) {
  const StepPotential s = reference_step();
  EXPECT_THROW(SpectralPropagator(SpectralProfile::gaussian(50.0, 1.05), s), ScatterError);
  try {
    check_spectral_guard(SpectralProfile::gaussian(50.0, 1.05), s);
  } catch (const ScatterError& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpectralGuardViolated);
  }
  EXPECT_NO_THROW(check_spectral_guard(SpectralProfile::gaussian(50.0, 0.2), StepPotential(-0.5, 500.0)));
  EXPECT_THROW(check_spectral_guard(SpectralProfile::gaussian(5.0, 0.5), StepPotential(-0.5, 500.0)), ScatterError);
}

TEST(SpatialGrid, SpacingAndResolution) {
  const SpatialGrid g = SpatialGrid::make(-600.0, 1400.0, 16001);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.125);
  EXPECT_DOUBLE_EQ(g.x(16000), 1400.0);
  EXPECT_TRUE(g.resolves(reference_profile()));
  EXPECT_FALSE(SpatialGrid::make(0.0, 100.0, 101).resolves(reference_profile()));
  EXPECT_THROW(SpatialGrid::make(1.0, 1.0, 10), ScatterError);
  EXPECT_THROW(SpatialGrid::make(0.0, 1.0, 1), ScatterError);
}

TEST(Evolve, IncidentMomentsAtTimeZero) {
  const SpatialGrid g = SpatialGrid::make(-600.0, 600.0, 24001);
  const PacketSnapshot snap = evolve(reference_profile(), reference_step(), 0.0, g, Channel::Incident);
  ASSERT_EQ(snap.values.size(), g.n_points);
  const MomentRecord m = moments(snap);
  EXPECT_NEAR(m.norm, 1.0, 1e-10);
  EXPECT_NEAR(m.x_mean, 0.0, 1e-8);
  EXPECT_NEAR(m.x2_mean / 2500.0, 1.0, 1e-6);
  EXPECT_NEAR(m.p_mean / 1.5, 1.0, 1e-8);
}

TEST(Evolve, TotalEqualsIncidentFarFromStep) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const SpatialGrid g = SpatialGrid::make(-200.0, 200.0, 3201);
  const std::array<Channel, 2> chans{Channel::Total, Channel::Incident};
  const auto snaps = prop.evolve(0.0, g, chans);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.n_points; ++i) worst = std::max(worst, std::abs(snaps[0].values[i] - snaps[1].values[i]));
  EXPECT_LT(worst, 1e-6);
}

TEST(Evolve, SuperpositionInTime) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const SpatialGrid g = SpatialGrid::make(300.0, 700.0, 3201);
  const std::array<Channel, 3> chans{Channel::Total, Channel::Tr, Channel::Ref};
  for (double t : {0.0, 330.0, 400.0}) {
    const auto snaps = prop.evolve(t, g, chans);
    for (std::size_t i = 0; i < g.n_points; ++i) {
      ASSERT_LT(std::abs(snaps[1].values[i] + snaps[2].values[i] - snaps[0].values[i]), 1e-12) << t << " " << g.x(i);
    }
  }
}

TEST(Evolve, TransmittedPacketMatchesDirectQuadrature) {
  const SpectralProfile p = reference_profile();
  const StepPotential s = reference_step();
  const double t = 700.0;
  // Transmitted packet centre is near a + v_kappa (t - a / v_k) ~ 908.
  const SpatialGrid g = SpatialGrid::make(860.0, 960.0, 5);
  const PacketSnapshot snap = evolve(p, s, t, g, Channel::Tr);
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    auto integrand = [&](double k, bool imag_part) {
      const cplx v = spectral_amplitude(p, k) * stationary_swf_tr(s, k, x) * std::polar(1.0, -0.5 * k * k * t);
      return imag_part ? v.imag() : v.real();
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double re = GK::integrate([&](double k) { return integrand(k, false); }, p.k_min(), p.k_max(), 15, 1e-14);
    const double im = GK::integrate([&](double k) { return integrand(k, true); }, p.k_min(), p.k_max(), 15, 1e-14);
    const cplx oracle = cplx(re, im) / std::sqrt(2.0 * pi);
    EXPECT_LT(std::abs(snap.values[i] - oracle), 1e-10) << x;
  }
}

TEST(Evolve, ThreadCountDoesNotChangeBits) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const SpatialGrid g = SpatialGrid::make(-100.0, 700.0, 1001);
  const std::array<Channel, 2> chans{Channel::Tr, Channel::Ref};
  const auto one = prop.evolve(350.0, g, chans, 1);
  const auto three = prop.evolve(350.0, g, chans, 3);
  for (std::size_t c = 0; c < chans.size(); ++c) {
    for (std::size_t i = 0; i < g.n_points; ++i) {
      ASSERT_EQ(one[c].values[i].real(), three[c].values[i].real());
      ASSERT_EQ(one[c].values[i].imag(), three[c].values[i].imag());
    }
  }
}

TEST(Evolve, FreeDispersion) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const SpatialGrid g = SpatialGrid::make(-400.0, 800.0, 9601);
  for (double t : {0.0, 100.0, 200.0}) {
    const MomentRecord m = moments(prop.evolve(t, g, Channel::Incident));
    EXPECT_NEAR(m.norm, 1.0, 1e-10) << t;
    if (t > 0.0) {
      EXPECT_NEAR(m.x_mean / (1.5 * t), 1.0, 1e-8) << t;
    }
    // sigma(t)^2 = l0^2 (1 + (t / (2 l0^2))^2)
    const double tau = t / 5000.0;
    EXPECT_NEAR(m.spread() * m.spread() / (2500.0 * (1.0 + tau * tau)), 1.0, 1e-6) << t;
  }
}

TEST(Moments, InvariantUnderComplexScaling) {
  const SpatialGrid g = SpatialGrid::make(-300.0, 300.0, 4801);
  PacketSnapshot snap = evolve(reference_profile(), reference_step(), 0.0, g, Channel::Incident);
  const MomentRecord m0 = moments(snap);
  const cplx c(0.3, -1.7);
  for (cplx& v : snap.values) v *= c;
  const MomentRecord m1 = moments(snap);
  EXPECT_NEAR(m1.norm, std::norm(c) * m0.norm, 1e-13);
  EXPECT_NEAR(m1.x_mean, m0.x_mean, 1e-10);
  EXPECT_NEAR(m1.p_mean, m0.p_mean, 1e-13);
  EXPECT_GE(m1.x2_mean, m1.x_mean * m1.x_mean);
}

TEST(Moments, EmptyChannelRejected) {
  PacketSnapshot snap;
  snap.grid = SpatialGrid::make(0.0, 1.0, 11);
  snap.values.assign(11, cplx{});
  try {
    moments(snap);
    FAIL();
  } catch (const ScatterError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyChannel);
  }
}

TEST(ChannelNorms, AsymptoticIdentityAndInitialStage) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const AsymptoticNorms as = prop.asymptotic_norms();
  EXPECT_NEAR(as.trans + as.refl, 1.0, 1e-10);
  const SpatialGrid g = SpatialGrid::make(-600.0, 600.0, 9601);
  const ChannelNorms n = channel_norms(prop, 0.0, g);
  EXPECT_NEAR(n.trans, as.trans, 1e-6);
  EXPECT_NEAR(n.refl, as.refl, 1e-6);
}

TEST(ChannelNorms, GridTooSmallDetected) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  try {
    channel_norms(prop, 0.0, SpatialGrid::make(-100.0, 100.0, 1601));
    FAIL();
  } catch (const ScatterError& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooSmall);
  }
}

TEST(FitLine, ExactLineAndErrors) {
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> x{1.0, 3.5, 6.0, 8.5};
  const TrajectoryFit f = fit_line(t, x);
  EXPECT_NEAR(f.slope, 2.5, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.rms_residual, 0.0, 1e-14);
  EXPECT_EQ(f.t_window.first, 0.0);
  EXPECT_EQ(f.t_window.second, 3.0);
  const std::vector<double> same{1.0, 1.0};
  EXPECT_THROW(fit_line(same, same), ScatterError);
  EXPECT_THROW(fit_line(std::vector<double>{1.0}, std::vector<double>{1.0}), ScatterError);
}

TEST(CmTrajectory, InitialStageIncidentChannelsStartTogether) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const SpatialGrid g = SpatialGrid::make(-400.0, 500.0, 7201);
  const std::vector<double> times{0.0, 40.0, 80.0};
  const CmTrajectory tr = cm_trajectory(prop, times, g, Channel::TrInc);
  const CmTrajectory ref = cm_trajectory(prop, times, g, Channel::RefInc);
  EXPECT_NEAR(tr.fit.slope / 1.5, 1.0, 1e-3);
  EXPECT_NEAR(tr.fit.intercept, ref.fit.intercept, 0.05);
  const double t_dep = -tr.fit.intercept / tr.fit.slope;
  EXPECT_NEAR(t_dep / 0.17587549030157414, 1.0, 0.05);
  for (const MomentRecord& r : tr.records) EXPECT_EQ(classify_stage(r, Channel::TrInc, 500.0, 501.0), Stage::Initial);
}

TEST(CmTrajectory, StraddlingWindowRejected) {
  const SpectralPropagator prop(reference_profile(), reference_step());
  const SpatialGrid g = SpatialGrid::make(-200.0, 900.0, 8801);
  const std::vector<double> times{150.0, 333.0, 520.0};
  try {
    cm_trajectory(prop, times, g, Channel::Total);
    FAIL();
  } catch (const ScatterError& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadFitWindow);
  }
}

TEST(ClassifyStage, Rules) {
  MomentRecord r;
  r.x_mean = 0.0;
  r.x2_mean = 2500.0;
  r.p_mean = 1.5;
  EXPECT_EQ(classify_stage(r, Channel::Tr, 500.0, 501.0), Stage::Initial);
  r.x_mean = 480.0;
  r.x2_mean = 480.0 * 480.0 + 2500.0;
  EXPECT_EQ(classify_stage(r, Channel::Tr, 500.0, 501.0), Stage::Scattering);
  r.x_mean = 900.0;
  r.x2_mean = 900.0 * 900.0 + 2500.0;
  EXPECT_EQ(classify_stage(r, Channel::Tr, 500.0, 501.0), Stage::Final);
  r.x_mean = 100.0;
  r.x2_mean = 100.0 * 100.0 + 2500.0;
  r.p_mean = -1.5;
  EXPECT_EQ(classify_stage(r, Channel::Ref, 500.0, 501.0), Stage::Final);
}

TEST(CompletedScattering, ReferenceScenarioPasses) {
  const CompletedScatteringReport r = validate_completed_scattering(reference_profile(), reference_step());
  EXPECT_TRUE(r.all_pass());
  EXPECT_DOUBLE_EQ(r.a_over_l0, 10.0);
  EXPECT_GT(r.effective_transitional_length, 0.0);
  EXPECT_LT(r.effective_transitional_length, 5.0);
}

TEST(CompletedScattering, WidePacketFailsNarrowness) {
  const CompletedScatteringReport r =
      validate_completed_scattering(SpectralProfile::gaussian(2.0, 1.5), reference_step());
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(r.spectral_guard);
}

TEST(CompletedScattering, GuardFailureNearThreshold) {
  const CompletedScatteringReport r =
      validate_completed_scattering(SpectralProfile::gaussian(50.0, 1.05), StepPotential(0.5, 500.0));
  EXPECT_FALSE(r.spectral_guard);
  EXPECT_FALSE(r.all_pass());
}
