#pragma once

// Characteristic times and lengths of the two subprocesses: dwell times in
// the transitional region [a, x_c], asymptotic group times of narrow
// packets, and the total-reflection quantities below the step. The clock
// model's predictions are carried alongside as comparison values only.

#include <cmath>

#include "stepscatter/numerics/quadrature.hpp"
#include "stepscatter/swf.hpp"

namespace stepscatter {

struct DwellReport {
  double tau_tr_dwell = 0.0;
  double tau_ref_dwell = 0.0;
  double tau_free = 0.0;  // (x_c - a) / v_kappa
  double tau_tr_dwell_delay = 0.0;
  double l_depth = 0.0;
  EnergyRegime regime = EnergyRegime::Propagating;
};

struct GroupReport {
  double t_dep = 0.0;
  double x_start = 0.0;
  double t_arr_tr = 0.0;
  double t_arr_ref = 0.0;
  double tau_tr_group = 0.0;
  double tau_ref_group = 0.0;
  double tau_group_delay = 0.0;
  // Clock-model comparison values.
  double davies_tau_tr = 0.0;
  double davies_tau_ref = 0.0;
};

struct TotalReflectionReport {
  double tau_ref_dwell = 0.0;
  double l_depth = 0.0;
  double tau_ref_group = 0.0;
  double davies_depth = 0.0;  // d = 1/kappa
};

enum class DwellChannel { Transmission, Reflection };

namespace detail {

// arctan(u) - u/(1+u^2); the two terms cancel to O(u^3) as u -> 0.
inline double arctan_minus_rational(double u) {
  if (u < 1e-3) {
    const double u2 = u * u;
    return u * u2 * (2.0 / 3.0 - u2 * (4.0 / 5.0 - u2 * (6.0 / 7.0 - u2 * 8.0 / 9.0)));
  }
  return std::atan(u) - u / (1.0 + u * u);
}

inline double turning_angle(double k, double kappa) { return kappa * transitional_length(k, kappa); }

}  // namespace detail

/// v_tr-flow(x) = I_tr / |psi_tr(x)|^2 with I_tr = (hbar k/m) T.
inline double flow_velocity(const StepPotential& step, const SwfDecomposition& d, double x) {
  const double flux = step.units().hbar_over_mass() * d.stationary.k * d.stationary.trans_coef;
  const double density = std::norm(swf_tr(step, d, x).value);
  if (!(density > 0.0)) fail(ErrorCode::InvalidArgument, "psi_tr vanished; flow velocity undefined");
  return flux / density;
}

inline double flow_velocity(const StepPotential& step, double k, double x) {
  return flow_velocity(step, decompose(step, k), x);
}

inline DwellReport dwell_times(const StepPotential& step, double k) {
  const StationaryAmplitudes s = detail::require_propagating(stationary_amplitudes(step, k));
  const double kap = s.kappa;
  const double time_unit = step.units().mass_over_hbar();
  const double u = std::sqrt(kap / k);
  const double angle = detail::turning_angle(k, kap);
  const double root = std::sqrt(k * kap);
  const double diff = detail::arctan_minus_rational(u);  // angle - sqrt(k kappa)/(k + kappa)
  const double sum = angle + root / (k + kap);

  DwellReport r;
  r.regime = EnergyRegime::Propagating;
  // (kappa^2 + k^2) angle - beta kappa0^2 sqrt(k kappa)/(k + kappa), using
  // beta kappa0^2 = k^2 - kappa^2 on both branches.
  r.tau_tr_dwell = time_unit * (k * k * diff + kap * kap * sum) / (2.0 * k * kap * kap * kap);
  r.tau_ref_dwell = time_unit * 2.0 / (kap * kap) * diff;
  r.tau_free = time_unit * angle / (kap * kap);
  r.tau_tr_dwell_delay =
      time_unit * (kap - k) / (2.0 * k * kap * kap * kap) * ((kap - k) * angle + root);
  r.l_depth = k / (kap * kap) * diff;
  return r;
}

/// Dwell time from direct quadrature of |psi_channel|^2 over the region
/// behind the step, divided by the channel's incident flux. In the
/// evanescent regime only the reflection channel exists and the region is
/// the whole half-line x > a.
inline double dwell_time_oracle(const StepPotential& step, double k, DwellChannel channel,
                                numerics::AdaptiveOptions opts = {}) {
  const StationaryAmplitudes s = stationary_amplitudes(step, k);
  const double v_k = step.units().hbar_over_mass() * k;
  if (s.regime == EnergyRegime::Evanescent) {
    if (channel == DwellChannel::Transmission) fail(ErrorCode::WrongRegime, "no transmission below the step");
    auto density = [&](double x) { return std::norm(total_wave(step, s, x).value); };
    const double tail = 40.0 / s.kappa;
    return numerics::adaptive_integrate(density, step.a(), step.a() + tail, opts).value / v_k;
  }
  const SwfDecomposition d = decompose(step, k);
  if (channel == DwellChannel::Transmission) {
    auto density = [&](double x) { return std::norm(swf_tr(step, d, x).value); };
    return numerics::adaptive_integrate(density, step.a(), d.region.x_c, opts).value / (v_k * s.trans_coef);
  }
  auto density = [&](double x) { return std::norm(swf_ref(step, d, x).value); };
  return numerics::adaptive_integrate(density, step.a(), d.region.x_c, opts).value / (v_k * s.refl_coef);
}

/// Group times for the observation interval [0, a + L].
inline GroupReport group_times(const StepPotential& step, double k, double interval_l) {
  if (!(interval_l > 0.0)) fail(ErrorCode::InvalidArgument, "interval length L must be positive");
  const StationaryAmplitudes s = detail::require_propagating(stationary_amplitudes(step, k));
  const double kap = s.kappa;
  const double hm = step.units().hbar_over_mass();
  const double v_k = hm * k;
  const double v_kappa = hm * kap;
  const double tau_free = detail::transitional_length(k, kap) / v_kappa;

  GroupReport g;
  g.t_dep = (k - kap) / (hm * std::pow(k * kap, 1.5));
  g.x_start = -v_k * g.t_dep;
  g.t_arr_ref = 2.0 * step.a() / v_k;
  g.t_arr_tr = step.a() / v_k + interval_l / v_kappa;
  g.tau_tr_group = tau_free - g.t_dep;
  g.tau_ref_group = -g.t_dep;
  g.tau_group_delay = -g.t_dep;
  g.davies_tau_tr = tau_free;
  g.davies_tau_ref = 0.0;
  return g;
}

inline TotalReflectionReport total_reflection_times(const StepPotential& step, double k) {
  const BranchWavenumber br = kappa_of_k(step, k);
  if (br.regime != EnergyRegime::Evanescent) fail(ErrorCode::WrongRegime, "total reflection requires 0 < E < V0");
  const double kap = br.kappa;
  const double k0sq = step.kappa0() * step.kappa0();
  const double time_unit = step.units().mass_over_hbar();
  TotalReflectionReport r;
  r.tau_ref_dwell = time_unit * 2.0 * k / (kap * k0sq);
  r.l_depth = k * k / (kap * k0sq);
  r.tau_ref_group = time_unit * 2.0 / (k * kap);
  r.davies_depth = 1.0 / kap;
  return r;
}

}  // namespace stepscatter
