#pragma once

// Splitting of the stationary total wave function into a transmission and a
// reflection subprocess wave function (SWF):
//   psi_tr + psi_ref = Psi_tot,
// each with exactly one incoming and one outgoing wave, joined at the
// turning point x_c where the value and the probability current are
// continuous. psi_ref vanishes identically beyond x_c.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "stepscatter/numerics/roots.hpp"
#include "stepscatter/step_core.hpp"

namespace stepscatter {

/// Phases (mu, nu) of A_tr = sqrt(T) e^{i mu} and A_ref = sqrt(R) e^{i nu}.
struct RootPair {
  double mu;
  double nu;
};

struct SwfAmplitudes {
  double lambda = 0.0;
  cplx amp_tr;
  cplx amp_ref;
  RootPair chosen_roots{};
  RootPair rejected_roots{};
};

struct TransitionalRegion {
  double x_c = 0.0;
  double length = 0.0;  // x_c - a
  cplx amp_c;           // prefactor of C sin(kappa (x - x_c)) on [a, x_c]
};

struct SwfDecomposition {
  StationaryAmplitudes stationary;
  SwfAmplitudes swf;
  TransitionalRegion region;
};

namespace detail {

inline const StationaryAmplitudes& require_propagating(const StationaryAmplitudes& s) {
  if (s.regime != EnergyRegime::Propagating) {
    fail(ErrorCode::WrongRegime, "operation requires E > V0 (propagating regime)");
  }
  return s;
}

inline double lambda_from(int beta, double k, double kappa) {
  const double ratio = beta == 1 ? kappa / k : k / kappa;
  return 2.0 * std::atan(std::sqrt(ratio));
}

// kappa (x_c - a) = arctan(sqrt(kappa/k)), with a series branch for tiny angles.
inline double transitional_length(double k, double kappa) {
  const double u = std::sqrt(kappa / k);
  const double angle = std::atan(u);
  if (angle < 1e-8) return (u - u * u * u / 3.0) / kappa;
  return angle / kappa;
}

}  // namespace detail

inline double lambda_phase(const StepPotential& step, double k) {
  const StationaryAmplitudes s = detail::require_propagating(stationary_amplitudes(step, k));
  return detail::lambda_from(step.beta(), k, s.kappa);
}

inline SwfAmplitudes swf_amplitudes(const StepPotential& step, const StationaryAmplitudes& s) {
  detail::require_propagating(s);
  const int beta = step.beta();
  const double b = beta;
  SwfAmplitudes out;
  out.lambda = detail::lambda_from(beta, s.k, s.kappa);
  out.chosen_roots = {b * (out.lambda - pi / 2.0), b * out.lambda};
  out.rejected_roots = {-out.chosen_roots.mu, -out.chosen_roots.nu};
  out.amp_tr = std::polar(std::sqrt(s.trans_coef), out.chosen_roots.mu);
  out.amp_ref = std::polar(std::sqrt(s.refl_coef), out.chosen_roots.nu);
  return out;
}

inline SwfAmplitudes swf_amplitudes(const StepPotential& step, double k) {
  return swf_amplitudes(step, stationary_amplitudes(step, k));
}

inline SwfDecomposition decompose(const StepPotential& step, double k) {
  SwfDecomposition d;
  d.stationary = detail::require_propagating(stationary_amplitudes(step, k));
  d.swf = swf_amplitudes(step, d.stationary);
  const double kap = d.stationary.kappa;
  const double b = step.beta();
  d.region.length = detail::transitional_length(k, kap);
  d.region.x_c = step.a() + d.region.length;
  const cplx phase_factor = step.beta() == 1 ? cplx(1.0, 0.0) : cplx(0.0, -1.0);  // i^{(beta-1)/2}
  d.region.amp_c = -2.0 * phase_factor * std::sqrt(k / kap * d.stationary.refl_coef) *
                   std::polar(1.0, k * step.a() + b * d.swf.lambda / 2.0);
  return d;
}

inline TransitionalRegion turning_point(const StepPotential& step, double k) { return decompose(step, k).region; }

/// Phi_ref: the reflection SWF for x < a continued as C sin(kappa (x - x_c))
/// through the whole region x > a. psi_ref = Phi_ref * theta(x_c - x).
inline WaveSample reflection_continuation(const StepPotential& step, const SwfDecomposition& d, double x) {
  const double k = d.stationary.k;
  const double a = step.a();
  const double b = step.beta();
  if (x < a) {
    const double half_lambda = b * d.swf.lambda / 2.0;
    const cplx pre = std::sqrt(d.stationary.refl_coef) * std::polar(1.0, k * a + half_lambda);
    const cplx fwd = std::polar(1.0, k * (x - a) + half_lambda);
    const cplx bwd = std::conj(fwd);
    return {pre * (fwd + b * bwd), pre * I * k * (fwd - b * bwd)};
  }
  const double kap = d.stationary.kappa;
  const double arg = kap * ((x - a) - d.region.length);
  return {d.region.amp_c * std::sin(arg), d.region.amp_c * kap * std::cos(arg)};
}

inline WaveSample swf_ref(const StepPotential& step, const SwfDecomposition& d, double x) {
  if (x > d.region.x_c) return {};
  return reflection_continuation(step, d, x);
}

inline WaveSample swf_tr(const StepPotential& step, const SwfDecomposition& d, double x) {
  const double k = d.stationary.k;
  if (x < step.a()) {
    const cplx v = d.swf.amp_tr * std::polar(1.0, k * x);
    return {v, I * k * v};
  }
  const WaveSample tot = total_wave(step, d.stationary, x);
  if (x > d.region.x_c) return tot;
  const WaveSample ref = reflection_continuation(step, d, x);
  return {tot.value - ref.value, tot.slope - ref.slope};
}

// Below the step (total reflection) psi_ref is the whole wave function and
// psi_tr vanishes identically.
inline cplx stationary_swf_ref(const StepPotential& step, double k, double x) {
  const StationaryAmplitudes s = stationary_amplitudes(step, k);
  if (s.regime == EnergyRegime::Evanescent) return total_wave(step, s, x).value;
  return swf_ref(step, decompose(step, k), x).value;
}

inline cplx stationary_swf_tr(const StepPotential& step, double k, double x) {
  if (stationary_amplitudes(step, k).regime == EnergyRegime::Evanescent) return {};
  return swf_tr(step, decompose(step, k), x).value;
}

/// Reflection SWF built from the rejected root pair: A_ref^alt = sqrt(R)
/// e^{-i beta lambda} for x < a, continued smoothly (value and slope matched
/// at the step) as a kappa-wave for x >= a. Used for negative controls.
inline WaveSample alternative_reflection(const StepPotential& step, const SwfDecomposition& d, double x) {
  const double k = d.stationary.k;
  const double a = step.a();
  const cplx amp = std::polar(std::sqrt(d.stationary.refl_coef), d.swf.rejected_roots.nu);
  auto left = [&](double y) -> WaveSample {
    const cplx in = amp * std::polar(1.0, k * y);
    const cplx out = d.stationary.amp_b * std::polar(1.0, -k * y);
    return {in + out, I * k * (in - out)};
  };
  if (x < a) return left(x);
  const WaveSample at_step = left(a);
  const double kap = d.stationary.kappa;
  const double s = kap * (x - a);
  return {at_step.value * std::cos(s) + at_step.slope / kap * std::sin(s),
          -at_step.value * kap * std::sin(s) + at_step.slope * std::cos(s)};
}

inline cplx alternative_swf_ref(const StepPotential& step, double k, double x) {
  return alternative_reflection(step, decompose(step, k), x).value;
}

/// Total reflection: psi_ref is the whole wave function and psi_tr is zero.
inline cplx total_reflection_swf(const StepPotential& step, double k, double x) {
  const StationaryAmplitudes s = stationary_amplitudes(step, k);
  if (s.regime != EnergyRegime::Evanescent) {
    fail(ErrorCode::WrongRegime, "total reflection requires 0 < E < V0");
  }
  return total_wave(step, s, x).value;
}

struct TurningPointOracle {
  double nearest = 0.0;             // zero closest to the step
  std::array<double, 3> zeros{};    // first three zeros of Phi_ref in x > a
  std::array<double, 3> slopes{};   // |dx_n/dk| by central differences
  double dk = 0.0;                  // difference step actually used
  bool nearest_minimizes_slope = false;
};

namespace detail {

// Zeros of the reflection SWF continued past the step, built only from the
// x < a expression A_ref e^{ikx} + B e^{-ikx} and value/slope matching at a.
inline std::array<double, 3> continuation_zeros(const StepPotential& step, double k) {
  const StationaryAmplitudes s = require_propagating(stationary_amplitudes(step, k));
  const SwfAmplitudes w = swf_amplitudes(step, s);
  const double a = step.a();
  const double kap = s.kappa;
  const cplx in = w.amp_ref * std::polar(1.0, k * a);
  const cplx out = s.amp_b * std::polar(1.0, -k * a);
  const cplx value = in + out;
  const cplx slope_over_kappa = I * k * (in - out) / kap;
  // Strip the global phase; what is left is a real standing wave.
  const double phase = std::abs(value) >= std::abs(slope_over_kappa) ? std::arg(value) : std::arg(slope_over_kappa);
  const cplx unphase = std::polar(1.0, -phase);
  const double c0 = std::real(value * unphase);
  const double s0 = std::real(slope_over_kappa * unphase);
  auto standing = [=](double x) {
    const double arg = kap * (x - a);
    return c0 * std::cos(arg) + s0 * std::sin(arg);
  };
  const std::vector<double> roots = numerics::scan_roots(standing, a, a + 10.0 * pi / kap, pi / (8.0 * kap), 3);
  if (roots.size() < 3) fail(ErrorCode::NoZeroFound, "fewer than three zeros of Phi_ref within 10 pi / kappa of the step");
  return {roots[0], roots[1], roots[2]};
}

}  // namespace detail

/// First three zeros of the continued reflection SWF in x > a.
inline std::array<double, 3> reflection_zeros(const StepPotential& step, double k) {
  return detail::continuation_zeros(step, k);
}

/// Independent numerical route to x_c: root-finding on the continued
/// reflection SWF, plus the finite-difference check that the zero nearest
/// the step has the smallest |dx/dk| among the first three zero families.
inline TurningPointOracle turning_point_oracle(const StepPotential& step, double k) {
  TurningPointOracle out;
  out.zeros = detail::continuation_zeros(step, k);
  out.nearest = out.zeros[0];
  double dk = 1e-5 * step.kappa0();
  if (step.beta() == 1) dk = std::min(dk, 0.5 * (k - step.kappa0()));
  out.dk = dk;
  const auto plus = detail::continuation_zeros(step, k + dk);
  const auto minus = detail::continuation_zeros(step, k - dk);
  for (int n = 0; n < 3; ++n) out.slopes[n] = std::abs(plus[n] - minus[n]) / (2.0 * dk);
  out.nearest_minimizes_slope = out.slopes[0] < out.slopes[1] && out.slopes[0] < out.slopes[2];
  return out;
}

}  // namespace stepscatter
