#pragma once

// Stationary scattering of a particle incident from the left on the step
// V(x) = V0 * theta(x - a).

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "stepscatter/error.hpp"

namespace stepscatter {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

struct PhysicalConfig {
  double hbar = 1.0;
  double mass = 1.0;

  double hbar_over_mass() const { return hbar / mass; }
  double mass_over_hbar() const { return mass / hbar; }
};

enum class EnergyRegime { Propagating, Evanescent };

inline const char* to_string(EnergyRegime r) {
  return r == EnergyRegime::Propagating ? "propagating" : "evanescent";
}

class StepPotential {
 public:
  StepPotential(double v0, double a, PhysicalConfig units = {}) : v0_(v0), a_(a), units_(units) {
    if (!(units.hbar > 0.0) || !(units.mass > 0.0)) {
      fail(ErrorCode::InvalidArgument, "hbar and mass must be positive");
    }
    if (!(v0 != 0.0) || !std::isfinite(v0)) {
      fail(ErrorCode::InvalidArgument, "step height V0 must be finite and nonzero");
    }
    if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorCode::InvalidArgument, "step position a must be positive");
    kappa0_ = std::sqrt(2.0 * units.mass * std::abs(v0)) / units.hbar;
    beta_ = v0 > 0.0 ? 1 : -1;
  }

  double v0() const { return v0_; }
  double a() const { return a_; }
  double kappa0() const { return kappa0_; }
  int beta() const { return beta_; }
  const PhysicalConfig& units() const { return units_; }

  /// v0 = hbar * kappa0 / m, the velocity scale used by the figures.
  double velocity_scale() const { return units_.hbar_over_mass() * kappa0_; }

 private:
  double v0_;
  double a_;
  PhysicalConfig units_;
  double kappa0_ = 0.0;
  int beta_ = 1;
};

/// kappa together with the branch it was taken on: the transmitted
/// wavenumber for Propagating, the decay constant for Evanescent.
struct BranchWavenumber {
  double kappa;
  EnergyRegime regime;
};

inline bool is_degenerate(const StepPotential& step, double k) {
  return step.beta() == 1 &&
         std::abs(k - step.kappa0()) <= 8.0 * std::numeric_limits<double>::epsilon() * step.kappa0();
}

inline EnergyRegime regime_of(const StepPotential& step, double k) {
  return (step.beta() == 1 && k < step.kappa0()) ? EnergyRegime::Evanescent : EnergyRegime::Propagating;
}

inline BranchWavenumber kappa_of_k(const StepPotential& step, double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    fail(ErrorCode::NonPositiveWavenumber, "k = " + std::to_string(k));
  }
  if (is_degenerate(step, k)) {
    fail(ErrorCode::DegenerateEnergy, "k equals kappa0; characteristic quantities diverge");
  }
  const double k0 = step.kappa0();
  if (step.beta() == -1) return {std::hypot(k, k0), EnergyRegime::Propagating};
  if (k > k0) return {std::sqrt((k - k0) * (k + k0)), EnergyRegime::Propagating};
  return {std::sqrt((k0 - k) * (k0 + k)), EnergyRegime::Evanescent};
}

struct StationaryAmplitudes {
  double k = 0.0;
  double kappa = 0.0;
  EnergyRegime regime = EnergyRegime::Propagating;
  cplx amp_a;  // transmitted (or evanescent) amplitude A
  cplx amp_b;  // reflected amplitude B
  double trans_coef = 0.0;
  double refl_coef = 0.0;
};

inline StationaryAmplitudes stationary_amplitudes(const StepPotential& step, double k) {
  const BranchWavenumber br = kappa_of_k(step, k);
  const double kap = br.kappa;
  const double a = step.a();
  StationaryAmplitudes s;
  s.k = k;
  s.kappa = kap;
  s.regime = br.regime;
  if (br.regime == EnergyRegime::Propagating) {
    const double r = (k - kap) / (k + kap);
    s.amp_a = 2.0 * k / (k + kap) * std::polar(1.0, (k - kap) * a);
    s.amp_b = r * std::polar(1.0, 2.0 * k * a);
    s.trans_coef = 4.0 * k * kap / ((k + kap) * (k + kap));
    s.refl_coef = r * r;
  } else {
    // A carries e^{kappa a}; it is only ever used multiplied by e^{-kappa x}.
    s.amp_a = 2.0 * k / cplx(k, kap) * std::exp(cplx(kap * a, k * a));
    s.amp_b = cplx(k, -kap) / cplx(k, kap) * std::polar(1.0, 2.0 * k * a);
    s.trans_coef = 0.0;
    s.refl_coef = 1.0;
  }
  return s;
}

/// A complex field value together with its spatial derivative.
struct WaveSample {
  cplx value;
  cplx slope;
};

/// Psi_tot and its derivative at x.
inline WaveSample total_wave(const StepPotential& step, const StationaryAmplitudes& s, double x) {
  const double k = s.k;
  const double kap = s.kappa;
  const double a = step.a();
  if (x < a) {
    const cplx in = std::polar(1.0, k * x);
    const cplx out = s.amp_b * std::conj(in);
    return {in + out, I * k * (in - out)};
  }
  if (s.regime == EnergyRegime::Propagating) {
    const cplx v = s.amp_a * std::polar(1.0, kap * x);
    return {v, I * kap * v};
  }
  // A e^{-kappa x} written relative to the step to avoid overflow.
  const cplx v = 2.0 * k / cplx(k, kap) * std::polar(std::exp(-kap * (x - a)), k * a);
  return {v, -kap * v};
}

inline cplx total_wavefunction(const StepPotential& step, double k, double x) {
  return total_wave(step, stationary_amplitudes(step, k), x).value;
}

/// (hbar/m) Im(conj(psi) dpsi/dx).
inline double probability_current(cplx value, cplx derivative, const PhysicalConfig& units = {}) {
  return units.hbar_over_mass() * std::imag(std::conj(value) * derivative);
}

inline double probability_current(const WaveSample& w, const PhysicalConfig& units = {}) {
  return probability_current(w.value, w.slope, units);
}

}  // namespace stepscatter
