#pragma once

// Gaussian wave packets built by spectral superposition of the stationary
// states, for the total wave function and for each subprocess channel:
//   psi(x, t) = (2 pi)^{-1/2} Int A(k) phi_channel(x, k) e^{-i E(k) t / hbar} dk
// evaluated with a fixed Gauss-Legendre rule on a truncated k window.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stepscatter/numerics/parallel.hpp"
#include "stepscatter/numerics/quadrature.hpp"
#include "stepscatter/numerics/summation.hpp"
#include "stepscatter/swf.hpp"

namespace stepscatter {

struct SpectralProfile {
  double l0 = 50.0;
  double k_bar = 1.5;
  double window = 0.08;  // half-width of the k truncation
  int nodes = 513;

  static SpectralProfile gaussian(double l0, double k_bar, double window_sigmas = 8.0, int nodes = 513) {
    if (!(l0 > 0.0)) fail(ErrorCode::InvalidArgument, "packet width l0 must be positive");
    if (!(window_sigmas > 0.0)) fail(ErrorCode::InvalidArgument, "window must span a positive number of sigmas");
    if (nodes < 2) fail(ErrorCode::InvalidArgument, "at least two spectral nodes are required");
    return {l0, k_bar, window_sigmas / (2.0 * l0), nodes};
  }

  /// Standard deviation of |A(k)|^2.
  double sigma_k() const { return 1.0 / (2.0 * l0); }
  double k_min() const { return k_bar - window; }
  double k_max() const { return k_bar + window; }
};

/// (2 l0^2 / pi)^{1/4} exp(-l0^2 (k - k_bar)^2), normalized so Int |A|^2 dk = 1.
inline double spectral_amplitude(const SpectralProfile& p, double k) {
  const double dk = k - p.k_bar;
  return std::pow(2.0 * p.l0 * p.l0 / pi, 0.25) * std::exp(-p.l0 * p.l0 * dk * dk);
}

struct SpatialGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_points = 2;

  static SpatialGrid make(double x_min, double x_max, std::size_t n_points) {
    if (!(x_min < x_max)) fail(ErrorCode::InvalidArgument, "grid needs x_min < x_max");
    if (n_points < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");
    return {x_min, x_max, n_points};
  }

  double spacing() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * spacing(); }

  /// True when the spacing resolves the shortest wavelength in the window.
  bool resolves(const SpectralProfile& p) const { return spacing() <= pi / (4.0 * p.k_max()); }
};

enum class Channel { Total, Incident, Tr, Ref, TrInc, RefInc };

inline const char* to_string(Channel c) {
  switch (c) {
    case Channel::Total: return "total";
    case Channel::Incident: return "incident";
    case Channel::Tr: return "tr";
    case Channel::Ref: return "ref";
    case Channel::TrInc: return "tr_inc";
    case Channel::RefInc: return "ref_inc";
  }
  return "?";
}

struct PacketSnapshot {
  double t = 0.0;
  SpatialGrid grid;
  std::vector<cplx> values;
  Channel channel = Channel::Total;
};

struct MomentRecord {
  double t = 0.0;
  double norm = 0.0;
  double x_mean = 0.0;
  double p_mean = 0.0;
  double x2_mean = 0.0;

  double spread() const { return std::sqrt(std::max(0.0, x2_mean - x_mean * x_mean)); }
};

struct TrajectoryFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::pair<double, double> t_window{};
};

struct AsymptoticNorms {
  double trans = 0.0;  // T_as = Int |A|^2 T dk
  double refl = 0.0;   // R_as = Int |A|^2 R dk
};

/// Throws SpectralGuardViolated unless every k in the window lies on the
/// propagating branch (and strictly above kappa0 for a repulsive step).
inline void check_spectral_guard(const SpectralProfile& p, const StepPotential& step) {
  const double floor = step.beta() == 1 ? step.kappa0() : 0.0;
  if (!(p.k_min() > floor)) {
    fail(ErrorCode::SpectralGuardViolated,
         "k window [" + std::to_string(p.k_min()) + ", " + std::to_string(p.k_max()) +
             "] reaches below " + std::to_string(floor));
  }
}

namespace detail {

// On each of three x-intervals the per-k integrand is fwd e^{ipx} + bwd e^{-ipx}
// with p = k (left of the step) or kappa (behind it).
struct WavePiece {
  cplx fwd;
  cplx bwd;
  bool uses_kappa = false;
};

struct PiecewiseWave {
  double lo_split;  // x < lo_split: left
  double hi_split;  // lo_split <= x <= hi_split: mid; x > hi_split: right
  WavePiece left, mid, right;

  const WavePiece& at(double x) const { return x < lo_split ? left : (x <= hi_split ? mid : right); }
};

inline PiecewiseWave channel_wave(Channel c, const StepPotential& step, const SwfDecomposition& d) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double a = step.a();
  const double kx = d.stationary.kappa * d.region.x_c;
  // C sin(kappa (x - x_c)) = c_fwd e^{i kappa x} + c_bwd e^{-i kappa x}
  const cplx c_fwd = d.region.amp_c * std::polar(1.0, -kx) / (2.0 * I);
  const cplx c_bwd = -d.region.amp_c * std::polar(1.0, kx) / (2.0 * I);
  const cplx amp_a = d.stationary.amp_a;
  const cplx amp_b = d.stationary.amp_b;
  switch (c) {
    case Channel::Incident: {
      const WavePiece w{1.0, 0.0, false};
      return {inf, inf, w, w, w};
    }
    case Channel::TrInc: {
      const WavePiece w{d.swf.amp_tr, 0.0, false};
      return {inf, inf, w, w, w};
    }
    case Channel::RefInc: {
      const WavePiece w{d.swf.amp_ref, 0.0, false};
      return {inf, inf, w, w, w};
    }
    case Channel::Total: {
      const WavePiece behind{amp_a, 0.0, true};
      return {a, a, {1.0, amp_b, false}, behind, behind};
    }
    case Channel::Ref:
      return {a, d.region.x_c, {d.swf.amp_ref, amp_b, false}, {c_fwd, c_bwd, true}, {0.0, 0.0, true}};
    case Channel::Tr:
      return {a, d.region.x_c, {d.swf.amp_tr, 0.0, false}, {amp_a - c_fwd, -c_bwd, true}, {amp_a, 0.0, true}};
  }
  fail(ErrorCode::InvalidArgument, "unknown channel");
}

}  // namespace detail

/// Precomputed spectral nodes for one profile and step. Immutable after
/// construction; evolve() may be called concurrently.
class SpectralPropagator {
 public:
  SpectralPropagator(const SpectralProfile& profile, const StepPotential& step) : profile_(profile), step_(step) {
    check_spectral_guard(profile, step);
    const numerics::QuadratureRule rule = numerics::gauss_legendre(profile.nodes, profile.k_min(), profile.k_max());
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);
    nodes_.reserve(rule.size());
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double k = rule.nodes[j];
      Node n;
      n.k = k;
      n.weight = rule.weights[j];
      n.amplitude = spectral_amplitude(profile, k);
      n.decomposition = decompose(step, k);
      n.energy_rate = 0.5 * step.units().hbar_over_mass() * k * k;  // E / hbar
      nodes_.push_back(n);
      // Reused by every evolve() call.
      scale_.push_back(n.weight * n.amplitude * inv_sqrt_2pi);
    }
  }

  const SpectralProfile& profile() const { return profile_; }
  const StepPotential& step() const { return step_; }

  /// Evaluates several channels in one pass over the (x, k) pairs.
  std::vector<PacketSnapshot> evolve(double t, const SpatialGrid& grid, std::span<const Channel> channels,
                                     unsigned threads = 1) const {
    const std::size_t n = grid.n_points;
    const std::size_t nc = channels.size();
    std::vector<PacketSnapshot> out(nc);
    for (std::size_t c = 0; c < nc; ++c) {
      out[c].t = t;
      out[c].grid = grid;
      out[c].channel = channels[c];
      out[c].values.assign(n, cplx{});
    }
    // Per node: the piecewise integrand of each channel, premultiplied by
    // the quadrature weight, A(k) and the time phase.
    std::vector<detail::PiecewiseWave> waves(nodes_.size() * nc);
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      const cplx factor = scale_[j] * std::polar(1.0, -nodes_[j].energy_rate * t);
      for (std::size_t c = 0; c < nc; ++c) {
        detail::PiecewiseWave w = detail::channel_wave(channels[c], step_, nodes_[j].decomposition);
        for (detail::WavePiece* piece : {&w.left, &w.mid, &w.right}) {
          piece->fwd *= factor;
          piece->bwd *= factor;
        }
        waves[j * nc + c] = w;
      }
    }

    const double h = grid.spacing();
    numerics::parallel_blocks(n, kAnchorStride, threads, [&](std::size_t begin, std::size_t end) {
      const std::size_t len = end - begin;
      std::vector<numerics::CompensatedComplexSum> acc(len * nc);
      for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const double k = nodes_[j].k;
        const double kap = nodes_[j].decomposition.stationary.kappa;
        const cplx step_k = std::polar(1.0, k * h);
        const cplx step_kap = std::polar(1.0, kap * h);
        const detail::PiecewiseWave* w = &waves[j * nc];
        for (std::size_t block = begin; block < end; block += kAnchorStride) {
          // Phasors are re-anchored at fixed global indices so that the
          // rounding pattern is independent of how blocks are distributed.
          cplx e_k = std::polar(1.0, k * grid.x(block));
          cplx e_kap = std::polar(1.0, kap * grid.x(block));
          const std::size_t stop = std::min(end, block + kAnchorStride);
          for (std::size_t i = block; i < stop; ++i) {
            const double x = grid.x(i);
            for (std::size_t c = 0; c < nc; ++c) {
              const detail::WavePiece& p = w[c].at(x);
              const cplx e = p.uses_kappa ? e_kap : e_k;
              acc[(i - begin) * nc + c].add(p.fwd * e + p.bwd * std::conj(e));
            }
            e_k *= step_k;
            e_kap *= step_kap;
          }
        }
      }
      for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t c = 0; c < nc; ++c) out[c].values[begin + i] = acc[i * nc + c].value();
      }
    });
    return out;
  }

  PacketSnapshot evolve(double t, const SpatialGrid& grid, Channel channel, unsigned threads = 1) const {
    const std::array<Channel, 1> one{channel};
    return std::move(evolve(t, grid, std::span<const Channel>(one), threads).front());
  }

  AsymptoticNorms asymptotic_norms() const {
    numerics::CompensatedSum tr, ref;
    for (const Node& n : nodes_) {
      const double mass = n.weight * n.amplitude * n.amplitude;
      tr.add(mass * n.decomposition.stationary.trans_coef);
      ref.add(mass * n.decomposition.stationary.refl_coef);
    }
    return {tr.value(), ref.value()};
  }

  /// Spectral average of T(k) (x_c(k) - a) normalized by T_as.
  double effective_transitional_length() const {
    numerics::CompensatedSum num, den;
    for (const Node& n : nodes_) {
      const double w = n.weight * n.amplitude * n.amplitude * n.decomposition.stationary.trans_coef;
      num.add(w * n.decomposition.region.length);
      den.add(w);
    }
    return num.value() / den.value();
  }

 private:
  static constexpr std::size_t kAnchorStride = 64;

  struct Node {
    double k = 0.0;
    double weight = 0.0;
    double amplitude = 0.0;
    double energy_rate = 0.0;
    SwfDecomposition decomposition;
  };

  SpectralProfile profile_;
  StepPotential step_;
  std::vector<Node> nodes_;
  std::vector<double> scale_;
};

inline PacketSnapshot evolve(const SpectralProfile& profile, const StepPotential& step, double t,
                             const SpatialGrid& grid, Channel channel, unsigned threads = 1) {
  return SpectralPropagator(profile, step).evolve(t, grid, channel, threads);
}

/// Spatial moments of a snapshot: trapezoidal norm and position moments;
/// momentum from an 8th-order centered difference of the field.
inline MomentRecord moments(const PacketSnapshot& snap, const PhysicalConfig& units = {}) {
  const std::vector<cplx>& psi = snap.values;
  const std::size_t n = psi.size();
  const double h = snap.grid.spacing();
  numerics::CompensatedSum norm, xs, x2s, ps;
  constexpr std::array<double, 4> fd{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    const double x = snap.grid.x(i);
    const double dens = std::norm(psi[i]) * w;
    norm.add(dens);
    xs.add(x * dens);
    x2s.add(x * x * dens);
    if (i >= fd.size() && i + fd.size() < n) {
      cplx deriv{};
      for (std::size_t m = 0; m < fd.size(); ++m) deriv += fd[m] * (psi[i + m + 1] - psi[i - m - 1]);
      deriv /= h;
      ps.add(std::imag(std::conj(psi[i]) * deriv) * w);
    }
  }
  MomentRecord r;
  r.t = snap.t;
  r.norm = norm.value();
  if (!(r.norm > 1e-12)) fail(ErrorCode::EmptyChannel, std::string("channel ") + to_string(snap.channel) + " has no norm");
  r.x_mean = xs.value() / r.norm;
  r.x2_mean = x2s.value() / r.norm;
  r.p_mean = units.hbar * ps.value() / r.norm;
  return r;
}

/// Throws GridTooSmall unless |psi|^2 at both grid edges is below 1e-10 of its peak.
inline void check_grid_edges(const PacketSnapshot& snap) {
  double peak = 0.0;
  for (const cplx& v : snap.values) peak = std::max(peak, std::norm(v));
  const double edge = std::max(std::norm(snap.values.front()), std::norm(snap.values.back()));
  if (peak > 0.0 && edge >= 1e-10 * peak) {
    fail(ErrorCode::GridTooSmall, std::string("channel ") + to_string(snap.channel) + " at t = " +
                                      std::to_string(snap.t) + " reaches the grid edge");
  }
}

struct ChannelNorms {
  double trans = 0.0;  // T(t)
  double refl = 0.0;   // R(t)
};

inline ChannelNorms channel_norms(const SpectralPropagator& prop, double t, const SpatialGrid& grid,
                                  unsigned threads = 1) {
  const std::array<Channel, 2> chans{Channel::Tr, Channel::Ref};
  const auto snaps = prop.evolve(t, grid, chans, threads);
  check_grid_edges(snaps[0]);
  check_grid_edges(snaps[1]);
  return {moments(snaps[0], prop.step().units()).norm, moments(snaps[1], prop.step().units()).norm};
}

inline ChannelNorms channel_norms(const SpectralProfile& profile, const StepPotential& step, double t,
                                  const SpatialGrid& grid, unsigned threads = 1) {
  return channel_norms(SpectralPropagator(profile, step), t, grid, threads);
}

inline AsymptoticNorms asymptotic_norms(const SpectralProfile& profile, const StepPotential& step) {
  return SpectralPropagator(profile, step).asymptotic_norms();
}

/// Ordinary least-squares line through (t_i, x_i).
inline TrajectoryFit fit_line(std::span<const double> t, std::span<const double> x) {
  if (t.size() != x.size() || t.size() < 2) fail(ErrorCode::BadFitWindow, "a line fit needs at least two samples");
  const double n = static_cast<double>(t.size());
  numerics::CompensatedSum st, sx;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st.add(t[i]);
    sx.add(x[i]);
  }
  const double tm = st.value() / n;
  const double xm = sx.value() / n;
  numerics::CompensatedSum stt, stx;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt.add((t[i] - tm) * (t[i] - tm));
    stx.add((t[i] - tm) * (x[i] - xm));
  }
  if (!(stt.value() > 0.0)) fail(ErrorCode::BadFitWindow, "fit times are all equal");
  TrajectoryFit f;
  f.slope = stx.value() / stt.value();
  f.intercept = xm - f.slope * tm;
  numerics::CompensatedSum res;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = x[i] - (f.slope * t[i] + f.intercept);
    res.add(r * r);
  }
  f.rms_residual = std::sqrt(res.value() / n);
  f.t_window = {t.front(), t.back()};
  return f;
}

struct CmTrajectory {
  std::vector<MomentRecord> records;
  TrajectoryFit fit;
};

/// Center-of-mass track of one channel and its straight-line fit. The times
/// must all lie in one asymptotic stage; a residual above 0.01 l0 raises
/// BadFitWindow.
inline CmTrajectory cm_trajectory(const SpectralPropagator& prop, std::span<const double> times,
                                  const SpatialGrid& grid, Channel channel, unsigned threads = 1) {
  CmTrajectory out;
  std::vector<double> xs;
  for (double t : times) {
    out.records.push_back(moments(prop.evolve(t, grid, channel, threads), prop.step().units()));
    xs.push_back(out.records.back().x_mean);
  }
  out.fit = fit_line(times, xs);
  if (out.fit.rms_residual > 0.01 * prop.profile().l0) {
    fail(ErrorCode::BadFitWindow, "rms residual " + std::to_string(out.fit.rms_residual) + " exceeds 0.01 l0");
  }
  return out;
}

inline CmTrajectory cm_trajectory(const SpectralProfile& profile, const StepPotential& step,
                                  std::span<const double> times, const SpatialGrid& grid, Channel channel,
                                  unsigned threads = 1) {
  return cm_trajectory(SpectralPropagator(profile, step), times, grid, channel, threads);
}

enum class Stage { Initial, Scattering, Final };

/// Fit-window rule: initial while the packet (mean + 5 spreads) is still
/// left of the step and moving right; final once the transmitted packet is
/// 5 spreads past x_c, or the reflected one is 5 spreads left of the step
/// and moving left.
inline Stage classify_stage(const MomentRecord& r, Channel channel, double a, double x_c) {
  const double s = r.spread();
  if (r.p_mean > 0.0 && r.x_mean + 5.0 * s < a) return Stage::Initial;
  if ((channel == Channel::Tr || channel == Channel::TrInc) && r.x_mean - 5.0 * s > x_c) return Stage::Final;
  if ((channel == Channel::Ref || channel == Channel::RefInc) && r.p_mean < 0.0 && r.x_mean + 5.0 * s < a) {
    return Stage::Final;
  }
  return Stage::Scattering;
}

struct CompletedScatteringReport {
  double a_over_l0 = 0.0;
  bool far_start = false;  // a >= 10 l0
  bool spectral_guard = false;
  double l0_over_xc_log_slope = 0.0;  // l0 / |x_c'(k_bar) / x_c(k_bar)|
  bool narrow_in_k = false;
  double l0_over_transitional = 0.0;  // l0 / (x_c(k_bar) - a)
  bool short_transition = false;
  double effective_transitional_length = 0.0;  // <x_c>_tr - a
  bool effective_length_finite = false;

  bool all_pass() const {
    return far_start && spectral_guard && narrow_in_k && short_transition && effective_length_finite;
  }
};

/// Diagnostics for one-dimensional completed scattering. Never throws on a
/// failed check; failures are reported through the flags.
inline CompletedScatteringReport validate_completed_scattering(const SpectralProfile& profile,
                                                               const StepPotential& step) {
  CompletedScatteringReport r;
  r.a_over_l0 = step.a() / profile.l0;
  r.far_start = r.a_over_l0 >= 10.0;
  try {
    check_spectral_guard(profile, step);
    r.spectral_guard = true;
  } catch (const ScatterError&) {
    r.spectral_guard = false;
  }
  const double k = profile.k_bar;
  const double dk = 1e-5 * step.kappa0();
  const bool can_differentiate = k - dk > 0.0 && (step.beta() == -1 || k - dk > step.kappa0());
  if (can_differentiate) {
    const double xc = turning_point(step, k).x_c;
    const double slope = (turning_point(step, k + dk).x_c - turning_point(step, k - dk).x_c) / (2.0 * dk);
    r.l0_over_xc_log_slope = profile.l0 / std::abs(slope / xc);
    r.narrow_in_k = r.l0_over_xc_log_slope >= 10.0;
    r.l0_over_transitional = profile.l0 / (xc - step.a());
    r.short_transition = r.l0_over_transitional >= 10.0;
  }
  if (r.spectral_guard) {
    r.effective_transitional_length = SpectralPropagator(profile, step).effective_transitional_length();
    r.effective_length_finite = std::isfinite(r.effective_transitional_length);
  }
  return r;
}

}  // namespace stepscatter
