#pragma once

// The four CLI commands as pure functions from a RunConfig to a Table.
// Every numeric output is dimensionless: wavenumbers in kappa0, lengths in
// 1/kappa0, times in m/(hbar kappa0^2), velocities in hbar kappa0/m.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "stepscatter/cli/config.hpp"
#include "stepscatter/cli/report.hpp"
#include "stepscatter/packet.hpp"
#include "stepscatter/times.hpp"

namespace stepscatter::cli {

namespace detail {

struct Scales {
  double wavenumber;  // kappa0
  double length;      // 1/kappa0
  double time;        // m/(hbar kappa0^2)
  double velocity;    // hbar kappa0/m
  double momentum;    // hbar kappa0

  explicit Scales(const StepPotential& s)
      : wavenumber(s.kappa0()),
        length(1.0 / s.kappa0()),
        time(1.0 / (s.units().hbar_over_mass() * s.kappa0() * s.kappa0())),
        velocity(s.velocity_scale()),
        momentum(s.units().hbar * s.kappa0()) {}
};

inline Cell num(double v) { return v; }

}  // namespace detail

// ---------------------------------------------------------------- times

inline Table cmd_times(const RunConfig& cfg) {
  validate(cfg);
  const StepPotential step = cfg.step();
  const detail::Scales sc(step);
  Table t;
  t.title = "times";
  t.columns = {{"k", unit::wavenumber},
               {"kappa", unit::wavenumber},
               {"regime", unit::text},
               {"T", unit::none},
               {"R", unit::none},
               {"lambda", unit::none},
               {"x_c", unit::length},
               {"tau_tr_dwell", unit::time},
               {"tau_ref_dwell", unit::time},
               {"tau_tr_dwell_delay", unit::time},
               {"l_depth", unit::length},
               {"t_dep", unit::time},
               {"tau_tr_group", unit::time},
               {"tau_ref_group", unit::time},
               {"group_delay", unit::time},
               {"davies_tau_tr", unit::time},
               {"davies_tau_ref", unit::time},
               {"davies_depth", unit::length}};
  using detail::num;
  for (double k : cfg.k_values()) {
    const StationaryAmplitudes s = stationary_amplitudes(step, k);
    std::vector<Cell> row{num(k / sc.wavenumber), num(s.kappa / sc.wavenumber), std::string(to_string(s.regime)),
                          num(s.trans_coef), num(s.refl_coef)};
    if (s.regime == EnergyRegime::Propagating) {
      const DwellReport d = dwell_times(step, k);
      const GroupReport g = group_times(step, k, cfg.interval_l);
      const TransitionalRegion r = turning_point(step, k);
      row.insert(row.end(), {num(lambda_phase(step, k)), num(r.x_c / sc.length), num(d.tau_tr_dwell / sc.time),
                             num(d.tau_ref_dwell / sc.time), num(d.tau_tr_dwell_delay / sc.time),
                             num(d.l_depth / sc.length), num(g.t_dep / sc.time), num(g.tau_tr_group / sc.time),
                             num(g.tau_ref_group / sc.time), num(g.tau_group_delay / sc.time),
                             num(g.davies_tau_tr / sc.time), num(g.davies_tau_ref / sc.time), num(0.0)});
    } else {
      // Total reflection: lambda and t_dep vanish, the transmission columns are empty.
      const TotalReflectionReport r = total_reflection_times(step, k);
      row.insert(row.end(), {num(0.0), Cell{}, Cell{}, num(r.tau_ref_dwell / sc.time), Cell{},
                             num(r.l_depth / sc.length), num(0.0), Cell{}, num(r.tau_ref_group / sc.time), Cell{},
                             Cell{}, num(r.tau_ref_group / sc.time), num(r.davies_depth / sc.length)});
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- figures

enum class Figure { Fig1, Fig2, Fig3, Fig4 };

inline Figure parse_figure(const std::string& name) {
  if (name == "fig1") return Figure::Fig1;
  if (name == "fig2") return Figure::Fig2;
  if (name == "fig3") return Figure::Fig3;
  if (name == "fig4") return Figure::Fig4;
  throw ConfigError("figure", 0, "expected fig1, fig2, fig3 or fig4, got '" + name + "'");
}

namespace detail {

// Flow velocity across [a - 2 (x_c - a), x_c + 2 (x_c - a)] at k = 1.5 kappa0.
inline Table flow_figure(const RunConfig& cfg, int beta) {
  const StepPotential step(beta * std::abs(cfg.v0), cfg.a, cfg.units());
  const Scales sc(step);
  const double k = 1.5 * step.kappa0();
  const SwfDecomposition d = decompose(step, k);
  const double lo = step.a() - 2.0 * d.region.length;
  const double hi = d.region.x_c + 2.0 * d.region.length;
  Table t;
  t.title = beta == 1 ? "fig1" : "fig2";
  t.columns = {{"x", unit::length}, {"v_flow", unit::velocity}};
  for (int i = 0; i < cfg.figure_points; ++i) {
    const double x = lo + (hi - lo) * i / (cfg.figure_points - 1);
    t.rows.push_back({num(x / sc.length), num(flow_velocity(step, d, x) / sc.velocity)});
  }
  t.add_footer("k", unit::wavenumber, k / sc.wavenumber);
  t.add_footer("a", unit::length, step.a() / sc.length);
  t.add_footer("x_c", unit::length, d.region.x_c / sc.length);
  t.add_footer("v_k", unit::velocity, step.units().hbar_over_mass() * k / sc.velocity);
  t.add_footer("v_kappa", unit::velocity, step.units().hbar_over_mass() * d.stationary.kappa / sc.velocity);
  return t;
}

}  // namespace detail

inline Table cmd_figure(const RunConfig& cfg, Figure which) {
  validate(cfg);
  using detail::num;
  switch (which) {
    case Figure::Fig1: return detail::flow_figure(cfg, 1);
    case Figure::Fig2: return detail::flow_figure(cfg, -1);
    case Figure::Fig3: {
      Table t;
      t.title = "fig3";
      t.columns = {{"k", unit::wavenumber}, {"beta", unit::none}, {"kappa_xc_over_pi", unit::none},
                   {"kappa_l_depth_over_pi", unit::none}};
      for (int beta : {-1, 1}) {
        const StepPotential step(beta * std::abs(cfg.v0), cfg.a, cfg.units());
        for (double k : cfg.k_values()) {
          // Only the propagating branch has a transitional region.
          if (regime_of(step, k) != EnergyRegime::Propagating || is_degenerate(step, k)) continue;
          const double kap = kappa_of_k(step, k).kappa;
          t.rows.push_back({num(k / step.kappa0()), num(beta), num(kap * turning_point(step, k).length / pi),
                            num(kap * dwell_times(step, k).l_depth / pi)});
        }
      }
      return t;
    }
    case Figure::Fig4: {
      const StepPotential step(std::abs(cfg.v0), cfg.a, cfg.units());
      const double k0 = step.kappa0();
      Table t;
      t.title = "fig4";
      t.columns = {{"k", unit::wavenumber}, {"regime", unit::text}, {"l_depth", unit::length},
                   {"davies_depth", unit::length}};
      for (double k : cfg.k_values()) {
        if (std::abs(k / k0 - 1.0) < 1e-3) continue;  // both depths diverge at kappa0
        if (regime_of(step, k) == EnergyRegime::Evanescent) {
          const TotalReflectionReport r = total_reflection_times(step, k);
          t.rows.push_back({num(k / k0), std::string("evanescent"), num(r.l_depth * k0), num(r.davies_depth * k0)});
        } else {
          // The clock model puts no reflected probability behind the step above kappa0.
          t.rows.push_back({num(k / k0), std::string("propagating"), num(dwell_times(step, k).l_depth * k0), num(0.0)});
        }
      }
      t.add_footer("gap_half_width", unit::wavenumber, 1e-3);
      return t;
    }
  }
  throw ConfigError("figure", 0, "unknown figure");
}

// ---------------------------------------------------------------- evolve

struct EvolveSample {
  double t = 0.0;
  ChannelNorms norms;
  MomentRecord tr, ref, tot;
  Stage stage_tr = Stage::Scattering;
  Stage stage_ref = Stage::Scattering;
  Stage stage_tot = Stage::Scattering;
};

inline const char* to_string(Stage s) {
  switch (s) {
    case Stage::Initial: return "initial";
    case Stage::Scattering: return "scattering";
    case Stage::Final: return "final";
  }
  return "?";
}

namespace detail {

inline std::optional<TrajectoryFit> checked_fit(const std::vector<double>& t, const std::vector<double>& x,
                                                double l0) {
  if (t.size() < 2) return std::nullopt;
  TrajectoryFit f = fit_line(t, x);
  if (f.rms_residual > 0.01 * l0) {
    fail(ErrorCode::BadFitWindow, "rms residual " + std::to_string(f.rms_residual) + " exceeds 0.01 l0");
  }
  return f;
}

}  // namespace detail

/// Propagates the configured packet over the time grid. Rows hold norms,
/// moments and stages per time; the footer holds asymptotic norms, the
/// center-of-mass fits and the closed-form values they estimate.
inline Table cmd_evolve(const RunConfig& cfg) {
  validate(cfg);
  const StepPotential step = cfg.step();
  const SpectralProfile profile = cfg.profile();
  const SpatialGrid grid = cfg.grid();
  const unsigned threads = numerics::resolve_threads(cfg.threads);
  const detail::Scales sc(step);
  const SpectralPropagator prop(profile, step);  // throws SpectralGuardViolated
  const TransitionalRegion region = turning_point(step, profile.k_bar);
  const double a = step.a();

  std::vector<EvolveSample> samples;
  const std::array<Channel, 3> chans{Channel::Tr, Channel::Ref, Channel::Total};
  for (double t : cfg.times()) {
    const auto snaps = prop.evolve(t, grid, chans, threads);
    for (const PacketSnapshot& s : snaps) check_grid_edges(s);
    EvolveSample e;
    e.t = t;
    e.tr = moments(snaps[0], step.units());
    e.ref = moments(snaps[1], step.units());
    e.tot = moments(snaps[2], step.units());
    e.norms = {e.tr.norm, e.ref.norm};
    e.stage_tr = classify_stage(e.tr, Channel::Tr, a, region.x_c);
    e.stage_ref = classify_stage(e.ref, Channel::Ref, a, region.x_c);
    e.stage_tot = classify_stage(e.tot, Channel::Total, a, region.x_c);
    samples.push_back(e);
  }

  Table t;
  t.title = "evolve";
  t.columns = {{"t", unit::time},          {"T", unit::none},           {"R", unit::none},
               {"T_plus_R", unit::none},   {"x_tr", unit::length},      {"x_ref", unit::length},
               {"x_tot", unit::length},    {"p_tr", "hbar*kappa0"},     {"p_ref", "hbar*kappa0"},
               {"spread_tr", unit::length}, {"spread_ref", unit::length}, {"spread_tot", unit::length},
               {"stage_tr", unit::text},   {"stage_ref", unit::text}};
  using detail::num;
  for (const EvolveSample& e : samples) {
    t.rows.push_back({num(e.t / sc.time), num(e.norms.trans), num(e.norms.refl), num(e.norms.trans + e.norms.refl),
                      num(e.tr.x_mean / sc.length), num(e.ref.x_mean / sc.length), num(e.tot.x_mean / sc.length),
                      num(e.tr.p_mean / sc.momentum), num(e.ref.p_mean / sc.momentum), num(e.tr.spread() / sc.length),
                      num(e.ref.spread() / sc.length), num(e.tot.spread() / sc.length), std::string(to_string(e.stage_tr)),
                      std::string(to_string(e.stage_ref))});
  }

  const AsymptoticNorms as = prop.asymptotic_norms();
  t.add_footer("T_as", unit::none, as.trans);
  t.add_footer("R_as", unit::none, as.refl);
  t.add_footer("T_as_plus_R_as", unit::none, as.trans + as.refl);

  // Norm budget: largest deviation in the asymptotic stages and overall.
  double asym_err = 0.0;
  double mid_err = 0.0;
  const EvolveSample* worst = nullptr;
  for (const EvolveSample& e : samples) {
    const double dev = std::abs(e.norms.trans - as.trans);
    const bool initial = e.stage_tot == Stage::Initial;
    const bool final = e.stage_tr == Stage::Final && e.stage_ref == Stage::Final;
    if (initial || final) {
      asym_err = std::max(asym_err, std::max(dev, std::abs(e.norms.refl - as.refl)));
    } else if (!worst || dev > mid_err) {
      mid_err = dev;
      worst = &e;
    }
  }
  t.add_footer("asymptotic_norm_error", unit::none, asym_err);
  t.add_footer("max_scattering_norm_deviation", unit::none, worst ? Cell{mid_err} : Cell{});
  t.add_footer("t_at_max_deviation", unit::time, worst ? Cell{worst->t / sc.time} : Cell{});
  t.add_footer("x_tr_at_max_deviation_minus_x_c_in_spreads", unit::none,
               worst ? Cell{(worst->tr.x_mean - region.x_c) / worst->tr.spread()} : Cell{});
  t.add_footer("x_c", unit::length, region.x_c / sc.length);

  // Initial stage: incident-channel packets of both subprocesses.
  std::vector<double> t_init, x_tr_inc, x_ref_inc;
  const std::array<Channel, 2> inc{Channel::TrInc, Channel::RefInc};
  for (const EvolveSample& e : samples) {
    if (e.stage_tot != Stage::Initial) continue;
    const auto snaps = prop.evolve(e.t, grid, inc, threads);
    t_init.push_back(e.t);
    x_tr_inc.push_back(moments(snaps[0], step.units()).x_mean);
    x_ref_inc.push_back(moments(snaps[1], step.units()).x_mean);
  }
  std::vector<double> t_tr_fin, x_tr_fin, t_ref_fin, x_ref_fin;
  for (const EvolveSample& e : samples) {
    if (e.stage_tr == Stage::Final) {
      t_tr_fin.push_back(e.t);
      x_tr_fin.push_back(e.tr.x_mean);
    }
    if (e.stage_ref == Stage::Final) {
      t_ref_fin.push_back(e.t);
      x_ref_fin.push_back(e.ref.x_mean);
    }
  }
  const auto fit_tr_inc = detail::checked_fit(t_init, x_tr_inc, profile.l0);
  const auto fit_ref_inc = detail::checked_fit(t_init, x_ref_inc, profile.l0);
  const auto fit_tr = detail::checked_fit(t_tr_fin, x_tr_fin, profile.l0);
  const auto fit_ref = detail::checked_fit(t_ref_fin, x_ref_fin, profile.l0);

  const GroupReport g = group_times(step, profile.k_bar, cfg.interval_l);
  const double v_k = step.units().hbar_over_mass() * profile.k_bar;
  const double v_kap = step.units().hbar_over_mass() * kappa_of_k(step, profile.k_bar).kappa;
  auto opt = [](const std::optional<TrajectoryFit>& f, auto get) -> Cell { return f ? Cell{get(*f)} : Cell{}; };

  t.add_footer("fit_tr_inc_samples", unit::none, static_cast<double>(t_init.size()));
  t.add_footer("fit_tr_inc_slope", unit::velocity, opt(fit_tr_inc, [&](auto& f) { return f.slope / sc.velocity; }));
  t.add_footer("fit_tr_inc_intercept", unit::length, opt(fit_tr_inc, [&](auto& f) { return f.intercept / sc.length; }));
  t.add_footer("fit_tr_inc_rms", unit::length, opt(fit_tr_inc, [&](auto& f) { return f.rms_residual / sc.length; }));
  t.add_footer("fit_ref_inc_slope", unit::velocity, opt(fit_ref_inc, [&](auto& f) { return f.slope / sc.velocity; }));
  t.add_footer("fit_ref_inc_intercept", unit::length,
               opt(fit_ref_inc, [&](auto& f) { return f.intercept / sc.length; }));
  t.add_footer("implied_t_dep_tr", unit::time,
               opt(fit_tr_inc, [&](auto& f) { return -f.intercept / f.slope / sc.time; }));
  t.add_footer("implied_t_dep_ref", unit::time,
               opt(fit_ref_inc, [&](auto& f) { return -f.intercept / f.slope / sc.time; }));
  t.add_footer("predicted_t_dep", unit::time, g.t_dep / sc.time);
  t.add_footer("predicted_x_start", unit::length, g.x_start / sc.length);

  t.add_footer("fit_tr_final_samples", unit::none, static_cast<double>(t_tr_fin.size()));
  t.add_footer("fit_tr_final_slope", unit::velocity, opt(fit_tr, [&](auto& f) { return f.slope / sc.velocity; }));
  t.add_footer("fit_tr_final_intercept", unit::length, opt(fit_tr, [&](auto& f) { return f.intercept / sc.length; }));
  t.add_footer("fit_tr_final_rms", unit::length, opt(fit_tr, [&](auto& f) { return f.rms_residual / sc.length; }));
  t.add_footer("predicted_tr_slope", unit::velocity, v_kap / sc.velocity);
  t.add_footer("extrapolated_t_arr_tr", unit::time, opt(fit_tr, [&](auto& f) {
                 return (a + cfg.interval_l - f.intercept) / f.slope / sc.time;
               }));
  t.add_footer("predicted_t_arr_tr", unit::time, g.t_arr_tr / sc.time);

  t.add_footer("fit_ref_final_samples", unit::none, static_cast<double>(t_ref_fin.size()));
  t.add_footer("fit_ref_final_slope", unit::velocity, opt(fit_ref, [&](auto& f) { return f.slope / sc.velocity; }));
  t.add_footer("fit_ref_final_intercept", unit::length, opt(fit_ref, [&](auto& f) { return f.intercept / sc.length; }));
  t.add_footer("fit_ref_final_rms", unit::length, opt(fit_ref, [&](auto& f) { return f.rms_residual / sc.length; }));
  t.add_footer("predicted_ref_slope", unit::velocity, -v_k / sc.velocity);
  t.add_footer("extrapolated_t_arr_ref", unit::time,
               opt(fit_ref, [&](auto& f) { return -f.intercept / f.slope / sc.time; }));
  t.add_footer("predicted_t_arr_ref", unit::time, g.t_arr_ref / sc.time);
  return t;
}

// ---------------------------------------------------------------- validate

struct ValidationResult {
  Table table;
  bool all_pass = true;
};

namespace detail {

struct CheckRow {
  std::string name;
  double value;
  double tolerance;
  bool pass;
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
  return out;
}

// k/kappa0 grid per sign of the step, avoiding the threshold for beta = +1.
inline std::vector<double> property_grid(int beta, int n) {
  return beta == 1 ? log_grid(1.02, 20.0, n) : log_grid(0.05, 20.0, n);
}

inline double relative(double got, double want, double scale) {
  return std::abs(got - want) / std::max(std::abs(want), scale);
}

}  // namespace detail

/// Runs the property suite on the configured units and step height (both
/// signs) and the configured packet. Never throws on a failed check.
inline ValidationResult cmd_validate(const RunConfig& cfg) {
  validate(cfg);
  using detail::CheckRow;
  std::vector<CheckRow> rows;
  auto add_max = [&](std::string name, double worst, double tol) { rows.push_back({std::move(name), worst, tol, worst <= tol}); };

  const std::array<StepPotential, 2> steps{StepPotential(std::abs(cfg.v0), cfg.a, cfg.units()),
                                           StepPotential(-std::abs(cfg.v0), cfg.a, cfg.units())};
  const double k0 = steps[0].kappa0();
  const double vscale = steps[0].units().hbar_over_mass();

  double unitarity = 0.0, current_ref = 0.0, flux = 0.0, oracle_xc = 0.0, dwell = 0.0;
  double sign_violations = 0.0;
  for (const StepPotential& s : steps) {
    for (double kr : detail::property_grid(s.beta(), 40)) {
      const StationaryAmplitudes st = stationary_amplitudes(s, kr * k0);
      unitarity = std::max(unitarity, std::abs(st.trans_coef + st.refl_coef - 1.0));
    }
    for (double kr : detail::property_grid(s.beta(), 20)) {
      const double k = kr * k0;
      const SwfDecomposition d = decompose(s, k);
      const double i_tr = vscale * k * d.stationary.trans_coef;
      for (int i = 0; i <= 50; ++i) {
        const double x = s.a() - d.region.length + 3.0 * d.region.length * i / 50.0;
        current_ref = std::max(current_ref, std::abs(probability_current(swf_ref(s, d, x), s.units())) / (vscale * k0));
        flux = std::max(flux, std::abs(probability_current(swf_tr(s, d, x), s.units()) / i_tr - 1.0));
      }
      oracle_xc = std::max(oracle_xc, std::abs(turning_point_oracle(s, k).nearest - d.region.x_c) * k0);
      const DwellReport dr = dwell_times(s, k);
      dwell = std::max(dwell, detail::relative(dwell_time_oracle(s, k, DwellChannel::Transmission), dr.tau_tr_dwell, 0.0));
      dwell = std::max(dwell, detail::relative(dwell_time_oracle(s, k, DwellChannel::Reflection), dr.tau_ref_dwell, 0.0));
      if (s.beta() * dr.tau_tr_dwell_delay >= 0.0) sign_violations += 1.0;
      if (s.beta() * group_times(s, k, cfg.interval_l).tau_group_delay >= 0.0) sign_violations += 1.0;
      if (s.a() + dr.l_depth > d.region.x_c) sign_violations += 1.0;
    }
  }
  add_max("unitarity |T+R-1|", unitarity, 1e-12);

  // Superposition on random (beta, k, x).
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> logk(std::log(0.02), std::log(30.0));
  std::uniform_real_distribution<double> unit01(0.0, 1.0);
  double superposition = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const StepPotential& s = steps[n % 2];
    const double k = std::exp(logk(rng)) * k0;
    if (is_degenerate(s, k)) continue;
    const double x = s.a() + (unit01(rng) - 0.5) * 20.0 / k0;
    const cplx tot = total_wavefunction(s, k, x);
    const cplx sum = stationary_swf_tr(s, k, x) + stationary_swf_ref(s, k, x);
    superposition = std::max(superposition, std::abs(sum - tot) / std::max(1.0, std::abs(tot)));
  }
  add_max("superposition |psi_tr+psi_ref-Psi_tot|", superposition, 1e-12);
  add_max("currentless psi_ref", current_ref, 1e-12);
  add_max("flux constancy psi_tr (relative)", flux, 1e-10);
  add_max("turning point vs root oracle", oracle_xc, 1e-9);
  add_max("dwell closed form vs quadrature (relative)", dwell, 1e-8);
  add_max("sign laws and a+l_depth<=x_c violations", sign_violations, 0.0);

  {
    const TurningPointOracle o = turning_point_oracle(steps[0], 1.01 * k0);
    add_max("nearest zero minimizes |dx/dk| (0 = yes)", o.nearest_minimizes_slope ? 0.0 : 1.0, 0.0);
  }
  double limits = 0.0;
  for (const StepPotential& s : steps) {
    const double k = 100.0 * k0;
    const double kap = kappa_of_k(s, k).kappa;
    limits = std::max(limits, std::abs(kap * turning_point(s, k).length - pi / 4.0));
    limits = std::max(limits, std::abs(kap * dwell_times(s, k).l_depth - (pi - 2.0) / 4.0));
  }
  add_max("high-energy limits at k = 100 kappa0", limits, 1e-3);
  {
    const double k = 0.6 * k0;
    const TotalReflectionReport r = total_reflection_times(steps[0], k);
    add_max("total reflection dwell vs quadrature (relative)",
            detail::relative(dwell_time_oracle(steps[0], k, DwellChannel::Reflection), r.tau_ref_dwell, 0.0), 1e-8);
  }

  // Packet checks on the configured scenario.
  const StepPotential step = cfg.step();
  const SpectralProfile profile = cfg.profile();
  const CompletedScatteringReport ocs = validate_completed_scattering(profile, step);
  add_max("spectral guard (0 = pass)", ocs.spectral_guard ? 0.0 : 1.0, 0.0);
  add_max("completed-scattering conditions (0 = pass)", ocs.all_pass() ? 0.0 : 1.0, 0.0);
  if (ocs.spectral_guard) {
    const AsymptoticNorms as = SpectralPropagator(profile, step).asymptotic_norms();
    add_max("T_as + R_as - 1", std::abs(as.trans + as.refl - 1.0), 1e-10);
    // Doubling the node count must leave the moments unchanged.
    SpectralProfile doubled = profile;
    doubled.nodes = 2 * profile.nodes - 1;
    const SpectralPropagator coarse(profile, step), fine(doubled, step);
    const SpatialGrid grid = cfg.grid();
    const unsigned threads = numerics::resolve_threads(cfg.threads);
    const std::array<Channel, 2> chans{Channel::Tr, Channel::Ref};
    double change = 0.0;
    for (double t : {cfg.t_min, cfg.t_max}) {
      const auto c = coarse.evolve(t, grid, chans, threads);
      const auto f = fine.evolve(t, grid, chans, threads);
      for (std::size_t i = 0; i < chans.size(); ++i) {
        const MomentRecord mc = moments(c[i], step.units()), mf = moments(f[i], step.units());
        change = std::max(change, detail::relative(mc.norm, mf.norm, 0.0));
        change = std::max(change, detail::relative(mc.x_mean, mf.x_mean, profile.l0));
        change = std::max(change, detail::relative(mc.p_mean, mf.p_mean, step.units().hbar * k0));
        change = std::max(change, detail::relative(mc.x2_mean, mf.x2_mean, 0.0));
      }
    }
    add_max("moments: nodes vs 2x nodes (relative)", change, 1e-8);
  }

  ValidationResult out;
  out.table.title = "validate";
  out.table.columns = {{"check", unit::text}, {"value", unit::none}, {"tolerance", unit::none}, {"result", unit::text}};
  for (const CheckRow& r : rows) {
    out.table.rows.push_back({r.name, r.value, r.tolerance, std::string(r.pass ? "pass" : "fail")});
    out.all_pass = out.all_pass && r.pass;
  }
  return out;
}

}  // namespace stepscatter::cli
