#pragma once

// Exact Schrodinger propagation of the driven quartic oscillator in its
// truncated eigenbasis (and of the bare four-level model), with populations
// in the bare and renormalized bases.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "doublets/four_level.hpp"
#include "doublets/numerics.hpp"
#include "doublets/quartic.hpp"

namespace doublets {

struct DriveConfig {
  double field = 0.0;  // lambda
  double omega = 1.0;
  double t_end = 0.0;
  int steps_per_period = 1024;
  std::size_t n_levels = 20;
  ComplexState initial_state;  // over the propagated levels; empty = ground state
  LevelMap level_map = kDefaultLevelMap;

  /// Drift of |c|^2 beyond this aborts the run.
  double norm_drift_limit = 1e-6;

  double step() const;
  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

struct PopulationSample {
  double t;
  std::array<double, 4> bare;    // model states |1>..|4> (mapped levels)
  std::array<double, 4> renorm;  // |1'(t)>..|4'(t)>
  double norm;                   // |c|^2 over all propagated levels
  double leakage;                // norm minus the four-level subspace population
};

struct PopulationSeries {
  std::vector<PopulationSample> samples;
  double max_norm_drift = 0.0;  // max |norm(t) - norm(0)|

  std::size_t size() const { return samples.size(); }
  std::vector<double> times() const;
  double max_leakage() const;
};

/// Integrates i dc_j/dt = E_j c_j - lambda cos(omega t) sum_k X_jk c_k over
/// the lowest d.n_levels quartic states with RK4, step (2 pi/omega) /
/// steps_per_period. Throws NumericalError when the norm drifts past
/// d.norm_drift_limit.
PopulationSeries propagate(const Spectrum& s, const DriveConfig& d);

/// Same integrator on the 4x4 lab-frame model Hamiltonian. The couplings in
/// `p` already include the field, so d.field and d.level_map are unused;
/// d.omega must equal p.omega() and d.n_levels must be 4.
PopulationSeries propagate_four_level(const BareParams& p, const DriveConfig& d);

/// Analytic populations on a given time grid (leakage identically zero).
PopulationSeries analytic_series(const BareParams& p, const RenormalizedParams& r, const State4& c0,
                                 const std::vector<double>& times);

struct SeriesComparison {
  std::array<double, 4> max_bare_deviation;
  std::array<double, 4> max_renorm_deviation;
  std::array<double, 4> rms_bare_deviation;
  std::array<double, 4> rms_renorm_deviation;
  double max_leakage_deviation;
  std::optional<double> rabi_period_a;
  std::optional<double> rabi_period_b;

  double max_bare() const;
  double max_renorm() const;
};

/// Pointwise comparison on identical time grids (std::invalid_argument
/// otherwise).
SeriesComparison compare_series(const PopulationSeries& a, const PopulationSeries& b);

/// Rabi period from the first minimum of P1': twice the time of the lowest
/// sample in the first excursion below the series midline, refined by a
/// parabola through its neighbours. Empty if P1' never dips.
std::optional<double> estimate_rabi_period(const PopulationSeries& s);

}  // namespace doublets
