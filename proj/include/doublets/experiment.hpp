#pragma once

// Configuration-driven experiment: quartic spectrum, four-level reduction,
// analytic and numeric population dynamics, CSV artifacts and a text report.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "doublets/four_level.hpp"
#include "doublets/propagator.hpp"
#include "doublets/quartic.hpp"

namespace doublets {

/// Invalid configuration text or values; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial state over the model states |1>..|4>.
struct InitialSelector {
  enum class Kind { Ground, Level, Amplitudes };
  Kind kind = Kind::Ground;
  std::size_t level = 1;  // 1..4 when kind == Level
  State4 amplitudes{};    // when kind == Amplitudes

  State4 state() const;
};

struct ExperimentConfig {
  double barrier = 0.0;  // D (required)
  double ratio = 0.0;    // Omega12 / omega (required)
  std::size_t basis_size = 80;
  std::size_t n_levels = 20;
  double periods = 3.0;  // run length in generalized Rabi periods of the (1,4) pair
  int steps_per_period = 1024;
  double regime_threshold = 0.1;
  InitialSelector initial;
  std::filesystem::path outputs = "out";

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses the flat `key=value` format (one pair per line, `#` starts a
/// comment). Keys: D, ratio, basis_size, n_levels, periods,
/// steps_per_period, regime_threshold, initial, outputs. D and ratio are
/// required. `initial` is `ground`, a model state index 1..4, or
/// `amp:re1,im1,re2,im2,re3,im3,re4,im4`.
ExperimentConfig parse_config(std::string_view text);

struct ExperimentResult {
  std::filesystem::path directory;
  double basis_frequency;
  FourLevelExtract extract;
  RenormalizedParams renormalized;
  RegimeReport regime;
  bool zero_field;
  double t_end;
  SeriesComparison analytic_vs_four_level;
  SeriesComparison analytic_vs_full;
  SeriesComparison full_vs_four_level;
  double max_leakage;
  double max_norm_drift;
  std::string report;
};

/// Runs the full pipeline and writes spectrum_energies.csv,
/// spectrum_dipole.csv, bare_numeric.csv, bare_analytic.csv,
/// renorm_numeric.csv, renorm_analytic.csv, bare_numeric_4level.csv,
/// renorm_numeric_4level.csv and report.txt into cfg.outputs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Uniform stride keeping at most `max_rows` rows.
std::size_t decimation_stride(std::size_t samples, std::size_t max_rows = 4000);

/// `t,P1,P2,P3,P4,norm` rows, 12 significant digits.
void write_bare_csv(const PopulationSeries& s, std::ostream& out, std::size_t max_rows = 4000);
/// `t,P1p,P2p,P3p,P4p,leakage` rows, 12 significant digits.
void write_renorm_csv(const PopulationSeries& s, std::ostream& out, std::size_t max_rows = 4000);

}  // namespace doublets
