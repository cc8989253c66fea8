#include "doublets/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace doublets {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string at_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

template <typename T>
T parse_number(std::string_view value, std::string_view key, std::size_t line) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(at_line(line, "key '" + std::string(key) + "': cannot parse '" +
                                        std::string(value) + "' as a number"));
  return out;
}

InitialSelector parse_initial(std::string_view value, std::size_t line) {
  InitialSelector sel;
  if (value == "ground") return sel;
  if (value.starts_with("amp:")) {
    std::vector<double> parts;
    std::string_view rest = value.substr(4);
    while (true) {
      const auto comma = rest.find(',');
      parts.push_back(parse_number<double>(trim(rest.substr(0, comma)), "initial", line));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (parts.size() != 8)
      throw ConfigError(at_line(line, "key 'initial': amp: needs 8 numbers (re,im for 4 states)"));
    sel.kind = InitialSelector::Kind::Amplitudes;
    for (std::size_t i = 0; i < 4; ++i) sel.amplitudes[i] = cplx(parts[2 * i], parts[2 * i + 1]);
    return sel;
  }
  sel.kind = InitialSelector::Kind::Level;
  sel.level = parse_number<std::size_t>(value, "initial", line);
  return sel;
}

std::string num(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_rows(const PopulationSeries& s, std::ostream& out, std::size_t max_rows, bool renorm) {
  out << (renorm ? "t,P1p,P2p,P3p,P4p,leakage\n" : "t,P1,P2,P3,P4,norm\n");
  const std::size_t stride = decimation_stride(s.size(), max_rows);
  char buf[256];
  for (std::size_t k = 0; k < s.size(); k += stride) {
    const PopulationSample& x = s.samples[k];
    const auto& p = renorm ? x.renorm : x.bare;
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", x.t, p[0], p[1], p[2],
                  p[3], renorm ? x.leakage : x.norm);
    out << buf;
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file " + path.string());
  return out;
}

std::string comparison_lines(const std::string& label, const SeriesComparison& c) {
  std::ostringstream os;
  os << label << "\n";
  os << "  max |dP_i|  (bare):  ";
  for (double v : c.max_bare_deviation) os << ' ' << num(v, 6);
  os << "\n  max |dP_i'| (renorm):";
  for (double v : c.max_renorm_deviation) os << ' ' << num(v, 6);
  os << "\n  rms |dP_i'| (renorm):";
  for (double v : c.rms_renorm_deviation) os << ' ' << num(v, 6);
  os << "\n  max |d leakage|:      " << num(c.max_leakage_deviation, 6) << "\n";
  return os.str();
}

std::string period_text(const std::optional<double>& p) { return p ? num(*p) : "n/a"; }

}  // namespace

State4 InitialSelector::state() const {
  State4 s{};
  switch (kind) {
    case Kind::Ground:
      s[0] = 1.0;
      break;
    case Kind::Level:
      s.at(level - 1) = 1.0;
      break;
    case Kind::Amplitudes:
      s = amplitudes;
      break;
  }
  return s;
}

void ExperimentConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(key) + ": must be positive (got " + num(v) + ")");
  };
  positive(barrier, "D");
  if (!(ratio >= 0.0) || !std::isfinite(ratio))
    throw ConfigError("ratio: must be >= 0 (got " + num(ratio) + ")");
  positive(periods, "periods");
  positive(regime_threshold, "regime_threshold");
  if (basis_size < 36) throw ConfigError("basis_size: must be >= 36");
  if (n_levels < 6) throw ConfigError("n_levels: must be >= 6");
  if (n_levels + 10 > basis_size) throw ConfigError("n_levels: must not exceed basis_size - 10");
  if (steps_per_period < 64) throw ConfigError("steps_per_period: must be >= 64");
  if (outputs.empty()) throw ConfigError("outputs: must not be empty");
  if (initial.kind == InitialSelector::Kind::Level && (initial.level < 1 || initial.level > 4))
    throw ConfigError("initial: level index must be in 1..4");
  if (initial.kind == InitialSelector::Kind::Amplitudes) {
    double n2 = 0.0;
    for (const cplx& a : initial.amplitudes) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-10) throw ConfigError("initial: amplitudes must be normalized");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(at_line(line_no, "expected key=value"));
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(at_line(line_no, "missing key"));
    if (value.empty()) throw ConfigError(at_line(line_no, "key '" + std::string(key) + "' has no value"));
    if (!seen.emplace(key).second)
      throw ConfigError(at_line(line_no, "duplicate key '" + std::string(key) + "'"));

    if (key == "D") {
      cfg.barrier = parse_number<double>(value, key, line_no);
    } else if (key == "ratio") {
      cfg.ratio = parse_number<double>(value, key, line_no);
    } else if (key == "basis_size") {
      cfg.basis_size = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "n_levels") {
      cfg.n_levels = parse_number<std::size_t>(value, key, line_no);
    } else if (key == "periods") {
      cfg.periods = parse_number<double>(value, key, line_no);
    } else if (key == "steps_per_period") {
      cfg.steps_per_period = parse_number<int>(value, key, line_no);
    } else if (key == "regime_threshold") {
      cfg.regime_threshold = parse_number<double>(value, key, line_no);
    } else if (key == "initial") {
      cfg.initial = parse_initial(value, line_no);
    } else if (key == "outputs") {
      cfg.outputs = std::string(value);
    } else {
      throw ConfigError(at_line(line_no, "unknown key '" + std::string(key) + "'"));
    }
  }
  if (!seen.contains("D")) throw ConfigError("missing required key 'D'");
  if (!seen.contains("ratio")) throw ConfigError("missing required key 'ratio'");
  cfg.validate();
  return cfg;
}

std::size_t decimation_stride(std::size_t samples, std::size_t max_rows) {
  if (max_rows == 0) throw std::invalid_argument("decimation_stride: max_rows must be positive");
  return std::max<std::size_t>(1, (samples + max_rows - 1) / max_rows);
}

void write_bare_csv(const PopulationSeries& s, std::ostream& out, std::size_t max_rows) {
  write_rows(s, out, max_rows, false);
}

void write_renorm_csv(const PopulationSeries& s, std::ostream& out, std::size_t max_rows) {
  write_rows(s, out, max_rows, true);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.outputs, ec);
  if (ec) throw ConfigError("outputs: cannot create directory " + cfg.outputs.string());

  QuarticConfig qc{cfg.barrier, cfg.basis_size, 1.0};
  const BasisOptimum optimum = optimize_basis_frequency(qc, 12);
  qc.basis_frequency = optimum.frequency;
  const Spectrum spectrum = solve_spectrum(qc, cfg.n_levels);
  {
    auto e = open_output(cfg.outputs / "spectrum_energies.csv");
    write_energies_csv(spectrum, e);
    auto x = open_output(cfg.outputs / "spectrum_dipole.csv");
    write_dipole_csv(spectrum, x);
  }

  const FourLevelExtract extract = extract_four_level(spectrum, cfg.ratio);
  const BareParams& params = extract.params;
  const RenormalizedParams renorm = renormalize(params);
  const RegimeReport regime = validate_regime(params, cfg.regime_threshold);

  const double omega = extract.omega;
  const double rabi = renorm.generalized_rabi_14;
  const bool zero_field = !(rabi > 1e-9 * omega);
  const double period = zero_field ? 2.0 * std::numbers::pi / omega : 2.0 * std::numbers::pi / rabi;
  const double t_end = cfg.periods * period;

  const State4 c0 = cfg.initial.state();
  ComplexState full_initial(cfg.n_levels);
  for (std::size_t i = 0; i < 4; ++i) full_initial[extract.level_map[i] - 1] = c0[i];

  DriveConfig full_drive;
  full_drive.field = extract.field;
  full_drive.omega = omega;
  full_drive.t_end = t_end;
  full_drive.steps_per_period = cfg.steps_per_period;
  full_drive.n_levels = cfg.n_levels;
  full_drive.initial_state = full_initial;
  full_drive.level_map = extract.level_map;

  DriveConfig four_drive = full_drive;
  four_drive.n_levels = 4;
  four_drive.initial_state = ComplexState({c0[0], c0[1], c0[2], c0[3]});

  // The two numeric legs share only immutable inputs.
  auto full_future = std::async(std::launch::async, [&] { return propagate(spectrum, full_drive); });
  const PopulationSeries four = propagate_four_level(params, four_drive);
  const PopulationSeries full = full_future.get();
  const PopulationSeries analytic = analytic_series(params, renorm, c0, four.times());

  ExperimentResult res{cfg.outputs,
                       optimum.frequency,
                       extract,
                       renorm,
                       regime,
                       zero_field,
                       t_end,
                       compare_series(analytic, four),
                       compare_series(analytic, full),
                       compare_series(full, four),
                       full.max_leakage(),
                       std::max(full.max_norm_drift, four.max_norm_drift),
                       {}};

  {
    auto f = open_output(cfg.outputs / "bare_numeric.csv");
    write_bare_csv(full, f);
    auto g = open_output(cfg.outputs / "bare_analytic.csv");
    write_bare_csv(analytic, g);
    auto h = open_output(cfg.outputs / "renorm_numeric.csv");
    write_renorm_csv(full, h);
    auto i = open_output(cfg.outputs / "renorm_analytic.csv");
    write_renorm_csv(analytic, i);
    auto j = open_output(cfg.outputs / "bare_numeric_4level.csv");
    write_bare_csv(four, j);
    auto k = open_output(cfg.outputs / "renorm_numeric_4level.csv");
    write_renorm_csv(four, k);
  }

  std::ostringstream r;
  const Couplings& c = params.couplings();
  r << "driven quartic double well: four-level reduction\n\n";
  if (!regime.within_validity) {
    r << "**********************************************************************\n"
      << "WARNING: parameters lie OUTSIDE the validity regime of the constant\n"
      << "rotated Hamiltonian (some ratio exceeds " << num(regime.threshold) << ").\n"
      << "Analytic curves may deviate substantially from the numerics.\n"
      << "**********************************************************************\n\n";
  }
  if (zero_field) r << "NOTE: zero field; run length measured in drive periods.\n\n";

  r << "[setup]\n"
    << "D = " << num(cfg.barrier) << "\n"
    << "ratio Omega12/omega = " << num(cfg.ratio) << "\n"
    << "basis_size = " << cfg.basis_size << "\n"
    << "basis_frequency = " << num(optimum.frequency) << "\n"
    << "levels propagated = " << cfg.n_levels << "\n"
    << "level map = " << extract.level_map[0] << ' ' << extract.level_map[1] << ' '
    << extract.level_map[2] << ' ' << extract.level_map[3] << "\n"
    << "omega = " << num(omega) << "\n"
    << "lambda = " << num(extract.field) << "\n"
    << "dipole hierarchy min|X_intra|/max|X_inter| = " << num(extract.dipole_hierarchy) << "\n\n";

  r << "[regime]\n"
    << "Delta0'/omega = " << num(regime.lower_splitting_ratio) << "\n"
    << "Delta0''/omega = " << num(regime.upper_splitting_ratio) << "\n"
    << "|Omega14|/omega = " << num(regime.coupling_14_ratio) << "\n"
    << "|Omega23|/omega = " << num(regime.coupling_23_ratio) << "\n"
    << "|Delta-omega|/omega = " << num(regime.detuning_ratio) << "\n"
    << "threshold = " << num(regime.threshold) << "\n"
    << "within_validity = " << (regime.within_validity ? "yes" : "no") << "\n\n";

  r << "[bare parameters]  (energies relative to (E1+E2)/2, offset " << num(params.energy_offset())
    << ")\n"
    << "E1..E4 = " << num(params.energies()[0]) << ' ' << num(params.energies()[1]) << ' '
    << num(params.energies()[2]) << ' ' << num(params.energies()[3]) << "\n"
    << "Omega12 = " << num(c.c12) << "\nOmega34 = " << num(c.c34) << "\nOmega14 = " << num(c.c14)
    << "\nOmega23 = " << num(c.c23) << "\n"
    << "Delta0' = " << num(params.lower_splitting()) << "\nDelta0'' = " << num(params.upper_splitting())
    << "\nDelta = " << num(params.doublet_gap()) << "\n\n";

  r << "[renormalized parameters]\n"
    << "Delta0'R = " << num(renorm.lower_splitting) << "\nDelta0''R = " << num(renorm.upper_splitting)
    << "\nOmega14R = " << num(renorm.rabi_14) << "\nOmega23R = " << num(renorm.rabi_23)
    << "\ndelta14R = " << num(renorm.detuning_14) << "\ndelta23R = " << num(renorm.detuning_23)
    << "\nOmegaBar14R = " << num(renorm.generalized_rabi_14)
    << "\nOmegaBar23R = " << num(renorm.generalized_rabi_23) << "\n\n";

  r << "[run]\n"
    << "t_end = " << num(t_end) << "\n"
    << "steps_per_period = " << cfg.steps_per_period << "\n"
    << "samples = " << full.size() << "\n"
    << "max norm drift = " << num(res.max_norm_drift, 4) << "\n"
    << "max leakage (full basis) = " << num(res.max_leakage, 6) << "\n\n";

  r << "[deviations]\n"
    << comparison_lines("analytic vs four-level numeric", res.analytic_vs_four_level)
    << comparison_lines("analytic vs full numeric", res.analytic_vs_full)
    << comparison_lines("full numeric vs four-level numeric", res.full_vs_four_level) << "\n";

  r << "[rabi period]\n"
    << "predicted 2pi/OmegaBar14R = " << (zero_field ? std::string("n/a") : num(period)) << "\n"
    << "analytic estimate = " << period_text(res.analytic_vs_four_level.rabi_period_a) << "\n"
    << "four-level numeric estimate = " << period_text(res.analytic_vs_four_level.rabi_period_b) << "\n"
    << "full numeric estimate = " << period_text(res.analytic_vs_full.rabi_period_b) << "\n"
    << "drive period 2pi/omega = " << num(2.0 * std::numbers::pi / omega) << "\n";

  res.report = r.str();
  auto rep = open_output(cfg.outputs / "report.txt");
  rep << res.report;
  return res;
}

}  // namespace doublets
