// Acceptance checks: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "doublets/experiment.hpp"
#include "doublets/four_level.hpp"
#include "doublets/numerics.hpp"
#include "doublets/propagator.hpp"
#include "doublets/quartic.hpp"
#include "oracles.hpp"

using namespace doublets;

namespace {

constexpr std::array<double, 3> kRatios{1.0, 0.75, 0.5};
constexpr double kPeriods = 3.0;
constexpr int kSteps = 1024;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3g", v); }

const Spectrum& spectrum() {
  static const Spectrum s = [] {
    QuarticConfig cfg;
    cfg.basis_frequency = optimize_basis_frequency(cfg).frequency;
    return solve_spectrum(cfg, 20);
  }();
  return s;
}

struct Run {
  FourLevelExtract extract;
  RenormalizedParams renorm;
  PopulationSeries four;
  PopulationSeries full;
  PopulationSeries analytic;
};

DriveConfig drive_for(const FourLevelExtract& e, const RenormalizedParams& r, int steps, std::size_t levels) {
  DriveConfig d;
  d.field = e.field;
  d.omega = e.omega;
  d.t_end = kPeriods * 2.0 * std::numbers::pi / r.generalized_rabi_14;
  d.steps_per_period = steps;
  d.n_levels = levels;
  d.level_map = e.level_map;
  return d;
}

Run make_run(double ratio, int steps) {
  const FourLevelExtract e = extract_four_level(spectrum(), ratio);
  const RenormalizedParams r = renormalize(e.params);
  Run run{e, r, propagate_four_level(e.params, drive_for(e, r, steps, 4)),
          propagate(spectrum(), drive_for(e, r, steps, 20)), {}};
  run.analytic = analytic_series(e.params, r, State4{1.0, 0.0, 0.0, 0.0}, run.four.times());
  return run;
}

const Run& cached_run(double ratio, int steps = kSteps) {
  static std::map<std::pair<double, int>, Run> cache;
  auto it = cache.find({ratio, steps});
  if (it == cache.end()) it = cache.emplace(std::make_pair(ratio, steps), make_run(ratio, steps)).first;
  return it->second;
}

double max_bare_gap(const PopulationSeries& a, const PopulationSeries& b) {
  return compare_series(a, b).max_bare();
}

// Largest population difference on the times shared by two grids.
double common_time_gap(const PopulationSeries& coarse, const PopulationSeries& fine) {
  double worst = 0.0;
  std::size_t j = 0;
  std::size_t matched = 0;
  for (const auto& x : coarse.samples) {
    while (j < fine.size() && fine.samples[j].t < x.t - 1e-9) ++j;
    if (j == fine.size() || std::abs(fine.samples[j].t - x.t) > 1e-9) continue;
    ++matched;
    for (std::size_t i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(x.bare[i] - fine.samples[j].bare[i]));
      worst = std::max(worst, std::abs(x.renorm[i] - fine.samples[j].renorm[i]));
    }
  }
  if (matched + 1 < coarse.size()) return INFINITY;
  return worst;
}

Outcome criterion_1() {
  bool ok = true;
  std::string d;
  for (double ratio : kRatios) {
    const Run& run = cached_run(ratio);
    const double tol = ratio > 0.6 ? 0.05 : 0.02;
    const double dev = compare_series(run.analytic, run.four).max_renorm();
    ok = ok && dev <= tol;
    d += "ratio " + fmt("%.2f", ratio) + ": " + sci(dev) + " <= " + sci(tol) + "; ";
  }
  return {ok, "max|P'_analytic - P'_4level| " + d};
}

Outcome criterion_2() {
  bool ok = true;
  std::string d;
  for (double ratio : kRatios) {
    const Run& run = cached_run(ratio);
    const double tol = ratio > 0.6 ? 0.05 : 0.02;
    double mid = 0.0;
    for (const auto& x : run.four.samples) mid = std::max({mid, x.renorm[1], x.renorm[2]});
    const double predicted = 2.0 * std::numbers::pi / run.renorm.generalized_rabi_14;
    const auto measured = estimate_rabi_period(run.four);
    const double rel = measured ? std::abs(*measured / predicted - 1.0) : INFINITY;
    ok = ok && mid <= tol && rel <= 0.05;
    d += "ratio " + fmt("%.2f", ratio) + ": P2',P3' " + sci(mid) + " <= " + sci(tol) + ", period err " +
         sci(rel) + " <= 0.05; ";
  }
  return {ok, d};
}

Outcome criterion_3() {
  std::vector<double> gaps;
  std::string d;
  for (double ratio : kRatios) {
    const Run& run = cached_run(ratio);
    const double gap = max_bare_gap(run.full, run.four);
    gaps.push_back(gap);
    d += "ratio " + fmt("%.2f", ratio) + ": max|P_20 - P_4| " + sci(gap) + " (leakage " +
         sci(run.full.max_leakage()) + "); ";
  }
  const bool bounded = gaps[0] <= 0.1;
  const bool monotone = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  return {bounded && monotone,
          d + "bound at 1.00 <= 0.1 " + (bounded ? "holds" : "VIOLATED") + ", monotone " + (monotone ? "yes" : "no")};
}

Outcome criterion_4() {
  const double ratio = 1e-3;
  const FourLevelExtract e = extract_four_level(spectrum(), ratio);
  const BareParams& p = e.params;
  const RenormalizedParams r = renormalize(p);

  // Two-level RWA on |1>-|4>: lab coupling -Omega14 cos(wt) becomes -Omega14/2.
  const double coupling = p.couplings().c14;
  const double detuning = p.energies()[3] - p.energies()[0] - p.omega();
  const double flop = std::hypot(coupling, detuning);
  const double period = 2.0 * std::numbers::pi / flop;
  double worst = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double t = period * k / 2000.0;
    const double s = std::sin(0.5 * flop * t);
    const double p4 = coupling * coupling / (flop * flop) * s * s;
    const auto ana = populations(compose_solution(p, r, State4{1.0, 0.0, 0.0, 0.0}, t));
    const std::array<double, 4> rwa{1.0 - p4, 0.0, 0.0, p4};
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(ana[i] - rwa[i]));
  }

  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  const double param = std::max({rel(r.rabi_14, p.couplings().c14), rel(r.rabi_23, p.couplings().c23),
                                  rel(r.lower_splitting, p.lower_splitting()),
                                  rel(r.upper_splitting, p.upper_splitting())});
  return {worst <= 1e-4 && param <= 1e-5,
          "populations vs RWA " + sci(worst) + " <= 1e-4; renormalized vs bare params " + sci(param) + " <= 1e-5"};
}

Outcome criterion_5() {
  const BareParams& p = extract_four_level(spectrum(), 1.0).params;
  const RenormalizedParams r = renormalize(p);
  const Matrix4 h0 = h0_matrix(r);
  const OscillatingTerm o = oscillating_term(p, 40);

  std::mt19937_64 rng(1234567);
  std::uniform_real_distribution<double> u(0.0, kPeriods * 2.0 * std::numbers::pi / r.generalized_rabi_14);
  double split = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double t = u(rng);
    const Matrix4c full = rotated_hamiltonian(p, t);
    const Matrix4c h1 = h1_matrix(o, p, t);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) split = std::max(split, std::abs(full[i][j] - h0[i][j] - h1[i][j]));
  }

  // Periodic trapezoid rule is spectrally accurate for the period average.
  const int n = 4096;
  const double period = 2.0 * std::numbers::pi / p.omega();
  Matrix4c avg{};
  for (int k = 0; k < n; ++k) {
    const Matrix4c h = rotated_hamiltonian(p, period * k / n);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) avg[i][j] += h[i][j] / static_cast<double>(n);
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) mean = std::max(mean, std::abs(avg[i][j] - h0[i][j]));
  return {split <= 1e-10 && mean <= 1e-8,
          "max|H' - H0' - H1'| " + sci(split) + " <= 1e-10 (64 times); max|<H'> - H0'| " + sci(mean) + " <= 1e-8"};
}

Outcome criterion_6() {
  const Spectrum& s = spectrum();
  double parity = 0.0;
  for (std::size_t i = 1; i <= s.size(); ++i)
    for (std::size_t j = i; j <= s.size(); j += 2) parity = std::max(parity, std::abs(s.dipole_element(i, j)));
  const double d1 = s.energy(2) - s.energy(1), d2 = s.energy(4) - s.energy(3), d3 = s.energy(6) - s.energy(5);
  const bool ordered = d1 < d2 && d2 < d3;
  const double isolation = d1 / (s.energy(5) - s.energy(1));
  const double hierarchy = std::abs(s.dipole_element(1, 2)) / std::abs(s.dipole_element(1, 6));

  QuarticConfig big{4.0, 120, s.basis_frequency};
  const Spectrum wide = solve_spectrum(big, 20);
  double drift = 0.0;
  for (std::size_t k = 0; k < 20; ++k) drift = std::max(drift, std::abs(wide.energies[k] - s.energies[k]));

  const bool ok = parity <= 1e-10 && ordered && isolation <= 1e-2 && hierarchy >= 10.0 && drift <= 1e-8;
  return {ok, "parity " + sci(parity) + " <= 1e-10; splittings " + sci(d1) + " < " + sci(d2) + " < " + sci(d3) +
                  "; (E2-E1)/(E5-E1) " + sci(isolation) + " <= 1e-2; |X12/X16| " + fmt("%.1f", hierarchy) +
                  " >= 10; M 80->120 " + sci(drift) + " <= 1e-8"};
}

Outcome criterion_7() {
  double bessel = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double x = 30.0 * k / 199.0;
    const int n = k % 8;
    bessel = std::max(bessel, std::abs(bessel_j(n, x) - oracle::bessel_j(n, x)));
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double residual = 0.0;
  for (std::size_t n : {5u, 20u, 80u}) {
    SymmetricMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) a.set(i, j, u(rng));
    const EigenDecomposition e = jacobi_eigh(a);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += e.eigenvectors(i, k) * e.eigenvalues[k] * e.eigenvectors(j, k);
        residual = std::max(residual, std::abs(acc - a(i, j)));
      }
  }

  double drift = 0.0;
  for (double ratio : kRatios) {
    const Run& run = cached_run(ratio);
    drift = std::max({drift, run.four.max_norm_drift, run.full.max_norm_drift});
  }

  double halving = 0.0;
  for (double ratio : kRatios) {
    const Run& coarse = cached_run(ratio);
    const Run& fine = cached_run(ratio, 2 * kSteps);
    drift = std::max({drift, fine.four.max_norm_drift, fine.full.max_norm_drift});
    halving = std::max({halving, common_time_gap(coarse.four, fine.four), common_time_gap(coarse.full, fine.full)});
  }

  const bool ok = bessel <= 1e-12 && residual <= 1e-9 && drift <= 1e-8 && halving <= 1e-6;
  return {ok, "bessel " + sci(bessel) + " <= 1e-12; eigen residual " + sci(residual) + " <= 1e-9; norm drift " +
                  sci(drift) + " <= 1e-8; grid halving " + sci(halving) + " <= 1e-6"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_8() {
  const auto root = std::filesystem::temp_directory_path() / "doublets_determinism";
  std::filesystem::remove_all(root);
  ExperimentConfig cfg = parse_config("D=4\nratio=1.0\n");
  cfg.outputs = root / "a";
  run_experiment(cfg);
  cfg.outputs = root / "b";
  run_experiment(cfg);

  std::size_t files = 0, differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    if (slurp(entry.path()) != slurp(root / "b" / entry.path().filename())) ++differing;
  }
  std::filesystem::remove_all(root);
  return {files >= 6 && differing == 0,
          std::to_string(files) + " CSV files compared, " + std::to_string(differing) + " differ"};
}

const std::vector<std::pair<const char*, std::function<Outcome()>>> kCriteria{
    {"analytic vs four-level numeric (renormalized populations)", criterion_1},
    {"renormalized Rabi structure", criterion_2},
    {"full basis vs four-level leakage", criterion_3},
    {"weak-field reduction to RWA", criterion_4},
    {"H0' + H1' decomposition", criterion_5},
    {"quartic spectrum", criterion_6},
    {"numerical kernels", criterion_7},
    {"determinism", criterion_8},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", kCriteria.size());
    return 2;
  }

  int failed = 0;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) {
    if (only != 0 && static_cast<int>(k + 1) != only) continue;
    Outcome out;
    try {
      out = kCriteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s AC%zu %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1, kCriteria[k].first, out.detail.c_str());
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
