#include "doublets/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace doublets {

namespace {

constexpr cplx kI{0.0, 1.0};

void check_norm(const PopulationSample& sample, double norm0, double limit, PopulationSeries& out) {
  const double drift = std::abs(sample.norm - norm0);
  out.max_norm_drift = std::max(out.max_norm_drift, drift);
  if (drift > limit) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "propagation aborted: norm drift " << drift << " at t = " << sample.t
        << " exceeds " << limit << " (step size too coarse?)";
    throw NumericalError(msg.str());
  }
}

}  // namespace

double DriveConfig::step() const { return 2.0 * std::numbers::pi / omega / steps_per_period; }

void DriveConfig::validate() const {
  if (!std::isfinite(field)) throw std::invalid_argument("DriveConfig: field must be finite");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("DriveConfig: omega must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("DriveConfig: t_end must be positive");
  if (steps_per_period < 64) throw std::invalid_argument("DriveConfig: steps_per_period must be >= 64");
  if (n_levels < 4) throw std::invalid_argument("DriveConfig: n_levels must be >= 4");
  if (initial_state.dim() != 0) {
    if (initial_state.dim() != n_levels)
      throw std::invalid_argument("DriveConfig: initial state dimension differs from n_levels");
    if (std::abs(initial_state.norm_squared() - 1.0) > 1e-10)
      throw std::invalid_argument("DriveConfig: initial state is not normalized");
  }
}

std::vector<double> PopulationSeries::times() const {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.t);
  return t;
}

double PopulationSeries::max_leakage() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.leakage);
  return m;
}

PopulationSeries propagate(const Spectrum& s, const DriveConfig& d) {
  d.validate();
  const std::size_t n = d.n_levels;
  if (n > s.size()) throw std::invalid_argument("propagate: n_levels exceeds the spectrum");
  for (std::size_t level : d.level_map)
    if (level < 1 || level > n) throw std::invalid_argument("propagate: level map outside propagated levels");

  const LevelMap& map = d.level_map;
  // Diagonal shifted to the middle of the tracked subspace; only a global phase.
  const double reference = 0.5 * (s.energy(map[0]) + s.energy(map[3]));
  std::vector<double> diag(n);
  for (std::size_t j = 0; j < n; ++j) diag[j] = s.energies[j] - reference;
  std::vector<double> dipole(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) dipole[j * n + k] = s.dipole(j, k);

  const BareParams model({s.energy(map[0]), s.energy(map[1]), s.energy(map[2]), s.energy(map[3])},
                         mapped_couplings(s, map, d.field), d.omega);

  const double field = d.field;
  const double omega = d.omega;
  const Derivative deriv = [&](double t, std::span<const cplx> c, std::span<cplx> out) {
    const double drive = field * std::cos(omega * t);
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = diag[j] * c[j];
      const double* row = &dipole[j * n];
      cplx coupled = 0.0;
      for (std::size_t k = 0; k < n; ++k) coupled += row[k] * c[k];
      acc -= drive * coupled;
      out[j] = -kI * acc;
    }
  };

  const ComplexState initial = d.initial_state.dim() ? d.initial_state : ComplexState::basis(n, 0);
  const double norm0 = initial.norm_squared();

  PopulationSeries series;
  series.samples.reserve(rk4_step_count(0.0, d.t_end, d.step()) + 1);
  rk4_integrate(deriv, initial, 0.0, d.t_end, d.step(), [&](double t, std::span<const cplx> c) {
    PopulationSample sample{};
    sample.t = t;
    double norm = 0.0;
    for (const cplx& a : c) norm += std::norm(a);
    State4 sub{};
    double sub_pop = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      sub[i] = c[map[i] - 1];
      sample.bare[i] = std::norm(sub[i]);
      sub_pop += sample.bare[i];
    }
    sample.norm = norm;
    sample.leakage = norm - sub_pop;
    sample.renorm = project_renormalized(model, sub, t);
    check_norm(sample, norm0, d.norm_drift_limit, series);
    series.samples.push_back(sample);
  });
  return series;
}

PopulationSeries propagate_four_level(const BareParams& p, const DriveConfig& d) {
  d.validate();
  if (d.n_levels != 4) throw std::invalid_argument("propagate_four_level: n_levels must be 4");
  if (std::abs(d.omega - p.omega()) > 1e-12 * p.omega())
    throw std::invalid_argument("propagate_four_level: drive omega differs from the model omega");

  const double reference = 0.5 * (p.energies()[0] + p.energies()[3]);
  const Derivative deriv = [&](double t, std::span<const cplx> c, std::span<cplx> out) {
    Matrix4 h = lab_hamiltonian(p, t);
    for (std::size_t j = 0; j < 4; ++j) h[j][j] -= reference;
    for (std::size_t j = 0; j < 4; ++j) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += h[j][k] * c[k];
      out[j] = -kI * acc;
    }
  };

  const ComplexState initial = d.initial_state.dim() ? d.initial_state : ComplexState::basis(4, 0);
  const double norm0 = initial.norm_squared();

  PopulationSeries series;
  series.samples.reserve(rk4_step_count(0.0, d.t_end, d.step()) + 1);
  rk4_integrate(deriv, initial, 0.0, d.t_end, d.step(), [&](double t, std::span<const cplx> c) {
    PopulationSample sample{};
    sample.t = t;
    const State4 psi{c[0], c[1], c[2], c[3]};
    sample.bare = populations(psi);
    sample.norm = populations_sum(sample.bare);
    sample.leakage = 0.0;
    sample.renorm = project_renormalized(p, psi, t);
    check_norm(sample, norm0, d.norm_drift_limit, series);
    series.samples.push_back(sample);
  });
  return series;
}

PopulationSeries analytic_series(const BareParams& p, const RenormalizedParams& r, const State4& c0,
                                 const std::vector<double>& times) {
  PopulationSeries series;
  series.samples.reserve(times.size());
  for (double t : times) {
    PopulationSample sample{};
    sample.t = t;
    sample.renorm = populations(analytic_amplitudes(r, c0, t));
    sample.bare = populations(compose_solution(p, r, c0, t));
    sample.norm = populations_sum(sample.bare);
    sample.leakage = 0.0;
    series.samples.push_back(sample);
  }
  return series;
}

double SeriesComparison::max_bare() const {
  return *std::max_element(max_bare_deviation.begin(), max_bare_deviation.end());
}

double SeriesComparison::max_renorm() const {
  return *std::max_element(max_renorm_deviation.begin(), max_renorm_deviation.end());
}

SeriesComparison compare_series(const PopulationSeries& a, const PopulationSeries& b) {
  if (a.size() != b.size() || a.size() == 0)
    throw std::invalid_argument("compare_series: time grids differ in length");
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ta = a.samples[k].t, tb = b.samples[k].t;
    if (std::abs(ta - tb) > 1e-12 * std::max(1.0, std::abs(ta)))
      throw std::invalid_argument("compare_series: time grids differ");
  }

  SeriesComparison out{};
  std::array<double, 4> sq_bare{}, sq_renorm{};
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a.samples[k];
    const auto& y = b.samples[k];
    for (std::size_t i = 0; i < 4; ++i) {
      const double db = std::abs(x.bare[i] - y.bare[i]);
      const double dr = std::abs(x.renorm[i] - y.renorm[i]);
      out.max_bare_deviation[i] = std::max(out.max_bare_deviation[i], db);
      out.max_renorm_deviation[i] = std::max(out.max_renorm_deviation[i], dr);
      sq_bare[i] += db * db;
      sq_renorm[i] += dr * dr;
    }
    out.max_leakage_deviation = std::max(out.max_leakage_deviation, std::abs(x.leakage - y.leakage));
  }
  const double count = static_cast<double>(a.size());
  for (std::size_t i = 0; i < 4; ++i) {
    out.rms_bare_deviation[i] = std::sqrt(sq_bare[i] / count);
    out.rms_renorm_deviation[i] = std::sqrt(sq_renorm[i] / count);
  }
  out.rabi_period_a = estimate_rabi_period(a);
  out.rabi_period_b = estimate_rabi_period(b);
  return out;
}

std::optional<double> estimate_rabi_period(const PopulationSeries& s) {
  const auto& v = s.samples;
  if (v.size() < 3) return std::nullopt;
  double hi = v.front().renorm[0], lo = hi;
  for (const auto& x : v) {
    hi = std::max(hi, x.renorm[0]);
    lo = std::min(lo, x.renorm[0]);
  }
  if (hi - lo < 1e-6) return std::nullopt;
  const double mid = 0.5 * (hi + lo);

  std::size_t enter = 0;
  while (enter < v.size() && v[enter].renorm[0] >= mid) ++enter;
  std::size_t leave = enter;
  while (leave < v.size() && v[leave].renorm[0] <= mid) ++leave;
  if (enter == v.size() || leave == v.size()) return std::nullopt;

  std::size_t k = enter;
  for (std::size_t i = enter; i < leave; ++i)
    if (v[i].renorm[0] < v[k].renorm[0]) k = i;

  double t_min = v[k].t;
  if (k > 0 && k + 1 < v.size()) {
    const double t0 = v[k - 1].t, t1 = v[k].t, t2 = v[k + 1].t;
    const double p0 = v[k - 1].renorm[0], p1 = v[k].renorm[0], p2 = v[k + 1].renorm[0];
    const double num = (t1 - t0) * (t1 - t0) * (p1 - p2) - (t1 - t2) * (t1 - t2) * (p1 - p0);
    const double den = (t1 - t0) * (p1 - p2) - (t1 - t2) * (p1 - p0);
    if (den != 0.0) t_min = t1 - 0.5 * num / den;
  }
  return 2.0 * (t_min - v.front().t);
}

}  // namespace doublets
