#include "doublets/quartic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace doublets {

void QuarticConfig::validate() const {
  if (!(barrier > 0.0) || !std::isfinite(barrier))
    throw std::invalid_argument("QuarticConfig: barrier D must be positive");
  if (basis_size < 8) throw std::invalid_argument("QuarticConfig: basis size must be >= 8");
  if (!(basis_frequency > 0.0) || !std::isfinite(basis_frequency))
    throw std::invalid_argument("QuarticConfig: basis frequency must be positive");
}

namespace {

RealMatrix position_matrix(std::size_t size, double frequency) {
  RealMatrix x(size, size);
  const double scale = 1.0 / std::sqrt(2.0 * frequency);
  for (std::size_t n = 0; n + 1 < size; ++n) {
    const double v = scale * std::sqrt(static_cast<double>(n + 1));
    x(n, n + 1) = v;
    x(n + 1, n) = v;
  }
  return x;
}

double lowest_sum(const SymmetricMatrix& h, std::size_t n_keep) {
  const EigenDecomposition eig = jacobi_eigh(h);
  return std::accumulate(eig.eigenvalues.begin(), eig.eigenvalues.begin() + n_keep, 0.0);
}

}  // namespace

HarmonicOperators ho_operators(std::size_t size, double frequency) {
  if (size < 8) throw std::invalid_argument("ho_operators: size must be >= 8");
  if (!(frequency > 0.0)) throw std::invalid_argument("ho_operators: frequency must be positive");

  const RealMatrix big = position_matrix(size + 4, frequency);
  const RealMatrix big2 = big * big;
  const RealMatrix big4 = big2 * big2;

  SymmetricMatrix p2(size);
  for (std::size_t n = 0; n < size; ++n) {
    p2.set(n, n, 0.5 * frequency * (2.0 * n + 1.0));
    if (n + 2 < size)
      p2.set(n, n + 2, -0.5 * frequency * std::sqrt(static_cast<double>((n + 1) * (n + 2))));
  }
  return {SymmetricMatrix(big.block(size, size)), SymmetricMatrix(big2.block(size, size)),
          SymmetricMatrix(big4.block(size, size)), p2};
}

std::vector<double> harmonic_functions(std::size_t size, double frequency, double x) {
  if (size == 0) throw std::invalid_argument("harmonic_functions: size must be positive");
  if (!(frequency > 0.0)) throw std::invalid_argument("harmonic_functions: frequency must be positive");
  const double xi = std::sqrt(frequency) * x;
  std::vector<double> phi(size);
  phi[0] = std::pow(frequency / std::numbers::pi, 0.25) * std::exp(-0.5 * xi * xi);
  if (size > 1) phi[1] = std::sqrt(2.0) * xi * phi[0];
  for (std::size_t n = 1; n + 1 < size; ++n) {
    const double dn = static_cast<double>(n);
    phi[n + 1] = std::sqrt(2.0 / (dn + 1.0)) * xi * phi[n] - std::sqrt(dn / (dn + 1.0)) * phi[n - 1];
  }
  return phi;
}

double outer_turning_point(double barrier, double energy) {
  if (!(barrier > 0.0)) throw std::invalid_argument("outer_turning_point: barrier must be positive");
  if (!(energy > -barrier)) throw std::invalid_argument("outer_turning_point: energy below the well bottom");
  // x^4/(64D) - x^2/4 = E  =>  x^2 = 8D (1 + sqrt(1 + E/D))
  return std::sqrt(8.0 * barrier * (1.0 + std::sqrt(1.0 + energy / barrier)));
}

SymmetricMatrix build_hamiltonian(const QuarticConfig& cfg) {
  cfg.validate();
  const HarmonicOperators ops = ho_operators(cfg.basis_size, cfg.basis_frequency);
  return 0.5 * ops.p2 + (-0.25) * ops.x2 + (1.0 / (64.0 * cfg.barrier)) * ops.x4;
}

BasisOptimum optimize_basis_frequency(const HamiltonianFamily& family, std::size_t n_keep, double lo,
                                      double hi, double tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("optimize_basis_frequency: bad interval");
  if (n_keep == 0) throw std::invalid_argument("optimize_basis_frequency: n_keep must be >= 1");

  BasisOptimum out{0.0, 0.0, {}};
  auto eval = [&](double w) {
    const SymmetricMatrix h = family(w);
    if (n_keep > h.dim()) throw std::invalid_argument("optimize_basis_frequency: n_keep exceeds basis");
    const double s = lowest_sum(h, n_keep);
    out.probes.push_back({w, s});
    return s;
  };

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }

  const auto best = std::min_element(out.probes.begin(), out.probes.end(),
                                     [](const FrequencyProbe& l, const FrequencyProbe& r) {
                                       return l.eigenvalue_sum < r.eigenvalue_sum;
                                     });
  out.frequency = best->frequency;
  out.eigenvalue_sum = best->eigenvalue_sum;

  const double edge = 10.0 * tol;
  if (out.frequency - lo < edge || hi - out.frequency < edge) {
    std::ostringstream msg;
    msg << "optimize_basis_frequency: minimum at interval boundary (" << out.frequency << " in ["
        << lo << ", " << hi << "])";
    throw NumericalError(msg.str());
  }
  return out;
}

BasisOptimum optimize_basis_frequency(const QuarticConfig& cfg, std::size_t n_keep) {
  cfg.validate();
  if (3 * n_keep > cfg.basis_size)
    throw std::invalid_argument("optimize_basis_frequency: n_keep must be <= M/3");
  return optimize_basis_frequency(
      [cfg](double w) {
        QuarticConfig trial = cfg;
        trial.basis_frequency = w;
        return build_hamiltonian(trial);
      },
      n_keep);
}

Spectrum solve_spectrum(const QuarticConfig& cfg, std::size_t n_levels) {
  cfg.validate();
  const std::size_t m = cfg.basis_size;
  if (n_levels == 0 || n_levels + 10 > m)
    throw std::invalid_argument("solve_spectrum: n_levels must be in [1, M - 10]");

  const HarmonicOperators ops = ho_operators(m, cfg.basis_frequency);
  const SymmetricMatrix h =
      0.5 * ops.p2 + (-0.25) * ops.x2 + (1.0 / (64.0 * cfg.barrier)) * ops.x4;
  const EigenDecomposition eig = jacobi_eigh(h);

  Spectrum s;
  s.basis_frequency = cfg.basis_frequency;
  s.energies.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + n_levels);
  s.basis_coefficients = RealMatrix(n_levels, m);
  s.parities.resize(n_levels);

  for (std::size_t k = 0; k < n_levels; ++k) {
    const double x_turn = outer_turning_point(cfg.barrier, s.energies[k]);
    const std::vector<double> phi = harmonic_functions(m, cfg.basis_frequency, x_turn);
    double value = 0.0;
    for (std::size_t n = 0; n < m; ++n) value += phi[n] * eig.eigenvectors(n, k);
    if (!(std::abs(value) >= 1e-12)) {
      std::ostringstream msg;
      msg << "solve_spectrum: gauge fixing failed for level " << k + 1 << " (|psi(" << x_turn
          << ")| = " << std::abs(value) << ")";
      throw NumericalError(msg.str());
    }
    const double sign = value > 0.0 ? 1.0 : -1.0;
    double even = 0.0, odd = 0.0;
    for (std::size_t n = 0; n < m; ++n) {
      const double c = sign * eig.eigenvectors(n, k);
      s.basis_coefficients(k, n) = c;
      (n % 2 == 0 ? even : odd) += c * c;
    }
    s.parities[k] = even >= odd ? 1 : -1;
  }

  // X = V^T x V over the kept levels.
  const RealMatrix& v = s.basis_coefficients;
  const RealMatrix xv = ops.x.dense() * v.transposed();
  s.dipole = RealMatrix(n_levels, n_levels);
  for (std::size_t i = 0; i < n_levels; ++i)
    for (std::size_t j = i; j < n_levels; ++j) {
      double acc = 0.0;
      for (std::size_t n = 0; n < m; ++n) acc += v(i, n) * xv(n, j);
      s.dipole(i, j) = acc;
      s.dipole(j, i) = acc;
    }
  return s;
}

Couplings mapped_couplings(const Spectrum& s, const LevelMap& map, double field) {
  auto x = [&](std::size_t a, std::size_t b) { return field * s.dipole_element(map[a], map[b]); };
  return {x(0, 1), x(2, 3), x(0, 3), x(1, 2)};
}

FourLevelExtract extract_four_level(const Spectrum& s, double ratio, const LevelMap& map) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio))
    throw std::invalid_argument("extract_four_level: ratio must be nonnegative");
  for (std::size_t level : map)
    if (level < 1 || level > s.size())
      throw std::invalid_argument("extract_four_level: level map outside spectrum");
  if (s.size() < 6) throw std::invalid_argument("extract_four_level: spectrum needs >= 6 levels");

  const double x12 = s.dipole_element(map[0], map[1]);
  if (std::abs(x12) < 1e-12)
    throw NumericalError("extract_four_level: |<1|x|2>| below 1e-12");

  const double omega = s.energy(map[3]) - s.energy(map[0]);
  const double field = ratio * omega / std::abs(x12);
  const std::array<double, 4> energies{s.energy(map[0]), s.energy(map[1]), s.energy(map[2]),
                                       s.energy(map[3])};

  const Couplings unit = mapped_couplings(s, map, 1.0);
  const double strong = std::min(std::abs(unit.c12), std::abs(unit.c34));
  const double weak = std::max(std::abs(unit.c14), std::abs(unit.c23));

  return {map, BareParams(energies, mapped_couplings(s, map, field), omega), field, omega,
          weak > 0.0 ? strong / weak : std::numeric_limits<double>::infinity()};
}

void write_energies_csv(const Spectrum& s, std::ostream& out) {
  out << "index,energy,parity\n";
  char buf[64];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", s.energies[i]);
    out << i + 1 << ',' << buf << ',' << s.parities[i] << '\n';
  }
}

void write_dipole_csv(const Spectrum& s, std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", s.dipole(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace doublets
