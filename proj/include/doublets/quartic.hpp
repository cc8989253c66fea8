#pragma once

// Quartic double-well  H = p^2/2 - x^2/4 + x^4/(64 D)  in a truncated
// harmonic-oscillator basis, and the reduction of its lowest doublets to the
// four-level model.

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "doublets/four_level.hpp"
#include "doublets/numerics.hpp"

namespace doublets {

struct QuarticConfig {
  double barrier = 4.0;          // D, roughly the number of doublets below the barrier top
  std::size_t basis_size = 80;   // M
  double basis_frequency = 1.0;  // omega_b of the harmonic basis

  /// Throws std::invalid_argument unless D > 0, M >= 8 and omega_b > 0.
  void validate() const;
};

/// Position, momentum and power matrices in the harmonic basis of frequency
/// omega_b (hbar = m = 1).
struct HarmonicOperators {
  SymmetricMatrix x;
  SymmetricMatrix x2;
  SymmetricMatrix x4;
  SymmetricMatrix p2;
};

/// x^2 and x^4 are products of an (M+4)-sized x, truncated to M x M, so the
/// kept block is exact.
HarmonicOperators ho_operators(std::size_t size, double frequency);

SymmetricMatrix build_hamiltonian(const QuarticConfig& cfg);

struct FrequencyProbe {
  double frequency;
  double eigenvalue_sum;
};

struct BasisOptimum {
  double frequency;
  double eigenvalue_sum;
  std::vector<FrequencyProbe> probes;  // every evaluation, in search order
};

/// Static Hamiltonian as a function of the basis frequency.
using HamiltonianFamily = std::function<SymmetricMatrix(double frequency)>;

/// Golden-section minimization of the sum of the lowest `n_keep` eigenvalues
/// over [lo, hi]. Throws NumericalError when the minimum sits on the
/// interval boundary.
BasisOptimum optimize_basis_frequency(const HamiltonianFamily& family, std::size_t n_keep,
                                      double lo = 0.05, double hi = 5.0, double tol = 1e-6);

/// Quartic overload; requires n_keep <= M/3. cfg.basis_frequency is ignored.
BasisOptimum optimize_basis_frequency(const QuarticConfig& cfg, std::size_t n_keep = 12);

/// Lowest eigenstates of the quartic oscillator. Levels are 1-indexed in the
/// accessors to match |1>, |2>, ... naming.
struct Spectrum {
  std::vector<double> energies;   // ascending
  RealMatrix dipole;              // <i|x|j>, exactly symmetric
  std::vector<int> parities;      // +1 even, -1 odd
  RealMatrix basis_coefficients;  // row i: level i+1 in the harmonic basis
  double basis_frequency = 0.0;

  std::size_t size() const { return energies.size(); }
  double energy(std::size_t level) const { return energies.at(level - 1); }
  double dipole_element(std::size_t i, std::size_t j) const { return dipole(i - 1, j - 1); }
};

/// Normalized harmonic-oscillator functions phi_0..phi_{size-1} at x.
std::vector<double> harmonic_functions(std::size_t size, double frequency, double x);

/// Largest x with V(x) = energy; energy must exceed the well bottom -D.
double outer_turning_point(double barrier, double energy);

/// Eigen-decomposition of build_hamiltonian(cfg), keeping n_levels states
/// (n_levels <= M - 10). Each eigenfunction's sign is fixed so that it is
/// positive at its outer classical turning point, which makes the signed
/// dipole elements independent of the basis frequency and size.
Spectrum solve_spectrum(const QuarticConfig& cfg, std::size_t n_levels = 20);

/// Quartic levels mapped onto model states |1>..|4>.
using LevelMap = std::array<std::size_t, 4>;
inline constexpr LevelMap kDefaultLevelMap{1, 2, 5, 6};

struct FourLevelExtract {
  LevelMap level_map;
  BareParams params;
  double field;  // lambda
  double omega;

  /// min(|X12|, |X34|) / max(|X14|, |X23|) over the mapped dipoles.
  double dipole_hierarchy = 0.0;
};

/// omega = E(map[3]) - E(map[0]); lambda = ratio * omega / |X12|;
/// Omega_ij = lambda <i|x|j>. Throws NumericalError for |X12| < 1e-12.
FourLevelExtract extract_four_level(const Spectrum& s, double ratio,
                                    const LevelMap& level_map = kDefaultLevelMap);

/// Couplings lambda * <i|x|j> over the mapped levels.
Couplings mapped_couplings(const Spectrum& s, const LevelMap& level_map, double field);

/// CSV with header `index,energy,parity`.
void write_energies_csv(const Spectrum& s, std::ostream& out);
/// Dense dipole matrix, one comma-separated row per state.
void write_dipole_csv(const Spectrum& s, std::ostream& out);

}  // namespace doublets
