#pragma once

// Driven two-doublet model: bare Hamiltonian, field-renormalized parameters,
// closed-form rotating-frame amplitudes, the time-periodic renormalized basis
// and the split of the rotated Hamiltonian into a constant part plus an
// oscillating remainder.
//
// State ordering everywhere is |1>, |2> (lower doublet), |3>, |4> (upper
// doublet), stored at indices 0..3. Units have hbar = 1.

#include <array>
#include <complex>

#include "doublets/numerics.hpp"

namespace doublets {

using State4 = std::array<cplx, 4>;
using Matrix4 = std::array<std::array<double, 4>, 4>;
using Matrix4c = std::array<std::array<cplx, 4>, 4>;

/// Signed field couplings Omega_ij (field amplitude times dipole element).
struct Couplings {
  double c12 = 0.0;  // lower doublet, intra
  double c34 = 0.0;  // upper doublet, intra
  double c14 = 0.0;  // inter-doublet
  double c23 = 0.0;  // inter-doublet
};

/// Bare four-level parameters. Energies are shifted on construction so that
/// the lower-doublet midpoint (E1+E2)/2 sits at zero.
class BareParams {
 public:
  /// Throws std::invalid_argument unless all values are finite, omega > 0,
  /// E2 >= E1, E4 >= E3 and the doublet gap is positive.
  BareParams(std::array<double, 4> energies, Couplings couplings, double omega);

  const std::array<double, 4>& energies() const { return energies_; }
  /// Amount subtracted from the input energies.
  double energy_offset() const { return offset_; }
  const Couplings& couplings() const { return couplings_; }
  double omega() const { return omega_; }

  double lower_splitting() const { return energies_[1] - energies_[0]; }
  double upper_splitting() const { return energies_[3] - energies_[2]; }
  /// Distance between the doublet midpoints.
  double doublet_gap() const { return 0.5 * (energies_[2] + energies_[3]); }

  /// Same energies and frequency, different couplings.
  BareParams with_couplings(Couplings c) const;

 private:
  std::array<double, 4> energies_;
  Couplings couplings_;
  double omega_;
  double offset_;
};

struct RegimeReport {
  double lower_splitting_ratio;  // Delta0' / omega
  double upper_splitting_ratio;  // Delta0'' / omega
  double coupling_14_ratio;      // |Omega14| / omega
  double coupling_23_ratio;      // |Omega23| / omega
  double detuning_ratio;         // |Delta - omega| / omega
  double threshold;
  bool within_validity;
};

struct RenormalizedParams {
  double lower_splitting;          // Delta0' J0(2 Omega12/omega)
  double upper_splitting;          // Delta0'' J0(2 Omega34/omega)
  double rabi_14;                  // Omega14^R (= Omega_+^R)
  double rabi_23;                  // Omega23^R (= Omega_-^R)
  std::array<double, 4> energies;  // E_i^R
  double detuning_14;              // E4R - E1R - omega
  double detuning_23;              // E3R - E2R - omega
  double generalized_rabi_14;
  double generalized_rabi_23;
  double doublet_gap;
  double omega;
};

/// Bessel arguments of the oscillating part of the rotated Hamiltonian.
struct OscillatingTerm {
  double zeta_lower;  // 2 Omega12 / omega
  double zeta_upper;  // 2 Omega34 / omega
  double zeta_plus;   // (zeta_lower + zeta_upper) / 2
  double zeta_minus;  // (zeta_lower - zeta_upper) / 2
  int truncation;     // highest Bessel order kept

  static constexpr int kDefaultTruncation = 40;
};

OscillatingTerm oscillating_term(const BareParams& p,
                                 int truncation = OscillatingTerm::kDefaultTruncation);

struct Phases {
  double lower;  // phi'  = (Omega12/omega) sin(omega t)
  double upper;  // phi'' = (Omega34/omega) sin(omega t)
  double plus;   // phi' + phi''
  double minus;  // phi' - phi''
};

Phases phases(const BareParams& p, double t);

RenormalizedParams renormalize(const BareParams& p);

RegimeReport validate_regime(const BareParams& p, double threshold = 0.1);

/// Rotating-frame amplitudes c'_i(t) under the constant Hamiltonian H0'.
/// Requires |c0| = 1 within 1e-10 (std::invalid_argument otherwise).
State4 analytic_amplitudes(const RenormalizedParams& r, const State4& c0, double t);

/// The renormalized states |i'(t)> expanded in the bare basis (global phase
/// exp(-i(E1+E2)t/2) omitted).
std::array<State4, 4> renormalized_basis(const BareParams& p, double t);

/// Bare-basis amplitudes of sum_i c'_i(t) |i'(t)>.
State4 compose_solution(const BareParams& p, const RenormalizedParams& r, const State4& c0, double t);

/// Populations |<i'(t)|psi>|^2.
std::array<double, 4> project_renormalized(const BareParams& p, const State4& psi, double t);

/// Constant part H0' of the rotated Hamiltonian.
Matrix4 h0_matrix(const RenormalizedParams& r);

/// Oscillating remainder H1'(t), Bessel sums truncated at order o.truncation.
Matrix4c h1_matrix(const OscillatingTerm& o, const BareParams& p, double t);

/// Rotated Hamiltonian H'(t) evaluated exactly from the phases.
Matrix4c rotated_hamiltonian(const BareParams& p, double t);

/// Lab-frame Hamiltonian with cos(omega t) drive on all four couplings.
Matrix4 lab_hamiltonian(const BareParams& p, double t);

double populations_sum(const std::array<double, 4>& pops);
std::array<double, 4> populations(const State4& s);

}  // namespace doublets
