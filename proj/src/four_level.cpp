#include "doublets/four_level.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace doublets {

namespace {

constexpr cplx kI{0.0, 1.0};

bool finite_all(const std::array<double, 4>& e) {
  return std::all_of(e.begin(), e.end(), [](double v) { return std::isfinite(v); });
}

// m += coef * |row><col| + h.c.
void add_hermitian_pair(Matrix4c& m, std::size_t row, std::size_t col, cplx coef) {
  m[row][col] += coef;
  m[col][row] += std::conj(coef);
}

// sin(g t / 2) / g, continuous at g = 0.
double half_angle_sinc(double g, double t) {
  const double x = g * t;
  if (std::abs(x) < 1e-4) {
    const double h = 0.5 * x;
    return 0.5 * t * (1.0 - h * h / 6.0);
  }
  return std::sin(0.5 * x) / g;
}

}  // namespace

BareParams::BareParams(std::array<double, 4> energies, Couplings couplings, double omega)
    : energies_(energies), couplings_(couplings), omega_(omega) {
  if (!finite_all(energies) || !std::isfinite(couplings.c12) || !std::isfinite(couplings.c34) ||
      !std::isfinite(couplings.c14) || !std::isfinite(couplings.c23) || !std::isfinite(omega))
    throw std::invalid_argument("BareParams: all fields must be finite");
  if (!(omega > 0.0)) throw std::invalid_argument("BareParams: omega must be positive");
  if (energies[1] < energies[0]) throw std::invalid_argument("BareParams: requires E2 >= E1");
  if (energies[3] < energies[2]) throw std::invalid_argument("BareParams: requires E4 >= E3");
  offset_ = 0.5 * (energies[0] + energies[1]);
  for (double& e : energies_) e -= offset_;
  if (!(doublet_gap() > 0.0)) throw std::invalid_argument("BareParams: doublet gap must be positive");
}

BareParams BareParams::with_couplings(Couplings c) const {
  BareParams copy = *this;
  copy.couplings_ = c;
  return copy;
}

OscillatingTerm oscillating_term(const BareParams& p, int truncation) {
  if (truncation < 1) throw std::invalid_argument("oscillating_term: truncation must be >= 1");
  const double zl = 2.0 * p.couplings().c12 / p.omega();
  const double zu = 2.0 * p.couplings().c34 / p.omega();
  return {zl, zu, 0.5 * (zl + zu), 0.5 * (zl - zu), truncation};
}

Phases phases(const BareParams& p, double t) {
  const double s = std::sin(p.omega() * t);
  const double lower = p.couplings().c12 / p.omega() * s;
  const double upper = p.couplings().c34 / p.omega() * s;
  return {lower, upper, lower + upper, lower - upper};
}

RenormalizedParams renormalize(const BareParams& p) {
  const Couplings& c = p.couplings();
  const double w = p.omega();
  RenormalizedParams r{};
  r.omega = w;
  r.doublet_gap = p.doublet_gap();
  r.lower_splitting = p.lower_splitting() * bessel_j(0, 2.0 * c.c12 / w);
  r.upper_splitting = p.upper_splitting() * bessel_j(0, 2.0 * c.c34 / w);

  // omega * (a/b) J1(b/omega) == a * J1(x)/x with x = b/omega.
  const double sum_term = (c.c14 + c.c23) * bessel_j1_over_x((c.c12 - c.c34) / w);
  const double diff_term = (c.c14 - c.c23) * bessel_j1_over_x((c.c12 + c.c34) / w);
  r.rabi_14 = sum_term + diff_term;
  r.rabi_23 = sum_term - diff_term;

  r.energies = {-0.5 * r.lower_splitting, 0.5 * r.lower_splitting,
                r.doublet_gap - 0.5 * r.upper_splitting, r.doublet_gap + 0.5 * r.upper_splitting};
  r.detuning_14 = r.energies[3] - r.energies[0] - w;
  r.detuning_23 = r.energies[2] - r.energies[1] - w;
  r.generalized_rabi_14 = std::hypot(r.rabi_14, r.detuning_14);
  r.generalized_rabi_23 = std::hypot(r.rabi_23, r.detuning_23);
  return r;
}

RegimeReport validate_regime(const BareParams& p, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("validate_regime: threshold must be positive");
  const double w = p.omega();
  RegimeReport rep{};
  rep.lower_splitting_ratio = p.lower_splitting() / w;
  rep.upper_splitting_ratio = p.upper_splitting() / w;
  rep.coupling_14_ratio = std::abs(p.couplings().c14) / w;
  rep.coupling_23_ratio = std::abs(p.couplings().c23) / w;
  rep.detuning_ratio = std::abs(p.doublet_gap() - w) / w;
  rep.threshold = threshold;
  rep.within_validity = rep.lower_splitting_ratio <= threshold &&
                        rep.upper_splitting_ratio <= threshold &&
                        rep.coupling_14_ratio <= threshold && rep.coupling_23_ratio <= threshold &&
                        rep.detuning_ratio <= threshold;
  return rep;
}

State4 analytic_amplitudes(const RenormalizedParams& r, const State4& c0, double t) {
  const double n2 = std::norm(c0[0]) + std::norm(c0[1]) + std::norm(c0[2]) + std::norm(c0[3]);
  if (std::abs(n2 - 1.0) > 1e-10)
    throw std::invalid_argument("analytic_amplitudes: initial state is not normalized");

  const double w = r.omega;
  State4 c{};

  // (1,4) pair
  {
    const double g = r.generalized_rabi_14;
    const double d = r.detuning_14;
    const double cs = std::cos(0.5 * g * t);
    const double sn = half_angle_sinc(g, t);
    c[0] = (c0[0] * cs + kI * (c0[0] * d + c0[3] * r.rabi_14) * sn) *
           std::exp(-kI * (0.5 * d + r.energies[0]) * t);
    c[3] = (c0[3] * cs - kI * (c0[3] * d - c0[0] * r.rabi_14) * sn) *
           std::exp(kI * (0.5 * d - r.energies[3] + w) * t);
  }
  // (2,3) pair
  {
    const double g = r.generalized_rabi_23;
    const double d = r.detuning_23;
    const double cs = std::cos(0.5 * g * t);
    const double sn = half_angle_sinc(g, t);
    c[1] = (c0[1] * cs + kI * (c0[1] * d + c0[2] * r.rabi_23) * sn) *
           std::exp(-kI * (0.5 * d + r.energies[1]) * t);
    c[2] = (c0[2] * cs - kI * (c0[2] * d - c0[1] * r.rabi_23) * sn) *
           std::exp(kI * (0.5 * d - r.energies[2] + w) * t);
  }
  return c;
}

std::array<State4, 4> renormalized_basis(const BareParams& p, double t) {
  const Phases ph = phases(p, t);
  const double cl = std::cos(ph.lower), sl = std::sin(ph.lower);
  const double cu = std::cos(ph.upper), su = std::sin(ph.upper);
  const cplx carrier = std::exp(-kI * (p.omega() * t));
  return {{
      {cl, kI * sl, 0.0, 0.0},
      {kI * sl, cl, 0.0, 0.0},
      {0.0, 0.0, carrier * cu, carrier * kI * su},
      {0.0, 0.0, carrier * kI * su, carrier * cu},
  }};
}

State4 compose_solution(const BareParams& p, const RenormalizedParams& r, const State4& c0, double t) {
  const State4 cr = analytic_amplitudes(r, c0, t);
  const auto basis = renormalized_basis(p, t);
  State4 psi{};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) psi[j] += cr[i] * basis[i][j];
  return psi;
}

std::array<double, 4> project_renormalized(const BareParams& p, const State4& psi, double t) {
  const auto basis = renormalized_basis(p, t);
  std::array<double, 4> pops{};
  for (std::size_t i = 0; i < 4; ++i) {
    cplx overlap = 0.0;
    for (std::size_t j = 0; j < 4; ++j) overlap += std::conj(basis[i][j]) * psi[j];
    pops[i] = std::norm(overlap);
  }
  return pops;
}

Matrix4 h0_matrix(const RenormalizedParams& r) {
  Matrix4 h{};
  const double shift = r.doublet_gap - r.omega;
  h[0][0] = -0.5 * r.lower_splitting;
  h[1][1] = 0.5 * r.lower_splitting;
  h[2][2] = shift - 0.5 * r.upper_splitting;
  h[3][3] = shift + 0.5 * r.upper_splitting;
  h[0][3] = h[3][0] = -0.5 * r.rabi_14;
  h[1][2] = h[2][1] = -0.5 * r.rabi_23;
  return h;
}

namespace {

struct Chi {
  cplx c;  // cosine-type coefficient
  cplx s;  // sine-type coefficient
};

// Bessel orders above the truncation are dropped.
std::vector<double> truncated_orders(double zeta, int truncation) {
  std::vector<double> j = bessel_j_orders(std::max(truncation, 2), zeta);
  for (std::size_t k = static_cast<std::size_t>(truncation) + 1; k < j.size(); ++k) j[k] = 0.0;
  return j;
}

// Oscillating parts of cos(zeta sin wt) and sin(zeta sin wt).
struct DoubletSeries {
  double cos_part;  // sum_{n>=1} J_2n cos(2n wt)
  double sin_part;  // sum_{n>=0} J_{2n+1} sin((2n+1) wt)
};

DoubletSeries doublet_series(const std::vector<double>& j, int truncation, double wt) {
  DoubletSeries out{0.0, 0.0};
  for (int k = 1; k <= truncation; ++k) {
    if (k % 2 == 0)
      out.cos_part += j[k] * std::cos(k * wt);
    else
      out.sin_part += j[k] * std::sin(k * wt);
  }
  return out;
}

Chi chi(const std::vector<double>& j, int truncation, double wt) {
  const cplx e2 = std::exp(-2.0 * kI * wt);
  cplx cc = 0.5 * e2 * (j[0] + e2 * j[2]);
  for (int n = 1; 2 * n <= truncation; ++n) {
    const cplx weight = n == 1 ? cplx(1.0) : 1.0 + e2;
    cc += weight * j[2 * n] * std::cos(2.0 * n * wt);
  }
  const DoubletSeries ds = doublet_series(j, truncation, wt);
  return {cc, (1.0 + e2) * ds.sin_part};
}

}  // namespace

Matrix4c h1_matrix(const OscillatingTerm& o, const BareParams& p, double t) {
  if (o.truncation < 1) throw std::invalid_argument("h1_matrix: truncation must be >= 1");
  const int n = o.truncation;
  const double wt = p.omega() * t;
  const Couplings& c = p.couplings();
  Matrix4c h{};

  const DoubletSeries lower = doublet_series(truncated_orders(o.zeta_lower, n), n, wt);
  const DoubletSeries upper = doublet_series(truncated_orders(o.zeta_upper, n), n, wt);
  const double dl = p.lower_splitting();
  const double du = p.upper_splitting();

  h[0][0] -= dl * lower.cos_part;
  h[1][1] += dl * lower.cos_part;
  h[1][0] += kI * dl * lower.sin_part;
  h[0][1] -= kI * dl * lower.sin_part;
  h[2][2] -= du * upper.cos_part;
  h[3][3] += du * upper.cos_part;
  h[3][2] += kI * du * upper.sin_part;
  h[2][3] -= kI * du * upper.sin_part;

  const Chi minus = chi(truncated_orders(o.zeta_minus, n), n, wt);
  const Chi plus = chi(truncated_orders(o.zeta_plus, n), n, wt);
  const double sum = c.c23 + c.c14;
  const double diff = c.c23 - c.c14;

  add_hermitian_pair(h, 1, 2, -0.5 * sum * minus.c);
  add_hermitian_pair(h, 0, 3, -0.5 * sum * minus.c);
  add_hermitian_pair(h, 0, 2, -0.5 * sum * (-kI * minus.s));
  add_hermitian_pair(h, 1, 3, -0.5 * sum * (-kI * minus.s));

  add_hermitian_pair(h, 1, 2, -0.5 * diff * plus.c);
  add_hermitian_pair(h, 0, 3, 0.5 * diff * plus.c);
  add_hermitian_pair(h, 0, 2, -0.5 * diff * (-kI * plus.s));
  add_hermitian_pair(h, 1, 3, 0.5 * diff * (-kI * plus.s));
  return h;
}

Matrix4c rotated_hamiltonian(const BareParams& p, double t) {
  const Phases ph = phases(p, t);
  const double wt = p.omega() * t;
  const Couplings& c = p.couplings();
  Matrix4c h{};

  const double hl = 0.5 * p.lower_splitting();
  h[0][0] -= hl * std::cos(2.0 * ph.lower);
  h[1][1] += hl * std::cos(2.0 * ph.lower);
  h[1][0] += kI * hl * std::sin(2.0 * ph.lower);
  h[0][1] -= kI * hl * std::sin(2.0 * ph.lower);

  const double hu = 0.5 * p.upper_splitting();
  h[2][2] -= hu * std::cos(2.0 * ph.upper);
  h[3][3] += hu * std::cos(2.0 * ph.upper);
  h[3][2] += kI * hu * std::sin(2.0 * ph.upper);
  h[2][3] -= kI * hu * std::sin(2.0 * ph.upper);

  const double shift = p.doublet_gap() - p.omega();
  h[2][2] += shift;
  h[3][3] += shift;

  // cos(wt) e^{-iwt}
  const cplx carrier = std::cos(wt) * std::exp(-kI * wt);
  const double sum = c.c14 + c.c23;
  const double diff = c.c23 - c.c14;

  const cplx sm = -0.5 * sum * carrier;
  add_hermitian_pair(h, 1, 2, sm * std::cos(ph.minus));
  add_hermitian_pair(h, 0, 3, sm * std::cos(ph.minus));
  add_hermitian_pair(h, 0, 2, sm * (-kI * std::sin(ph.minus)));
  add_hermitian_pair(h, 1, 3, sm * (-kI * std::sin(ph.minus)));

  const cplx df = -0.5 * diff * carrier;
  add_hermitian_pair(h, 1, 2, df * std::cos(ph.plus));
  add_hermitian_pair(h, 0, 3, -df * std::cos(ph.plus));
  add_hermitian_pair(h, 0, 2, df * (-kI * std::sin(ph.plus)));
  add_hermitian_pair(h, 1, 3, -df * (-kI * std::sin(ph.plus)));
  return h;
}

Matrix4 lab_hamiltonian(const BareParams& p, double t) {
  Matrix4 h{};
  for (std::size_t i = 0; i < 4; ++i) h[i][i] = p.energies()[i];
  const double drive = std::cos(p.omega() * t);
  const Couplings& c = p.couplings();
  h[0][1] = h[1][0] = -c.c12 * drive;
  h[2][3] = h[3][2] = -c.c34 * drive;
  h[0][3] = h[3][0] = -c.c14 * drive;
  h[1][2] = h[2][1] = -c.c23 * drive;
  return h;
}

std::array<double, 4> populations(const State4& s) {
  return {std::norm(s[0]), std::norm(s[1]), std::norm(s[2]), std::norm(s[3])};
}

double populations_sum(const std::array<double, 4>& pops) {
  return std::accumulate(pops.begin(), pops.end(), 0.0);
}

}  // namespace doublets
