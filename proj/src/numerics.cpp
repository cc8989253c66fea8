#include "doublets/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace doublets {

// ---------------------------------------------------------------------------
// RealMatrix / SymmetricMatrix

RealMatrix RealMatrix::identity(std::size_t n) {
  RealMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

RealMatrix RealMatrix::operator*(const RealMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("RealMatrix: shape mismatch in product");
  RealMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  return out;
}

RealMatrix RealMatrix::block(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) throw std::invalid_argument("RealMatrix: block exceeds matrix");
  RealMatrix b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = (*this)(i, j);
  return b;
}

SymmetricMatrix::SymmetricMatrix(std::size_t dim) : dim_(dim), dense_(dim, dim) {
  if (dim == 0) throw std::invalid_argument("SymmetricMatrix: dim must be >= 1");
}

SymmetricMatrix::SymmetricMatrix(const RealMatrix& m) : SymmetricMatrix(m.rows()) {
  if (m.rows() != m.cols()) throw std::invalid_argument("SymmetricMatrix: input is not square");
  for (std::size_t i = 0; i < dim_; ++i) {
    dense_(i, i) = m(i, i);
    for (std::size_t j = i + 1; j < dim_; ++j) set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
}

SymmetricMatrix SymmetricMatrix::identity(std::size_t dim) {
  SymmetricMatrix s(dim);
  for (std::size_t i = 0; i < dim; ++i) s.set(i, i, 1.0);
  return s;
}

SymmetricMatrix SymmetricMatrix::diagonal(std::span<const double> diag) {
  SymmetricMatrix s(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) s.set(i, i, diag[i]);
  return s;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double v) {
  dense_(i, j) = v;
  dense_(j, i) = v;
}

double SymmetricMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : dense_.data()) s += v * v;
  return std::sqrt(s);
}

double SymmetricMatrix::max_abs() const {
  double m = 0.0;
  for (double v : dense_.data()) m = std::max(m, std::abs(v));
  return m;
}

SymmetricMatrix& SymmetricMatrix::operator+=(const SymmetricMatrix& rhs) {
  if (rhs.dim_ != dim_) throw std::invalid_argument("SymmetricMatrix: dimension mismatch");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) dense_(i, j) += rhs(i, j);
  return *this;
}

SymmetricMatrix& SymmetricMatrix::operator*=(double s) {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) dense_(i, j) *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Jacobi

namespace {

double off_diagonal_norm(const RealMatrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition jacobi_eigh(const SymmetricMatrix& input, const JacobiOptions& opts) {
  const std::size_t n = input.dim();
  if (n > 2048) throw std::invalid_argument("jacobi_eigh: dimension above 2048");

  RealMatrix a = input.dense();
  RealMatrix v = RealMatrix::identity(n);
  const double tol = opts.relative_tolerance * input.frobenius_norm();

  for (int sweep = 0;; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off <= tol) break;
    if (sweep == opts.max_sweeps) {
      std::ostringstream msg;
      msg << "jacobi_eigh: no convergence after " << opts.max_sweeps
          << " sweeps (off-diagonal norm " << off << ", target " << tol << ")";
      throw NumericalError(msg.str());
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          const double nrp = arp - s * (arq + tau * arp);
          const double nrq = arq + s * (arp - tau * arq);
          a(r, p) = a(p, r) = nrp;
          a(r, q) = a(q, r) = nrq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + tau * vrp);
          v(r, q) = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out{std::vector<double>(n), RealMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bessel

namespace {

constexpr double kSeriesLimit = 12.0;

void check_bessel_args(int n, double x) {
  if (n < 0) throw std::domain_error("bessel_j: order must be nonnegative");
  if (!std::isfinite(x)) throw std::domain_error("bessel_j: argument must be finite");
}

// x >= 0, |x| <= kSeriesLimit
double ascending_series(int n, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; term != 0.0; ++k) {
    term *= q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > half) break;
  }
  return sum;
}

// Miller's downward recurrence normalized by J0 + 2 sum J_2k = 1; x > 0.
std::vector<double> miller(int n_max, double x) {
  const int base = std::max(n_max, static_cast<int>(x));
  const int start = 2 * ((base + 30 + static_cast<int>(std::sqrt(60.0 * base))) / 2);

  std::vector<double> j(static_cast<std::size_t>(n_max) + 1, 0.0);
  double above = 0.0;  // J_{k+1}
  double cur = 1.0;    // J_k
  double norm = 0.0;
  const double two_over_x = 2.0 / x;
  for (int k = start; k >= 1; --k) {
    if (k <= n_max) j[k] = cur;
    if (k % 2 == 0) norm += 2.0 * cur;
    const double below = k * two_over_x * cur - above;
    above = cur;
    cur = below;
    if (std::abs(cur) > 1e250) {
      constexpr double shrink = 1e-250;
      cur *= shrink;
      above *= shrink;
      norm *= shrink;
      for (int i = k; i <= n_max; ++i) j[i] *= shrink;
    }
  }
  j[0] = cur;
  norm += cur;
  for (double& v : j) v /= norm;
  return j;
}

}  // namespace

double bessel_j(int n, double x) {
  check_bessel_args(n, x);
  const double ax = std::abs(x);
  double value;
  if (ax == 0.0) {
    value = n == 0 ? 1.0 : 0.0;
  } else if (ax <= kSeriesLimit) {
    value = ascending_series(n, ax);
  } else {
    value = miller(n, ax)[static_cast<std::size_t>(n)];
  }
  return (x < 0.0 && n % 2 == 1) ? -value : value;
}

std::vector<double> bessel_j_orders(int n_max, double x) {
  check_bessel_args(n_max, x);
  const double ax = std::abs(x);
  std::vector<double> j;
  if (ax == 0.0) {
    j.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    j[0] = 1.0;
  } else if (ax <= kSeriesLimit) {
    j.resize(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) j[n] = ascending_series(n, ax);
  } else {
    j = miller(n_max, ax);
  }
  if (x < 0.0)
    for (int n = 1; n <= n_max; n += 2) j[n] = -j[n];
  return j;
}

double bessel_j1_over_x(double x, double small) {
  if (std::abs(x) < small) {
    const double x2 = x * x;
    return 0.5 - x2 / 16.0 + x2 * x2 / 384.0;
  }
  return bessel_j(1, x) / x;
}

// ---------------------------------------------------------------------------
// ComplexState

ComplexState ComplexState::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("ComplexState::basis: index out of range");
  ComplexState s(dim);
  s[index] = 1.0;
  return s;
}

double ComplexState::norm_squared() const {
  double s = 0.0;
  for (const cplx& a : amps_) s += std::norm(a);
  return s;
}

double ComplexState::norm() const { return std::sqrt(norm_squared()); }

bool ComplexState::all_finite() const {
  return std::all_of(amps_.begin(), amps_.end(), [](const cplx& a) {
    return std::isfinite(a.real()) && std::isfinite(a.imag());
  });
}

// ---------------------------------------------------------------------------
// RK4

namespace {

struct StepPlan {
  std::size_t full_steps;
  double remainder;  // 0 when t1 lands on the grid
};

StepPlan plan_steps(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("rk4: dt must be positive");
  if (!(t1 > t0)) throw std::invalid_argument("rk4: t1 must exceed t0");
  const double span = t1 - t0;
  auto full = static_cast<std::size_t>(std::floor(span / dt));
  double rem = span - static_cast<double>(full) * dt;
  if (rem <= 1e-9 * dt && full > 0) rem = 0.0;
  if (full == 0) rem = span;
  return {full, rem};
}

}  // namespace

std::size_t rk4_step_count(double t0, double t1, double dt) {
  const StepPlan plan = plan_steps(t0, t1, dt);
  return plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
}

void rk4_integrate(const Derivative& deriv, const ComplexState& initial, double t0, double t1,
                   double dt, const StepObserver& observer) {
  const StepPlan plan = plan_steps(t0, t1, dt);
  const std::size_t n = initial.dim();

  std::vector<cplx> y(initial.amplitudes().begin(), initial.amplitudes().end());
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto step = [&](double t, double h) {
    deriv(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    deriv(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    deriv(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    deriv(t + h, tmp, k4);
    const double w = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) y[i] += w * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  };
  auto check = [&](double t) {
    for (const cplx& a : y) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "rk4: non-finite amplitude at t = " << t;
        throw NumericalError(msg.str());
      }
    }
  };

  observer(t0, y);
  for (std::size_t k = 0; k < plan.full_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    step(t, dt);
    const bool last = k + 1 == plan.full_steps && plan.remainder == 0.0;
    const double t_next = last ? t1 : t0 + static_cast<double>(k + 1) * dt;
    check(t_next);
    observer(t_next, y);
  }
  if (plan.remainder > 0.0) {
    step(t0 + static_cast<double>(plan.full_steps) * dt, plan.remainder);
    check(t1);
    observer(t1, y);
  }
}

Trajectory rk4_propagate(const Derivative& deriv, const ComplexState& initial, double t0, double t1,
                         double dt) {
  Trajectory traj;
  const std::size_t samples = rk4_step_count(t0, t1, dt) + 1;
  traj.times.reserve(samples);
  traj.states.reserve(samples);
  rk4_integrate(deriv, initial, t0, t1, dt, [&](double t, std::span<const cplx> y) {
    traj.times.push_back(t);
    traj.states.emplace_back(std::vector<cplx>(y.begin(), y.end()));
  });
  return traj;
}

}  // namespace doublets
