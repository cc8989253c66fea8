#pragma once

// Numerical kernels shared by the analytic model and the exact propagation:
// Bessel functions of the first kind, a cyclic Jacobi eigensolver for dense
// real-symmetric matrices, and a fixed-step RK4 integrator for complex
// amplitude vectors.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace doublets {

using cplx = std::complex<double>;

/// Raised when a numerical procedure cannot deliver a trustworthy result
/// (non-convergence, non-finite values, norm drift).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Dense matrices

/// Row-major dense real matrix.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static RealMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }

  RealMatrix transposed() const;
  RealMatrix operator*(const RealMatrix& rhs) const;

  /// Leading block of the given size.
  RealMatrix block(std::size_t rows, std::size_t cols) const;

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense real-symmetric matrix. Symmetry is exact: construction from a
/// general matrix symmetrizes, and `set` writes both triangles.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t dim);
  /// Symmetrizes `m` as (m + m^T)/2; `m` must be square.
  explicit SymmetricMatrix(const RealMatrix& m);

  static SymmetricMatrix identity(std::size_t dim);
  static SymmetricMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return dense_(i, j); }
  void set(std::size_t i, std::size_t j, double v);

  const RealMatrix& dense() const { return dense_; }
  double frobenius_norm() const;
  double max_abs() const;

  SymmetricMatrix& operator+=(const SymmetricMatrix& rhs);
  SymmetricMatrix& operator*=(double s);
  friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
  friend SymmetricMatrix operator*(double s, SymmetricMatrix a) { return a *= s; }
  friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    return a.dense_ == b.dense_;
  }

 private:
  std::size_t dim_;
  RealMatrix dense_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  RealMatrix eigenvectors;          // column k belongs to eigenvalues[k]
};

struct JacobiOptions {
  int max_sweeps = 100;
  double relative_tolerance = 1e-12;  // off-diagonal Frobenius norm vs ||A||_F
};

/// Cyclic Jacobi diagonalization. Eigenvalues come back ascending; equal
/// eigenvalues keep the order of their diagonal positions.
/// Throws NumericalError (with the final off-diagonal residual) if the sweep
/// cap is hit first.
EigenDecomposition jacobi_eigh(const SymmetricMatrix& a, const JacobiOptions& opts = {});

// ---------------------------------------------------------------------------
// Bessel functions

/// J_n(x) for integer n >= 0. Ascending series for |x| <= 12, Miller's
/// normalized downward recurrence otherwise. Throws std::domain_error for
/// n < 0 or non-finite x.
double bessel_j(int n, double x);

/// J_0(x) ... J_{n_max}(x) from a single evaluation pass.
std::vector<double> bessel_j_orders(int n_max, double x);

/// J_1(x)/x, continuous through x = 0 (even Taylor series for |x| < small).
double bessel_j1_over_x(double x, double small = 1e-6);

// ---------------------------------------------------------------------------
// Complex states and RK4

/// Vector of complex probability amplitudes.
class ComplexState {
 public:
  ComplexState() = default;
  explicit ComplexState(std::size_t dim) : amps_(dim) {}
  ComplexState(std::initializer_list<cplx> amps) : amps_(amps) {}
  explicit ComplexState(std::vector<cplx> amps) : amps_(std::move(amps)) {}

  static ComplexState basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amps_.size(); }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  std::span<cplx> amplitudes() { return amps_; }
  std::span<const cplx> amplitudes() const { return amps_; }

  double norm_squared() const;
  double norm() const;
  bool all_finite() const;

  friend bool operator==(const ComplexState&, const ComplexState&) = default;

 private:
  std::vector<cplx> amps_;
};

/// Writes dc/dt for the state at time t into `out` (same dimension).
using Derivative = std::function<void(double t, std::span<const cplx> state, std::span<cplx> out)>;

/// Called after every accepted step (and once for the initial state).
using StepObserver = std::function<void(double t, std::span<const cplx> state)>;

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexState> states;
};

/// Number of RK4 steps covering [t0, t1] with nominal step dt (the last step
/// may be shorter).
std::size_t rk4_step_count(double t0, double t1, double dt);

/// Classical fixed-step RK4 from t0 to t1, reporting every step to
/// `observer`. The grid is t0 + k*dt; the last step is shrunk so t1 is hit
/// exactly. Throws NumericalError naming the time if an amplitude turns
/// non-finite, std::invalid_argument for dt <= 0 or t1 <= t0.
void rk4_integrate(const Derivative& deriv, const ComplexState& initial, double t0, double t1,
                   double dt, const StepObserver& observer);

/// Same as rk4_integrate but returns every sampled state.
Trajectory rk4_propagate(const Derivative& deriv, const ComplexState& initial, double t0, double t1,
                         double dt);

}  // namespace doublets
