#pragma once

// Test-only reference implementations, independent of the library code paths.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using big = boost::multiprecision::cpp_bin_float_50;

// Ascending series for J_n(x) carried in 50 decimal digits.
inline double bessel_j(int n, double x) {
  const big half = big(x) / 2;
  big term = 1;
  for (int k = 1; k <= n; ++k) term *= half / k;
  big sum = term;
  const big q = -half * half;
  for (int k = 1; k < 400; ++k) {
    term *= q / (big(k) * big(k + n));
    sum += term;
    if (abs(term) < big("1e-40") * (abs(sum) + big("1e-300"))) break;
  }
  return static_cast<double>(sum);
}

}  // namespace oracle
