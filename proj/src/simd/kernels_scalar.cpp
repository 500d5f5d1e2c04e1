// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "tables.hpp"

namespace pvbf::simd::detail {
namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_ref(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void abs_diff_ref(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i] - b[i]);
}

void divide_ref(const double* num, const double* den, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = num[i] / den[i];
}

}  // namespace

const KernelTable kScalarTable{"scalar", dot_ref, axpy_ref, abs_diff_ref, divide_ref};

}  // namespace pvbf::simd::detail
