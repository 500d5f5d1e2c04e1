// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dense double-precision kernels used by the training loop.
//
// Every kernel has a portable scalar reference. Vector variants (AVX2 on
// x86-64, NEON on aarch64) are compiled when the target supports them and
// picked at runtime. Elementwise kernels (axpy, abs_diff, divide) round
// identically to the scalar reference; dot() reassociates its sum and is
// only equal to the reference up to rounding.
//
// The environment variable PVBF_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace pvbf::simd {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // out[i] = |a[i] - b[i]|
  void (*abs_diff)(const double* a, const double* b, double* out, std::size_t n);
  // out[i] = num[i] / den[i]
  void (*divide)(const double* num, const double* den, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Vector table for this build, or nullptr when none was compiled in or the
/// running CPU lacks the instruction set.
const KernelTable* vector_kernels();

/// Table in use. Resolved once on first call.
const KernelTable& active_kernels();

/// Overrides the active table ("scalar", "avx2", "neon" or "auto").
/// Returns false when the requested variant is unavailable.
bool select_kernels(std::string_view name);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double a, std::span<const double> x, std::span<double> y);
void abs_diff(std::span<const double> a, std::span<const double> b, std::span<double> out);
void divide(std::span<const double> num, std::span<const double> den, std::span<double> out);

}  // namespace pvbf::simd
