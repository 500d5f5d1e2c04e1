// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <string>

#include "pvbf/errors.hpp"
#include "tables.hpp"

namespace pvbf::simd {
namespace {

const KernelTable* resolve_default() {
  if (const char* env = std::getenv("PVBF_SIMD")) {
    if (std::string_view(env) == "scalar") return &scalar_kernels();
  }
  if (const KernelTable* vec = vector_kernels()) return vec;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{resolve_default()};
  return slot;
}

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw ContractError(std::string(op) + ": length mismatch");
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* vector_kernels() {
#if defined(PVBF_HAVE_AVX2)
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  return has_avx2 ? &detail::kAvx2Table : nullptr;
#elif defined(PVBF_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool select_kernels(std::string_view name) {
  const KernelTable* table = nullptr;
  if (name == "scalar") {
    table = &scalar_kernels();
  } else if (name == "auto") {
    table = vector_kernels() ? vector_kernels() : &scalar_kernels();
  } else if (const KernelTable* vec = vector_kernels(); vec && name == vec->name) {
    table = vec;
  }
  if (!table) return false;
  active_slot().store(table, std::memory_order_release);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  active_kernels().axpy(a, x.data(), y.data(), x.size());
}

void abs_diff(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  require_same_size(a.size(), b.size(), "abs_diff");
  require_same_size(a.size(), out.size(), "abs_diff");
  active_kernels().abs_diff(a.data(), b.data(), out.data(), a.size());
}

void divide(std::span<const double> num, std::span<const double> den, std::span<double> out) {
  require_same_size(num.size(), den.size(), "divide");
  require_same_size(num.size(), out.size(), "divide");
  active_kernels().divide(num.data(), den.data(), out.data(), num.size());
}

}  // namespace pvbf::simd
