// SPDX-License-Identifier: Apache-2.0
// Vector kernels against the scalar reference.
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "pvbf/simd.hpp"
#include "test_support.hpp"

using namespace pvbf;

namespace {

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("vector kernels match the scalar reference") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  const simd::KernelTable* vec = simd::vector_kernels();
  if (!vec) {
    MESSAGE("no vector kernels on this machine; only the scalar path is exercised");
    vec = &ref;
  }
  Rng rng(7);
  // Lengths straddle every unroll width and tail case.
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 65u, 1000u, 1003u}) {
    CAPTURE(n);
    const auto a = testing::random_vector(n, rng, -3.0, 3.0);
    const auto b = testing::random_vector(n, rng, -3.0, 3.0);
    auto den = testing::random_vector(n, rng, 0.5, 2.0);

    const double d_ref = ref.dot(a.data(), b.data(), n);
    const double d_vec = vec->dot(a.data(), b.data(), n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::fabs(a[i] * b[i]);
    CHECK(std::fabs(d_ref - d_vec) <= 1e-14 * std::max(scale, 1.0));

    std::vector<double> y_ref = b, y_vec = b;
    ref.axpy(-0.37, a.data(), y_ref.data(), n);
    vec->axpy(-0.37, a.data(), y_vec.data(), n);
    CHECK(bitwise_equal(y_ref, y_vec));

    std::vector<double> o_ref(n), o_vec(n);
    ref.abs_diff(a.data(), b.data(), o_ref.data(), n);
    vec->abs_diff(a.data(), b.data(), o_vec.data(), n);
    CHECK(bitwise_equal(o_ref, o_vec));

    ref.divide(a.data(), den.data(), o_ref.data(), n);
    vec->divide(a.data(), den.data(), o_vec.data(), n);
    CHECK(bitwise_equal(o_ref, o_vec));
  }
}

TEST_CASE("abs_diff clears the sign of negative zero") {
  const double a[] = {0.0, -1.0, 1.0, -0.0, 2.0};
  const double b[] = {0.0, 1.0, -1.0, 0.0, 2.0};
  double out[5];
  for (const simd::KernelTable* t : {&simd::scalar_kernels(), simd::vector_kernels()}) {
    if (!t) continue;
    t->abs_diff(a, b, out, 5);
    for (double v : out) CHECK_FALSE(std::signbit(v));
  }
}

TEST_CASE("kernel selection") {
  CHECK(simd::select_kernels("scalar"));
  CHECK(std::string(simd::active_kernels().name) == "scalar");
  CHECK_FALSE(simd::select_kernels("no-such-isa"));
  CHECK(simd::select_kernels("auto"));
  if (simd::vector_kernels()) CHECK(std::string(simd::active_kernels().name) == simd::vector_kernels()->name);
}

TEST_CASE("span wrappers reject length mismatch") {
  std::vector<double> a(3), b(4);
  CHECK_THROWS(simd::dot(a, b));
  CHECK_THROWS(simd::axpy(1.0, a, b));
}
