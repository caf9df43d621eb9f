#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// Every variant performs the same IEEE operations in the same order (no fused
// multiply-add, no reassociation), so results are bit-identical across
// variants. The scalar code is the specification; the AVX2 code is tested
// against it element for element.

#include <cstdint>
#include <span>
#include <string_view>

namespace votedyn::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  /// out[i] = Σ_k coeffs[k] x[i]^k, by Horner's rule (ascending coefficients).
  void (*polyval)(std::span<const double> coeffs, std::span<const double> x, std::span<double> out);

  /// out[i] = num[i] / den[i], or 0 where den[i] == 0.
  void (*ratio)(std::span<const std::uint32_t> num, std::span<const std::uint32_t> den,
                std::span<double> out);

  /// Closed-form Best-of-three δ-map on arrays of points.
  void (*map_bo3)(double u, std::span<const double> d1, std::span<const double> d2,
                  std::span<double> out1, std::span<double> out2);

  /// Closed-form Best-of-two δ-map on arrays of points.
  void (*map_bo2)(double u, std::span<const double> d1, std::span<const double> d2,
                  std::span<double> out1, std::span<double> out2);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// The table used by the library: the best supported variant, unless the
/// environment variable VOTEDYN_SIMD=scalar forces the reference path.
const KernelTable& active_kernels();

/// Overrides the active table (tests and benchmarks).
void set_active_isa(Isa isa);

// Scalar single-point forms, shared with the induced-dynamics module.
inline double bo3_t1(double u, double d1, double d2) {
  const double ud = u * d1;
  return (ud * 0.5) * ((3.0 - ud * ud) - 3.0 * (d2 * d2));
}
inline double bo3_t2(double u, double d1, double d2) {
  const double ud = u * d1;
  return (d2 * 0.5) * ((3.0 - 3.0 * (ud * ud)) - d2 * d2);
}
inline double bo2_t1(double u, double d1, double d2) {
  const double ud = u * d1;
  const double a = 2.0 * u + 1.0;
  return (d1 * 0.5) * ((a - ud * ud) - a * (d2 * d2));
}
inline double bo2_t2(double u, double d1, double d2) {
  return (d2 * 0.5) * ((3.0 - (u * (2.0 + u)) * (d1 * d1)) - d2 * d2);
}

}  // namespace votedyn::kernels
