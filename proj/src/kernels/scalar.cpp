#include <cstddef>

#include "kernels_internal.hpp"
#include "votedyn/kernels.hpp"

namespace votedyn::kernels {
namespace {

void polyval_scalar(std::span<const double> coeffs, std::span<const double> x,
                    std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = compensated_horner(coeffs.data(), coeffs.size(), x[i]);
}

void ratio_scalar(std::span<const std::uint32_t> num, std::span<const std::uint32_t> den,
                  std::span<double> out) {
  for (std::size_t i = 0; i < num.size(); ++i) {
    out[i] = den[i] == 0 ? 0.0 : static_cast<double>(num[i]) / static_cast<double>(den[i]);
  }
}

void map_bo3_scalar(double u, std::span<const double> d1, std::span<const double> d2,
                    std::span<double> out1, std::span<double> out2) {
  for (std::size_t i = 0; i < d1.size(); ++i) {
    const double a = d1[i];
    const double b = d2[i];
    out1[i] = bo3_t1(u, a, b);
    out2[i] = bo3_t2(u, a, b);
  }
}

void map_bo2_scalar(double u, std::span<const double> d1, std::span<const double> d2,
                    std::span<double> out1, std::span<double> out2) {
  for (std::size_t i = 0; i < d1.size(); ++i) {
    const double a = d1[i];
    const double b = d2[i];
    out1[i] = bo2_t1(u, a, b);
    out2[i] = bo2_t2(u, a, b);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, polyval_scalar, ratio_scalar, map_bo3_scalar,
                                 map_bo2_scalar};
  return table;
}

}  // namespace votedyn::kernels
