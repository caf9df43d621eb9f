#pragma once

#include <cstddef>

#include "votedyn/kernels.hpp"

namespace votedyn::kernels {

// Defined in avx2.cpp when the AVX2 variant is compiled in, otherwise in
// dispatch.cpp as a stub returning nullptr.
const KernelTable* avx2_table_if_built();

// Compensated Horner: the rounding errors of every product and sum are
// captured exactly (Veltkamp split, no fma) and folded back in at the end.
// The best-of-K monomial forms are badly conditioned near x = 1, where plain
// Horner loses up to ~1e-7 for K = 25; this keeps the result within a few ulp.
// The AVX2 kernel repeats these exact operations lane-wise.
inline double compensated_horner(const double* c, std::size_t m, double x) noexcept {
  if (m == 0) return 0.0;
  constexpr double kSplit = 134217729.0;  // 2^27 + 1
  const double xs = kSplit * x;
  const double xh = xs - (xs - x);
  const double xl = x - xh;
  double s = c[m - 1];
  double comp = 0.0;
  for (std::size_t k = m - 1; k-- > 0;) {
    const double p = s * x;
    const double ss = kSplit * s;
    const double sh = ss - (ss - s);
    const double sl = s - sh;
    const double perr = sl * xl - (((p - sh * xh) - sl * xh) - sh * xl);
    const double t = p + c[k];
    const double bb = t - p;
    const double serr = (p - (t - bb)) + (c[k] - bb);
    comp = comp * x + (perr + serr);
    s = t;
  }
  return s + comp;
}

}  // namespace votedyn::kernels
