// AVX2 variants. This translation unit is compiled with -mavx2 and must only
// be entered after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <cstddef>

#include "kernels_internal.hpp"
#include "votedyn/kernels.hpp"

namespace votedyn::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void polyval_avx2(std::span<const double> coeffs, std::span<const double> x,
                  std::span<double> out) {
  const std::size_t m = coeffs.size();
  const std::size_t count = x.size();
  if (m == 0) {
    for (std::size_t i = 0; i < count; ++i) out[i] = 0.0;
    return;
  }
  const __m256d top = _mm256_set1_pd(coeffs[m - 1]);
  const __m256d split = _mm256_set1_pd(134217729.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d xs = _mm256_mul_pd(split, xv);
    const __m256d xh = _mm256_sub_pd(xs, _mm256_sub_pd(xs, xv));
    const __m256d xl = _mm256_sub_pd(xv, xh);
    __m256d s = top;
    __m256d comp = _mm256_setzero_pd();
    for (std::size_t k = m - 1; k-- > 0;) {
      const __m256d ck = _mm256_set1_pd(coeffs[k]);
      const __m256d p = _mm256_mul_pd(s, xv);
      const __m256d ss = _mm256_mul_pd(split, s);
      const __m256d sh = _mm256_sub_pd(ss, _mm256_sub_pd(ss, s));
      const __m256d sl = _mm256_sub_pd(s, sh);
      // sl*xl - (((p - sh*xh) - sl*xh) - sh*xl)
      const __m256d perr = _mm256_sub_pd(
          _mm256_mul_pd(sl, xl),
          _mm256_sub_pd(_mm256_sub_pd(_mm256_sub_pd(p, _mm256_mul_pd(sh, xh)), _mm256_mul_pd(sl, xh)),
                        _mm256_mul_pd(sh, xl)));
      const __m256d t = _mm256_add_pd(p, ck);
      const __m256d bb = _mm256_sub_pd(t, p);
      const __m256d serr =
          _mm256_add_pd(_mm256_sub_pd(p, _mm256_sub_pd(t, bb)), _mm256_sub_pd(ck, bb));
      comp = _mm256_add_pd(_mm256_mul_pd(comp, xv), _mm256_add_pd(perr, serr));
      s = t;
    }
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(s, comp));
  }
  scalar_kernels().polyval(coeffs, x.subspan(i), out.subspan(i));
}

void ratio_avx2(std::span<const std::uint32_t> num, std::span<const std::uint32_t> den,
                std::span<double> out) {
  const std::size_t count = num.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m128i bias = _mm_set1_epi32(static_cast<int>(0x80000000U));
  const __m256d offset = _mm256_set1_pd(2147483648.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m128i ni = _mm_loadu_si128(reinterpret_cast<const __m128i*>(num.data() + i));
    const __m128i di = _mm_loadu_si128(reinterpret_cast<const __m128i*>(den.data() + i));
    // cvtepi32 is signed: flip the top bit, convert, then add 2^31 back (all exact).
    const __m256d nv = _mm256_add_pd(_mm256_cvtepi32_pd(_mm_xor_si128(ni, bias)), offset);
    const __m256d dv = _mm256_add_pd(_mm256_cvtepi32_pd(_mm_xor_si128(di, bias)), offset);
    const __m256d is_zero = _mm256_cmp_pd(dv, zero, _CMP_EQ_OQ);
    const __m256d q = _mm256_div_pd(nv, dv);
    _mm256_storeu_pd(out.data() + i, _mm256_blendv_pd(q, zero, is_zero));
  }
  scalar_kernels().ratio(num.subspan(i), den.subspan(i), out.subspan(i));
}

void map_bo3_avx2(double u, std::span<const double> d1, std::span<const double> d2,
                  std::span<double> out1, std::span<double> out2) {
  const std::size_t count = d1.size();
  const __m256d uv = _mm256_set1_pd(u);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(d1.data() + i);
    const __m256d b = _mm256_loadu_pd(d2.data() + i);
    const __m256d ud = _mm256_mul_pd(uv, a);
    const __m256d ud2 = _mm256_mul_pd(ud, ud);
    const __m256d b2 = _mm256_mul_pd(b, b);
    // (ud/2) * ((3 - ud²) - 3 b²)
    const __m256d t1 = _mm256_mul_pd(
        _mm256_mul_pd(ud, half),
        _mm256_sub_pd(_mm256_sub_pd(three, ud2), _mm256_mul_pd(three, b2)));
    // (b/2) * ((3 - 3 ud²) - b²)
    const __m256d t2 = _mm256_mul_pd(
        _mm256_mul_pd(b, half),
        _mm256_sub_pd(_mm256_sub_pd(three, _mm256_mul_pd(three, ud2)), b2));
    _mm256_storeu_pd(out1.data() + i, t1);
    _mm256_storeu_pd(out2.data() + i, t2);
  }
  scalar_kernels().map_bo3(u, d1.subspan(i), d2.subspan(i), out1.subspan(i), out2.subspan(i));
}

void map_bo2_avx2(double u, std::span<const double> d1, std::span<const double> d2,
                  std::span<double> out1, std::span<double> out2) {
  const std::size_t count = d1.size();
  const __m256d uv = _mm256_set1_pd(u);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d lead = _mm256_set1_pd(2.0 * u + 1.0);
  const __m256d cross = _mm256_set1_pd(u * (2.0 + u));
  std::size_t i = 0;
  for (; i + kLanes <= count; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(d1.data() + i);
    const __m256d b = _mm256_loadu_pd(d2.data() + i);
    const __m256d ud = _mm256_mul_pd(uv, a);
    const __m256d b2 = _mm256_mul_pd(b, b);
    // (a/2) * ((lead - ud²) - lead b²)
    const __m256d t1 = _mm256_mul_pd(
        _mm256_mul_pd(a, half),
        _mm256_sub_pd(_mm256_sub_pd(lead, _mm256_mul_pd(ud, ud)), _mm256_mul_pd(lead, b2)));
    // (b/2) * ((3 - cross a²) - b²)
    const __m256d t2 = _mm256_mul_pd(
        _mm256_mul_pd(b, half),
        _mm256_sub_pd(_mm256_sub_pd(three, _mm256_mul_pd(cross, _mm256_mul_pd(a, a))), b2));
    _mm256_storeu_pd(out1.data() + i, t1);
    _mm256_storeu_pd(out2.data() + i, t2);
  }
  scalar_kernels().map_bo2(u, d1.subspan(i), d2.subspan(i), out1.subspan(i), out2.subspan(i));
}

}  // namespace

const KernelTable* avx2_table_if_built() {
  static const KernelTable table{Isa::kAvx2, polyval_avx2, ratio_avx2, map_bo3_avx2,
                                 map_bo2_avx2};
  return &table;
}

}  // namespace votedyn::kernels
