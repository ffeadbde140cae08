#include "fplap/pair_kernels.hpp"

// This translation unit is the only one compiled with -mavx2 -mfma. Kernels
// exist for the exponents whose |d|^{p-2} d factor reduces to sqrt/multiply
// forms (hardware sqrt is correctly rounded, so these track the scalar
// std::pow reference to a few ulp per term).

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

#include "fplap/summation.hpp"

namespace fplap::kern::detail {

namespace {

enum class Form { p15, p2, p25, p3, p4 };

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline __m256d signbit_pd(__m256d x) {
  return _mm256_and_pd(_mm256_set1_pd(-0.0), x);
}

template <Form F>
inline __m256d phi(__m256d d) {
  if constexpr (F == Form::p15)  // sign(d) |d|^{1/2}
    return _mm256_or_pd(_mm256_sqrt_pd(abs_pd(d)), signbit_pd(d));
  else if constexpr (F == Form::p2)
    return d;
  else if constexpr (F == Form::p25)  // d |d|^{1/2}
    return _mm256_mul_pd(d, _mm256_sqrt_pd(abs_pd(d)));
  else if constexpr (F == Form::p3)  // |d| d
    return _mm256_mul_pd(abs_pd(d), d);
  else  // p4: d^3
    return _mm256_mul_pd(_mm256_mul_pd(d, d), d);
}

template <Form F>
inline double phi1(double d) {
  if constexpr (F == Form::p15)
    return std::copysign(std::sqrt(std::fabs(d)), d);
  else if constexpr (F == Form::p2)
    return d;
  else if constexpr (F == Form::p25)
    return d * std::sqrt(std::fabs(d));
  else if constexpr (F == Form::p3)
    return std::fabs(d) * d;
  else
    return (d * d) * d;
}

// Four independent Neumaier lanes; drained into a scalar accumulator in lane
// order so a given n always reduces in the same order.
struct VNeumaier {
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();

  inline void add(__m256d x) {
    const __m256d t = _mm256_add_pd(s, x);
    const __m256d ge = _mm256_cmp_pd(abs_pd(s), abs_pd(x), _CMP_GE_OQ);
    const __m256d lost_big = _mm256_add_pd(_mm256_sub_pd(s, t), x);
    const __m256d lost_small = _mm256_add_pd(_mm256_sub_pd(x, t), s);
    c = _mm256_add_pd(c, _mm256_blendv_pd(lost_small, lost_big, ge));
    s = t;
  }

  void drain(NeumaierSum& out) const {
    alignas(32) double sv[4];
    alignas(32) double cv[4];
    _mm256_store_pd(sv, s);
    _mm256_store_pd(cv, c);
    for (int k = 0; k < 4; ++k) {
      out.add(sv[k]);
      out.add(cv[k]);
    }
  }
};

// The diagonal term (j == i) is kept in the loop: d = 0 makes phi exactly 0
// for every form here, and w_ii = 0 besides.
template <Form F>
double pair_sum_impl(const double* u, const double* v, const double* w,
                     std::size_t n, double) {
  VNeumaier vec;
  NeumaierSum tail;
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n; ++i) {
    const __m256d ui = _mm256_set1_pd(u[i]);
    const __m256d vi = _mm256_set1_pd(v[i]);
    const double* wrow = w + i * n;
    std::size_t j = 0;
    for (; j < n4; j += 4) {
      const __m256d du = _mm256_sub_pd(ui, _mm256_loadu_pd(u + j));
      const __m256d dv = _mm256_sub_pd(vi, _mm256_loadu_pd(v + j));
      const __m256d ww = _mm256_loadu_pd(wrow + j);
      vec.add(_mm256_mul_pd(_mm256_mul_pd(phi<F>(du), dv), ww));
    }
    for (; j < n; ++j)
      tail.add(phi1<F>(u[i] - u[j]) * (v[i] - v[j]) * wrow[j]);
  }
  NeumaierSum total;
  vec.drain(total);
  total.merge(tail);
  return total.value();
}

template <Form F>
void row_sums_impl(const double* u, const double* w, std::size_t n, double,
                   double* out) {
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < n; ++i) {
    VNeumaier vec;
    NeumaierSum row;
    const __m256d ui = _mm256_set1_pd(u[i]);
    const double* wrow = w + i * n;
    std::size_t j = 0;
    for (; j < n4; j += 4) {
      const __m256d du = _mm256_sub_pd(ui, _mm256_loadu_pd(u + j));
      vec.add(_mm256_mul_pd(phi<F>(du), _mm256_loadu_pd(wrow + j)));
    }
    for (; j < n; ++j)
      row.add(phi1<F>(u[i] - u[j]) * wrow[j]);
    NeumaierSum total;
    vec.drain(total);
    total.merge(row);
    out[i] = total.value();
  }
}

}  // namespace

bool avx2_compiled() { return true; }

bool avx2_cpu() { return __builtin_cpu_supports("avx2"); }

bool avx2_try_select(double p, PairKernels& out) {
  if (!avx2_cpu()) return false;
  if (p == 1.5)
    out = {pair_sum_impl<Form::p15>, row_sums_impl<Form::p15>, Backend::avx2};
  else if (p == 2.0)
    out = {pair_sum_impl<Form::p2>, row_sums_impl<Form::p2>, Backend::avx2};
  else if (p == 2.5)
    out = {pair_sum_impl<Form::p25>, row_sums_impl<Form::p25>, Backend::avx2};
  else if (p == 3.0)
    out = {pair_sum_impl<Form::p3>, row_sums_impl<Form::p3>, Backend::avx2};
  else if (p == 4.0)
    out = {pair_sum_impl<Form::p4>, row_sums_impl<Form::p4>, Backend::avx2};
  else
    return false;
  return true;
}

}

#else  // no AVX2 in this build: dispatch falls through to scalar

namespace fplap::kern::detail {
bool avx2_compiled() { return false; }
bool avx2_cpu() { return false; }
bool avx2_try_select(double, PairKernels&) { return false; }
}

#endif
