#pragma once

#include <cstddef>
#include <string>

namespace fplap::kern {

// The two inner loops every energy/gradient/operator evaluation reduces to.
// `w` is a dense row-major n-by-n symmetric weight matrix with zero diagonal.
//
//   pair_sum:  sum over ordered pairs (i,j), i != j, of
//              |u_i - u_j|^{p-2} (u_i - u_j) (v_i - v_j) w_ij
//   row_sums:  out_i = sum_j |u_i - u_j|^{p-2} (u_i - u_j) w_ij
//
// Both use per-accumulator Neumaier compensation. The scalar versions are the
// reference; the AVX2 versions cover exponents p whose |d|^{p-2} d factor has
// an exact sqrt/multiply form and are equivalence-tested against scalar.

enum class Backend { scalar, avx2 };
enum class BackendMode { automatic, force_scalar, force_avx2 };

struct PairKernels {
  double (*pair_sum)(const double* u, const double* v, const double* w,
                     std::size_t n, double p);
  void (*row_sums)(const double* u, const double* w, std::size_t n, double p,
                   double* out);
  Backend backend;
};

/// True when this build carries the AVX2 translation unit and the CPU has it.
bool avx2_available();

/// Exponents with a dedicated vector form: p in {1.5, 2, 2.5, 3, 4}.
bool vector_form_available(double p);

void set_backend_mode(BackendMode mode);
BackendMode backend_mode();

/// Resolve the kernels for exponent p under the current mode. force_avx2
/// throws std::invalid_argument when the CPU or the exponent rules it out.
PairKernels select(double p);

const char* backend_name(Backend b);
BackendMode parse_backend_mode(const std::string& name);
const char* backend_mode_name(BackendMode m);

namespace detail {
double scalar_pair_sum(const double* u, const double* v, const double* w,
                       std::size_t n, double p);
void scalar_row_sums(const double* u, const double* w, std::size_t n, double p,
                     double* out);
bool avx2_compiled();
bool avx2_cpu();
// Fills `out` when an AVX2 kernel exists for p; returns false otherwise.
bool avx2_try_select(double p, PairKernels& out);
}

}
