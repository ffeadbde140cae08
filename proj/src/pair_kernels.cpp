#include "fplap/pair_kernels.hpp"

#include <stdexcept>

namespace fplap::kern {

namespace {
BackendMode g_mode = BackendMode::automatic;
}

bool avx2_available() { return detail::avx2_compiled() && detail::avx2_cpu(); }

bool vector_form_available(double p) {
  return p == 1.5 || p == 2.0 || p == 2.5 || p == 3.0 || p == 4.0;
}

void set_backend_mode(BackendMode mode) { g_mode = mode; }

BackendMode backend_mode() { return g_mode; }

PairKernels select(double p) {
  PairKernels k{detail::scalar_pair_sum, detail::scalar_row_sums,
                Backend::scalar};
  switch (g_mode) {
    case BackendMode::force_scalar:
      return k;
    case BackendMode::force_avx2:
      if (!avx2_available())
        throw std::invalid_argument(
            "kernel_backend=avx2 requested but AVX2 is not available on this "
            "machine/build");
      if (!detail::avx2_try_select(p, k))
        throw std::invalid_argument(
            "kernel_backend=avx2 requested but no AVX2 kernel exists for p=" +
            std::to_string(p) + " (supported: 1.5, 2, 2.5, 3, 4)");
      return k;
    case BackendMode::automatic:
    default:
      detail::avx2_try_select(p, k);  // keeps scalar on any failure
      return k;
  }
}

const char* backend_name(Backend b) {
  return b == Backend::avx2 ? "avx2" : "scalar";
}

const char* backend_mode_name(BackendMode m) {
  switch (m) {
    case BackendMode::force_scalar: return "scalar";
    case BackendMode::force_avx2: return "avx2";
    default: return "auto";
  }
}

BackendMode parse_backend_mode(const std::string& name) {
  if (name == "auto") return BackendMode::automatic;
  if (name == "scalar") return BackendMode::force_scalar;
  if (name == "avx2") return BackendMode::force_avx2;
  throw std::invalid_argument("unknown kernel backend '" + name +
                              "' (expected auto|scalar|avx2)");
}

}
