#include "fplap/pair_kernels.hpp"

#include <cmath>

#include "fplap/summation.hpp"

namespace fplap::kern::detail {

// Reference kernels. One generic std::pow path for every p > 1; a zero
// difference contributes a zero term (|0|^{p-2}*0 = 0 for p > 1), and must be
// skipped explicitly because pow(0, e) = inf for the e < 0 of p < 2.

double scalar_pair_sum(const double* u, const double* v, const double* w,
                       std::size_t n, double p) {
  const double e = p - 2.0;
  NeumaierSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double vi = v[i];
    const double* wrow = w + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double du = ui - u[j];
      if (du == 0.0) continue;
      acc.add(std::pow(std::fabs(du), e) * du * (vi - v[j]) * wrow[j]);
    }
  }
  return acc.value();
}

void scalar_row_sums(const double* u, const double* w, std::size_t n, double p,
                     double* out) {
  const double e = p - 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = u[i];
    const double* wrow = w + i * n;
    NeumaierSum acc;
    for (std::size_t j = 0; j < n; ++j) {
      const double du = ui - u[j];
      if (du == 0.0) continue;
      acc.add(std::pow(std::fabs(du), e) * du * wrow[j]);
    }
    out[i] = acc.value();
  }
}

}
