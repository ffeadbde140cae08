#pragma once

#include <cmath>

namespace fplap {

/// Neumaier-compensated accumulator. The kernel double sums have n^2 terms
/// whose magnitudes span many decades (singular weights), so plain
/// accumulation is not acceptable for the 1e-12 oracle tolerances.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }

  void merge(const NeumaierSum& other) {
    add(other.sum);
    add(other.comp);
  }

  double value() const { return sum + comp; }
};

}
