#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fplap {

/// Reaction term f(x,t) and its primitive F(x,t) = int_0^t f(x,tau) dtau.
///
/// Built-in forms:
///   power:            f = amplitude |t|^{r-2} t,      F = (amplitude/r) |t|^r
///   exp_damped_power: f = amplitude |t|^{p_ref} e^{-t}
///                     (F via the lower incomplete gamma for t >= 0, adaptive
///                      quadrature for t < 0)
///   table:            two-column (t, f) samples, linearly interpolated;
///                     F integrates the interpolant exactly
///
/// `positive_part` replaces f by 0 for t <= 0 (and F accordingly); the
/// uniqueness workflow uses it so minimizers come out nonnegative without
/// constrained optimization.
///
/// The declared certificate parameters (beta, q_growth, mu_ar) are what the
/// sampled condition checkers below test against; they are claims, not
/// guarantees.
struct Nonlinearity {
  enum class Form { zero, power, exp_damped_power, table };

  Form form = Form::zero;
  double amplitude = 1.0;  // lambda (power) or c (exp_damped_power)
  double r = 2.0;          // power-law exponent
  double p_ref = 2.0;      // the |t|^p factor of exp_damped_power
  bool positive_part = false;

  // declared certificate parameters
  double beta = 1.0;
  double q_growth = 2.0;
  std::optional<double> mu_ar;

  // spatial weight a(x) >= 0 per vertex; empty means 1 everywhere
  std::vector<double> spatial_weight;

  // table form: strictly increasing t samples and matching f values
  std::vector<double> table_t;
  std::vector<double> table_f;

  double f(int vertex, double t) const;
  double F(int vertex, double t) const;

  static Nonlinearity zero_reaction();
  static Nonlinearity power(double amplitude, double r);
  static Nonlinearity exp_damped_power(double amplitude, double p_ref);
  static Nonlinearity from_table(std::vector<double> t, std::vector<double> f);

  std::string describe() const;
};

/// Sampled certificate for one of the structural conditions on f. The
/// checkers are numeric surrogates on documented grids, not symbolic proofs.
struct ConditionReport {
  std::string condition;   // "f1" .. "f5"
  bool pass = false;
  double worst_margin = 0.0;  // sign convention per check; negative = violation
  double worst_t = 0.0;       // witness sample
  int samples = 0;
  std::string detail;
};

struct ConditionGrid {
  double t_min = 1e-6;
  double t_max = 1e3;
  int count = 200;
};

/// (f1): |f(x,t)| <= beta (1 + |t|^{q-1}) on a log grid over both signs.
/// worst_margin is relative to the bound, so it tends to 0 when f saturates
/// the growth rate.
ConditionReport check_growth_f1(const Nonlinearity& nl, ConditionGrid grid = {});

/// (f2): f(x,t)/|t|^{q-1} -> 0 as |t| -> inf; passes when the tail estimate
/// at t_max (default 1e6) is below `threshold`.
ConditionReport check_limit_f2(const Nonlinearity& nl, double t_max = 1e6,
                               double threshold = 1e-3);

/// (f3): f(x,z)/|z|^{p-1} -> 0 as z -> 0; same tail logic toward z_min.
ConditionReport check_limit_f3(const Nonlinearity& nl, double p,
                               double z_min = 1e-6, double threshold = 1e-3);

/// (f4), Ambrosetti-Rabinowitz: 0 < mu F(x,t) <= t f(x,t) for t > 0.
ConditionReport check_ar_f4(const Nonlinearity& nl, double mu_ar, double p,
                            ConditionGrid grid = {1e-3, 1e3, 200});

/// (f5): h(t) = f(x,t)/t^{p-1} strictly decreasing on (0,inf); reports the
/// first violating sample pair.
ConditionReport check_monotone_f5(const Nonlinearity& nl, double p,
                                  ConditionGrid grid = {});

std::vector<ConditionReport> check_all_conditions(const Nonlinearity& nl,
                                                  double p);

}
