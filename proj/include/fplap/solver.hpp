#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fplap/energy.hpp"

namespace fplap {

struct SolverOptions {
  double tol = 1e-8;        // residual tolerance in the dual norm
  int max_iters = 10000;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  double step0 = 1.0;
  int path_nodes = 41;      // mountain-pass path resolution
  double step_cap = std::numeric_limits<double>::infinity();
  double nontrivial_norm = 1e-6;  // W-norm threshold separating u* from 0
  int redistribute_every = 10;
  int geometry_samples = 64;
  std::uint64_t seed = 0;
  bool record_trace = true;

  void validate() const;  // throws std::invalid_argument
};

enum class SolveStatus { converged, degenerate_trivial, max_iter };
const char* to_string(SolveStatus s);

struct TracePoint {
  int iter;
  double psi;
  double residual;
  double step;  // accepted step that produced this state (0 at iter 0)
};

struct SolverReport {
  DiscreteField solution;
  EnergyParts energy;
  double residual = std::numeric_limits<double>::infinity();
  double w_norm = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;  // console diagnostics only, never serialized
  SolveStatus status = SolveStatus::max_iter;
  bool nontrivial = false;
  std::string method;  // "direct" | "mountain_pass"
  // mountain-pass geometry certificate (NaN for direct solves)
  double geometry_a = std::numeric_limits<double>::quiet_NaN();
  double geometry_b = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
  std::vector<TracePoint> trace;
  std::vector<ConditionReport> certificates;
};

/// Armijo-backtracked gradient descent on the interior components, for the
/// sublinear regime q < p. Requires a passing (f1) certificate with
/// q_growth < p (what coercivity rests on); the (f2)/(f3) certificates are
/// attached but advisory — a genuinely sublinear reaction cannot vanish
/// against |t|^{p-1} at zero, and that is exactly what makes the minimum
/// negative. When psi(u0) >= 0, a ray probe psi(t * bump) over a doubling t
/// grid looks for a negative-energy start, so the descent does not park at
/// the trivial critical point u = 0.
SolverReport minimize_direct(const EnergyFunctional& E, const DiscreteField& u0,
                             const SolverOptions& opts);

struct EndpointProbe {
  double t0 = 0.0;
  double psi = 0.0;
  std::vector<std::pair<double, double>> trace;  // (t, psi) along the doubling grid
};

/// Smallest t on the doubling grid 1, 2, 4, ... <= t_max with psi(t v) < 0.
/// Throws EndpointNotFound when there is no sign change (signals an (f4)
/// failure or a t_max that is too small).
EndpointProbe find_negative_endpoint(const EnergyFunctional& E,
                                     const DiscreteField& v,
                                     double t_max = 0x1p40);

struct GeometryCertificate {
  double a_estimate = 0.0;  // min sampled psi on the norm sphere
  double b = 0.0;
  int samples = 0;
  bool pass = false;  // a_estimate > 0
};

/// Samples random interior fields rescaled to W-norm exactly b and returns
/// the minimum psi seen; a positive estimate certifies the mountain-pass
/// geometry at radius b.
GeometryCertificate verify_mountain_pass_geometry(const EnergyFunctional& E,
                                                  double b, int n_samples,
                                                  std::uint64_t seed);

/// Min-max over a piecewise-linear path from 0 to a negative-energy endpoint:
/// the maximal node takes an Armijo descent step each iteration (ties break
/// to the smallest index), nodes are redistributed by arc length every
/// `redistribute_every` iterations (skipped when resampling would raise the
/// max), and the run converges when the maximal node's residual meets tol.
SolverReport mountain_pass(const EnergyFunctional& E, const SolverOptions& opts);

struct UniquenessPair {
  int first = 0;
  int second = 0;
  double sup_distance = 0.0;
  double cross_term = 0.0;   // S = sum (u^p - v^p)(f(u)/u^{p-1} - f(v)/v^{p-1}) mu
  double picone_side = 0.0;  // the matching Picone-deficit sum, >= 0 algebraically
  double scale = 1.0;
};

struct UniquenessReport {
  bool applicable = false;  // (f5) certified
  bool pass = false;
  double max_distance = 0.0;
  double distance_tol = 0.0;
  double cross_tol = 0.0;  // relative to each pair's scale
  std::vector<UniquenessPair> pairs;
  ConditionReport f5;
  std::string detail;
};

/// Pairwise agreement of converged positive solutions plus the Picone/(f5)
/// sandwich: the cross term S is >= 0 by the discrete Picone inequality and
/// <= 0 under (f5), so |S| ~ 0 certifies uniqueness. Throws ValidationError
/// when a report is not converged or has non-positive interior values.
UniquenessReport uniqueness_check(const EnergyFunctional& E,
                                  const std::vector<SolverReport>& reports,
                                  double distance_tol = 1e-6,
                                  double cross_tol = 1e-8);

}
