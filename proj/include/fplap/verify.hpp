#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fplap/energy.hpp"
#include "fplap/solver.hpp"

namespace fplap {

/// Outcome of a randomized inequality certification. worst_margin is signed
/// with negative meaning violation; on violation the offending fields are
/// persisted (when a directory is given) so the trial can be replayed.
struct InequalityReport {
  std::string name;
  int trials = 0;
  double worst_margin = 0.0;
  int worst_trial = -1;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  bool pass = false;
  std::string persisted_path;
  std::string detail;
};

struct PiconeResult {
  double lhs = 0.0;    // sum_Omega |v_i|^p / u_i^{p-1} ((-Delta)^s_p u)_i mu_i
  double rhs = 0.0;    // [v]^p  (seminorm bound; stronger than the full norm)
  double margin = 0.0; // (rhs - lhs) / scale
  bool pass = false;
};

/// Discrete Picone check against the seminorm right-hand side. Signed v is
/// handled through |v| (which only strengthens the inequality). Throws when
/// u is not strictly positive on the interior.
PiconeResult picone_check(const DiscreteField& u, const DiscreteField& v,
                          const KernelMatrix& K, double tol_scale = 1e-10);

/// Randomized Picone sweep: positive random u, signed random v per trial.
InequalityReport picone_sweep(const KernelMatrix& K, const DirichletDomain& dom,
                              int trials, std::uint64_t seed,
                              const std::string& persist_dir = "");

struct EmbeddingEstimate {
  double c1 = 0.0;           // best ratio found (random starts + ascent)
  double best_random = 0.0;  // best among the raw random trials
  double q = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  DiscreteField maximizer;
};

/// Estimates the embedding constant C1 in ||u||_{L^q}^p <= C1 [u]^p by
/// maximizing the scale-invariant ratio R(u) = (sum |u_i|^q mu_i)^{p/q} / [u]^p
/// over random interior starts refined by normalized gradient ascent.
/// Existence constants cannot be verified, only estimated; the testable
/// surrogate is stability of this estimate under trial budget and mesh
/// refinement. Requires p <= q <= p*_s.
EmbeddingEstimate embedding_constant_estimate(const KernelMatrix& K,
                                              const DirichletDomain& dom,
                                              double q_target, int trials,
                                              std::uint64_t seed);

struct NormEquivalenceReport {
  double c_tilde = 0.0;      // estimate at `trials`
  double c_tilde_low = 0.0;  // estimate at trials/10 (stability probe)
  double drift = 0.0;        // relative gap between the two budgets
  bool left_exact_ok = false;  // full^p >= seminorm^p held on every trial
  int trials = 0;
  std::uint64_t seed = 0;
  bool pass = false;
};

/// Norm equivalence on the constrained space: seminorm^p <= full^p holds by
/// definition (asserted exactly); the constant in full^p <= C * seminorm^p is
/// estimated as 1 + max(mass/seminorm) with ascent refinement and reported
/// with a two-budget stability drift.
NormEquivalenceReport norm_equivalence_check(const KernelMatrix& K,
                                             const DirichletDomain& dom,
                                             int trials, std::uint64_t seed);

/// Checks [g(v)]^p <= l^p [v]^p for a scalar Lipschitz g with g(0) = 0 (so
/// g(v) stays in the constrained space) over random trials.
InequalityReport lipschitz_composition_check(const KernelMatrix& K,
                                             const DirichletDomain& dom,
                                             const std::function<double(double)>& g,
                                             double lipschitz_constant,
                                             int trials, std::uint64_t seed);

struct StudyProblem {
  std::string manifold = "torus";  // "torus" | "sphere"
  CapSpec cap;
  double s = 0.5;
  double p = 2.0;
  SingularityPolicy policy;
  Nonlinearity nl;
  SolverOptions opts;
  bool mountain = false;
};

struct StudyRow {
  int resolution = 0;
  std::size_t n = 0;
  double psi = 0.0;
  double residual = 0.0;
  double w_norm = 0.0;
  double seconds = 0.0;
  std::string status;
};

struct StudyTable {
  std::vector<StudyRow> rows;
  bool complete = false;   // every solve converged (trivially or not)
  bool cauchy = true;      // consecutive psi gaps non-increasing
};

/// Solves one problem across a resolution ladder (>= 3 resolutions) of one
/// built-in manifold and tabulates (n, psi, residual, norm, wall time).
StudyTable convergence_study(const StudyProblem& prob,
                             const std::vector<int>& resolutions);

}
