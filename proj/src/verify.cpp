#include "fplap/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fplap/errors.hpp"
#include "fplap/io.hpp"
#include "fplap/rng.hpp"
#include "fplap/summation.hpp"

namespace fplap {

PiconeResult picone_check(const DiscreteField& u, const DiscreteField& v,
                          const KernelMatrix& K, double tol_scale) {
  const DirichletDomain& dom = *u.dom;
  for (int i : dom.interior)
    if (!(u.v[i] > 0.0))
      throw std::invalid_argument(
          "picone_check: u must be strictly positive on the interior "
          "(vertex " + std::to_string(i) + " is not)");
  const double p = K.p;
  const std::vector<double> lap = apply_fractional_p_laplacian(u.v, K);
  NeumaierSum lhs;
  for (int i : dom.interior)
    lhs.add(std::pow(std::fabs(v.v[i]), p) / std::pow(u.v[i], p - 1.0) *
            lap[i] * K.mesh->mu[i]);
  PiconeResult res;
  res.lhs = lhs.value();
  res.rhs = gagliardo_seminorm_p(v.v, K);
  const double scale = std::max({std::fabs(res.lhs), std::fabs(res.rhs), 1.0});
  res.margin = (res.rhs - res.lhs) / scale;
  res.pass = res.margin >= -tol_scale;
  return res;
}

InequalityReport picone_sweep(const KernelMatrix& K, const DirichletDomain& dom,
                              int trials, std::uint64_t seed,
                              const std::string& persist_dir) {
  InequalityReport rep;
  rep.name = "picone";
  rep.trials = trials;
  rep.seed = seed;
  rep.tolerance = 1e-10;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const std::size_t n = K.n();
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    DiscreteField u(dom, n), v(dom, n);
    for (int i : dom.interior) {
      u.v[i] = 0.1 + rng.uniform();  // strictly positive
      v.v[i] = rng.symmetric();
    }
    const PiconeResult res = picone_check(u, v, K, rep.tolerance);
    if (res.margin < rep.worst_margin) {
      rep.worst_margin = res.margin;
      rep.worst_trial = t;
    }
    if (!res.pass && !persist_dir.empty() && rep.persisted_path.empty()) {
      const std::string base = persist_dir + "/picone_violation_trial" +
                               std::to_string(t);
      write_field(u, base + "_u.field", "picone violation u, trial " +
                                            std::to_string(t));
      write_field(v, base + "_v.field", "picone violation v, trial " +
                                            std::to_string(t));
      rep.persisted_path = base + "_{u,v}.field";
    }
  }
  rep.pass = rep.worst_margin >= -rep.tolerance;
  std::ostringstream os;
  os << trials << " trials, worst margin " << rep.worst_margin << " (trial "
     << rep.worst_trial << ")";
  rep.detail = os.str();
  return rep;
}

namespace {

// Scale-invariant embedding ratio and its ascent. R is maximized rather than
// solved for: C1 exists by compactness, so stability of the maximum under
// budget/refinement is the checkable statement.
struct RatioProblem {
  const KernelMatrix* K;
  const DirichletDomain* dom;
  double q;

  double mass_q(const DiscreteField& u) const {
    NeumaierSum acc;
    for (int i : dom->interior)
      acc.add(std::pow(std::fabs(u.v[i]), q) * K->mesh->mu[i]);
    return acc.value();
  }

  double ratio(const DiscreteField& u) const {
    const double sn = gagliardo_seminorm_p(u.v, *K);
    if (!(sn > 0.0)) return -1.0;
    return std::pow(mass_q(u), K->p / q) / sn;
  }

  // gradient of log R, up to the constant factor p
  DiscreteField log_grad(const DiscreteField& u) const {
    const double mq = mass_q(u);
    const double sn = gagliardo_seminorm_p(u.v, *K);
    const std::vector<double> lap = apply_fractional_p_laplacian(u.v, *K);
    DiscreteField g(*dom, u.size());
    for (int i : dom->interior) {
      const double ui = u.v[i];
      const double mass_term =
          ui == 0.0 ? 0.0 : std::pow(std::fabs(ui), q - 2.0) * ui;
      g.v[i] = K->mesh->mu[i] * (mass_term / mq - lap[i] / sn);
    }
    return g;
  }
};

DiscreteField ascend_ratio(const RatioProblem& prob, DiscreteField u,
                           int max_steps) {
  double r = prob.ratio(u);
  double step = 1.0;
  for (int it = 0; it < max_steps; ++it) {
    const DiscreteField g = prob.log_grad(u);
    bool improved = false;
    for (int halvings = 0; halvings < 40 && !improved; ++halvings) {
      DiscreteField trial = u;
      for (int i : prob.dom->interior) trial.v[i] += step * g.v[i];
      const double rt = prob.ratio(trial);
      if (rt > r) {
        // renormalize so step sizes stay meaningful (R is scale-invariant)
        double maxabs = 0.0;
        for (int i : prob.dom->interior)
          maxabs = std::max(maxabs, std::fabs(trial.v[i]));
        if (maxabs > 0.0)
          for (int i : prob.dom->interior) trial.v[i] /= maxabs;
        const double gain = (rt - r) / r;
        u = std::move(trial);
        r = prob.ratio(u);
        improved = true;
        step *= 2.0;
        if (gain < 1e-11) return u;
      } else {
        step *= 0.5;
      }
    }
    if (!improved) break;
  }
  return u;
}

}  // namespace

EmbeddingEstimate embedding_constant_estimate(const KernelMatrix& K,
                                              const DirichletDomain& dom,
                                              double q_target, int trials,
                                              std::uint64_t seed) {
  const double pstar = critical_exponent(K.mesh->dim, K.s, K.p);
  if (!(q_target >= K.p && q_target <= pstar))
    throw std::invalid_argument(
        "embedding estimate needs p <= q <= p*_s; got q=" +
        std::to_string(q_target) + ", p=" + std::to_string(K.p) +
        ", p*_s=" + std::to_string(pstar));
  if (trials < 1) throw std::invalid_argument("embedding estimate needs trials >= 1");

  RatioProblem prob{&K, &dom, q_target};
  EmbeddingEstimate est;
  est.q = q_target;
  est.trials = trials;
  est.seed = seed;

  const std::size_t n = K.n();
  constexpr int kAscendTop = 4;
  std::vector<std::pair<double, DiscreteField>> best;
  int usable = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    DiscreteField u(dom, n);
    for (int i : dom.interior) u.v[i] = rng.symmetric();
    const double r = prob.ratio(u);
    if (r <= 0.0) continue;
    ++usable;
    est.best_random = std::max(est.best_random, r);
    best.emplace_back(r, std::move(u));
    std::sort(best.begin(), best.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    if (best.size() > kAscendTop) best.pop_back();
  }
  if (usable == 0)
    throw ValidationError(
        "embedding estimate: all trials degenerate (zero seminorm)");

  est.c1 = est.best_random;
  for (auto& [r0, u0] : best) {
    DiscreteField refined = ascend_ratio(prob, u0, 400);
    const double r = prob.ratio(refined);
    if (r > est.c1) {
      est.c1 = r;
      est.maximizer = std::move(refined);
    }
  }
  if (est.maximizer.v.empty()) est.maximizer = best.front().second;
  return est;
}

NormEquivalenceReport norm_equivalence_check(const KernelMatrix& K,
                                             const DirichletDomain& dom,
                                             int trials, std::uint64_t seed) {
  if (trials < 10)
    throw std::invalid_argument("norm_equivalence_check needs trials >= 10");
  NormEquivalenceReport rep;
  rep.trials = trials;
  rep.seed = seed;

  // Left inequality is definitional: full^p = seminorm^p + mass with mass >= 0.
  rep.left_exact_ok = true;
  const std::size_t n = K.n();
  for (int t = 0; t < std::min(trials, 100); ++t) {
    Rng rng(derive_seed(seed ^ 0xfeedULL, static_cast<std::uint64_t>(t)));
    DiscreteField u(dom, n);
    for (int i : dom.interior) u.v[i] = rng.symmetric();
    const double sn = gagliardo_seminorm_p(u.v, K);
    NeumaierSum mass;
    for (int i : dom.interior)
      mass.add(std::pow(std::fabs(u.v[i]), K.p) * K.mesh->mu[i]);
    if (sn + mass.value() < sn) rep.left_exact_ok = false;
  }

  const EmbeddingEstimate low = embedding_constant_estimate(
      K, dom, K.p, std::max(trials / 10, 10), seed);
  const EmbeddingEstimate high =
      embedding_constant_estimate(K, dom, K.p, trials, seed);
  rep.c_tilde_low = 1.0 + low.c1;
  rep.c_tilde = 1.0 + high.c1;
  rep.drift = std::fabs(rep.c_tilde - rep.c_tilde_low) /
              std::max(rep.c_tilde, rep.c_tilde_low);
  rep.pass = rep.left_exact_ok && std::isfinite(rep.c_tilde) && rep.drift < 0.10;
  return rep;
}

InequalityReport lipschitz_composition_check(
    const KernelMatrix& K, const DirichletDomain& dom,
    const std::function<double(double)>& g, double lipschitz_constant,
    int trials, std::uint64_t seed) {
  if (g(0.0) != 0.0)
    throw std::invalid_argument(
        "lipschitz_composition_check requires g(0) = 0 so g(v) vanishes on the "
        "exterior");
  InequalityReport rep;
  rep.name = "lipschitz_composition";
  rep.trials = trials;
  rep.seed = seed;
  rep.tolerance = 1e-12;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double lp = std::pow(lipschitz_constant, K.p);
  const std::size_t n = K.n();
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    DiscreteField v(dom, n);
    for (int i : dom.interior) v.v[i] = 4.0 * rng.symmetric();
    DiscreteField gv(dom, n);
    for (std::size_t i = 0; i < n; ++i) gv.v[i] = g(v.v[i]);
    const double bound = lp * gagliardo_seminorm_p(v.v, K);
    const double lhs = gagliardo_seminorm_p(gv.v, K);
    const double margin = (bound - lhs) / std::max({bound, std::fabs(lhs), 1.0});
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_trial = t;
    }
  }
  rep.pass = rep.worst_margin >= -rep.tolerance;
  std::ostringstream os;
  os << "[g(v)]^p <= l^p [v]^p with l=" << lipschitz_constant << "; worst margin "
     << rep.worst_margin << " (trial " << rep.worst_trial << ")";
  rep.detail = os.str();
  return rep;
}

StudyTable convergence_study(const StudyProblem& prob,
                             const std::vector<int>& resolutions) {
  if (resolutions.size() < 3)
    throw std::invalid_argument(
        "convergence study needs >= 3 resolutions, got " +
        std::to_string(resolutions.size()));
  StudyTable table;
  table.complete = true;
  for (int r : resolutions) {
    const auto t0 = std::chrono::steady_clock::now();
    const ManifoldMesh mesh =
        prob.manifold == "sphere" ? build_sphere(r) : build_flat_torus(r);
    const DirichletDomain dom = select_domain(mesh, prob.cap);
    const KernelMatrix K = assemble_kernel(mesh, prob.s, prob.p, prob.policy);
    const EnergyFunctional E(K, dom, prob.nl);
    const DiscreteField u0(dom, mesh.n());
    const SolverReport rep = prob.mountain
                                 ? mountain_pass(E, prob.opts)
                                 : minimize_direct(E, u0, prob.opts);
    StudyRow row;
    row.resolution = r;
    row.n = mesh.n();
    row.psi = rep.energy.psi;
    row.residual = rep.residual;
    row.w_norm = rep.w_norm;
    row.status = to_string(rep.status);
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (rep.status == SolveStatus::max_iter) table.complete = false;
    table.rows.push_back(row);
  }
  for (std::size_t k = 0; k + 2 < table.rows.size(); ++k) {
    const double gap1 = std::fabs(table.rows[k + 1].psi - table.rows[k].psi);
    const double gap2 = std::fabs(table.rows[k + 2].psi - table.rows[k + 1].psi);
    if (gap2 > gap1) table.cauchy = false;
  }
  return table;
}

}
