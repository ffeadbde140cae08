#include "fplap/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fplap/errors.hpp"
#include "fplap/rng.hpp"
#include "fplap/summation.hpp"

namespace fplap {

void SolverOptions::validate() const {
  if (!(tol > 0.0 && tol < 1.0))
    throw std::invalid_argument("solver tol must be in (0,1)");
  if (max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0))
    throw std::invalid_argument("armijo_c1 must be in (0,1)");
  if (!(backtrack > 0.0 && backtrack < 1.0))
    throw std::invalid_argument("backtrack factor must be in (0,1)");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (path_nodes < 3) throw std::invalid_argument("path_nodes must be >= 3");
  if (!(step_cap > 0.0)) throw std::invalid_argument("step_cap must be positive");
  if (!(nontrivial_norm > 0.0))
    throw std::invalid_argument("nontrivial_norm must be positive");
  if (redistribute_every <= 0)
    throw std::invalid_argument("redistribute_every must be positive");
  if (geometry_samples <= 0)
    throw std::invalid_argument("geometry_samples must be positive");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::degenerate_trivial: return "degenerate-trivial";
    default: return "max-iter";
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DiscreteField scaled(const DiscreteField& u, double t) {
  DiscreteField out = u;
  for (double& x : out.v) x *= t;
  return out;
}

// u + t*d over the interior (d is already pinned to zero outside).
DiscreteField stepped(const DiscreteField& u, const DiscreteField& d, double t) {
  DiscreteField out = u;
  for (int i : u.dom->interior) out.v[i] += t * d.v[i];
  return out;
}

struct LineSearchResult {
  bool accepted = false;
  double step = 0.0;
  double psi = 0.0;
  DiscreteField point;
};

// Armijo backtracking along direction dir with slope = <g, dir>_mu < 0.
// Acceptance additionally requires a strict decrease so recorded traces are
// strictly monotone.
LineSearchResult armijo(const EnergyFunctional& E, const DiscreteField& u,
                        double psi_u, const DiscreteField& dir, double slope,
                        const SolverOptions& opts, double step_init) {
  LineSearchResult res;
  double alpha = step_init;
  const double alpha_min = step_init * std::pow(opts.backtrack, 60);
  while (alpha >= alpha_min) {
    DiscreteField trial = stepped(u, dir, alpha);
    const double psi_t = E.energy(trial).psi;
    if (psi_t <= psi_u + opts.armijo_c1 * alpha * slope && psi_t < psi_u) {
      res.accepted = true;
      res.step = alpha;
      res.psi = psi_t;
      res.point = std::move(trial);
      return res;
    }
    alpha *= opts.backtrack;
  }
  return res;
}

void require_certificate(const ConditionReport& rep, const std::string& where) {
  if (!rep.pass)
    throw ValidationError(where + ": nonlinearity failed the (" + rep.condition +
                          ") certificate: " + rep.detail);
}

}  // namespace

SolverReport minimize_direct(const EnergyFunctional& E, const DiscreteField& u0,
                             const SolverOptions& opts) {
  opts.validate();
  if (u0.dom != &E.domain())
    throw std::invalid_argument("minimize_direct: start field domain mismatch");
  const auto t_start = Clock::now();

  SolverReport rep;
  rep.method = "direct";
  const Nonlinearity& nl = E.nonlinearity();
  if (nl.form != Nonlinearity::Form::zero) {
    // (f1) with q < p is what coercivity rests on, so it is required. The
    // asymptotic certificates (f2)/(f3) are attached for the record: a
    // genuinely sublinear reaction cannot pass (f3) at zero (its ratio
    // against |t|^{p-1} diverges), and that is exactly what produces the
    // negative-energy minimizer.
    rep.certificates.push_back(check_growth_f1(nl));
    rep.certificates.push_back(check_limit_f2(nl));
    rep.certificates.push_back(check_limit_f3(nl, E.p()));
    require_certificate(rep.certificates[0], "minimize_direct");
    if (!(nl.q_growth < E.p()))
      throw ValidationError(
          "minimize_direct handles the sublinear regime and needs declared "
          "q_growth < p; got q=" + std::to_string(nl.q_growth) +
          ", p=" + std::to_string(E.p()));
  }

  // Ray probe: psi(0) = 0 is always a critical point when f(x,0) = 0, so a
  // start with psi >= 0 is replaced by the best negative-energy point on a
  // doubling ray through the interior bump, when one exists.
  DiscreteField u = u0;
  double psi = E.energy(u).psi;
  if (psi >= 0.0) {
    const DiscreteField bump = DiscreteField::bump(E.domain(), E.mesh().n());
    double best_t = 0.0, best_psi = 0.0;
    for (double t = 0x1p-30; t <= 0x1p6; t *= 2.0) {
      const double cand = E.energy(scaled(bump, t)).psi;
      if (cand < best_psi) {
        best_psi = cand;
        best_t = t;
      }
    }
    if (best_psi < 0.0) {
      u = scaled(bump, best_t);
      psi = best_psi;
      std::ostringstream os;
      os << "ray probe replaced the start: psi(" << best_t << " * bump) = "
         << best_psi << "; ";
      rep.detail += os.str();
    }
  }

  double last_step = 0.0;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    DiscreteField g = E.gradient(u);
    const double res = E.residual_norm_of_gradient(g);
    if (opts.record_trace) rep.trace.push_back({iter, psi, res, last_step});
    rep.residual = res;
    if (res <= opts.tol) break;

    DiscreteField dir = g;
    for (int i : E.domain().interior) dir.v[i] = -dir.v[i];
    const double slope = -E.inner_mu(g, g);
    const double step_init =
        std::isfinite(opts.step_cap)
            ? std::min(opts.step0, opts.step_cap / std::sqrt(-slope))
            : opts.step0;
    const LineSearchResult ls = armijo(E, u, psi, dir, slope, opts, step_init);
    if (!ls.accepted) {
      rep.detail += "line search found no decrease at the minimum step; ";
      break;
    }
    u = std::move(ls.point);
    psi = ls.psi;
    last_step = ls.step;
  }

  rep.solution = u;
  rep.energy = E.energy(u);
  rep.residual = E.residual_norm(u);
  rep.w_norm = E.w_norm(u);
  rep.iterations = iter;
  rep.nontrivial = rep.w_norm > opts.nontrivial_norm;
  if (rep.residual <= opts.tol)
    rep.status = rep.nontrivial ? SolveStatus::converged
                                : SolveStatus::degenerate_trivial;
  else
    rep.status = SolveStatus::max_iter;
  rep.wall_seconds = seconds_since(t_start);
  return rep;
}

EndpointProbe find_negative_endpoint(const EnergyFunctional& E,
                                     const DiscreteField& v, double t_max) {
  if (E.w_norm(v) == 0.0)
    throw std::invalid_argument("find_negative_endpoint: direction v is zero");
  EndpointProbe probe;
  for (double t = 1.0; t <= t_max; t *= 2.0) {
    const double psi = E.energy(scaled(v, t)).psi;
    probe.trace.emplace_back(t, psi);
    if (psi < 0.0) {
      probe.t0 = t;
      probe.psi = psi;
      return probe;
    }
  }
  throw EndpointNotFound(
      "no negative-energy endpoint found up to t_max=" + std::to_string(t_max) +
      "; the (f4) superlinearity may fail or t_max is too small");
}

GeometryCertificate verify_mountain_pass_geometry(const EnergyFunctional& E,
                                                  double b, int n_samples,
                                                  std::uint64_t seed) {
  if (!(b > 0.0))
    throw std::invalid_argument("geometry certificate needs a radius b > 0");
  GeometryCertificate cert;
  cert.b = b;
  cert.samples = n_samples;
  cert.a_estimate = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    DiscreteField w(E.domain(), E.mesh().n());
    for (int i : E.domain().interior) w.v[i] = rng.symmetric();
    const double norm = E.w_norm(w);
    if (norm == 0.0) continue;
    cert.a_estimate =
        std::min(cert.a_estimate, E.energy(scaled(w, b / norm)).psi);
  }
  cert.pass = std::isfinite(cert.a_estimate) && cert.a_estimate > 0.0;
  return cert;
}

namespace {

double path_max(const std::vector<double>& psis) {
  // interior nodes only; endpoints (0 and e) are fixed
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < psis.size(); ++k) m = std::max(m, psis[k]);
  return m;
}

std::size_t path_argmax(const std::vector<double>& psis) {
  std::size_t best = 1;
  for (std::size_t k = 2; k + 1 < psis.size(); ++k)
    if (psis[k] > psis[best]) best = k;  // strict: ties keep the smallest index
  return best;
}

// Locate the true path maximum near the argmax node: 1-D maximization of psi
// along the two adjacent polyline segments, repositioning the node there.
// Without this the node maximum stalls at path-resolution accuracy — the
// saddle hides inside a segment and descent alone cannot reach it.
void line_max_node(const EnergyFunctional& E, std::vector<DiscreteField>& path,
                   std::vector<double>& psis, std::size_t k) {
  auto point_at = [&](double theta) {
    const std::size_t a = theta < 0.0 ? k - 1 : k;
    const double t = theta < 0.0 ? theta + 1.0 : theta;
    DiscreteField z = path[a];
    for (int i : E.domain().interior)
      z.v[i] += t * (path[a + 1].v[i] - z.v[i]);
    return z;
  };
  // coarse scan, then golden-section refinement around the best sample
  double best_theta = 0.0;
  double best_psi = psis[k];
  for (int j = -8; j <= 8; ++j) {
    const double theta = j / 8.0;
    const double psi = j == 0 ? psis[k] : E.energy(point_at(theta)).psi;
    if (psi > best_psi) {
      best_psi = psi;
      best_theta = theta;
    }
  }
  double lo = best_theta - 1.0 / 8.0;
  double hi = best_theta + 1.0 / 8.0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = E.energy(point_at(x1)).psi, f2 = E.energy(point_at(x2)).psi;
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = E.energy(point_at(x2)).psi;
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = E.energy(point_at(x1)).psi;
    }
  }
  const double theta = f1 > f2 ? x1 : x2;
  const double psi = std::max(f1, f2);
  if (psi > best_psi) {
    best_psi = psi;
    best_theta = theta;
  }
  if (best_theta != 0.0) {
    path[k] = point_at(best_theta);
    psis[k] = E.energy(path[k]).psi;
  }
}

}  // namespace

SolverReport mountain_pass(const EnergyFunctional& E, const SolverOptions& opts) {
  opts.validate();
  const auto t_start = Clock::now();
  const Nonlinearity& nl = E.nonlinearity();

  SolverReport rep;
  rep.method = "mountain_pass";
  rep.certificates.push_back(check_growth_f1(nl));
  rep.certificates.push_back(check_limit_f2(nl));
  rep.certificates.push_back(check_limit_f3(nl, E.p()));
  require_certificate(rep.certificates[0], "mountain_pass");
  require_certificate(rep.certificates[2], "mountain_pass");
  if (!nl.mu_ar)
    throw ValidationError(
        "mountain_pass needs a declared mu_ar for the (f4) certificate");
  rep.certificates.push_back(check_ar_f4(nl, *nl.mu_ar, E.p()));
  require_certificate(rep.certificates.back(), "mountain_pass");
  const double pstar = critical_exponent(E.mesh().dim, E.kernel().s, E.p());
  if (!(nl.q_growth > E.p() && nl.q_growth < pstar))
    throw ValidationError(
        "mountain_pass handles the superlinear subcritical regime and needs "
        "p < q_growth < p*_s; got q=" + std::to_string(nl.q_growth) + ", p=" +
        std::to_string(E.p()) + ", p*_s=" + std::to_string(pstar));

  // Endpoint: e = t0 * bump with psi(e) < 0, bump normalized in the W norm.
  DiscreteField bump = DiscreteField::bump(E.domain(), E.mesh().n());
  bump = scaled(bump, 1.0 / E.w_norm(bump));
  const EndpointProbe probe = find_negative_endpoint(E, bump);
  const DiscreteField endpoint = scaled(bump, probe.t0);

  // Geometry certificate: largest sampled radius below the endpoint with a
  // positive floor.
  GeometryCertificate cert;
  for (double b : {1e-2, 5e-2, 1e-1, 0.5, 1.0}) {
    if (b >= probe.t0) continue;
    const GeometryCertificate cand =
        verify_mountain_pass_geometry(E, b, opts.geometry_samples, opts.seed);
    if (cand.pass) cert = cand;
  }
  if (!cert.pass)
    throw ValidationError(
        "mountain_pass geometry certificate failed: no sampled radius with a "
        "positive energy floor");
  rep.geometry_a = cert.a_estimate;
  rep.geometry_b = cert.b;

  // Piecewise-linear path, initialized along the segment [0, e].
  const int m = opts.path_nodes;
  std::vector<DiscreteField> path;
  path.reserve(m);
  for (int k = 0; k < m; ++k)
    path.push_back(scaled(endpoint, static_cast<double>(k) / (m - 1)));
  std::vector<double> psis(m);
  for (int k = 0; k < m; ++k) psis[k] = E.energy(path[k]).psi;

  // Unless given, the deformation cap is one initial node spacing (mu-L2):
  // psi is unbounded below on the far side of the pass, so an uncapped
  // Armijo step would happily accept a jump into the abyss.
  double step_cap = opts.step_cap;
  if (!std::isfinite(step_cap))
    step_cap = std::sqrt(E.inner_mu(endpoint, endpoint)) / (m - 1);

  double last_step = 0.0;
  double prev_max = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    const std::size_t k = path_argmax(psis);
    DiscreteField& node = path[k];

    DiscreteField g = E.gradient(node);
    const double res = E.residual_norm_of_gradient(g);
    if (opts.record_trace) rep.trace.push_back({iter, psis[k], res, last_step});
    rep.residual = res;

    if (res <= opts.tol) {
      rep.solution = node;
      rep.status = SolveStatus::converged;
      break;
    }

    // Path collapse onto an endpoint means the deformation lost the pass.
    const double dist0 = E.w_norm(node);
    DiscreteField to_e = node;
    for (int i : E.domain().interior) to_e.v[i] -= endpoint.v[i];
    if (dist0 < opts.nontrivial_norm ||
        E.w_norm(to_e) < opts.nontrivial_norm) {
      rep.solution = node;
      rep.status = SolveStatus::degenerate_trivial;
      rep.detail += "path collapsed onto an endpoint; ";
      break;
    }

    DiscreteField dir = g;
    for (int i : E.domain().interior) dir.v[i] = -dir.v[i];
    const double slope = -E.inner_mu(g, g);
    const double step_init =
        std::min(opts.step0, step_cap / std::sqrt(-slope));
    const LineSearchResult ls =
        armijo(E, node, psis[k], dir, slope, opts, step_init);
    if (!ls.accepted) {
      rep.solution = node;
      rep.status = SolveStatus::max_iter;
      rep.detail += "line search found no decrease at the max node; ";
      break;
    }
    node = ls.point;
    psis[k] = ls.psi;
    last_step = ls.step;

    // Max-node descent keeps the node maximum non-increasing between
    // redistributions; a resample can legitimately re-seed a node on the
    // ridge (and so raise the node max), which is what keeps the polyline
    // from polarizing into the two valleys.
    const double cur_max = path_max(psis);
    if (cur_max > prev_max + 1e-12)
      rep.detail += "warning: max-node value increased within an epoch; ";
    prev_max = cur_max;

    if ((iter + 1) % opts.redistribute_every == 0) {
      std::vector<double> cum(m, 0.0);
      for (int j = 0; j + 1 < m; ++j) {
        DiscreteField seg = path[j + 1];
        for (int i : E.domain().interior) seg.v[i] -= path[j].v[i];
        cum[j + 1] = cum[j] + E.w_norm(seg);
      }
      if (cum[m - 1] > 0.0) {
        std::vector<DiscreteField> fresh;
        fresh.reserve(m);
        fresh.push_back(path.front());
        int seg = 0;
        for (int j = 1; j + 1 < m; ++j) {
          const double target = cum[m - 1] * j / (m - 1);
          while (seg + 2 < m && cum[seg + 1] < target) ++seg;
          const double len = cum[seg + 1] - cum[seg];
          const double theta = len > 0.0 ? (target - cum[seg]) / len : 0.0;
          DiscreteField z = path[seg];
          for (int i : E.domain().interior)
            z.v[i] += theta * (path[seg + 1].v[i] - path[seg].v[i]);
          fresh.push_back(std::move(z));
        }
        fresh.push_back(path.back());
        path = std::move(fresh);
        for (int j = 0; j < m; ++j) psis[j] = E.energy(path[j]).psi;
        prev_max = std::numeric_limits<double>::infinity();
      }
    }
  }

  if (iter == opts.max_iters) {
    const std::size_t k = path_argmax(psis);
    rep.solution = path[k];
    rep.status = SolveStatus::max_iter;
  }

  rep.energy = E.energy(rep.solution);
  rep.residual = E.residual_norm(rep.solution);
  rep.w_norm = E.w_norm(rep.solution);
  rep.iterations = iter;
  rep.nontrivial = rep.w_norm > opts.nontrivial_norm;
  if (rep.status == SolveStatus::converged && !rep.nontrivial)
    rep.status = SolveStatus::degenerate_trivial;
  rep.wall_seconds = seconds_since(t_start);
  return rep;
}

UniquenessReport uniqueness_check(const EnergyFunctional& E,
                                  const std::vector<SolverReport>& reports,
                                  double distance_tol, double cross_tol) {
  if (reports.size() < 2)
    throw std::invalid_argument("uniqueness_check needs at least 2 reports");
  for (std::size_t r = 0; r < reports.size(); ++r) {
    if (reports[r].status != SolveStatus::converged)
      throw ValidationError("uniqueness_check: report " + std::to_string(r) +
                            " is not converged");
    for (int i : E.domain().interior)
      if (!(reports[r].solution.v[i] > 0.0))
        throw ValidationError(
            "uniqueness_check: report " + std::to_string(r) +
            " has a non-positive interior value at vertex " + std::to_string(i) +
            "; the Picone pairing needs u > 0 in Omega");
  }

  UniquenessReport out;
  out.distance_tol = distance_tol;
  out.cross_tol = cross_tol;
  out.f5 = check_monotone_f5(E.nonlinearity(), E.p());
  if (!out.f5.pass) {
    out.applicable = false;
    out.pass = false;
    out.detail =
        "(f5) certificate failed, uniqueness theorem does not apply: " +
        out.f5.detail;
    return out;
  }
  out.applicable = true;

  const double p = E.p();
  const auto& mu = E.mesh().mu;
  const Nonlinearity& nl = E.nonlinearity();
  bool ok = true;
  for (std::size_t a = 0; a < reports.size(); ++a) {
    for (std::size_t b = a + 1; b < reports.size(); ++b) {
      const DiscreteField& u = reports[a].solution;
      const DiscreteField& v = reports[b].solution;
      UniquenessPair pair;
      pair.first = static_cast<int>(a);
      pair.second = static_cast<int>(b);
      for (std::size_t i = 0; i < u.size(); ++i)
        pair.sup_distance = std::max(pair.sup_distance,
                                     std::fabs(u.v[i] - v.v[i]));

      NeumaierSum cross;
      for (int i : E.domain().interior) {
        const double up = std::pow(u.v[i], p);
        const double vp = std::pow(v.v[i], p);
        const double hu = nl.f(i, u.v[i]) / std::pow(u.v[i], p - 1.0);
        const double hv = nl.f(i, v.v[i]) / std::pow(v.v[i], p - 1.0);
        cross.add((up - vp) * (hu - hv) * mu[i]);
      }
      pair.cross_term = cross.value();

      // Picone-deficit side of the same identity: each bracket is >= 0 by the
      // discrete Picone inequality against the seminorm.
      DiscreteField quot_vu(E.domain(), u.size());
      DiscreteField quot_uv(E.domain(), u.size());
      for (int i : E.domain().interior) {
        quot_vu.v[i] = std::pow(v.v[i], p) / std::pow(u.v[i], p - 1.0);
        quot_uv.v[i] = std::pow(u.v[i], p) / std::pow(v.v[i], p - 1.0);
      }
      const double snu = gagliardo_seminorm_p(u.v, E.kernel());
      const double snv = gagliardo_seminorm_p(v.v, E.kernel());
      pair.picone_side = (snu - weak_form_pairing(u.v, quot_vu.v, E.kernel())) +
                         (snv - weak_form_pairing(v.v, quot_uv.v, E.kernel()));

      pair.scale = std::max({1.0, E.w_norm_p(u), E.w_norm_p(v)});
      out.max_distance = std::max(out.max_distance, pair.sup_distance);
      if (pair.sup_distance > distance_tol ||
          std::fabs(pair.cross_term) > cross_tol * pair.scale)
        ok = false;
      out.pairs.push_back(pair);
    }
  }
  out.pass = ok;
  std::ostringstream os;
  os << reports.size() << " solutions, max pairwise sup distance "
     << out.max_distance;
  out.detail = os.str();
  return out;
}

}
