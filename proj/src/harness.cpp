#include "fplap/harness.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "fplap/errors.hpp"
#include "fplap/io.hpp"
#include "fplap/rng.hpp"
#include "fplap/verify.hpp"
#include "fplap/version.hpp"

namespace fplap {

namespace {

using nlohmann::json;

Provenance make_provenance(const RunConfig& cfg) {
  Provenance prov;
  prov.config_hash = hex64(fnv1a64(cfg.raw_text));
  prov.seed = cfg.seed;
  return prov;
}

json provenance_json(const Provenance& prov) {
  return json{{"artifact", "fplap"},
              {"version", kVersion},
              {"config_hash", prov.config_hash},
              {"seed", prov.seed}};
}

json condition_json(const ConditionReport& rep) {
  return json{{"condition", rep.condition}, {"pass", rep.pass},
              {"worst_margin", rep.worst_margin}, {"worst_t", rep.worst_t},
              {"samples", rep.samples}, {"detail", rep.detail}};
}

json inequality_json(const InequalityReport& rep) {
  return json{{"name", rep.name},
              {"trials", rep.trials},
              {"worst_margin", rep.worst_margin},
              {"worst_trial", rep.worst_trial},
              {"seed", rep.seed},
              {"tolerance", rep.tolerance},
              {"pass", rep.pass},
              {"persisted", rep.persisted_path},
              {"detail", rep.detail}};
}

json problem_json(const RunConfig& cfg, const ManifoldMesh& mesh,
                  const DirichletDomain& dom, kern::Backend backend) {
  return json{{"manifold", mesh.source},
              {"n", mesh.n()},
              {"interior", dom.interior.size()},
              {"s", cfg.s},
              {"p", cfg.p},
              {"floor_scale", cfg.policy.floor_scale},
              {"nonlinearity", cfg.nl.describe()},
              {"q_growth", cfg.nl.q_growth},
              {"regime", cfg.resolved_regime()},
              {"kernel_backend", kern::backend_name(backend)}};
}

// Wall time deliberately stays out of the serialized report so reruns with
// the same config and seed are byte-identical; it is printed to the console.
json solver_report_json(const SolverReport& rep) {
  json j{{"method", rep.method},
         {"status", to_string(rep.status)},
         {"iterations", rep.iterations},
         {"residual", rep.residual},
         {"w_norm", rep.w_norm},
         {"nontrivial", rep.nontrivial},
         {"energy",
          {{"psi", rep.energy.psi},
           {"nonlocal", rep.energy.nonlocal},
           {"mass", rep.energy.mass},
           {"reaction", rep.energy.reaction}}},
         {"detail", rep.detail}};
  if (std::isfinite(rep.geometry_a)) {
    j["geometry"] = {{"a", rep.geometry_a}, {"b", rep.geometry_b}};
  }
  json certs = json::array();
  for (const auto& c : rep.certificates) certs.push_back(condition_json(c));
  j["certificates"] = certs;
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace

int cmd_solve(const RunConfig& cfg) {
  kern::set_backend_mode(cfg.backend);
  const Provenance prov = make_provenance(cfg);
  ensure_directory(cfg.out_dir);

  const ManifoldMesh mesh = cfg.build_mesh();
  const DirichletDomain dom = cfg.build_domain(mesh);
  const KernelMatrix K = assemble_kernel(mesh, cfg.s, cfg.p, cfg.policy);
  const EnergyFunctional E(K, dom, cfg.nl);
  const std::string regime = cfg.resolved_regime();

  SolverReport rep;
  if (regime == "direct") {
    DiscreteField u0(dom, mesh.n());
    rep = minimize_direct(E, u0, cfg.solver);
  } else {
    rep = mountain_pass(E, cfg.solver);
  }

  json j{{"provenance", provenance_json(prov)},
         {"problem", problem_json(cfg, mesh, dom, kern::select(cfg.p).backend)},
         {"result", solver_report_json(rep)}};
  write_json(j, cfg.out_dir + "/report.json");
  write_field(rep.solution, cfg.out_dir + "/solution.field",
              "solution, " + mesh.source, &prov);
  write_trace_csv(rep.trace, cfg.out_dir + "/trace.csv", prov);

  std::cout << "solve[" << regime << "] " << mesh.source << ": "
            << to_string(rep.status) << " iters=" << rep.iterations
            << " psi=" << rep.energy.psi << " residual=" << rep.residual
            << " wall=" << rep.wall_seconds << "s\n";
  std::cout << "wrote " << cfg.out_dir << "/report.json, solution.field, trace.csv\n";

  const bool ok = rep.status == SolveStatus::converged ||
                  (cfg.allow_trivial &&
                   rep.status == SolveStatus::degenerate_trivial);
  return ok ? 0 : 1;
}

namespace {

struct NamedLipschitz {
  std::function<double(double)> g;
  double constant;
};

NamedLipschitz lipschitz_by_name(const std::string& name) {
  if (name == "identity") return {[](double t) { return t; }, 1.0};
  if (name == "clamp01")
    return {[](double t) { return std::clamp(t, 0.0, 1.0); }, 1.0};
  if (name == "sin2")
    return {[](double t) { return std::sin(2.0 * t); }, 2.0};
  // negative control: violates the g(0)=0 precondition on purpose
  if (name == "shift1") return {[](double t) { return t + 1.0; }, 1.0};
  throw std::invalid_argument("unknown lipschitz_g '" + name +
                              "' (expected identity|clamp01|sin2|shift1)");
}

}  // namespace

int cmd_verify(const RunConfig& cfg) {
  kern::set_backend_mode(cfg.backend);
  const Provenance prov = make_provenance(cfg);
  ensure_directory(cfg.out_dir);

  const ManifoldMesh mesh = cfg.build_mesh();
  const DirichletDomain dom = cfg.build_domain(mesh);
  const KernelMatrix K = assemble_kernel(mesh, cfg.s, cfg.p, cfg.policy);

  std::vector<std::string> checks = cfg.verify.checks;
  if (checks.empty())
    checks = {"picone", "f1", "f2", "f3", "f4", "f5",
              "embedding", "norm_equivalence", "lipschitz"};

  json out{{"provenance", provenance_json(prov)}};
  json results = json::array();
  bool all_pass = true;
  std::string persisted;

  for (const std::string& check : checks) {
    if (check == "picone") {
      const InequalityReport rep =
          picone_sweep(K, dom, cfg.verify.trials, cfg.seed, cfg.out_dir);
      results.push_back(inequality_json(rep));
      all_pass = all_pass && rep.pass;
      if (!rep.pass) persisted = rep.persisted_path;
      std::cout << "picone: " << (rep.pass ? "pass" : "VIOLATION") << " ("
                << rep.detail << ")\n";
    } else if (check == "f1" || check == "f2" || check == "f3" ||
               check == "f4" || check == "f5") {
      ConditionReport rep;
      if (check == "f1") rep = check_growth_f1(cfg.nl);
      else if (check == "f2") rep = check_limit_f2(cfg.nl);
      else if (check == "f3") rep = check_limit_f3(cfg.nl, cfg.p);
      else if (check == "f4") {
        if (!cfg.nl.mu_ar)
          throw std::invalid_argument(
              "--check f4 needs nonlinearity.mu_ar declared in the config");
        rep = check_ar_f4(cfg.nl, *cfg.nl.mu_ar, cfg.p);
      } else rep = check_monotone_f5(cfg.nl, cfg.p);
      results.push_back(condition_json(rep));
      all_pass = all_pass && rep.pass;
      std::cout << "(" << rep.condition << "): "
                << (rep.pass ? "pass" : "FAIL") << " (" << rep.detail << ")\n";
    } else if (check == "embedding") {
      const double q = cfg.verify.q_target > 0.0 ? cfg.verify.q_target : cfg.p;
      const EmbeddingEstimate est = embedding_constant_estimate(
          K, dom, q, cfg.verify.trials, cfg.seed);
      results.push_back(json{{"name", "embedding"},
                             {"q", est.q},
                             {"c1_estimate", est.c1},
                             {"best_random", est.best_random},
                             {"trials", est.trials},
                             {"seed", est.seed}});
      std::cout << "embedding: C1 ~ " << est.c1 << " at q=" << q << " ("
                << est.trials << " trials)\n";
    } else if (check == "norm_equivalence") {
      const NormEquivalenceReport rep =
          norm_equivalence_check(K, dom, cfg.verify.trials, cfg.seed);
      results.push_back(json{{"name", "norm_equivalence"},
                             {"c_tilde", rep.c_tilde},
                             {"c_tilde_low_budget", rep.c_tilde_low},
                             {"drift", rep.drift},
                             {"left_exact_ok", rep.left_exact_ok},
                             {"pass", rep.pass}});
      all_pass = all_pass && rep.pass;
      std::cout << "norm_equivalence: " << (rep.pass ? "pass" : "FAIL")
                << " C~=" << rep.c_tilde << " drift=" << rep.drift << "\n";
    } else if (check == "lipschitz") {
      const NamedLipschitz g = lipschitz_by_name(cfg.verify.lipschitz_g);
      const InequalityReport rep = lipschitz_composition_check(
          K, dom, g.g, g.constant, cfg.verify.trials, cfg.seed);
      results.push_back(inequality_json(rep));
      all_pass = all_pass && rep.pass;
      std::cout << "lipschitz(" << cfg.verify.lipschitz_g << "): "
                << (rep.pass ? "pass" : "VIOLATION") << " (" << rep.detail
                << ")\n";
    } else {
      throw std::invalid_argument("unknown verify check '" + check + "'");
    }
  }

  out["results"] = results;
  out["all_pass"] = all_pass;
  write_json(out, cfg.out_dir + "/verify_report.json");
  std::cout << "wrote " << cfg.out_dir << "/verify_report.json\n";
  if (!all_pass && !persisted.empty())
    std::cout << "violation witnesses persisted at " << persisted << "\n";
  return all_pass ? 0 : 1;
}

int cmd_study(const RunConfig& cfg) {
  kern::set_backend_mode(cfg.backend);
  const Provenance prov = make_provenance(cfg);
  ensure_directory(cfg.out_dir);

  if (cfg.study.kind == "ladder") {
    if (cfg.manifold.kind == "file")
      throw std::invalid_argument(
          "resolution ladders need a built-in manifold (torus or sphere)");
    StudyProblem prob;
    prob.manifold = cfg.manifold.kind;
    prob.cap = cfg.domain.cap;
    prob.s = cfg.s;
    prob.p = cfg.p;
    prob.policy = cfg.policy;
    prob.nl = cfg.nl;
    prob.opts = cfg.solver;
    prob.mountain = cfg.resolved_regime() == "mountain_pass";
    const StudyTable table = convergence_study(prob, cfg.study.resolutions);
    write_study_csv(table, cfg.out_dir + "/study.csv", prov);
    std::cout << "ladder study over " << table.rows.size() << " resolutions: "
              << (table.complete ? "complete" : "INCOMPLETE")
              << (table.cauchy ? "" : " (non-Cauchy psi sequence)") << "\n";
    std::cout << "wrote " << cfg.out_dir << "/study.csv\n";
    return table.complete ? 0 : 1;
  }

  // Multi-start uniqueness study.
  const ManifoldMesh mesh = cfg.build_mesh();
  const DirichletDomain dom = cfg.build_domain(mesh);
  const KernelMatrix K = assemble_kernel(mesh, cfg.s, cfg.p, cfg.policy);
  const EnergyFunctional E(K, dom, cfg.nl);

  std::vector<SolverReport> reports;
  for (int k = 0; k < cfg.study.starts; ++k) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    DiscreteField u0(dom, mesh.n());
    for (int i : dom.interior) u0.v[i] = rng.uniform();
    reports.push_back(minimize_direct(E, u0, cfg.solver));
    std::cout << "start " << k << ": " << to_string(reports.back().status)
              << " psi=" << reports.back().energy.psi
              << " residual=" << reports.back().residual << "\n";
  }
  for (const auto& rep : reports)
    if (rep.status != SolveStatus::converged) {
      std::cout << "uniqueness study incomplete: a start did not converge\n";
      return 1;
    }
  const UniquenessReport uq = uniqueness_check(E, reports);

  std::ofstream csv(cfg.out_dir + "/uniqueness.csv");
  csv.precision(17);
  csv << prov.header_line() << "\n";
  csv << "first,second,sup_distance,cross_term,picone_side,scale\n";
  for (const auto& pr : uq.pairs)
    csv << pr.first << "," << pr.second << "," << pr.sup_distance << ","
        << pr.cross_term << "," << pr.picone_side << "," << pr.scale << "\n";
  csv.close();

  json pairs = json::array();
  for (const auto& pr : uq.pairs)
    pairs.push_back(json{{"first", pr.first},
                         {"second", pr.second},
                         {"sup_distance", pr.sup_distance},
                         {"cross_term", pr.cross_term},
                         {"picone_side", pr.picone_side},
                         {"scale", pr.scale}});
  write_json(json{{"provenance", provenance_json(prov)},
                  {"applicable", uq.applicable},
                  {"pass", uq.pass},
                  {"max_distance", uq.max_distance},
                  {"f5", condition_json(uq.f5)},
                  {"pairs", pairs},
                  {"detail", uq.detail}},
             cfg.out_dir + "/uniqueness.json");
  std::cout << "uniqueness over " << cfg.study.starts << " starts: "
            << (uq.pass ? "pass" : (uq.applicable ? "FAIL" : "not applicable"))
            << ", max distance " << uq.max_distance << "\n";
  std::cout << "wrote " << cfg.out_dir << "/uniqueness.{csv,json}\n";
  return uq.pass ? 0 : 1;
}

int cmd_mesh_info(const RunConfig& cfg, const std::string& kernel_dump) {
  kern::set_backend_mode(cfg.backend);
  const Provenance prov = make_provenance(cfg);
  ensure_directory(cfg.out_dir);

  const ManifoldMesh mesh = cfg.build_mesh();
  const MeshValidation val = validate_mesh(mesh, 20000, cfg.seed);

  double max_dist = 0.0;
  for (std::size_t i = 0; i < mesh.n(); ++i)
    for (std::size_t j = i + 1; j < mesh.n(); ++j)
      max_dist = std::max(max_dist, mesh.d(i, j));

  json j{{"provenance", provenance_json(prov)},
         {"source", mesh.source},
         {"n", mesh.n()},
         {"triangles", mesh.tris.size()},
         {"intrinsic_dim", mesh.dim},
         {"total_measure", mesh.total_measure()},
         {"max_distance", max_dist},
         {"validation",
          {{"pass", val.pass},
           {"symmetry_defect", val.symmetry_defect},
           {"min_offdiag", val.min_offdiag},
           {"min_measure", val.min_measure},
           {"nonpositive_measures", val.nonpositive_measures},
           {"triangle_violations", val.triangle_violations},
           {"worst_triangle_margin", val.worst_triangle_margin},
           {"triples_checked", val.triples_checked}}}};
  write_json(j, cfg.out_dir + "/mesh_info.json");
  std::cout << mesh.source << ": n=" << mesh.n() << " tris=" << mesh.tris.size()
            << " total_measure=" << mesh.total_measure()
            << " validation=" << (val.pass ? "pass" : "FAIL") << "\n";

  if (!kernel_dump.empty()) {
    const KernelMatrix K = assemble_kernel(mesh, cfg.s, cfg.p, cfg.policy);
    dump_kernel_csv(K, kernel_dump);
    std::cout << "wrote kernel dump to " << kernel_dump << "\n";
  }
  std::cout << "wrote " << cfg.out_dir << "/mesh_info.json\n";
  return val.pass ? 0 : 1;
}

}
