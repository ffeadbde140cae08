#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fplap/geometry.hpp"
#include "fplap/kernel.hpp"
#include "fplap/nonlinearity.hpp"
#include "fplap/pair_kernels.hpp"
#include "fplap/solver.hpp"

namespace fplap {

struct ManifoldSpec {
  std::string kind = "torus";  // torus | sphere | file
  int level = 2;               // sphere subdivision
  int side = 8;                // torus grid side
  std::string path;            // mesh file
};

struct DomainSpec {
  std::string kind = "cap";  // cap | indices
  CapSpec cap{0, 0.3};
  std::vector<int> indices;
};

struct VerifyOptions {
  std::vector<std::string> checks;  // default: all
  int trials = 200;
  double q_target = 0.0;       // 0 = default to p
  std::string lipschitz_g = "clamp01";
};

struct StudyOptions {
  std::string kind = "ladder";  // ladder | uniqueness
  std::vector<int> resolutions;
  int starts = 5;
};

/// Parsed and fully validated run configuration. Parsing fails on any
/// unknown section or key (no silently ignored typos), and every physical
/// constraint (0<s<1, 1<p, N>ps, regime-compatible q ranges) is checked at
/// load, before any computation.
struct RunConfig {
  ManifoldSpec manifold;
  DomainSpec domain;

  double s = 0.5;
  double p = 2.0;
  SingularityPolicy policy;

  Nonlinearity nl;

  SolverOptions solver;
  kern::BackendMode backend = kern::BackendMode::automatic;
  std::string regime = "auto";  // auto | direct | mountain_pass
  bool allow_trivial = false;

  std::uint64_t seed = 0;
  std::string out_dir = "out";

  VerifyOptions verify;
  StudyOptions study;

  std::string raw_text;  // hashed into output provenance

  ManifoldMesh build_mesh() const;
  DirichletDomain build_domain(const ManifoldMesh& mesh) const;
  /// "direct" or "mountain_pass"; resolves "auto" from q_growth vs p, p*_s.
  std::string resolved_regime() const;
};

RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

}
