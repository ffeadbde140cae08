#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fplap {

using Vec3 = std::array<double, 3>;

/// Sampled compact 2-manifold: embedded vertex positions, lumped per-vertex
/// measure weights, a dense matrix of pairwise geodesic distances, and the
/// triangle list the measures/distances were built from.
///
/// Invariants (checked by validate_mesh and the constructors):
///   - dist is symmetric with an exactly zero diagonal and positive
///     off-diagonal entries,
///   - every measure weight mu_i is strictly positive,
///   - the sampled triangle inequality holds up to the builder's stated
///     approximation slack (zero for the analytic builders).
///
/// Immutable after construction; safe to share across concurrent solves.
struct ManifoldMesh {
  std::vector<Vec3> coords;
  std::vector<std::array<int, 3>> tris;
  std::vector<double> mu;    // lumped Riemannian measure per vertex
  std::vector<double> dist;  // n*n row-major geodesic distances
  int dim = 2;               // intrinsic dimension N
  std::string source;        // human-readable provenance ("sphere level 2", ...)

  std::size_t n() const { return mu.size(); }
  double d(std::size_t i, std::size_t j) const { return dist[i * n() + j]; }
  double total_measure() const;

  /// Mean incident edge length per vertex, measured in the geodesic metric.
  /// Falls back to the nearest-neighbor distance when there is no triangle
  /// connectivity (hand-built test meshes).
  std::vector<double> mean_edge_length() const;
};

/// Partition of the vertex set into interior (the discrete Omega) and
/// exterior, where fields are pinned to zero. Both parts are nonempty.
struct DirichletDomain {
  std::vector<int> interior;
  std::vector<int> exterior;
  std::vector<std::uint8_t> inside;  // n flags

  std::size_t n() const { return inside.size(); }
  bool is_interior(std::size_t i) const { return inside[i] != 0; }
};

/// Geodesic cap: vertex i is interior iff dist(i, center) < radius.
struct CapSpec {
  int center = 0;
  double radius = 0.0;
};

/// Unit icosphere (N=2). Distances are the exact great-circle arcs
/// arccos(<x_i,x_j>); measures are lumped spherical-triangle areas, so the
/// total measure is 4*pi to round-off at every level.
ManifoldMesh build_sphere(int subdivision_level, int max_level = 5);

/// Regular n-by-n grid on the flat unit torus [0,1)^2 (N=2). Distances are
/// Euclidean minimized over period shifts; measures are uniform 1/n^2.
ManifoldMesh build_flat_torus(int n_per_side);

/// Reads the ASCII mesh format (see save_mesh), validates that the surface is
/// closed (every edge in exactly two triangles) and connected, and builds
/// graph geodesics: all-pairs shortest paths over the edge graph weighted by
/// Euclidean edge lengths. Graph distances are an upper bound on the true
/// polyhedral geodesics; the analytic builders provide exact baselines.
/// Measures are one third of the incident flat triangle areas.
ManifoldMesh load_mesh(const std::string& path);
ManifoldMesh parse_mesh(const std::string& text, const std::string& origin);

/// ASCII mesh format: comments start with '#'; first data line "nv nt";
/// then nv lines "x y z"; then nt lines "i j k" (0-based indices).
void save_mesh(const ManifoldMesh& mesh, const std::string& path);

DirichletDomain select_domain(const ManifoldMesh& mesh, const CapSpec& cap);
DirichletDomain select_domain(const ManifoldMesh& mesh,
                              const std::vector<int>& interior);

struct MeshValidation {
  double symmetry_defect = 0.0;     // max |D - D^T|
  double min_offdiag = 0.0;         // min distance over i != j
  double min_measure = 0.0;
  int nonpositive_measures = 0;
  int zero_diagonal_defects = 0;    // entries with D_ii != 0
  int triangle_violations = 0;      // over sampled triples
  double worst_triangle_margin = 0.0;  // max d(i,k)-d(i,j)-d(j,k) seen
  int triples_checked = 0;
  bool pass = false;
};

/// Report-only diagnostics over n_triples random triples (exhaustive when the
/// mesh has fewer triples than requested). `tol` is the acceptable triangle
/// slack for approximate (graph-distance) meshes; a fixed 1e-12 round-off
/// allowance is always added on top so the analytic builders pass with tol=0.
MeshValidation validate_mesh(const ManifoldMesh& mesh, int n_triples,
                             std::uint64_t seed = 12345, double tol = 0.0);

}
