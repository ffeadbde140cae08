#pragma once

#include <string>
#include <vector>

#include "fplap/geometry.hpp"

namespace fplap {

/// Clamping policy for the kernel singularity at coincident points. The
/// continuum operator excises a geodesic ball around the singularity
/// (principal value); discretely the diagonal is excluded and near-diagonal
/// distances are clamped at d_floor(i,j) = floor_scale * (h_i + h_j)/2, with
/// h_i the mean incident edge length. Pairs below the floor are clamped,
/// never dropped, which preserves symmetry.
struct SingularityPolicy {
  double floor_scale = 0.5;
};

/// Precomputed symmetric nonlocal weights
///   W_ij = mu_i mu_j / max(d_ij, d_floor(i,j))^{N + p s},  W_ii = 0.
/// Dense storage: the kernel has global support, so truncation would change
/// the operator. Immutable after assembly; concurrent reads are fine.
struct KernelMatrix {
  const ManifoldMesh* mesh = nullptr;  // non-owning
  double s = 0.0;
  double p = 0.0;
  SingularityPolicy policy;
  std::vector<double> w;  // n*n row-major
  std::vector<double> h;  // mean incident edge length per vertex

  std::size_t n() const { return h.size(); }
  double weight(std::size_t i, std::size_t j) const { return w[i * n() + j]; }
  double floor_distance(std::size_t i, std::size_t j) const {
    return policy.floor_scale * 0.5 * (h[i] + h[j]);
  }
};

/// Validates 0<s<1, 1<p, N>ps (throws std::invalid_argument naming the
/// violated constraint) and assembles the dense weight matrix.
KernelMatrix assemble_kernel(const ManifoldMesh& mesh, double s, double p,
                             SingularityPolicy policy = {});

/// [u]^p: the p-th power of the Gagliardo seminorm, as the full ordered
/// double sum  sum_{i != j} |u_i - u_j|^p W_ij. Every identity in this
/// project (duality, Picone, energy splitting) assumes this ordered-double-sum
/// convention; it is fixed here and nowhere else.
double gagliardo_seminorm_p(const std::vector<double>& u, const KernelMatrix& K);

/// sum_{i != j} |u_i - u_j|^{p-2} (u_i - u_j)(v_i - v_j) W_ij.
/// weak_form_pairing(u, u) and gagliardo_seminorm_p(u) are the same call, so
/// they agree bit for bit.
double weak_form_pairing(const std::vector<double>& u,
                         const std::vector<double>& v, const KernelMatrix& K);

/// Pointwise operator: out_i = (2/mu_i) sum_{j != i} |u_i-u_j|^{p-2}(u_i-u_j) W_ij.
/// Satisfies sum_i u_i out_i mu_i = gagliardo_seminorm_p(u) to round-off (the
/// factor 2 cancels against ordered-vs-unordered pair counting).
std::vector<double> apply_fractional_p_laplacian(const std::vector<double>& u,
                                                 const KernelMatrix& K);

/// Critical exponent p*_s = N p / (N - p s); callers guarantee N > ps.
double critical_exponent(int dim, double s, double p);

/// CSV dump of the upper triangle with a header carrying (n, s, p, N, policy).
void dump_kernel_csv(const KernelMatrix& K, const std::string& path);

}
