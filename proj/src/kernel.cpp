#include "fplap/kernel.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fplap/pair_kernels.hpp"

namespace fplap {

KernelMatrix assemble_kernel(const ManifoldMesh& mesh, double s, double p,
                             SingularityPolicy policy) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("fractional order must satisfy 0 < s < 1, got s=" +
                                std::to_string(s));
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument("integrability exponent must satisfy 1 < p < inf, got p=" +
                                std::to_string(p));
  if (!(mesh.dim > p * s))
    throw std::invalid_argument(
        "kernel requires N > p*s; got N=" + std::to_string(mesh.dim) +
        ", p*s=" + std::to_string(p * s));
  if (!(policy.floor_scale > 0.0))
    throw std::invalid_argument("singularity floor_scale must be positive");

  KernelMatrix K;
  K.mesh = &mesh;
  K.s = s;
  K.p = p;
  K.policy = policy;
  K.h = mesh.mean_edge_length();

  const std::size_t n = mesh.n();
  const double exponent = mesh.dim + p * s;
  K.w.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double floor_d = policy.floor_scale * 0.5 * (K.h[i] + K.h[j]);
      const double d = std::max(mesh.d(i, j), floor_d);
      const double wij = mesh.mu[i] * mesh.mu[j] * std::pow(d, -exponent);
      K.w[i * n + j] = wij;
      K.w[j * n + i] = wij;
    }
  }
  return K;
}

namespace {

void check_size(const std::vector<double>& u, const KernelMatrix& K,
                const char* what) {
  if (u.size() != K.n())
    throw std::invalid_argument(std::string(what) + ": field has " +
                                std::to_string(u.size()) + " values but the kernel mesh has " +
                                std::to_string(K.n()) + " vertices");
}

}  // namespace

double gagliardo_seminorm_p(const std::vector<double>& u, const KernelMatrix& K) {
  return weak_form_pairing(u, u, K);
}

double weak_form_pairing(const std::vector<double>& u,
                         const std::vector<double>& v, const KernelMatrix& K) {
  check_size(u, K, "weak_form_pairing(u)");
  check_size(v, K, "weak_form_pairing(v)");
  const auto kernels = kern::select(K.p);
  return kernels.pair_sum(u.data(), v.data(), K.w.data(), K.n(), K.p);
}

std::vector<double> apply_fractional_p_laplacian(const std::vector<double>& u,
                                                 const KernelMatrix& K) {
  check_size(u, K, "apply_fractional_p_laplacian");
  const std::size_t n = K.n();
  std::vector<double> out(n);
  const auto kernels = kern::select(K.p);
  kernels.row_sums(u.data(), K.w.data(), n, K.p, out.data());
  for (std::size_t i = 0; i < n; ++i) out[i] *= 2.0 / K.mesh->mu[i];
  return out;
}

double critical_exponent(int dim, double s, double p) {
  return dim * p / (dim - p * s);
}

void dump_kernel_csv(const KernelMatrix& K, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.precision(17);
  out << "# fplap kernel dump: n=" << K.n() << " s=" << K.s << " p=" << K.p
      << " N=" << K.mesh->dim << " floor_scale=" << K.policy.floor_scale << "\n";
  out << "i,j,w\n";
  const std::size_t n = K.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out << i << "," << j << "," << K.w[i * n + j] << "\n";
  if (!out) throw std::runtime_error(path + ": write failed");
}

}
