#pragma once

#include <vector>

#include "fplap/geometry.hpp"
#include "fplap/kernel.hpp"
#include "fplap/nonlinearity.hpp"

namespace fplap {

/// One real value per vertex, pinned to zero on the domain exterior (the
/// discrete W_0 constraint). Constructors and project() enforce the pin;
/// solver arithmetic only ever touches interior entries.
struct DiscreteField {
  std::vector<double> v;
  const DirichletDomain* dom = nullptr;  // non-owning

  DiscreteField() = default;
  DiscreteField(const DirichletDomain& d, std::size_t n) : v(n, 0.0), dom(&d) {}
  DiscreteField(const DirichletDomain& d, std::vector<double> values)
      : v(std::move(values)), dom(&d) {
    project();
  }

  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }

  /// Re-pin exterior entries to zero.
  void project() {
    for (int i : dom->exterior) v[i] = 0.0;
  }

  /// Interior indicator: 1 on Omega, 0 outside.
  static DiscreteField bump(const DirichletDomain& d, std::size_t n) {
    DiscreteField u(d, n);
    for (int i : d.interior) u.v[i] = 1.0;
    return u;
  }
};

/// The three terms of psi = I1 + I2 - K, reported separately:
///   nonlocal = (1/p) [u]^p, mass = (1/p) sum |u_i|^p mu_i,
///   reaction = sum_{Omega} F(x_i, u_i) mu_i.
struct EnergyParts {
  double psi = 0.0;
  double nonlocal = 0.0;
  double mass = 0.0;
  double reaction = 0.0;
};

/// Discrete energy functional over fields vanishing on the exterior. The
/// gradient is represented in the mu-weighted inner product
///   <g, v>_mu = sum_i g_i v_i mu_i,
/// so the residual dual norm is comparable across mesh refinements.
///
/// Pure given (kernel, domain, nonlinearity, u); safe for concurrent
/// evaluation against one shared instance.
class EnergyFunctional {
public:
  EnergyFunctional(const KernelMatrix& K, const DirichletDomain& dom,
                   const Nonlinearity& nl);

  /// psi and its components. The mass and reaction sums run over the interior
  /// only; with u = 0 outside they equal the whole-manifold integrals.
  EnergyParts energy(const DiscreteField& u) const;

  /// g_i = ((-Delta)^s_p u)_i + |u_i|^{p-2} u_i - f(x_i, u_i) on the interior,
  /// 0 on the exterior, so that <g, v>_mu is the directional derivative of psi
  /// along any admissible v.
  DiscreteField gradient(const DiscreteField& u) const;

  /// Dual norm of the constrained gradient:
  /// (sum_Omega |g_i|^{p'} mu_i)^{1/p'} with p' = p/(p-1). Zero exactly at
  /// discrete weak solutions.
  double residual_norm(const DiscreteField& u) const;
  double residual_norm_of_gradient(const DiscreteField& g) const;

  /// <a, b>_mu over the interior.
  double inner_mu(const DiscreteField& a, const DiscreteField& b) const;

  /// Full space norm to the p: [u]^p + sum |u_i|^p mu_i.
  double w_norm_p(const DiscreteField& u) const;
  double w_norm(const DiscreteField& u) const;

  double p() const { return K_.p; }
  const KernelMatrix& kernel() const { return K_; }
  const DirichletDomain& domain() const { return dom_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  const ManifoldMesh& mesh() const { return *K_.mesh; }

private:
  const KernelMatrix& K_;
  const DirichletDomain& dom_;
  const Nonlinearity& nl_;
};

}
