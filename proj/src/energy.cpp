#include "fplap/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "fplap/summation.hpp"

namespace fplap {

namespace {

void check_domain(const DiscreteField& u, const DirichletDomain& dom,
                  const char* what) {
  if (u.dom != &dom || u.size() != dom.n())
    throw std::invalid_argument(std::string(what) +
                                ": field does not belong to this domain");
}

}  // namespace

EnergyFunctional::EnergyFunctional(const KernelMatrix& K,
                                   const DirichletDomain& dom,
                                   const Nonlinearity& nl)
    : K_(K), dom_(dom), nl_(nl) {
  if (K.n() != dom.n())
    throw std::invalid_argument(
        "kernel and domain are built over different meshes");
}

EnergyParts EnergyFunctional::energy(const DiscreteField& u) const {
  check_domain(u, dom_, "energy");
  const double p = K_.p;
  const auto& mu = K_.mesh->mu;

  EnergyParts parts;
  parts.nonlocal = gagliardo_seminorm_p(u.v, K_) / p;

  NeumaierSum mass, reaction;
  for (int i : dom_.interior) {
    mass.add(std::pow(std::fabs(u.v[i]), p) * mu[i]);
    reaction.add(nl_.F(i, u.v[i]) * mu[i]);
  }
  parts.mass = mass.value() / p;
  parts.reaction = reaction.value();
  parts.psi = parts.nonlocal + parts.mass - parts.reaction;
  return parts;
}

DiscreteField EnergyFunctional::gradient(const DiscreteField& u) const {
  check_domain(u, dom_, "gradient");
  const double p = K_.p;
  const std::vector<double> lap = apply_fractional_p_laplacian(u.v, K_);
  DiscreteField g(dom_, u.size());
  for (int i : dom_.interior) {
    const double ui = u.v[i];
    const double mass_term =
        ui == 0.0 ? 0.0 : std::pow(std::fabs(ui), p - 2.0) * ui;
    g.v[i] = lap[i] + mass_term - nl_.f(i, ui);
  }
  return g;
}

double EnergyFunctional::residual_norm_of_gradient(const DiscreteField& g) const {
  const double p = K_.p;
  const double pc = p / (p - 1.0);
  const auto& mu = K_.mesh->mu;
  NeumaierSum acc;
  for (int i : dom_.interior)
    acc.add(std::pow(std::fabs(g.v[i]), pc) * mu[i]);
  return std::pow(acc.value(), 1.0 / pc);
}

double EnergyFunctional::residual_norm(const DiscreteField& u) const {
  return residual_norm_of_gradient(gradient(u));
}

double EnergyFunctional::inner_mu(const DiscreteField& a,
                                  const DiscreteField& b) const {
  const auto& mu = K_.mesh->mu;
  NeumaierSum acc;
  for (int i : dom_.interior) acc.add(a.v[i] * b.v[i] * mu[i]);
  return acc.value();
}

double EnergyFunctional::w_norm_p(const DiscreteField& u) const {
  const double p = K_.p;
  const auto& mu = K_.mesh->mu;
  NeumaierSum mass;
  for (int i : dom_.interior)
    mass.add(std::pow(std::fabs(u.v[i]), p) * mu[i]);
  return gagliardo_seminorm_p(u.v, K_) + mass.value();
}

double EnergyFunctional::w_norm(const DiscreteField& u) const {
  return std::pow(w_norm_p(u), 1.0 / K_.p);
}

}
