#include "constikit/registry.hpp"

#include <functional>
#include <map>
#include <numeric>

#include "constikit/errors.hpp"
#include "constikit/materials.hpp"

namespace constikit {

namespace {

namespace m = materials;

class LinearElastic final : public UmatMaterial {
 public:
  const MaterialInfo& info() const override { return info_; }
  UmatResult evaluate(const UmatCall& call) const override {
    return m::linear_elastic_umat(call, m::isotropic_from_props(call.props));
  }

 private:
  MaterialInfo info_{"linear_elastic", 2, 0, Regime::SmallStrain, {"E", "nu"},
                     "isotropic linear elasticity, incremental small-strain update"};
};

class SaintVenantKirchhoff final : public UmatMaterial {
 public:
  const MaterialInfo& info() const override { return info_; }
  UmatResult evaluate(const UmatCall& call) const override {
    return m::saint_venant_kirchhoff_umat(call, m::isotropic_from_props(call.props));
  }

 private:
  MaterialInfo info_{"saint_venant_kirchhoff", 2, 0, Regime::FiniteStrain, {"E", "nu"},
                     "isotropic linear elasticity in Green-Lagrange strain (finite strain)"};
};

class J2Plasticity final : public UmatMaterial {
 public:
  const MaterialInfo& info() const override { return info_; }
  UmatResult evaluate(const UmatCall& call) const override {
    return m::j2_plasticity_umat(call, m::j2_from_props(call.props));
  }
  double plastic_measure(std::span<const double> user) const override {
    return user.size() > 6 ? user[6] : 0.0;
  }

 private:
  MaterialInfo info_{"j2_plasticity",
                     4,
                     m::kJ2StateSize,
                     Regime::SmallStrain,
                     {"E", "nu", "sigma_y", "h"},
                     "von Mises plasticity, linear isotropic hardening, radial return"};
};

class NeoHookean final : public UmatMaterial {
 public:
  const MaterialInfo& info() const override { return info_; }
  UmatResult evaluate(const UmatCall& call) const override {
    return m::neo_hookean_umat(call, m::isotropic_from_props(call.props));
  }

 private:
  MaterialInfo info_{"neo_hookean", 2, 0, Regime::FiniteStrain, {"E", "nu"},
                     "compressible neo-Hookean hyperelasticity"};
};

class CrystalPlasticity final : public UmatMaterial {
 public:
  const MaterialInfo& info() const override { return info_; }
  UmatResult evaluate(const UmatCall& call) const override {
    return m::crystal_plasticity_umat(call, m::crystal_from_props(call.props));
  }
  double plastic_measure(std::span<const double> user) const override {
    if (user.size() != static_cast<std::size_t>(m::kCrystalStateSize)) return 0.0;
    const auto slip = user.subspan(m::kCrystalSlipSlot, 12);
    return std::accumulate(slip.begin(), slip.end(), 0.0);
  }
  std::vector<double> initial_state(std::span<const double> props) const override {
    return m::crystal_initial_state(m::crystal_from_props(props));
  }

 private:
  MaterialInfo info_{"crystal_plasticity",
                     13,
                     m::kCrystalStateSize,
                     Regime::FiniteStrain,
                     {"C11", "C12", "C44", "gamma_dot_0", "n", "h0", "tau_s", "tau_0", "q", "phi1",
                      "Phi", "phi2", "secant_variant"},
                     "FCC elastic-viscoplastic crystal plasticity, 12 {111}<110> systems"};
};

const std::map<std::string, std::unique_ptr<UmatMaterial>>& registry() {
  static const auto reg = [] {
    std::map<std::string, std::unique_ptr<UmatMaterial>> r;
    r["linear_elastic"] = std::make_unique<LinearElastic>();
    r["j2_plasticity"] = std::make_unique<J2Plasticity>();
    r["saint_venant_kirchhoff"] = std::make_unique<SaintVenantKirchhoff>();
    r["neo_hookean"] = std::make_unique<NeoHookean>();
    r["crystal_plasticity"] = std::make_unique<CrystalPlasticity>();
    return r;
  }();
  return reg;
}

}  // namespace

std::vector<std::string> builtin_material_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

const UmatMaterial& builtin_material(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw ContractViolation("unknown material '" + name + "'");
  return *it->second;
}

}  // namespace constikit
