#pragma once

#include <memory>
#include <string>
#include <vector>

#include "constikit/material_api.hpp"

namespace constikit {

// Built-in models:
//   linear_elastic          small   [E, nu]
//   j2_plasticity           small   [E, nu, sigma_y, h]
//   saint_venant_kirchhoff  finite  [E, nu]
//   neo_hookean             finite  [E, nu]
//   crystal_plasticity      finite  [C11, C12, C44, gdot0, n, h0, tau_s, tau_0, q,
//                                    phi1, Phi, phi2, secant_variant]
std::vector<std::string> builtin_material_names();

// Throws ContractViolation for an unknown name. The returned object lives for
// the whole program.
const UmatMaterial& builtin_material(const std::string& name);

}  // namespace constikit
