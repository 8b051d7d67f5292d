#pragma once

#include "constikit/material_api.hpp"
#include "constikit/tensor.hpp"
#include "constikit/voigt.hpp"

// Conversion between the host-style convention (total strain or deformation
// gradient in, second Piola-Kirchhoff stress and dS/dF out) and the UMAT-style
// convention (strain increments in, Cauchy stress and Jaumann-rate tangent out).
namespace constikit::bridge {

struct KinematicIncrement {
  UmatStrain dstran;                  // sym(dF * F_new^-1), engineering shears
  Tensor2 drot = Tensor2::Identity(); // rotation of the polar split of f_incr
  Tensor2 f_incr = Tensor2::Identity();  // F_new * F_old^-1
  double j_new = 1.0;
};

UmatCall small_strain_inputs(const HostRequest& req, const StateLayout& layout);

KinematicIncrement finite_strain_increment(const Tensor2& f_old, const Tensor2& f_new);

UmatCall finite_strain_inputs(const HostRequest& req, const StateLayout& layout);

// S = J F^-1 sigma F^-T
Tensor2 cauchy_to_second_pk(const Tensor2& sigma, const Tensor2& f);

// d(tau_ip)/d(F_kl) from the Jaumann-rate modulus C (tau_jaumann = J C : d):
//   J C_ipkm F^-1_lm + 1/2 d_ik F^-1_lm tau_mp - 1/2 F^-1_li tau_kp
//   + 1/2 d_pk F^-1_lm tau_im - 1/2 F^-1_lp tau_ik
// Result indexed (i, p, k, l). Throws ContractViolation if tau is not symmetric.
Tensor4 dtau_dF(const Tensor4& c_jaumann, const Tensor2& tau, const Tensor2& f);

// K_ijkl = dS_ij/dF_kl, flattened to 9x9 over row-major index pairs.
Matrix9 tangent_jaumann_to_dSdF(const Tensor4& c_jaumann, const Tensor2& tau, const Tensor2& f);

// Test hook: multiplies every returned host tangent by this factor.
// Used by the tangent-check fault-injection path; 1.0 in normal operation.
struct TangentFault {
  double scale = 1.0;
};

// Full wrapper: input transfer, material call, output transfer. Never mutates
// req.state; the updated state is returned in the response. Raises
// MaterialError when the material fails or returns non-finite values.
HostResponse eval(const HostRequest& req, const UmatMaterial& material,
                  const TangentFault& fault = {});

}  // namespace constikit::bridge
