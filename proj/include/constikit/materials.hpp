#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "constikit/material_api.hpp"
#include "constikit/tensor.hpp"

namespace constikit::materials {

struct IsotropicElastic {
  double young = 0.0;    // Pa
  double poisson = 0.0;

  double shear_modulus() const { return young / (2.0 * (1.0 + poisson)); }
  double lame_lambda() const {
    return young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  }
  double bulk_modulus() const { return young / (3.0 * (1.0 - 2.0 * poisson)); }
};

struct CubicElastic {
  double c11 = 0.0;  // Pa
  double c12 = 0.0;
  double c44 = 0.0;
};

// Throws ContractViolation unless E > 0 and -1 < nu < 0.5.
void validate(const IsotropicElastic& e);
// Throws unless the cubic stiffness is positive definite.
void validate(const CubicElastic& c);

Tensor4 isotropic_stiffness(const IsotropicElastic& e);
Tensor4 cubic_stiffness(const CubicElastic& c, const Tensor2& orientation = Tensor2::Identity());
// C'_ijkl = Q_ia Q_jb Q_kc Q_ld C_abcd
Tensor4 rotate(const Tensor4& c, const Tensor2& q);

// Isotropic stiffness as a DDSDDE matrix (UMAT order, engineering shear columns).
Matrix6 isotropic_ddsdde(const IsotropicElastic& e);

UmatResult linear_elastic_umat(const UmatCall& call, const IsotropicElastic& params);

// St. Venant-Kirchhoff: S = C : E with E the Green-Lagrange strain of f.
// Returns Cauchy stress and the exact Jaumann-rate modulus of the Kirchhoff stress.
struct ElasticResponse {
  Tensor2 cauchy;
  Tensor4 jaumann;  // C such that tau_jaumann = J C : d
};
ElasticResponse saint_venant_kirchhoff(const Tensor2& f, const Tensor4& stiffness);

UmatResult saint_venant_kirchhoff_umat(const UmatCall& call, const IsotropicElastic& params);

// J2 plasticity with linear isotropic hardening.
struct J2Params {
  IsotropicElastic elastic;
  double yield_stress = 0.0;  // Pa
  double hardening = 0.0;     // Pa
};

// User state layout: plastic strain (6, UMAT order, tensorial shears), then
// equivalent plastic strain.
inline constexpr int kJ2StateSize = 7;

UmatResult j2_plasticity_umat(const UmatCall& call, const J2Params& params);

// sigma = mu/J (b - tr(b)/3 I) + K (J - 1) I
UmatResult neo_hookean_umat(const UmatCall& call, const IsotropicElastic& params);
ElasticResponse neo_hookean(const Tensor2& f, const IsotropicElastic& params);

// Crystal plasticity --------------------------------------------------------

struct SlipSystem {
  Vector3 s;  // slip direction
  Vector3 n;  // slip plane normal
};

// The twelve {111}<110> systems of an FCC lattice, unit vectors, crystal frame.
const std::array<SlipSystem, 12>& fcc_slip_systems();

double resolved_shear(const Tensor2& stress, const SlipSystem& sys);

struct CrystalParams {
  CubicElastic elastic;
  double gamma_dot_0 = 0.0;  // 1/s
  double rate_exponent = 1.0;
  double h0 = 0.0;     // Pa
  double tau_s = 0.0;  // Pa
  double tau_0 = 0.0;  // Pa
  double latent_ratio = 1.0;  // q for alpha != beta, self hardening is 1
  Tensor2 orientation = Tensor2::Identity();  // crystal -> sample
  // Reads the hardening modulus literally as sec^2 instead of sech^2.
  bool hardening_secant_variant = false;
  // First-order F^p update instead of the exponential map (test alternative).
  bool first_order_update = false;
};

void validate(const CrystalParams& p);

// gamma_dot = gamma_dot_0 |tau / tau_c|^n sign(tau)
double slip_rate(double tau, double tau_c, const CrystalParams& p);

// Hardening modulus h(Gamma) = h0 sech^2(h0 Gamma / (tau_s - tau_0)).
double hardening_modulus(double gamma_acc, const CrystalParams& p);

// tau_c_dot^a = sum_b q_ab h(Gamma) |gamma_dot^b|
std::array<double, 12> hardening_rate(double gamma_acc, const std::array<double, 12>& slip_rates,
                                      const CrystalParams& p);

// User state layout: F^p (9, row-major), tau_c (12), Gamma (1), accumulated
// |gamma| per system (12).
inline constexpr int kCrystalFpSlot = 0;
inline constexpr int kCrystalTauCSlot = 9;
inline constexpr int kCrystalGammaSlot = 21;
inline constexpr int kCrystalSlipSlot = 22;
inline constexpr int kCrystalStateSize = 34;

std::vector<double> crystal_initial_state(const CrystalParams& p);

struct CrystalUpdate {
  Tensor2 cauchy;
  Tensor2 fp;
  std::array<double, 12> tau_c{};
  double gamma_acc = 0.0;
  std::array<double, 12> slip{};   // accumulated |gamma|
  std::array<double, 12> dgamma{}; // increment slip of this update
  int iterations = 0;
};

// Backward-Euler update over dtime with exponential-map F^p. Throws
// MaterialError when the local Newton iteration does not converge.
CrystalUpdate crystal_update(const Tensor2& f_new, std::span<const double> state, double dtime,
                             const CrystalParams& p);

UmatResult crystal_plasticity_umat(const UmatCall& call, const CrystalParams& params);

// Parameter records from UMAT property vectors ------------------------------
//   linear_elastic, saint_venant_kirchhoff, neo_hookean: [E, nu]
//   j2_plasticity: [E, nu, sigma_y, h]
//   crystal_plasticity: [C11, C12, C44, gamma_dot_0, n, h0, tau_s, tau_0, q,
//                        phi1, Phi, phi2 (Bunge, rad), secant_variant (0/1)]
IsotropicElastic isotropic_from_props(std::span<const double> props);
J2Params j2_from_props(std::span<const double> props);
CrystalParams crystal_from_props(std::span<const double> props);

// Property vector with the crystal parameters of the reference FCC metal.
std::vector<double> reference_crystal_props(double phi1 = 0.0, double Phi = 0.0,
                                            double phi2 = 0.0);

}  // namespace constikit::materials
