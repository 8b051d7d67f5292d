#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "constikit/tensor.hpp"
#include "constikit/voigt.hpp"

namespace constikit {

enum class Regime { SmallStrain, FiniteStrain };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

// Inputs of one UMAT-style evaluation. Quantities are in UMAT component order,
// strains with engineering shears. statev holds the material's own slots only.
struct UmatCall {
  UmatStress stress;  // Cauchy stress at increment start
  std::vector<double> statev;
  UmatStrain stran;   // total strain at increment start
  UmatStrain dstran;  // strain increment
  double time = 0.0;  // pseudo-time at increment start
  double dtime = 0.0;
  std::vector<double> props;
  Tensor2 dfgrd0 = Tensor2::Identity();
  Tensor2 dfgrd1 = Tensor2::Identity();
  Tensor2 drot = Tensor2::Identity();
};

struct UmatResult {
  UmatStress stress;  // Cauchy stress at increment end
  std::vector<double> statev;
  Matrix6 ddsdde = Matrix6::Zero();  // rows/columns in UMAT order
};

// Host-style request: total strain (small strain) or deformation gradients
// (finite strain), plus properties, time increment and the bridge state vector.
struct HostRequest {
  Regime regime = Regime::SmallStrain;
  HostStrain strain;                    // SmallStrain only
  Tensor2 f_old = Tensor2::Identity();  // FiniteStrain only
  Tensor2 f_new = Tensor2::Identity();  // FiniteStrain only
  std::vector<double> par;
  double delta = 0.0;
  std::vector<double> state;
};

struct HostResponse {
  // Second Piola-Kirchhoff stress (finite strain) or small-strain stress.
  HostStress s;
  // 6x6 dS/dE in host order with engineering-shear columns (small strain) or
  // 9x9 dS_ij/dF_kl over row-major index pairs (finite strain).
  Eigen::MatrixXd tangent;
  std::vector<double> state;
};

// Layout of the bridge state vector:
//   slot 0        accumulated pseudo-time
//   slots 1-6     Cauchy stress at increment start (UMAT order)
//   slots 7-12    total strain at increment start (UMAT order, small strain only)
//   then          the material's own state variables
struct StateLayout {
  Regime regime = Regime::SmallStrain;
  int nstatv_user = 0;

  static constexpr int kTimeSlot = 0;
  static constexpr int kStressSlot = 1;
  static constexpr int kStrainSlot = 7;

  int header_length() const { return regime == Regime::SmallStrain ? 13 : 7; }
  int total_length() const { return header_length() + nstatv_user; }
};

struct UnpackedState {
  double time = 0.0;
  UmatStress stress;
  std::optional<UmatStrain> stran;
  std::vector<double> user;

  friend bool operator==(const UnpackedState&, const UnpackedState&) = default;
};

// Throws ContractViolation when stran presence disagrees with the regime or
// the user slot count disagrees with the layout.
std::vector<double> pack_state(const StateLayout& layout, double time, const UmatStress& stress,
                               const std::optional<UmatStrain>& stran,
                               std::span<const double> user);
UnpackedState unpack_state(const StateLayout& layout, std::span<const double> state);

struct MaterialInfo {
  std::string name;
  int nprops = 0;
  int nstatv_user = 0;
  Regime regime = Regime::SmallStrain;
  std::vector<std::string> prop_names;
  std::string description;
};

// A UMAT-style constitutive model. Implementations are pure: the result
// depends only on the call, and evaluate may run concurrently.
class UmatMaterial {
 public:
  virtual ~UmatMaterial() = default;
  virtual const MaterialInfo& info() const = 0;
  virtual UmatResult evaluate(const UmatCall& call) const = 0;

  // Scalar measure of accumulated plastic deformation read from the user
  // state (equivalent plastic strain, or summed slip). Zero when not defined.
  virtual double plastic_measure(std::span<const double> /*user_state*/) const { return 0.0; }

  // User state at the start of an analysis. Zeros unless the model needs
  // something else (crystal plasticity starts from F^p = I, tau_c = tau_0).
  virtual std::vector<double> initial_state(std::span<const double> /*props*/) const {
    return std::vector<double>(static_cast<std::size_t>(info().nstatv_user), 0.0);
  }
};

}  // namespace constikit
