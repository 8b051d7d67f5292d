#pragma once

#include <array>

#include "constikit/tensor.hpp"

namespace constikit {

// Component order of a packed symmetric tensor.
//   Host: xx, yy, zz, yz, xz, xy   (strain shears tensorial)
//   Umat: xx, yy, zz, xy, xz, yz   (strain shears engineering, gamma = 2 eps)
enum class VoigtOrder { Host, Umat };
enum class VoigtKind { Stress, Strain };

// Six packed components tagged with order and kind at the type level, so that
// handing a host strain to a function expecting a UMAT strain does not compile.
template <VoigtOrder Order, VoigtKind Kind>
struct Voigt {
  std::array<double, 6> c{};

  static constexpr VoigtOrder order = Order;
  static constexpr VoigtKind kind = Kind;

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Eigen::Matrix<double, 6, 1> vec() const {
    return Eigen::Map<const Eigen::Matrix<double, 6, 1>>(c.data());
  }
  static Voigt from(const Eigen::Matrix<double, 6, 1>& v) {
    Voigt out;
    Eigen::Map<Eigen::Matrix<double, 6, 1>>(out.c.data()) = v;
    return out;
  }

  friend bool operator==(const Voigt&, const Voigt&) = default;
};

using HostStrain = Voigt<VoigtOrder::Host, VoigtKind::Strain>;
using HostStress = Voigt<VoigtOrder::Host, VoigtKind::Stress>;
using UmatStrain = Voigt<VoigtOrder::Umat, VoigtKind::Strain>;
using UmatStress = Voigt<VoigtOrder::Umat, VoigtKind::Stress>;

// (i, j) of each packed slot.
inline constexpr std::array<std::array<int, 2>, 6> kHostSlots{
    {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};
inline constexpr std::array<std::array<int, 2>, 6> kUmatSlots{
    {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

// Host slot h holds the same tensor component as UMAT slot kHostToUmat[h].
inline constexpr std::array<int, 6> kHostToUmat{0, 1, 2, 5, 4, 3};

UmatStrain reorder_strain_host_to_umat(const HostStrain& v);
HostStrain reorder_strain_umat_to_host(const UmatStrain& v);
HostStress reorder_stress_umat_to_host(const UmatStress& v);
UmatStress reorder_stress_host_to_umat(const HostStress& v);

// Row and column permutation of a 6x6 operator between UMAT and host order.
// No transpose: in-memory matrices keep (row, column) meaning.
Matrix6 reorder_tangent_umat_to_host(const Matrix6& m);
Matrix6 reorder_tangent_host_to_umat(const Matrix6& m);

UmatStress to_umat_stress(const Tensor2& sigma);
Tensor2 from_umat_stress(const UmatStress& v);
HostStress to_host_stress(const Tensor2& sigma);
Tensor2 from_host_stress(const HostStress& v);
UmatStrain to_umat_strain(const Tensor2& eps);  // doubles the shears
Tensor2 from_umat_strain(const UmatStrain& v);
HostStrain to_host_strain(const Tensor2& eps);
Tensor2 from_host_strain(const HostStrain& v);

// DDSDDE (UMAT order, engineering-shear columns) <-> fourth-order tensor with
// both minor symmetries: C_ijkl = D[slot(ij)][slot(kl)].
Tensor4 tensor4_from_ddsdde(const Matrix6& ddsdde);
Matrix6 ddsdde_from_tensor4(const Tensor4& c);

}  // namespace constikit
