#include "constikit/voigt.hpp"

namespace constikit {

UmatStrain reorder_strain_host_to_umat(const HostStrain& v) {
  UmatStrain out;
  for (int h = 0; h < 6; ++h) {
    const int u = kHostToUmat[static_cast<std::size_t>(h)];
    out[u] = h < 3 ? v[h] : 2.0 * v[h];
  }
  return out;
}

HostStrain reorder_strain_umat_to_host(const UmatStrain& v) {
  HostStrain out;
  for (int h = 0; h < 6; ++h) {
    const int u = kHostToUmat[static_cast<std::size_t>(h)];
    out[h] = h < 3 ? v[u] : 0.5 * v[u];
  }
  return out;
}

HostStress reorder_stress_umat_to_host(const UmatStress& v) {
  HostStress out;
  for (int h = 0; h < 6; ++h) out[h] = v[kHostToUmat[static_cast<std::size_t>(h)]];
  return out;
}

UmatStress reorder_stress_host_to_umat(const HostStress& v) {
  UmatStress out;
  for (int h = 0; h < 6; ++h) out[kHostToUmat[static_cast<std::size_t>(h)]] = v[h];
  return out;
}

Matrix6 reorder_tangent_umat_to_host(const Matrix6& m) {
  Matrix6 out;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      out(r, c) = m(kHostToUmat[static_cast<std::size_t>(r)], kHostToUmat[static_cast<std::size_t>(c)]);
  return out;
}

Matrix6 reorder_tangent_host_to_umat(const Matrix6& m) {
  Matrix6 out;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      out(kHostToUmat[static_cast<std::size_t>(r)], kHostToUmat[static_cast<std::size_t>(c)]) = m(r, c);
  return out;
}

namespace {

template <class V>
V pack(const Tensor2& t, const std::array<std::array<int, 2>, 6>& slots, double shear_factor) {
  V out;
  for (int s = 0; s < 6; ++s) {
    const auto [i, j] = slots[static_cast<std::size_t>(s)];
    out[s] = s < 3 ? t(i, j) : shear_factor * 0.5 * (t(i, j) + t(j, i));
  }
  return out;
}

template <class V>
Tensor2 unpack(const V& v, const std::array<std::array<int, 2>, 6>& slots, double shear_factor) {
  Tensor2 t;
  for (int s = 0; s < 6; ++s) {
    const auto [i, j] = slots[static_cast<std::size_t>(s)];
    const double x = s < 3 ? v[s] : v[s] / shear_factor;
    t(i, j) = x;
    t(j, i) = x;
  }
  return t;
}

}  // namespace

UmatStress to_umat_stress(const Tensor2& s) { return pack<UmatStress>(s, kUmatSlots, 1.0); }
Tensor2 from_umat_stress(const UmatStress& v) { return unpack(v, kUmatSlots, 1.0); }
HostStress to_host_stress(const Tensor2& s) { return pack<HostStress>(s, kHostSlots, 1.0); }
Tensor2 from_host_stress(const HostStress& v) { return unpack(v, kHostSlots, 1.0); }
UmatStrain to_umat_strain(const Tensor2& e) { return pack<UmatStrain>(e, kUmatSlots, 2.0); }
Tensor2 from_umat_strain(const UmatStrain& v) { return unpack(v, kUmatSlots, 2.0); }
HostStrain to_host_strain(const Tensor2& e) { return pack<HostStrain>(e, kHostSlots, 1.0); }
Tensor2 from_host_strain(const HostStrain& v) { return unpack(v, kHostSlots, 1.0); }

Tensor4 tensor4_from_ddsdde(const Matrix6& d) {
  Tensor4 c;
  for (int a = 0; a < 6; ++a) {
    const auto [i, j] = kUmatSlots[static_cast<std::size_t>(a)];
    for (int b = 0; b < 6; ++b) {
      const auto [k, l] = kUmatSlots[static_cast<std::size_t>(b)];
      const double v = d(a, b);
      c(i, j, k, l) = v;
      c(j, i, k, l) = v;
      c(i, j, l, k) = v;
      c(j, i, l, k) = v;
    }
  }
  return c;
}

Matrix6 ddsdde_from_tensor4(const Tensor4& c) {
  Matrix6 d;
  for (int a = 0; a < 6; ++a) {
    const auto [i, j] = kUmatSlots[static_cast<std::size_t>(a)];
    for (int b = 0; b < 6; ++b) {
      const auto [k, l] = kUmatSlots[static_cast<std::size_t>(b)];
      d(a, b) = 0.25 * (c(i, j, k, l) + c(j, i, k, l) + c(i, j, l, k) + c(j, i, l, k));
    }
  }
  return d;
}

}  // namespace constikit
