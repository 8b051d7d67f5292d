#include "constikit/bridge.hpp"

#include <cmath>
#include <sstream>

#include "constikit/errors.hpp"

namespace constikit::bridge {

namespace {

void check_state_length(const HostRequest& req, const StateLayout& layout) {
  if (static_cast<int>(req.state.size()) != layout.total_length()) {
    std::ostringstream msg;
    msg << "bridge: state vector has " << req.state.size() << " slots, material layout needs "
        << layout.total_length() << " (" << layout.header_length() << " header + "
        << layout.nstatv_user << " user)";
    throw ContractViolation(msg.str());
  }
}

template <class V>
V add(const V& a, const V& b) {
  V out;
  for (int i = 0; i < 6; ++i) out[i] = a[i] + b[i];
  return out;
}

// Logarithmic strain ln V of a deformation gradient, reported as STRAN.
UmatStrain hencky_strain(const Tensor2& f) {
  const Eigen::SelfAdjointEigenSolver<Tensor2> eig(f * f.transpose());
  const Vector3 logs = eig.eigenvalues().array().log() * 0.5;
  const Tensor2 h = eig.eigenvectors() * logs.asDiagonal() * eig.eigenvectors().transpose();
  return to_umat_strain(h);
}

bool all_finite(const UmatResult& r) {
  for (double v : r.stress.c)
    if (!std::isfinite(v)) return false;
  for (double v : r.statev)
    if (!std::isfinite(v)) return false;
  return r.ddsdde.allFinite();
}

UmatResult call_material(const UmatMaterial& material, const UmatCall& call) {
  UmatResult result = material.evaluate(call);
  if (static_cast<int>(result.statev.size()) != material.info().nstatv_user) {
    throw MaterialError("material '" + material.info().name + "' returned " +
                        std::to_string(result.statev.size()) + " state variables, expected " +
                        std::to_string(material.info().nstatv_user));
  }
  if (!all_finite(result)) {
    throw MaterialError("material '" + material.info().name + "' returned non-finite output");
  }
  return result;
}

}  // namespace

UmatCall small_strain_inputs(const HostRequest& req, const StateLayout& layout) {
  if (req.regime != Regime::SmallStrain || layout.regime != Regime::SmallStrain) {
    throw ContractViolation("small_strain_inputs: request is not a small-strain request");
  }
  check_state_length(req, layout);
  const UnpackedState st = unpack_state(layout, req.state);

  UmatCall call;
  call.stress = st.stress;
  call.statev = st.user;
  call.stran = *st.stran;
  const UmatStrain total = reorder_strain_host_to_umat(req.strain);
  for (int i = 0; i < 6; ++i) call.dstran[i] = total[i] - call.stran[i];
  call.time = st.time;
  call.dtime = req.delta;
  call.props = req.par;
  return call;
}

KinematicIncrement finite_strain_increment(const Tensor2& f_old, const Tensor2& f_new) {
  const double j_old = det3(f_old);
  const double j_new = det3(f_new);
  if (!(j_old > 0.0) || !(j_new > 0.0)) {
    std::ostringstream msg;
    msg << "finite_strain_increment: non-positive Jacobian (J_old = " << j_old
        << ", J_new = " << j_new << ")";
    throw InvalidConfiguration(msg.str());
  }
  const Tensor2 f_new_inv = inv3(f_new);
  const Tensor2 df = f_new - f_old;

  KinematicIncrement inc;
  const Tensor2 de = 0.5 * (df * f_new_inv + f_new_inv.transpose() * df.transpose());
  inc.dstran = to_umat_strain(de);
  inc.f_incr = f_new * inv3(f_old);
  inc.drot = polar_decompose(inc.f_incr).rotation;
  inc.j_new = j_new;
  return inc;
}

UmatCall finite_strain_inputs(const HostRequest& req, const StateLayout& layout) {
  if (req.regime != Regime::FiniteStrain || layout.regime != Regime::FiniteStrain) {
    throw ContractViolation("finite_strain_inputs: request is not a finite-strain request");
  }
  check_state_length(req, layout);
  const UnpackedState st = unpack_state(layout, req.state);
  const KinematicIncrement inc = finite_strain_increment(req.f_old, req.f_new);

  UmatCall call;
  call.stress = st.stress;
  call.statev = st.user;
  call.stran = hencky_strain(req.f_old);
  call.dstran = inc.dstran;
  call.time = st.time;
  call.dtime = req.delta;
  call.props = req.par;
  call.dfgrd0 = req.f_old;
  call.dfgrd1 = req.f_new;
  call.drot = inc.drot;
  return call;
}

Tensor2 cauchy_to_second_pk(const Tensor2& sigma, const Tensor2& f) {
  const double j = det3(f);
  if (!(j > 0.0)) throw InvalidConfiguration("cauchy_to_second_pk: det F is not positive");
  const Tensor2 f_inv = inv3(f);
  return sym(j * f_inv * sigma * f_inv.transpose());
}

Tensor4 dtau_dF(const Tensor4& c, const Tensor2& tau, const Tensor2& f) {
  const double asym = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * std::max(1.0, tau.cwiseAbs().maxCoeff())) {
    throw ContractViolation("dtau_dF: Kirchhoff stress is not symmetric");
  }
  const double j = det3(f);
  if (!(j > 0.0)) throw InvalidConfiguration("dtau_dF: det F is not positive");
  const Tensor2 fi = inv3(f);
  const Tensor2 fi_tau = fi * tau;  // (F^-1 tau)_lp = F^-1_lm tau_mp

  Tensor4 out;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.0;
          for (int m = 0; m < 3; ++m) v += c(i, p, k, m) * fi(l, m);
          v *= j;
          if (i == k) v += 0.5 * fi_tau(l, p);
          v -= 0.5 * fi(l, i) * tau(k, p);
          if (p == k) v += 0.5 * fi_tau(l, i);
          v -= 0.5 * fi(l, p) * tau(i, k);
          out(i, p, k, l) = v;
        }
  return out;
}

Matrix9 tangent_jaumann_to_dSdF(const Tensor4& c, const Tensor2& tau, const Tensor2& f) {
  const Tensor4 dtau = dtau_dF(c, tau, f);
  const Tensor2 fi = inv3(f);
  const Tensor2 s = fi * tau * fi.transpose();

  Matrix9 k_out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          double v = 0.0;
          for (int q = 0; q < 3; ++q)
            for (int p = 0; p < 3; ++p) v += fi(i, q) * dtau(q, p, k, l) * fi(j, p);
          v -= fi(i, k) * s(l, j);
          v -= s(i, l) * fi(j, k);
          k_out(pair_index(i, j), pair_index(k, l)) = v;
        }
  return k_out;
}

HostResponse eval(const HostRequest& req, const UmatMaterial& material, const TangentFault& fault) {
  const MaterialInfo& info = material.info();
  if (req.regime != info.regime) {
    throw ContractViolation(std::string("bridge: material '") + info.name + "' is a " +
                            to_string(info.regime) + "-strain model, request is " +
                            to_string(req.regime) + "-strain");
  }
  const StateLayout layout{info.regime, info.nstatv_user};
  HostResponse out;

  if (req.regime == Regime::SmallStrain) {
    const UmatCall call = small_strain_inputs(req, layout);
    const UmatResult res = call_material(material, call);
    out.s = reorder_stress_umat_to_host(res.stress);
    out.tangent = reorder_tangent_umat_to_host(res.ddsdde);
    if (fault.scale != 1.0) out.tangent *= fault.scale;
    const UmatStrain stran_new = add(call.stran, call.dstran);
    out.state = pack_state(layout, call.time + req.delta, res.stress, stran_new, res.statev);
    return out;
  }

  const UmatCall call = finite_strain_inputs(req, layout);
  const UmatResult res = call_material(material, call);
  const Tensor2 sigma = from_umat_stress(res.stress);
  const double j = det3(req.f_new);
  out.s = to_host_stress(cauchy_to_second_pk(sigma, req.f_new));
  const Tensor4 c = tensor4_from_ddsdde(res.ddsdde);
  Matrix9 k = tangent_jaumann_to_dSdF(c, j * sigma, req.f_new);
  if (fault.scale != 1.0) k *= fault.scale;
  out.tangent = k;
  out.state = pack_state(layout, call.time + req.delta, res.stress, std::nullopt, res.statev);
  return out;
}

}  // namespace constikit::bridge
