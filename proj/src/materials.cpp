#include "constikit/materials.hpp"

#include <cmath>
#include <sstream>

#include "constikit/errors.hpp"
#include "constikit/voigt.hpp"

namespace constikit::materials {

namespace {

constexpr double kron(int i, int j) { return i == j ? 1.0 : 0.0; }

void require_props(std::span<const double> props, std::size_t n, const char* model) {
  if (props.size() < n) {
    std::ostringstream msg;
    msg << model << ": expected " << n << " properties, got " << props.size();
    throw ContractViolation(msg.str());
  }
}

}  // namespace

void validate(const IsotropicElastic& e) {
  if (!(e.young > 0.0)) throw ContractViolation("isotropic elasticity: E must be positive");
  if (!(e.poisson > -1.0 && e.poisson < 0.5))
    throw ContractViolation("isotropic elasticity: nu must lie in (-1, 0.5)");
}

void validate(const CubicElastic& c) {
  // Eigenvalues of the cubic stiffness: C11 + 2 C12, C11 - C12, 2 C44 (twice).
  if (!(c.c11 + 2.0 * c.c12 > 0.0 && c.c11 - c.c12 > 0.0 && c.c44 > 0.0))
    throw ContractViolation("cubic elasticity: stiffness is not positive definite");
}

Tensor4 isotropic_stiffness(const IsotropicElastic& e) {
  const double lam = e.lame_lambda();
  const double mu = e.shear_modulus();
  Tensor4 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c(i, j, k, l) = lam * kron(i, j) * kron(k, l) +
                          mu * (kron(i, k) * kron(j, l) + kron(i, l) * kron(j, k));
  return c;
}

Tensor4 rotate(const Tensor4& c, const Tensor2& q) {
  // Pair-space rotation P[(ij),(ab)] = Q_ia Q_jb, then C' = P C P^T.
  Matrix9 p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) p(pair_index(i, j), pair_index(a, b)) = q(i, a) * q(j, b);
  return Tensor4(p * c.matrix() * p.transpose());
}

Tensor4 cubic_stiffness(const CubicElastic& cub, const Tensor2& orientation) {
  Tensor4 c;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        c(i, i, i, i) = cub.c11;
      } else {
        c(i, i, j, j) = cub.c12;
        c(i, j, i, j) = cub.c44;
        c(i, j, j, i) = cub.c44;
      }
    }
  }
  if (orientation == Tensor2::Identity()) return c;
  return rotate(c, orientation);
}

Matrix6 isotropic_ddsdde(const IsotropicElastic& e) {
  const double lam = e.lame_lambda();
  const double mu = e.shear_modulus();
  Matrix6 d = Matrix6::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) d(i, j) = lam;
    d(i, i) = lam + 2.0 * mu;
    d(i + 3, i + 3) = mu;
  }
  return d;
}

UmatResult linear_elastic_umat(const UmatCall& call, const IsotropicElastic& params) {
  validate(params);
  UmatResult out;
  out.ddsdde = isotropic_ddsdde(params);
  out.stress = UmatStress::from(call.stress.vec() + out.ddsdde * call.dstran.vec());
  out.statev = call.statev;
  return out;
}

ElasticResponse saint_venant_kirchhoff(const Tensor2& f, const Tensor4& stiffness) {
  const double j = det3(f);
  if (!(j > 0.0)) throw InvalidConfiguration("saint_venant_kirchhoff: det F is not positive");
  const Tensor2 green = 0.5 * (f.transpose() * f - Tensor2::Identity());
  Eigen::Matrix<double, 9, 1> e9 = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(green.data());
  // Column-major map of a symmetric matrix equals the row-major pair vector.
  const Eigen::Matrix<double, 9, 1> s9 = stiffness.matrix() * e9;
  const Tensor2 pk2 = sym(Eigen::Map<const Tensor2>(s9.data()));
  const Tensor2 tau = f * pk2 * f.transpose();

  Matrix9 p;
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) p(pair_index(i, jj), pair_index(a, b)) = f(i, a) * f(jj, b);
  Tensor4 jc(p * stiffness.matrix() * p.transpose());
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          jc(i, jj, k, l) += 0.5 * (kron(i, k) * tau(jj, l) + kron(i, l) * tau(jj, k) +
                                    tau(i, k) * kron(jj, l) + tau(i, l) * kron(jj, k));

  ElasticResponse out;
  out.cauchy = sym(tau / j);
  out.jaumann = Tensor4(jc.matrix() / j);
  return out;
}

UmatResult saint_venant_kirchhoff_umat(const UmatCall& call, const IsotropicElastic& params) {
  validate(params);
  const ElasticResponse r = saint_venant_kirchhoff(call.dfgrd1, isotropic_stiffness(params));
  UmatResult out;
  out.stress = to_umat_stress(r.cauchy);
  out.ddsdde = ddsdde_from_tensor4(r.jaumann);
  out.statev = call.statev;
  return out;
}

UmatResult j2_plasticity_umat(const UmatCall& call, const J2Params& p) {
  validate(p.elastic);
  if (!(p.yield_stress > 0.0) || !(p.hardening >= 0.0))
    throw ContractViolation("j2_plasticity: need sigma_y > 0 and h >= 0");
  if (call.statev.size() != static_cast<std::size_t>(kJ2StateSize))
    throw ContractViolation("j2_plasticity: expected 7 state variables");

  const double mu = p.elastic.shear_modulus();
  const double kappa = p.elastic.bulk_modulus();
  const Matrix6 de = isotropic_ddsdde(p.elastic);

  const Eigen::Matrix<double, 6, 1> trial_v = call.stress.vec() + de * call.dstran.vec();
  const Tensor2 trial = from_umat_stress(UmatStress::from(trial_v));
  const Tensor2 s_trial = trial - trial.trace() / 3.0 * Tensor2::Identity();
  const double q_trial = std::sqrt(1.5 * s_trial.squaredNorm());
  const double eqp_old = call.statev[6];
  const double yield = q_trial - (p.yield_stress + p.hardening * eqp_old);

  UmatResult out;
  out.statev = call.statev;
  if (yield <= 0.0) {
    out.stress = UmatStress::from(trial_v);
    out.ddsdde = de;
    return out;
  }

  const double dp = yield / (3.0 * mu + p.hardening);
  const Tensor2 n = 1.5 * s_trial / q_trial;  // flow direction, n:n = 3/2
  const Tensor2 sigma = trial - 2.0 * mu * dp * n;
  out.stress = to_umat_stress(sigma);

  // Plastic strain stored with tensorial shears in UMAT order.
  for (int a = 0; a < 6; ++a) {
    const auto [i, j] = kUmatSlots[static_cast<std::size_t>(a)];
    out.statev[static_cast<std::size_t>(a)] += dp * n(i, j);
  }
  out.statev[6] = eqp_old + dp;

  const double theta = 1.0 - 3.0 * mu * dp / q_trial;
  const double beta = 4.0 * mu * mu * (1.0 / (3.0 * mu + p.hardening) - dp / q_trial);
  Tensor4 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double idev = 0.5 * (kron(i, k) * kron(j, l) + kron(i, l) * kron(j, k)) -
                              kron(i, j) * kron(k, l) / 3.0;
          c(i, j, k, l) = kappa * kron(i, j) * kron(k, l) + 2.0 * mu * theta * idev -
                          beta * n(i, j) * n(k, l);
        }
  out.ddsdde = ddsdde_from_tensor4(c);
  return out;
}

ElasticResponse neo_hookean(const Tensor2& f, const IsotropicElastic& params) {
  validate(params);
  const double j = det3(f);
  if (!(j > 0.0)) throw InvalidConfiguration("neo_hookean: det F is not positive");
  const double mu = params.shear_modulus();
  const double kappa = params.bulk_modulus();
  const Tensor2 b = f * f.transpose();
  const double trb = b.trace();

  ElasticResponse out;
  out.cauchy = sym(mu / j * (b - trb / 3.0 * Tensor2::Identity()) +
                   kappa * (j - 1.0) * Tensor2::Identity());

  // Jaumann rate of tau = mu (b - tr(b)/3 I) + K J (J - 1) I:
  //   mu (d b + b d - 2/3 (b:d) I) + K J (2J - 1) tr(d) I
  Tensor4 c;
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double v =
              0.5 * mu *
                  (kron(i, k) * b(jj, l) + kron(i, l) * b(jj, k) + b(i, k) * kron(jj, l) +
                   b(i, l) * kron(jj, k)) -
              2.0 / 3.0 * mu * kron(i, jj) * b(k, l) +
              kappa * j * (2.0 * j - 1.0) * kron(i, jj) * kron(k, l);
          c(i, jj, k, l) = v / j;
        }
  out.jaumann = c;
  return out;
}

UmatResult neo_hookean_umat(const UmatCall& call, const IsotropicElastic& params) {
  const ElasticResponse r = neo_hookean(call.dfgrd1, params);
  UmatResult out;
  out.stress = to_umat_stress(r.cauchy);
  out.ddsdde = ddsdde_from_tensor4(r.jaumann);
  out.statev = call.statev;
  return out;
}

IsotropicElastic isotropic_from_props(std::span<const double> props) {
  require_props(props, 2, "isotropic elasticity");
  IsotropicElastic e{props[0], props[1]};
  validate(e);
  return e;
}

J2Params j2_from_props(std::span<const double> props) {
  require_props(props, 4, "j2_plasticity");
  J2Params p{isotropic_from_props(props.first(2)), props[2], props[3]};
  if (!(p.yield_stress > 0.0) || !(p.hardening >= 0.0))
    throw ContractViolation("j2_plasticity: need sigma_y > 0 and h >= 0");
  return p;
}

}  // namespace constikit::materials
