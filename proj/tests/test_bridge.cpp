#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "constikit/bridge.hpp"
#include "constikit/errors.hpp"
#include "constikit/materials.hpp"
#include "constikit/registry.hpp"

using namespace constikit;

namespace {

const materials::IsotropicElastic kRubber{1e6, 0.3};

Tensor2 random_f(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Tensor2 f = Tensor2::Identity();
  for (int i = 0; i < 9; ++i) f.data()[i] += u(rng);
  return f;
}

Tensor2 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return rotation_about(Vector3(u(rng), u(rng), u(rng)).normalized(), 3.0 * u(rng));
}

std::vector<double> fresh_state(const UmatMaterial& m, const std::vector<double>& props) {
  const StateLayout layout{m.info().regime, m.info().nstatv_user};
  return pack_state(layout, 0.0, UmatStress{},
                    m.info().regime == Regime::SmallStrain ? std::optional<UmatStrain>(UmatStrain{})
                                                           : std::nullopt,
                    m.initial_state(props));
}

HostRequest finite_request(const Tensor2& f_new, const std::vector<double>& props,
                           const UmatMaterial& m) {
  HostRequest r;
  r.regime = Regime::FiniteStrain;
  r.f_new = f_new;
  r.par = props;
  r.delta = 1.0;
  r.state = fresh_state(m, props);
  return r;
}

Eigen::Matrix<double, 9, 1> flat(const Tensor2& t) {
  Eigen::Matrix<double, 9, 1> v;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[pair_index(i, j)] = t(i, j);
  return v;
}

// Central difference of S(F) = J F^-1 sigma(F) F^-T for the neo-Hookean model.
Matrix9 fd_dSdF(const Tensor2& f, double h = 1e-6) {
  Matrix9 k;
  for (int c = 0; c < 9; ++c) {
    Tensor2 fp = f, fm = f;
    fp(c / 3, c % 3) += h;
    fm(c / 3, c % 3) -= h;
    const Tensor2 sp = bridge::cauchy_to_second_pk(materials::neo_hookean(fp, kRubber).cauchy, fp);
    const Tensor2 sm = bridge::cauchy_to_second_pk(materials::neo_hookean(fm, kRubber).cauchy, fm);
    k.col(c) = (flat(sp) - flat(sm)) / (2.0 * h);
  }
  return k;
}

}  // namespace

TEST(StateLayout, PackUnpackRoundTrip) {
  const StateLayout small{Regime::SmallStrain, 2};
  EXPECT_EQ(small.header_length(), 13);
  EXPECT_EQ(small.total_length(), 15);
  const UmatStress s{{1, 2, 3, 4, 5, 6}};
  const UmatStrain e{{7, 8, 9, 10, 11, 12}};
  const std::vector<double> user{13, 14};
  const auto packed = pack_state(small, 0.5, s, e, user);
  ASSERT_EQ(packed.size(), 15u);
  EXPECT_EQ(packed[0], 0.5);
  EXPECT_EQ(packed[1], 1.0);
  EXPECT_EQ(packed[7], 7.0);
  EXPECT_EQ(packed[13], 13.0);
  const UnpackedState back = unpack_state(small, packed);
  EXPECT_EQ(back, (UnpackedState{0.5, s, e, user}));

  const StateLayout finite{Regime::FiniteStrain, 1};
  EXPECT_EQ(finite.header_length(), 7);
  const auto pf = pack_state(finite, 1.0, s, std::nullopt, std::vector<double>{3.0});
  EXPECT_EQ(pf.size(), 8u);
  EXPECT_FALSE(unpack_state(finite, pf).stran.has_value());
}

TEST(StateLayout, RejectsMismatches) {
  const StateLayout small{Regime::SmallStrain, 1};
  const std::vector<double> one{1.0};
  EXPECT_THROW(pack_state(small, 0, {}, std::nullopt, one), ContractViolation);
  EXPECT_THROW(pack_state(small, 0, {}, UmatStrain{}, std::vector<double>{}), ContractViolation);
  EXPECT_THROW(unpack_state(small, std::vector<double>(13)), ContractViolation);
  EXPECT_THROW(regime_from_string("medium"), ContractViolation);
}

TEST(SmallStrainInputs, FirstIncrementAndNoOp) {
  const StateLayout layout{Regime::SmallStrain, 0};
  HostRequest req;
  req.strain = HostStrain{{1e-3, 0, 0, 0, 0, 0}};
  req.delta = 0.1;
  req.state = pack_state(layout, 0.0, {}, UmatStrain{}, std::vector<double>{});
  const UmatCall c = bridge::small_strain_inputs(req, layout);
  EXPECT_EQ(c.dstran, (UmatStrain{{1e-3, 0, 0, 0, 0, 0}}));
  EXPECT_EQ(c.stran, UmatStrain{});
  EXPECT_EQ(c.dtime, 0.1);

  req.state = pack_state(layout, 1.0, {}, reorder_strain_host_to_umat(req.strain), std::vector<double>{});
  const UmatCall same = bridge::small_strain_inputs(req, layout);
  EXPECT_EQ(same.dstran, UmatStrain{});
  EXPECT_EQ(same.time, 1.0);
}

TEST(SmallStrainInputs, ShearIsDoubled) {
  const StateLayout layout{Regime::SmallStrain, 0};
  HostRequest req;
  req.strain[5] = 0.001;  // eps_xy
  req.state = pack_state(layout, 0.0, {}, UmatStrain{}, std::vector<double>{});
  EXPECT_DOUBLE_EQ(bridge::small_strain_inputs(req, layout).dstran[3], 0.002);
}

TEST(FiniteStrainIncrement, Examples) {
  const auto still = bridge::finite_strain_increment(Tensor2::Identity(), Tensor2::Identity());
  EXPECT_EQ(still.dstran, UmatStrain{});
  EXPECT_EQ(still.drot, Tensor2::Identity());

  const Tensor2 stretch = Eigen::Vector3d(1.001, 1, 1).asDiagonal();
  const auto s = bridge::finite_strain_increment(Tensor2::Identity(), stretch);
  EXPECT_NEAR(s.dstran[0], 9.99001e-4, 1e-9);
  EXPECT_NEAR(s.dstran[0], 0.001 / 1.001, 1e-15);
  EXPECT_LT((s.drot - Tensor2::Identity()).cwiseAbs().maxCoeff(), 1e-15);

  const Tensor2 tiny = rotation_about(Vector3(0, 0, 1), 1e-9);
  const auto t = bridge::finite_strain_increment(Tensor2::Identity(), tiny);
  for (double v : t.dstran.c) EXPECT_NEAR(v, 0.0, 1e-16);
  EXPECT_LT((t.drot - tiny).cwiseAbs().maxCoeff(), 1e-15);

  // A finite rotation leaves sym(I - Q^T) = (1 - cos a) in the rotation plane.
  const double a = 0.3;
  const Tensor2 q = rotation_about(Vector3(0, 0, 1), a);
  const auto r = bridge::finite_strain_increment(Tensor2::Identity(), q);
  EXPECT_NEAR(r.dstran[0], 1.0 - std::cos(a), 1e-15);
  EXPECT_NEAR(r.dstran[1], 1.0 - std::cos(a), 1e-15);
  for (int i = 2; i < 6; ++i) EXPECT_NEAR(r.dstran[i], 0.0, 1e-15);
  EXPECT_LT((r.drot - q).cwiseAbs().maxCoeff(), 1e-14);

  EXPECT_THROW(bridge::finite_strain_increment(Tensor2::Identity(), -Tensor2::Identity()),
               InvalidConfiguration);
}

TEST(FiniteStrainIncrement, RigidIncrementIsSecondOrder) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 100; ++n) {
    const Tensor2 f_old = random_f(rng, 0.2);
    const Tensor2 q = rotation_about(Vector3(1, -2, 0.5).normalized(), 1e-3 * (n + 1));
    const auto inc = bridge::finite_strain_increment(f_old, q * f_old);
    const double scale = (Tensor2::Identity() - q).cwiseAbs().rowwise().sum().maxCoeff();
    double worst = 0.0;
    for (double v : inc.dstran.c) worst = std::max(worst, std::abs(v));
    EXPECT_LE(worst, scale * scale);
    EXPECT_LT((inc.drot - q).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SecondPk, Examples) {
  Tensor2 sigma;
  sigma << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  EXPECT_EQ(bridge::cauchy_to_second_pk(sigma, Tensor2::Identity()), sigma);

  const Tensor2 f = Eigen::Vector3d(2, 1, 1).asDiagonal();
  const Tensor2 s = bridge::cauchy_to_second_pk(Tensor2(Eigen::Vector3d(10, 0, 0).asDiagonal()), f);
  EXPECT_NEAR(s(0, 0), 5.0, 1e-14);
  EXPECT_NEAR(s.cwiseAbs().sum(), 5.0, 1e-14);

  const Tensor2 q = rotation_about(Vector3(1, 1, 0).normalized(), 0.8);
  const Tensor2 sq = bridge::cauchy_to_second_pk(sigma, q);
  EXPECT_LT((sq - q.transpose() * sigma * q).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(sq.trace(), sigma.trace(), 1e-13);
  EXPECT_LT((sq - sq.transpose()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DtauDF, ReducesToModulusAtReference) {
  const Tensor4 c = materials::isotropic_stiffness(kRubber);
  const Tensor4 d = bridge::dtau_dF(c, Tensor2::Zero(), Tensor2::Identity());
  EXPECT_EQ(d.matrix(), c.matrix());
}

TEST(DtauDF, StressTermsByHand) {
  const double t = 3.0;
  const Tensor2 tau = Eigen::Vector3d(t, 0, 0).asDiagonal();
  const Tensor4 d = bridge::dtau_dF(Tensor4::zero(), tau, Tensor2::Identity());
  // (1111): +t/2 - t/2 + t/2 - t/2
  EXPECT_DOUBLE_EQ(d(0, 0, 0, 0), 0.0);
  // (1212): only -1/2 F^-1_lp tau_ik survives
  EXPECT_DOUBLE_EQ(d(0, 1, 0, 1), -0.5 * t);
  // (2121): only +1/2 d_ik F^-1_lm tau_mp survives
  EXPECT_DOUBLE_EQ(d(1, 0, 1, 0), 0.5 * t);
  // (1221): only +1/2 d_pk F^-1_lm tau_im survives
  EXPECT_DOUBLE_EQ(d(0, 1, 1, 0), 0.5 * t);
  EXPECT_THROW(bridge::dtau_dF(Tensor4::zero(), Tensor2(Eigen::Matrix3d::Random()), Tensor2::Identity()),
               ContractViolation);
}

TEST(DtauDF, MatchesFiniteDifferenceOfKirchhoff) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 20; ++n) {
    const Tensor2 f = random_f(rng, 0.2);
    const auto r = materials::neo_hookean(f, kRubber);
    const Tensor4 d = bridge::dtau_dF(r.jaumann, det3(f) * r.cauchy, f);
    Matrix9 fd;
    const double h = 1e-6;
    for (int c = 0; c < 9; ++c) {
      Tensor2 fp = f, fm = f;
      fp(c / 3, c % 3) += h;
      fm(c / 3, c % 3) -= h;
      fd.col(c) = (flat(det3(fp) * materials::neo_hookean(fp, kRubber).cauchy) -
                   flat(det3(fm) * materials::neo_hookean(fm, kRubber).cauchy)) / (2 * h);
    }
    EXPECT_LE((d.matrix() - fd).norm() / fd.norm(), 1e-4);
  }
}

TEST(TangentConversion, ReferenceStateGivesModulus) {
  const Tensor4 c = materials::isotropic_stiffness(kRubber);
  const Matrix9 k = bridge::tangent_jaumann_to_dSdF(c, Tensor2::Zero(), Tensor2::Identity());
  EXPECT_LE((k - c.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(TangentConversion, MatchesFiniteDifferenceOfSecondPk) {
  std::mt19937_64 rng(99);
  for (int n = 0; n < 20; ++n) {
    const Tensor2 f = random_f(rng, 0.3);
    const auto r = materials::neo_hookean(f, kRubber);
    const Matrix9 k = bridge::tangent_jaumann_to_dSdF(r.jaumann, det3(f) * r.cauchy, f);
    const Matrix9 fd = fd_dSdF(f);
    EXPECT_LE((k - fd).norm() / fd.norm(), 1e-4) << "sample " << n;
  }
}

TEST(TangentConversion, RotatedStressFreeState) {
  std::mt19937_64 rng(4);
  const Tensor2 q = random_rotation(rng);
  const auto r = materials::neo_hookean(q, kRubber);
  EXPECT_LT(r.cauchy.cwiseAbs().maxCoeff(), 1e-9);
  const Matrix9 k = bridge::tangent_jaumann_to_dSdF(r.jaumann, r.cauchy, q);
  const Matrix9 fd = fd_dSdF(q);
  EXPECT_LE((k - fd).norm() / fd.norm(), 1e-6);
}

TEST(Eval, LinearElasticSmallStrain) {
  const UmatMaterial& m = builtin_material("linear_elastic");
  const std::vector<double> props{70e9, 0.2};
  HostRequest req;
  req.strain = HostStrain{{1e-3, -2e-4, 3e-4, 1e-4, -5e-5, 2e-4}};
  req.par = props;
  req.delta = 1.0;
  req.state = fresh_state(m, props);
  const HostResponse r = bridge::eval(req, m);
  const Matrix6 d = materials::isotropic_ddsdde({70e9, 0.2});
  const UmatStress expected = UmatStress::from(d * reorder_strain_host_to_umat(req.strain).vec());
  const HostStress host = reorder_stress_umat_to_host(expected);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.s[i], host[i], 1e-6);
  EXPECT_EQ(Matrix6(r.tangent), reorder_tangent_umat_to_host(d));
  EXPECT_EQ(r.state[0], 1.0);
}

TEST(Eval, FiniteStrainReference) {
  const UmatMaterial& m = builtin_material("neo_hookean");
  const std::vector<double> props{1e6, 0.3};
  const HostResponse r = bridge::eval(finite_request(Tensor2::Identity(), props, m), m);
  for (double v : r.s.c) EXPECT_EQ(v, 0.0);
  UmatCall call;
  call.props = props;
  const Tensor4 c = tensor4_from_ddsdde(materials::neo_hookean_umat(call, kRubber).ddsdde);
  EXPECT_LE((r.tangent - c.matrix()).cwiseAbs().maxCoeff(), 1e-14 * c.matrix().cwiseAbs().maxCoeff());
}

TEST(Eval, SmallStrainPathMatchesHandPipeline) {
  const UmatMaterial& m = builtin_material("j2_plasticity");
  const std::vector<double> props{70e9, 0.2, 243e6, 2171e6};
  const materials::J2Params params = materials::j2_from_props(props);
  std::vector<double> state = fresh_state(m, props);

  UmatStress stress;
  UmatStrain stran;
  std::vector<double> user(materials::kJ2StateSize, 0.0);
  const double path[5][6] = {{1e-3, 0, 0, 0, 0, 1e-4},
                             {3e-3, -5e-4, 0, 2e-4, 0, 3e-4},
                             {5e-3, -1e-3, -2e-4, 4e-4, 1e-4, 6e-4},
                             {6e-3, -1.5e-3, -4e-4, 3e-4, 2e-4, 1e-3},
                             {4e-3, -1e-3, -2e-4, 1e-4, 1e-4, 8e-4}};
  for (const auto& p : path) {
    HostRequest req;
    req.strain = HostStrain{{p[0], p[1], p[2], p[3], p[4], p[5]}};
    req.par = props;
    req.delta = 0.2;
    req.state = state;
    const HostResponse r = bridge::eval(req, m);

    UmatCall call;
    call.stress = stress;
    call.statev = user;
    call.stran = stran;
    const UmatStrain total = reorder_strain_host_to_umat(req.strain);
    for (int i = 0; i < 6; ++i) call.dstran[i] = total[i] - stran[i];
    call.dtime = 0.2;
    call.props = props;
    const UmatResult u = materials::j2_plasticity_umat(call, params);
    EXPECT_EQ(r.s, reorder_stress_umat_to_host(u.stress));
    EXPECT_EQ(Matrix6(r.tangent), reorder_tangent_umat_to_host(u.ddsdde));
    stress = u.stress;
    stran = total;
    user = u.statev;
    state = r.state;
    EXPECT_EQ(unpack_state({Regime::SmallStrain, 7}, state).user, user);
  }
}

TEST(Eval, SecondPkIsObjective) {
  std::mt19937_64 rng(21);
  for (const char* name : {"neo_hookean", "saint_venant_kirchhoff"}) {
    const UmatMaterial& m = builtin_material(name);
    const std::vector<double> props{1e6, 0.3};
    for (int n = 0; n < 20; ++n) {
      const Tensor2 f = random_f(rng, 0.3);
      const Tensor2 q = random_rotation(rng);
      const HostResponse a = bridge::eval(finite_request(f, props, m), m);
      const HostResponse b = bridge::eval(finite_request(q * f, props, m), m);
      EXPECT_LE((a.s.vec() - b.s.vec()).norm(), 1e-10 * a.s.vec().norm()) << name;
    }
  }
}

TEST(Eval, DoubleCallIsBitIdentical) {
  std::mt19937_64 rng(8);
  for (const auto& name : builtin_material_names()) {
    const UmatMaterial& m = builtin_material(name);
    HostRequest req;
    req.regime = m.info().regime;
    req.par = name == "j2_plasticity"        ? std::vector<double>{70e9, 0.2, 243e6, 2171e6}
              : name == "crystal_plasticity" ? materials::reference_crystal_props(0.1, 0.2, 0.3)
                                             : std::vector<double>{1e6, 0.3};
    req.delta = 1.0;
    req.state = fresh_state(m, req.par);
    if (req.regime == Regime::SmallStrain)
      req.strain = HostStrain{{5e-3, -1e-3, 0, 1e-3, 0, 2e-3}};
    else
      req.f_new = random_f(rng, 0.01);
    const std::vector<double> before = req.state;
    const HostResponse a = bridge::eval(req, m);
    const HostResponse b = bridge::eval(req, m);
    EXPECT_EQ(a.s, b.s) << name;
    EXPECT_EQ(a.tangent, b.tangent) << name;
    EXPECT_EQ(a.state, b.state) << name;
    EXPECT_EQ(req.state, before) << name;
  }
}

TEST(Eval, ContractErrors) {
  const UmatMaterial& m = builtin_material("neo_hookean");
  HostRequest req = finite_request(Tensor2::Identity(), {1e6, 0.3}, m);
  req.state.pop_back();
  EXPECT_THROW(bridge::eval(req, m), ContractViolation);
  HostRequest small;
  small.par = {1e6, 0.3};
  small.state = std::vector<double>(13, 0.0);
  EXPECT_THROW(bridge::eval(small, m), ContractViolation);
}

TEST(Eval, FaultScalesTangent) {
  const UmatMaterial& m = builtin_material("neo_hookean");
  std::mt19937_64 rng(1);
  const HostRequest req = finite_request(random_f(rng, 0.1), {1e6, 0.3}, m);
  const HostResponse a = bridge::eval(req, m);
  const HostResponse b = bridge::eval(req, m, {1.01});
  EXPECT_LE((b.tangent - 1.01 * a.tangent).cwiseAbs().maxCoeff(), 1e-9 * a.tangent.cwiseAbs().maxCoeff());
  EXPECT_EQ(a.s, b.s);
}
