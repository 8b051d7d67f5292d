#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "constikit/errors.hpp"
#include "constikit/materials.hpp"
#include "constikit/voigt.hpp"

namespace constikit::materials {

namespace {

std::array<SlipSystem, 12> make_fcc_systems() {
  const double planes[4][3] = {{1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}};
  const double dirs[4][3][3] = {
      {{0, 1, -1}, {-1, 0, 1}, {1, -1, 0}},
      {{1, 0, 1}, {1, 1, 0}, {0, 1, -1}},
      {{0, 1, 1}, {1, 1, 0}, {1, 0, -1}},
      {{0, 1, 1}, {1, 0, 1}, {1, -1, 0}},
  };
  std::array<SlipSystem, 12> out;
  for (int p = 0; p < 4; ++p) {
    const Vector3 n(planes[p][0], planes[p][1], planes[p][2]);
    for (int d = 0; d < 3; ++d) {
      const Vector3 s(dirs[p][d][0], dirs[p][d][1], dirs[p][d][2]);
      out[static_cast<std::size_t>(3 * p + d)] = {s / std::sqrt(2.0), n / std::sqrt(3.0)};
    }
  }
  return out;
}

double signum(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat12 = Eigen::Matrix<double, 12, 12>;

// Everything the local residual needs, fixed for one update.
struct LocalProblem {
  const CrystalParams& p;
  Tensor4 stiffness;
  std::array<Tensor2, 12> schmid;  // s (x) n in the sample frame
  Tensor2 fe_trial;
  Tensor2 fp_old;
  std::array<double, 12> tau_c_old{};
  double gamma_old = 0.0;
  double dtime = 0.0;

  struct Eval {
    Vec12 residual;
    Vec12 tau;
    std::array<double, 12> tau_c{};
    double gamma = 0.0;
    Tensor2 fe;
    Tensor2 fp;
    Tensor2 pk2;  // elastic second PK stress in the intermediate configuration
  };

  Eval evaluate(const Vec12& dg) const {
    Eval e;
    Tensor2 l = Tensor2::Zero();
    for (int a = 0; a < 12; ++a) l += dg[a] * schmid[static_cast<std::size_t>(a)];
    if (p.first_order_update) {
      const Tensor2 inc = Tensor2::Identity() + l;
      e.fp = inc * fp_old;
      e.fe = fe_trial * inv3(inc);
    } else {
      e.fp = l.exp() * fp_old;
      e.fe = fe_trial * Tensor2(-l).exp();
    }
    const Tensor2 ce = e.fe.transpose() * e.fe;
    const Tensor2 ee = 0.5 * (ce - Tensor2::Identity());
    const Eigen::Matrix<double, 9, 1> s9 =
        stiffness.matrix() * Eigen::Map<const Eigen::Matrix<double, 9, 1>>(ee.data());
    e.pk2 = sym(Eigen::Map<const Tensor2>(s9.data()));
    const Tensor2 mandel = ce * e.pk2;

    double sum_abs = 0.0;
    for (int a = 0; a < 12; ++a) sum_abs += std::abs(dg[a]);
    e.gamma = gamma_old + sum_abs;
    const double h = hardening_modulus(e.gamma, p);
    for (int a = 0; a < 12; ++a) {
      double latent = 0.0;
      for (int b = 0; b < 12; ++b) latent += (a == b ? 1.0 : p.latent_ratio) * std::abs(dg[b]);
      e.tau_c[static_cast<std::size_t>(a)] = tau_c_old[static_cast<std::size_t>(a)] + h * latent;
      e.tau[a] = (schmid[static_cast<std::size_t>(a)].cwiseProduct(mandel)).sum();
      e.residual[a] = dg[a] - dtime * slip_rate(e.tau[a], e.tau_c[static_cast<std::size_t>(a)], p);
    }
    return e;
  }
};

LocalProblem make_problem(const Tensor2& f_new, std::span<const double> state, double dtime,
                          const CrystalParams& p) {
  if (state.size() != static_cast<std::size_t>(kCrystalStateSize)) {
    throw ContractViolation("crystal_plasticity: expected 34 state variables, got " +
                            std::to_string(state.size()));
  }
  LocalProblem lp{p, cubic_stiffness(p.elastic, p.orientation), {}, {}, {}, {}, 0.0, dtime};
  const auto& systems = fcc_slip_systems();
  for (std::size_t a = 0; a < 12; ++a) {
    const Vector3 s = p.orientation * systems[a].s;
    const Vector3 n = p.orientation * systems[a].n;
    lp.schmid[a] = s * n.transpose();
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lp.fp_old(i, j) = state[static_cast<std::size_t>(kCrystalFpSlot + 3 * i + j)];
  for (std::size_t a = 0; a < 12; ++a) lp.tau_c_old[a] = state[kCrystalTauCSlot + a];
  lp.gamma_old = state[kCrystalGammaSlot];
  if (!(det3(f_new) > 0.0)) throw InvalidConfiguration("crystal_plasticity: det F is not positive");
  lp.fe_trial = f_new * inv3(lp.fp_old);
  return lp;
}

Vec12 slip_from_ratio(const Vec12& x, double dtime, const CrystalParams& p) {
  Vec12 dg;
  for (int a = 0; a < 12; ++a)
    dg[a] = dtime * p.gamma_dot_0 * std::pow(std::abs(x[a]), p.rate_exponent) * signum(x[a]);
  return dg;
}

Vec12 ratio_from_slip(const Vec12& dg, double dtime, const CrystalParams& p) {
  Vec12 x = Vec12::Zero();
  if (dtime <= 0.0) return x;
  for (int a = 0; a < 12; ++a)
    x[a] = signum(dg[a]) * std::pow(std::abs(dg[a]) / (dtime * p.gamma_dot_0), 1.0 / p.rate_exponent);
  return x;
}

// The unknowns are the overstress ratios x = tau / tau_c, with the slip
// increments dg = dtime gdot0 |x|^n sign(x). The residual
// (tau(dg) - tau_c(dg) x) / tau_0 is the backward-Euler flow rule in stress
// form and stays well scaled when the trial state is far outside the
// rate-dependent yield surface.
CrystalUpdate solve(const Tensor2& f_new, std::span<const double> state, double dtime,
                    const CrystalParams& p, const Vec12& guess) {
  const LocalProblem lp = make_problem(f_new, state, dtime, p);

  constexpr int kMaxIterations = 50;
  constexpr double kTolerance = 1e-12;
  auto residual = [&](const Vec12& x, LocalProblem::Eval& e) {
    e = lp.evaluate(slip_from_ratio(x, dtime, p));
    Vec12 r;
    for (int a = 0; a < 12; ++a) r[a] = (e.tau[a] - e.tau_c[static_cast<std::size_t>(a)] * x[a]) / p.tau_0;
    return r;
  };
  Vec12 x = ratio_from_slip(guess, dtime, p);
  LocalProblem::Eval cur;
  Vec12 r = residual(x, cur);
  int it = 0;
  while (r.cwiseAbs().maxCoeff() > kTolerance) {
    if (++it > kMaxIterations) {
      std::ostringstream msg;
      msg << "crystal_plasticity: local Newton did not converge in " << kMaxIterations
          << " iterations (|r| = " << r.cwiseAbs().maxCoeff() << ")";
      throw MaterialError(msg.str());
    }
    Mat12 jac;
    LocalProblem::Eval scratch;
    for (int b = 0; b < 12; ++b) {
      const double step = 1e-7 * std::max(std::abs(x[b]), 1e-2);
      Vec12 probe = x;
      probe[b] += step;
      jac.col(b) = (residual(probe, scratch) - r) / step;
    }
    Vec12 delta = jac.partialPivLu().solve(-r);
    if (!delta.allFinite()) throw MaterialError("crystal_plasticity: singular local Jacobian");
    // The slip grows like |x|^n, so long steps are capped.
    const double cap = std::max(0.5, 0.25 * x.cwiseAbs().maxCoeff());
    const double longest = delta.cwiseAbs().maxCoeff();
    if (longest > cap) delta *= cap / longest;

    double alpha = 1.0;
    LocalProblem::Eval next;
    Vec12 r_next = residual(x + delta, next);
    const double norm0 = r.norm();
    for (int ls = 0; ls < 30 && !(r_next.norm() < norm0); ++ls) {
      alpha *= 0.5;
      r_next = residual(x + alpha * delta, next);
    }
    x += alpha * delta;
    r = r_next;
    cur = next;
  }
  const Vec12 dg = slip_from_ratio(x, dtime, p);

  CrystalUpdate out;
  const double je = det3(cur.fe);
  out.cauchy = sym(cur.fe * cur.pk2 * cur.fe.transpose() / je);
  out.fp = cur.fp;
  out.tau_c = cur.tau_c;
  out.gamma_acc = cur.gamma;
  for (std::size_t a = 0; a < 12; ++a) {
    out.dgamma[a] = dg[static_cast<int>(a)];
    out.slip[a] = state[kCrystalSlipSlot + a] + std::abs(dg[static_cast<int>(a)]);
  }
  out.iterations = it;
  return out;
}

Vec12 as_vec(const std::array<double, 12>& a) {
  Vec12 v;
  for (int i = 0; i < 12; ++i) v[i] = a[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

const std::array<SlipSystem, 12>& fcc_slip_systems() {
  static const std::array<SlipSystem, 12> systems = make_fcc_systems();
  return systems;
}

double resolved_shear(const Tensor2& stress, const SlipSystem& sys) {
  return sys.s.dot(stress * sys.n);
}

void validate(const CrystalParams& p) {
  validate(p.elastic);
  if (!(p.tau_s > p.tau_0 && p.tau_0 > 0.0))
    throw ContractViolation("crystal_plasticity: need tau_s > tau_0 > 0");
  if (!(p.rate_exponent >= 1.0)) throw ContractViolation("crystal_plasticity: need n >= 1");
  if (!(p.gamma_dot_0 > 0.0)) throw ContractViolation("crystal_plasticity: need gamma_dot_0 > 0");
  const Tensor2 qtq = p.orientation.transpose() * p.orientation;
  if ((qtq - Tensor2::Identity()).cwiseAbs().maxCoeff() > 1e-10)
    throw ContractViolation("crystal_plasticity: orientation is not orthogonal");
}

double slip_rate(double tau, double tau_c, const CrystalParams& p) {
  if (tau == 0.0) return 0.0;
  return p.gamma_dot_0 * std::pow(std::abs(tau / tau_c), p.rate_exponent) * signum(tau);
}

double hardening_modulus(double gamma_acc, const CrystalParams& p) {
  const double x = p.h0 * gamma_acc / (p.tau_s - p.tau_0);
  if (p.hardening_secant_variant) {
    const double c = std::cos(x);
    return p.h0 / (c * c);
  }
  const double c = std::cosh(x);
  return p.h0 / (c * c);
}

std::array<double, 12> hardening_rate(double gamma_acc, const std::array<double, 12>& rates,
                                      const CrystalParams& p) {
  const double h = hardening_modulus(gamma_acc, p);
  std::array<double, 12> out{};
  for (std::size_t a = 0; a < 12; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < 12; ++b) sum += (a == b ? 1.0 : p.latent_ratio) * std::abs(rates[b]);
    out[a] = h * sum;
  }
  return out;
}

std::vector<double> crystal_initial_state(const CrystalParams& p) {
  std::vector<double> s(static_cast<std::size_t>(kCrystalStateSize), 0.0);
  s[kCrystalFpSlot + 0] = 1.0;
  s[kCrystalFpSlot + 4] = 1.0;
  s[kCrystalFpSlot + 8] = 1.0;
  for (std::size_t a = 0; a < 12; ++a) s[kCrystalTauCSlot + a] = p.tau_0;
  return s;
}

CrystalUpdate crystal_update(const Tensor2& f_new, std::span<const double> state, double dtime,
                             const CrystalParams& p) {
  return solve(f_new, state, dtime, p, Vec12::Zero());
}

UmatResult crystal_plasticity_umat(const UmatCall& call, const CrystalParams& p) {
  validate(p);
  const Tensor2& f = call.dfgrd1;
  const CrystalUpdate base = solve(f, call.statev, call.dtime, p, Vec12::Zero());
  const Vec12 guess = as_vec(base.dgamma);
  const double j = det3(f);

  // Jaumann modulus by perturbing F along symmetric velocity gradients:
  // F -> (I +/- eps E_kl) F gives d = eps E_kl with zero spin, so the Kirchhoff
  // stress change is J C : d directly.
  constexpr double kEps = 1e-7;
  UmatResult out;
  for (int col = 0; col < 6; ++col) {
    const auto [k, l] = kUmatSlots[static_cast<std::size_t>(col)];
    Tensor2 e = Tensor2::Zero();
    e(k, l) += 0.5;
    e(l, k) += 0.5;
    const Tensor2 fp = (Tensor2::Identity() + kEps * e) * f;
    const Tensor2 fm = (Tensor2::Identity() - kEps * e) * f;
    const Tensor2 tau_p = det3(fp) * solve(fp, call.statev, call.dtime, p, guess).cauchy;
    const Tensor2 tau_m = det3(fm) * solve(fm, call.statev, call.dtime, p, guess).cauchy;
    const Tensor2 dtau = (tau_p - tau_m) / (2.0 * kEps * j);
    out.ddsdde.col(col) = to_umat_stress(sym(dtau)).vec();
  }

  out.stress = to_umat_stress(base.cauchy);
  out.statev.assign(static_cast<std::size_t>(kCrystalStateSize), 0.0);
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj) out.statev[static_cast<std::size_t>(kCrystalFpSlot + 3 * i + jj)] = base.fp(i, jj);
  for (std::size_t a = 0; a < 12; ++a) {
    out.statev[kCrystalTauCSlot + a] = base.tau_c[a];
    out.statev[kCrystalSlipSlot + a] = base.slip[a];
  }
  out.statev[kCrystalGammaSlot] = base.gamma_acc;
  return out;
}

CrystalParams crystal_from_props(std::span<const double> props) {
  if (props.size() < 12) {
    throw ContractViolation("crystal_plasticity: expected at least 12 properties, got " +
                            std::to_string(props.size()));
  }
  CrystalParams p;
  p.elastic = {props[0], props[1], props[2]};
  p.gamma_dot_0 = props[3];
  p.rate_exponent = props[4];
  p.h0 = props[5];
  p.tau_s = props[6];
  p.tau_0 = props[7];
  p.latent_ratio = props[8];
  p.orientation = rotation_from_euler(props[9], props[10], props[11]);
  p.hardening_secant_variant = props.size() > 12 && props[12] != 0.0;
  validate(p);
  return p;
}

std::vector<double> reference_crystal_props(double phi1, double Phi, double phi2) {
  return {168.4e9, 121.4e9, 75.4e9, 0.001, 10.0, 541.4e6, 109.5e6, 60.8e6, 1.0,
          phi1,    Phi,     phi2,   0.0};
}

}  // namespace constikit::materials
