// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "constikit/bridge.hpp"
#include "constikit/errors.hpp"
#include "constikit/fe/case_io.hpp"
#include "constikit/fe/generators.hpp"
#include "constikit/fe/results.hpp"
#include "constikit/fe/solver.hpp"
#include "constikit/hydrogen.hpp"
#include "constikit/materials.hpp"
#include "constikit/registry.hpp"
#include "constikit/tangent_check.hpp"

using namespace constikit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::shared_ptr<const UmatMaterial> builtin(const std::string& name) {
  return std::shared_ptr<const UmatMaterial>(&builtin_material(name), [](const UmatMaterial*) {});
}

fe::CaseDefinition bundled(const std::string& name) {
  return fe::load_case((fs::path(CONSTIKIT_CASES_DIR) / (name + ".json")).string());
}

std::vector<double> fresh_state(const UmatMaterial& m, const std::vector<double>& props) {
  const StateLayout layout{m.info().regime, m.info().nstatv_user};
  return pack_state(layout, 0.0, UmatStress{},
                    m.info().regime == Regime::SmallStrain ? std::optional<UmatStrain>(UmatStrain{})
                                                           : std::nullopt,
                    m.initial_state(props));
}

Tensor2 random_f(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  Tensor2 f = Tensor2::Identity();
  for (int i = 0; i < 9; ++i) f.data()[i] += u(rng);
  return f;
}

// Single hex8 unit cube on rollers, stretched along z.
fe::CaseDefinition roller_cube(const std::string& material, std::vector<double> props,
                               Regime regime, double strain, int increments, double total_time) {
  fe::CaseDefinition c;
  c.name = "roller_cube";
  c.mesh = fe::box_hex({1, 1, 1}, 1, 1, 1);
  c.regime = regime;
  c.materials.push_back({0, builtin(material), std::move(props), {}});
  c.displacements = {{"xmin", 0, 0.0}, {"ymin", 1, 0.0}, {"zmin", 2, 0.0}, {"zmax", 2, strain}};
  c.stepping.increments = increments;
  c.stepping.total_time = total_time;
  c.solver.tolerance = 1e-8;
  c.output.force_set = "zmax";
  c.output.force_component = 2;
  c.output.displacement_set = "zmax";
  c.output.displacement_component = 2;
  return c;
}

std::vector<fe::CurvePoint> solve_curve(const fe::CaseDefinition& c, std::string& failure) {
  const fe::Model model(c);
  const fe::SolveResult r = fe::newton_solve(model);
  if (!r.converged) failure = r.failure;
  return fe::load_curve(c, r.increments);
}

// ---------------------------------------------------------------------------

Outcome tangent_oracle() {
  Outcome o{true, ""};
  for (const char* name : {"saint_venant_kirchhoff", "neo_hookean"}) {
    tangent_check::Options opts;
    opts.samples = 20;
    opts.seed = 1;
    opts.tolerance = 1e-4;
    const auto r = tangent_check::run(builtin_material(name), opts);
    o.pass = o.pass && r.passed() && r.regime == Regime::FiniteStrain && r.samples.size() == 20;
    o.detail += fmt("%s max rel %.2e; ", name, r.max_error());
  }
  o.detail += "tol 1e-4";
  return o;
}

Outcome reference_reduction() {
  double worst = 0.0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> e(1e5, 3e11), nu(-0.5, 0.49);
  for (int n = 0; n < 50; ++n) {
    const materials::IsotropicElastic p{e(rng), nu(rng)};
    const double c11 = e(rng);
    // The modulus arrives as a 6x6 DDSDDE, so the 4th-order form has exact minor symmetry.
    for (const Tensor4& c : {materials::isotropic_stiffness(p),
                             materials::cubic_stiffness({c11, 0.6 * c11, 0.4 * c11},
                                                        rotation_from_euler(0.3, 0.2 * n, 1.0))}) {
      const Tensor4 abaqus = tensor4_from_ddsdde(ddsdde_from_tensor4(c));
      const Matrix9 k = bridge::tangent_jaumann_to_dSdF(abaqus, Tensor2::Zero(), Tensor2::Identity());
      worst = std::max(worst, (k - abaqus.matrix()).cwiseAbs().maxCoeff());
    }
  }
  // Through the full host pipeline at F = I.
  for (const char* name : {"neo_hookean", "saint_venant_kirchhoff"}) {
    const UmatMaterial& m = builtin_material(name);
    HostRequest req;
    req.regime = Regime::FiniteStrain;
    req.par = {210e9, 0.3};
    req.delta = 1.0;
    req.state = fresh_state(m, req.par);
    const HostResponse r = bridge::eval(req, m);
    UmatCall call;
    call.props = req.par;
    const Tensor4 abaqus = tensor4_from_ddsdde(m.evaluate(call).ddsdde);
    worst = std::max(worst, (r.tangent - abaqus.matrix()).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-14, fmt("max |dS/dF - C| = %.1e (abs, entries up to 3e11)", worst)};
}

Outcome polar_invariants() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(-1.0, 1.0);
  double orth = 0, asym = 0, recon = 0, min_eig = 1e300;
  for (int n = 0; n < 1000; ++n) {
    Tensor2 f = random_f(rng, 0.5) * std::pow(10.0, scale(rng));
    if (det3(f) <= 0) f.col(0) *= -1.0;
    const auto p = polar_decompose(f);
    orth = std::max(orth, (p.rotation.transpose() * p.rotation - Tensor2::Identity()).cwiseAbs().maxCoeff());
    orth = std::max(orth, std::abs(det3(p.rotation) - 1.0));
    asym = std::max(asym, (p.stretch - p.stretch.transpose()).cwiseAbs().maxCoeff() / p.stretch.norm());
    recon = std::max(recon, (p.rotation * p.stretch - f).cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Tensor2>(sym(p.stretch)).eigenvalues().minCoeff());
  }
  return {orth <= 1e-10 && asym <= 1e-10 && recon <= 1e-10 && min_eig > 0.0,
          fmt("1000 F: orthogonality %.1e, symmetry %.1e, reconstruction %.1e, min eig(U) %.2e",
              orth, asym, recon, min_eig)};
}

Outcome j2_uniaxial() {
  const double e = 70e9, h = 2171e6;
  const fe::CaseDefinition c =
      roller_cube("j2_plasticity", {e, 0.2, 243e6, h}, Regime::SmallStrain, 0.01, 100, 1.0);
  std::string failure;
  const auto curve = solve_curve(c, failure);
  if (!failure.empty() || curve.size() != 100) return {false, "solve failed: " + failure};
  // Post-yield slope from a fit on the last half, knee where it meets E eps.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 50; i < curve.size(); ++i, ++n) {
    const double x = curve[i].displacement, y = curve[i].force;
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  const double knee = e * icpt / (e - slope);
  const double expected_slope = e * h / (e + h);
  const double dk = knee / 243e6 - 1.0, ds = slope / expected_slope - 1.0;
  return {std::abs(dk) <= 1e-3 && std::abs(ds) <= 5e-3,
          fmt("knee %.2f MPa (%+.3f%%), slope %.1f MPa (%+.3f%%, expected %.1f)", knee / 1e6,
              100 * dk, slope / 1e6, 100 * ds, expected_slope / 1e6)};
}

Outcome twist() {
  auto solve = [](int increments, std::vector<double>& orders, std::string& failure) {
    fe::CaseDefinition c = bundled("twisted_cube");
    c.stepping.increments = increments;
    c.solver.tolerance = 1e-10;
    c.solver.max_cuts = 8;
    const fe::Model model(c);
    const fe::SolveResult r = fe::newton_solve(model);
    if (!r.converged) failure = r.failure;
    for (const auto& a : r.trace.attempts) {
      if (!a.converged) continue;
      std::vector<double> norms;
      for (const auto& it : a.iterations) norms.push_back(it.abaqus_norm);
      if (norms.size() >= 3) orders.push_back(fe::fitted_convergence_order(norms, 1e-13));
    }
    return r.increments.empty() ? Eigen::VectorXd() : r.increments.back().u;
  };
  std::vector<double> o1, o10;
  std::string f1, f10;
  const Eigen::VectorXd u1 = solve(1, o1, f1);
  const Eigen::VectorXd u10 = solve(10, o10, f10);
  if (!f1.empty() || !f10.empty() || u1.size() != u10.size())
    return {false, "solve failed: " + f1 + f10};
  const double diff = (u1 - u10).norm() / u10.norm();
  const double order = o10.empty() ? 0.0 : *std::min_element(o10.begin(), o10.end());
  return {diff <= 5e-3 && order >= 1.8,
          fmt("1 vs 10 increments rel L2 %.2e, min fitted order over %zu increments %.2f", diff,
              o10.size(), order)};
}

Outcome crystal() {
  using namespace materials;
  const auto props = reference_crystal_props();
  const UmatMaterial& m = builtin_material("crystal_plasticity");
  const StateLayout layout{Regime::FiniteStrain, kCrystalStateSize};

  // Material point: 5% [001] tension at 1e-3/s with free lateral contraction.
  std::vector<double> state = fresh_state(m, props);
  Tensor2 f_old = Tensor2::Identity();
  double det_dev = 0.0;
  const int steps = 50;
  for (int n = 1; n <= steps; ++n) {
    const double e = 0.05 * n / steps;
    const Tensor2 f_new = Eigen::Vector3d(1.0 - 0.4 * e, 1.0 - 0.4 * e, 1.0 + e).asDiagonal();
    HostRequest req;
    req.regime = Regime::FiniteStrain;
    req.f_old = f_old;
    req.f_new = f_new;
    req.par = props;
    req.delta = 1.0;
    req.state = state;
    state = bridge::eval(req, m).state;
    f_old = f_new;
    const auto user = unpack_state(layout, state).user;
    Tensor2 fp;
    for (int i = 0; i < 9; ++i) fp(i / 3, i % 3) = user[static_cast<std::size_t>(kCrystalFpSlot + i)];
    det_dev = std::max(det_dev, std::abs(det3(fp) - 1.0));
  }
  const auto user = unpack_state(layout, state).user;
  std::vector<double> slips(user.begin() + kCrystalSlipSlot, user.begin() + kCrystalSlipSlot + 12);
  std::sort(slips.begin(), slips.end());
  double asym = 0.0;
  for (int i = 4; i < 12; ++i) asym = std::max(asym, std::abs(slips[i] - slips[11]) / slips[11]);
  double idle = 0.0;
  for (int i = 0; i < 4; ++i) idle = std::max(idle, slips[i] / slips[11]);

  // Single hex8 on rollers, 1% strain at 1e-3/s: 0.2% offset yield.
  std::string failure;
  const auto curve =
      solve_curve(roller_cube("crystal_plasticity", props, Regime::FiniteStrain, 0.01, 40, 10.0), failure);
  double yield = std::nan("");
  if (failure.empty() && curve.size() > 2) {
    const double modulus = curve[0].force / curve[0].displacement;
    double prev = 1.0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const double g = curve[i].force - modulus * (curve[i].displacement - 0.002);
      if (i > 0 && prev > 0 && g <= 0) {
        const double t = prev / (prev - g);
        yield = curve[i - 1].force + t * (curve[i].force - curve[i - 1].force);
        break;
      }
      prev = g;
    }
  }
  const double schmid = 60.8e6 * std::sqrt(6.0);
  const double dy = yield / schmid - 1.0;

  // Bundled polycrystal: 20 increments, at most 8 iterations each.
  const fe::CaseDefinition poly = bundled("polycrystal");
  const fe::Model model(poly);
  const fe::SolveResult r = fe::newton_solve(model);
  const auto iters = r.trace.iterations_per_increment();
  const int worst = iters.empty() ? 0 : *std::max_element(iters.begin(), iters.end());
  const bool poly_ok = r.converged && r.increments.size() == 20 && worst <= 8 &&
                       r.trace.attempts.size() == 20;

  return {det_dev <= 1e-8 && std::abs(dy) <= 0.15 && asym <= 1e-8 && idle <= 1e-8 && poly_ok,
          fmt("|det Fp - 1| %.1e; [001] 0.2%% offset %.1f MPa vs %.1f (%+.1f%%); 8-system spread "
              "%.1e; polycrystal %zu/20 increments, %zu attempts, max %d iterations, %d elements",
              det_dev, yield / 1e6, schmid / 1e6, 100 * dy, asym, r.increments.size(),
              r.trace.attempts.size(), worst, poly.mesh.num_elements())};
}

Outcome norms() {
  double err = 0.0;
  const Eigen::Vector3d r(1, -2, 0.5);
  const double q[] = {100.0}, hist[] = {80.0, 120.0}, zero[] = {0.0};
  err = std::max(err, std::abs(fe::norm_abaqus_style(r, q) - 0.02));
  err = std::max(err, std::abs(fe::norm_abaqus_style(r, hist) - 0.02));
  err = std::max(err, std::abs(fe::norm_abaqus_style(r, zero, 40.0) - 0.05));
  const Eigen::Vector2d u(2, 4), e(0.3, 0.3);
  err = std::max(err, std::abs(fe::norm_comsol_style(e, u) - std::sqrt((0.01 + 0.075 * 0.075) / 2)));
  const Eigen::Vector4d u4(1, -1, 2, 0), e4(1e-3, 2e-3, -1e-3, 5e-4);
  // mean U = 0.5, weights 1, 1, 2, 0.5
  err = std::max(err, std::abs(fe::norm_comsol_style(e4, u4) -
                               std::sqrt((1e-6 + 4e-6 + 0.25e-6 + 1e-6) / 4)));
  const bool defaults = fe::default_tolerance(fe::NormKind::AbaqusStyle) == 5e-3 &&
                        fe::default_tolerance(fe::NormKind::ComsolStyle) == 1e-3 &&
                        fe::SolverSettings{}.tolerance == 5e-3 &&
                        fe::parse_case(R"({"analysis": "3d", "regime": "small",
                          "mesh": {"generator": "box_hex", "size": [1,1,1], "cells": [1,1,1]},
                          "materials": [{"name": "linear_elastic", "props": [1e9, 0.3]}],
                          "solver": {"norm": "comsol"}})").solver.tolerance == 1e-3;
  return {err <= 1e-12 && defaults,
          fmt("max deviation from hand values %.1e; defaults 5e-3/1e-3 %s", err,
              defaults ? "honoured" : "NOT honoured")};
}

double hole_peak(const fe::CaseDefinition& c, const fe::SolveResult& r, double radius) {
  int top = -1;
  for (int i : c.mesh.node_set("hole")) {
    const auto& x = c.mesh.nodes[static_cast<std::size_t>(i)];
    if (std::abs(x.x()) < 1e-12 * radius && std::abs(x.y() - radius) < 1e-9 * radius) top = i;
  }
  if (top < 0) throw ContractViolation("no hole node on the y axis");
  return r.increments.back().fields.cauchy(top, 0);
}

Outcome plate() {
  const fe::CaseDefinition desk = bundled("plate_with_hole");
  const double traction = desk.tractions.at(0).traction.x();
  const double radius = 5e-3, half_height = 10e-3;

  auto elastic_kt = [&](int n_theta, int n_r, int& elements) {
    fe::CaseDefinition c = desk;
    c.mesh = fe::plate_with_hole(18e-3, half_height, radius, n_theta, n_r, fe::ElementType::Tri6);
    c.materials = {{0, builtin("linear_elastic"), {70e9, 0.2}, {}}};
    c.stepping.increments = 1;
    c.output.fields = true;
    elements = c.mesh.num_elements();
    const fe::Model model(c);
    const fe::SolveResult r = fe::newton_solve(model);
    if (!r.converged) throw std::runtime_error("elastic plate solve failed: " + r.failure);
    return hole_peak(c, r, radius) / traction;
  };
  int ne_desk = 0, ne_fine = 0, ne_finer = 0;
  const double kt_desk = elastic_kt(15, 10, ne_desk);
  const double kt_fine = elastic_kt(60, 40, ne_fine);
  const double kt_finer = elastic_kt(120, 80, ne_finer);
  const double mesh_err = std::abs(kt_desk / kt_finer - 1.0);
  const double net = kt_finer * (half_height - radius) / half_height;

  const fe::Model model(desk);
  const fe::SolveResult r = fe::newton_solve(model);
  const auto iters = r.trace.iterations_per_increment();
  int late = 0;
  for (std::size_t i = 10; i < iters.size(); ++i) late = std::max(late, iters[i]);

  const bool range = kt_desk >= 3.0 && kt_desk <= 3.5;
  return {range && mesh_err <= 0.05 && r.converged && late <= 5,
          fmt("Kt gross %.3f (%d el), %.3f (%d el), %.3f (%d el), desk vs finest %.1f%%, Kt net "
              "%.3f; J2 case %zu/22 increments, max %d iterations after increment 10",
              kt_desk, ne_desk, kt_fine, ne_fine, kt_finer, ne_finer, 100 * mesh_err, net,
              r.increments.size(), late)};
}

Outcome hydrogen_criteria() {
  using namespace hydrogen;
  const TransportParams p;
  const double length = 1e-3;
  const fe::Mesh bar = fe::bar(length, 199);
  const TransportModel model(bar, p);
  const int n = bar.num_nodes();
  Eigen::VectorXd sig(n), eps(n);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    sig[i] = 500e6 * bar.nodes[static_cast<std::size_t>(i)].x() / length;
    eps[i] = 0.2 * u(rng);
  }
  const double beta = p.v_h / (p.r * p.temperature);
  TransportState s = model.initial_state(p.c0, eps);
  bool bounded = true;
  for (int k = 0; k < 60; ++k) {
    s = model.step(s, sig, eps, 500.0);
    bounded = bounded && (s.c_t.array() >= 0.0).all() && (s.c_t.array() <= s.n_t.array()).all();
  }
  int left = 0;
  for (int i = 0; i < n; ++i)
    if (bar.nodes[static_cast<std::size_t>(i)].x() == 0.0) left = i;
  double dev = 0.0;
  for (int i = 0; i < n; ++i)
    dev = std::max(dev, std::abs(s.c_l[i] / s.c_l[left] / std::exp(beta * sig[i]) - 1.0));

  const double theta = p.c0 / p.n_l * p.binding_factor();
  const double nt = trap_density(0.0);
  const double occupancy = oriani_trapped(p.c0, nt, p) / nt;
  return {n == 200 && dev <= 0.01 && bounded && std::abs(theta / 1.14e7 - 1.0) < 0.01 &&
              occupancy > 1.0 - 1e-6,
          fmt("200 nodes: max |C_L/C_L(0) / exp(V_H sigma_h/RT) - 1| %.2e; C_T in [0, N_T] %s; "
              "theta %.3e, C_T/N_T = 1 - %.2e",
              dev, bounded ? "yes" : "NO", theta, 1.0 - occupancy)};
}

Outcome idempotence() {
  std::mt19937_64 rng(8);
  int checked = 0;
  bool ok = true;
  for (const auto& name : builtin_material_names()) {
    const UmatMaterial& m = builtin_material(name);
    const std::vector<double> props =
        name == "j2_plasticity"        ? std::vector<double>{70e9, 0.2, 243e6, 2171e6}
        : name == "crystal_plasticity" ? materials::reference_crystal_props(0.1, 0.2, 0.3)
                                       : std::vector<double>{70e9, 0.3};
    std::vector<double> committed = fresh_state(m, props);
    Tensor2 f_old = Tensor2::Identity();
    HostStrain strain;
    // Walk a loading path; at every step call twice as stress and tangent passes.
    for (int step = 1; step <= 10; ++step) {
      HostRequest req;
      req.regime = m.info().regime;
      req.par = props;
      req.delta = 0.1;
      req.state = committed;
      if (req.regime == Regime::SmallStrain) {
        for (int i = 0; i < 6; ++i) strain[i] += 1e-3 * (i < 3 ? 1.0 : 0.3) * (0.5 + 0.1 * i);
        req.strain = strain;
      } else {
        req.f_old = f_old;
        req.f_new = f_old + 0.004 * (random_f(rng, 1.0) - Tensor2::Identity());
        req.f_new(2, 2) += 0.004;
      }
      const std::vector<double> before = committed;
      const HostResponse a = bridge::eval(req, m);
      const HostResponse b = bridge::eval(req, m);
      ok = ok && a.s == b.s && a.tangent == b.tangent && a.state == b.state && req.state == before;
      committed = a.state;
      f_old = req.f_new;
      ++checked;
    }
  }
  return {ok, fmt("%d double calls over %zu materials, bit-identical with untouched state: %s",
                  checked, builtin_material_names().size(), ok ? "yes" : "NO")};
}

}  // namespace

int main() {
  const std::vector<std::tuple<const char*, double, std::function<Outcome()>>> criteria = {
      {"tangent conversion vs finite differences", 10.0, tangent_oracle},
      {"reference-state reduction", 0.0, reference_reduction},
      {"polar decomposition invariants", 5.0, polar_invariants},
      {"J2 uniaxial single element", 5.0, j2_uniaxial},
      {"neo-Hookean twist", 30.0, twist},
      {"crystal plasticity", 180.0, crystal},
      {"convergence norms", 0.0, norms},
      {"plate with hole", 120.0, plate},
      {"hydrogen transport", 30.0, hydrogen_criteria},
      {"double-call idempotence", 0.0, idempotence},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, budget, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (budget > 0.0) {
      timing += fmt(" of %.0f s", budget);
      if (secs > budget) {
        o.pass = false;
        timing += " OVER BUDGET";
      }
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
