#include "constikit/hydrogen.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "constikit/errors.hpp"
#include "constikit/fe/generators.hpp"
#include "constikit/fe/solver.hpp"
#include "constikit/registry.hpp"

namespace constikit::hydrogen {

double TransportParams::binding_factor() const { return std::exp(w_b / (r * temperature)); }

void TransportParams::validate() const {
  if (!(d_l > 0 && n_l > 0 && v_h > 0 && w_b > 0 && temperature > 0 && r > 0 && c0 >= 0))
    throw ContractViolation("transport parameters must be positive");
}

double trap_density(double eps_p) {
  if (eps_p < 0) throw ContractViolation("trap_density: plastic strain must be non-negative");
  return std::pow(10.0, 23.26 - 2.33 * std::exp(-5.5 * eps_p)) / kAvogadro;
}

double oriani_trapped(double c_l, double n_t, const TransportParams& p) {
  const double theta = c_l / p.n_l * p.binding_factor();
  return n_t * theta / (1.0 + theta);
}

double capacity(double c_l, double n_t, const TransportParams& p) {
  const double k = p.binding_factor();
  const double theta = c_l / p.n_l * k;
  return n_t * (k / p.n_l) / ((1.0 + theta) * (1.0 + theta));
}

TransportModel::TransportModel(const fe::Mesh& mesh, TransportParams params,
                               std::vector<int> fixed, double thickness)
    : mesh_(&mesh), params_(params), fixed_(std::move(fixed)), thickness_(thickness) {
  params_.validate();
  mesh.validate();
  mass_ = Eigen::VectorXd::Zero(mesh.num_nodes());
  const double t = mesh.dim == 2 ? thickness_ : 1.0;
  for (const auto& e : mesh.elements) {
    const int nn = static_cast<int>(e.nodes.size());
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(nn);
    double volume = 0.0;
    for (const auto& q : fe::quadrature(e.type)) {
      const auto g = fe::point_geometry(mesh, e, q.xi);
      const double w = q.weight * g.det_j * t;
      volume += w;
      diag += w * g.n.cwiseProduct(g.n);
    }
    diag *= volume / diag.sum();
    for (int a = 0; a < nn; ++a) mass_[e.nodes[static_cast<std::size_t>(a)]] += diag[a];
  }
}

TransportState TransportModel::initial_state(double c_l, const Eigen::VectorXd& eps_p) const {
  const int n = mesh_->num_nodes();
  TransportState s;
  s.c_l = Eigen::VectorXd::Constant(n, c_l);
  for (int i : fixed_) s.c_l[i] = params_.c0;
  s.n_t.resize(n);
  s.c_t.resize(n);
  for (int i = 0; i < n; ++i) {
    s.n_t[i] = trap_density(eps_p[i]);
    s.c_t[i] = oriani_trapped(s.c_l[i], s.n_t[i], params_);
  }
  return s;
}

double TransportModel::total_content(const TransportState& s) const {
  return mass_.dot(s.c_l + s.c_t);
}

TransportState TransportModel::step(const TransportState& s, const Eigen::VectorXd& sigma_h,
                                    const Eigen::VectorXd& eps_p, double dt) const {
  if (!(dt > 0)) throw ContractViolation("transport step needs dt > 0");
  const fe::Mesh& mesh = *mesh_;
  const int n = mesh.num_nodes();
  const int nd = mesh.dim;
  const double t = nd == 2 ? thickness_ : 1.0;
  const TransportParams& p = params_;
  const double beta = p.v_h / (p.r * p.temperature);

  // Linear drift-diffusion operator.
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : mesh.elements) {
    const int nn = static_cast<int>(e.nodes.size());
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(nn, nn);
    Eigen::VectorXd sh(nn);
    for (int a = 0; a < nn; ++a) sh[a] = sigma_h[e.nodes[static_cast<std::size_t>(a)]];
    for (const auto& q : fe::quadrature(e.type)) {
      const auto g = fe::point_geometry(mesh, e, q.xi);
      const double w = q.weight * g.det_j * t;
      const Eigen::VectorXd grad_s = g.dndx.transpose() * sh;
      const Eigen::VectorXd drift = g.dndx * grad_s;  // grad N_a . grad sigma_h
      ke += w * p.d_l * (g.dndx * g.dndx.transpose() - beta * drift * g.n.transpose());
    }
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        trip.emplace_back(e.nodes[static_cast<std::size_t>(a)], e.nodes[static_cast<std::size_t>(b)], ke(a, b));
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(trip.begin(), trip.end());

  TransportState out;
  out.n_t.resize(n);
  for (int i = 0; i < n; ++i) out.n_t[i] = std::max(trap_density(eps_p[i]), s.n_t[i]);
  const Eigen::VectorXd stored = s.c_l + s.c_t;
  std::vector<char> is_fixed(static_cast<std::size_t>(n), 0);
  for (int i : fixed_) is_fixed[static_cast<std::size_t>(i)] = 1;

  Eigen::VectorXd c = s.c_l;
  for (int i : fixed_) c[i] = p.c0;
  const double scale = std::max(c.cwiseAbs().maxCoeff(), p.c0 > 0 ? p.c0 : 1e-30);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int iter = 0; iter < 30; ++iter) {
    Eigen::VectorXd ct(n), cap(n);
    for (int i = 0; i < n; ++i) {
      ct[i] = oriani_trapped(c[i], out.n_t[i], p);
      cap[i] = capacity(c[i], out.n_t[i], p);
    }
    Eigen::VectorXd r = mass_.cwiseProduct(c + ct - stored) / dt + k * c;
    Eigen::SparseMatrix<double> jac = k;
    for (int i = 0; i < n; ++i) jac.coeffRef(i, i) += mass_[i] * (1.0 + cap[i]) / dt;
    for (int i : fixed_) r[i] = 0.0;
    // Dirichlet rows become identity rows.
    for (int col = 0; col < jac.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(jac, col); it; ++it)
        if (is_fixed[static_cast<std::size_t>(it.row())]) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
    jac.makeCompressed();
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw SingularMatrix("transport Jacobian is singular");
    const Eigen::VectorXd dc = lu.solve(-r);
    c += dc;
    if (dc.lpNorm<Eigen::Infinity>() <= 1e-11 * scale) {
      out.c_l = c;
      out.c_t.resize(n);
      for (int i = 0; i < n; ++i) out.c_t[i] = oriani_trapped(c[i], out.n_t[i], p);
      return out;
    }
  }
  throw Error("transport step did not converge");
}

TransportState transport_step(const TransportModel& model, const TransportState& s,
                              const Eigen::VectorXd& sigma_h, const Eigen::VectorXd& eps_p,
                              double dt) {
  return model.step(s, sigma_h, eps_p, dt);
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  const double den = da.norm() * db.norm();
  return den > 0 ? da.dot(db) / den : 0.0;
}

CoupledResult staggered_couple(const fe::CaseDefinition& mechanics, const TransportParams& params,
                               const StaggerOptions& options) {
  CoupledResult out;
  const fe::Model model(mechanics);
  fe::NewtonDriver driver(model);
  const TransportModel transport(mechanics.mesh, params, options.fixed_nodes, mechanics.thickness);
  const int n = mechanics.mesh.num_nodes();
  TransportState state = transport.initial_state(options.initial_c_l, Eigen::VectorXd::Zero(n));
  const double dt = mechanics.stepping.dt();

  for (int inc = 1; inc <= mechanics.stepping.increments; ++inc) {
    if (!driver.advance(inc)) {
      out.failure = driver.result().failure;
      return out;
    }
    CoupledStep step;
    step.time = driver.result().increments.back().time;
    TransportState previous_pass;
    for (int pass = 1; pass <= options.max_passes; ++pass) {
      // The mechanical response does not depend on the hydrogen field, so
      // every pass sees the same converged mechanics increment.
      const auto& fields = driver.result().increments.back().fields;
      step.sigma_h = fields.hydrostatic;
      step.eps_p = fields.plastic.cwiseMax(0.0);
      try {
        step.transport = transport.step(state, step.sigma_h, step.eps_p, dt);
      } catch (const Error& ex) {
        out.failure = std::string("transport: ") + ex.what();
        return out;
      }
      step.passes = pass;
      if (pass > 1) {
        const double change = (step.transport.c_l - previous_pass.c_l).lpNorm<Eigen::Infinity>() /
                              std::max(step.transport.c_l.lpNorm<Eigen::Infinity>(), 1e-300);
        if (change < options.pass_tolerance) break;
      }
      previous_pass = step.transport;
    }
    state = step.transport;
    out.steps.push_back(std::move(step));
  }
  out.converged = true;
  return out;
}

fe::CaseDefinition demo_strip_case(double load_scale) {
  constexpr double kLength = 10e-3, kHeight = 2e-3;
  fe::CaseDefinition c;
  c.name = "hydrogen_strip";
  c.mesh = fe::rectangle(kLength, kHeight, 30, 8, fe::ElementType::Quad4);
  c.analysis = fe::Analysis::PlaneStrain;
  c.regime = Regime::SmallStrain;
  const UmatMaterial& j2 = builtin_material("j2_plasticity");
  c.materials.push_back({0, std::shared_ptr<const UmatMaterial>(&j2, [](const UmatMaterial*) {}),
                         {70e9, 0.2, 243e6, 2171e6}, {}});
  const double angle = 0.03 * load_scale;
  c.rotations.push_back({"xmin", Eigen::Vector3d::UnitZ(), {0.0, 0.5 * kHeight, 0.0}, -angle});
  c.rotations.push_back({"xmax", Eigen::Vector3d::UnitZ(), {kLength, 0.5 * kHeight, 0.0}, angle});
  c.stepping = {true, 10, 2000.0};
  c.validate();
  return c;
}

CoupledResult run_demo(const std::string& out_dir, double load_scale, const TransportParams& params) {
  namespace fs = std::filesystem;
  const fe::CaseDefinition c = demo_strip_case(load_scale);
  StaggerOptions options;
  options.initial_c_l = params.c0;
  CoupledResult res = staggered_couple(c, params, options);

  fs::create_directories(fs::path(out_dir) / "profiles");
  const TransportModel transport(c.mesh, params, {}, c.thickness);
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  if (!summary) throw Error("cannot write into '" + out_dir + "'");
  summary << "step,time,passes,total_content,corr_cl_sigma_h,min_c_l,max_c_l\n";
  char buf[256];
  for (std::size_t k = 0; k < res.steps.size(); ++k) {
    const auto& st = res.steps[k];
    std::snprintf(buf, sizeof buf, "%zu,%.10e,%d,%.10e,%.10e,%.10e,%.10e\n", k + 1, st.time, st.passes,
                  transport.total_content(st.transport), correlation(st.transport.c_l, st.sigma_h),
                  st.transport.c_l.minCoeff(), st.transport.c_l.maxCoeff());
    summary << buf;
    std::snprintf(buf, sizeof buf, "step_%04zu.csv", k + 1);
    std::ofstream prof(fs::path(out_dir) / "profiles" / buf);
    prof << "node,x,y,c_l,c_t,n_t,sigma_h,eps_p\n";
    for (int n = 0; n < c.mesh.num_nodes(); ++n) {
      const auto& x = c.mesh.nodes[static_cast<std::size_t>(n)];
      std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e\n", n, x.x(), x.y(),
                    st.transport.c_l[n], st.transport.c_t[n], st.transport.n_t[n], st.sigma_h[n],
                    st.eps_p[n]);
      prof << buf;
    }
  }
  return res;
}

}  // namespace constikit::hydrogen
