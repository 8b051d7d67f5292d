#include "constikit/fe/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "constikit/errors.hpp"

namespace constikit::fe {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

}  // namespace

Eigen::Vector3d set_resultant(const Mesh& mesh, int dofs_per_node, const std::string& set,
                              const Eigen::VectorXd& f_int) {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  for (int n : mesh.node_set(set))
    for (int i = 0; i < dofs_per_node; ++i) r[i] += f_int[dofs_per_node * n + i];
  return r;
}

std::vector<CurvePoint> load_curve(const CaseDefinition& c,
                                   const std::vector<IncrementRecord>& increments) {
  std::vector<CurvePoint> out;
  if (c.output.force_set.empty() || c.output.displacement_set.empty()) return out;
  const int nd = c.mesh.dim;
  const auto& dset = c.mesh.node_set(c.output.displacement_set);
  for (const auto& rec : increments) {
    CurvePoint p;
    p.increment = rec.increment;
    p.time = rec.time;
    for (int n : dset) p.displacement += rec.u[nd * n + c.output.displacement_component];
    p.displacement /= static_cast<double>(dset.size());
    p.force = set_resultant(c.mesh, nd, c.output.force_set, rec.f_int)[c.output.force_component];
    out.push_back(p);
  }
  return out;
}

double reaction_imbalance(const Model& model, const std::vector<IncrementRecord>& increments) {
  const int nd = model.dofs_per_node();
  const auto constrained = model.prescribed(1.0);
  double worst = 0.0;
  for (const auto& rec : increments) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero(), mag = Eigen::Vector3d::Zero();
    for (const auto& [d, _] : constrained) {
      const double r = rec.f_int[d] - rec.f_ext[d];
      sum[d % nd] += r;
      mag[d % nd] += std::abs(r);
    }
    for (Eigen::Index d = 0; d < rec.f_ext.size(); ++d) {
      sum[d % nd] += rec.f_ext[d];
      mag[d % nd] += std::abs(rec.f_ext[d]);
    }
    const double ref = mag.sum();
    for (int i = 0; i < nd; ++i)
      if (ref > 0) worst = std::max(worst, std::abs(sum[i]) / ref);
  }
  return worst;
}

void write_trace_csv(const std::string& path, const SolverTrace& trace) {
  auto out = open_out(path);
  out << "increment,attempt,cut_level,time,dt,iteration,abaqus_norm,comsol_norm,converged\n";
  for (std::size_t a = 0; a < trace.attempts.size(); ++a) {
    const auto& att = trace.attempts[a];
    for (std::size_t k = 0; k < att.iterations.size(); ++k) {
      const auto& it = att.iterations[k];
      const bool last = k + 1 == att.iterations.size();
      out << att.increment << "," << a + 1 << "," << att.cut_level << "," << num(att.time) << ","
          << num(att.dt) << "," << it.iteration << "," << num(it.abaqus_norm) << ","
          << num(it.comsol_norm) << "," << (last && att.converged ? 1 : 0) << "\n";
    }
    if (att.iterations.empty())
      out << att.increment << "," << a + 1 << "," << att.cut_level << "," << num(att.time) << ","
          << num(att.dt) << ",0,nan,nan,0\n";
  }
}

void write_field_dump(const std::string& path, const Mesh& mesh, int nd, const IncrementRecord& rec) {
  auto out = open_out(path);
  out << "# node x y z ux uy uz sxx syy szz syz sxz sxy plastic sigma_h\n";
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const auto& x = mesh.nodes[static_cast<std::size_t>(n)];
    out << n;
    for (int i = 0; i < 3; ++i) out << " " << num(x[i]);
    for (int i = 0; i < 3; ++i) out << " " << num(i < nd ? rec.u[nd * n + i] : 0.0);
    for (int i = 0; i < 6; ++i) out << " " << num(rec.fields.cauchy(n, i));
    out << " " << num(rec.fields.plastic[n]) << " " << num(rec.fields.hydrostatic[n]) << "\n";
  }
}

SolveResult run_case(const CaseDefinition& c, const std::string& out_dir,
                     const SolveOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const Model model(c);
  SolveOptions opts = options;
  if (c.output.fields) {
    fs::create_directories(fs::path(out_dir) / "fields");
    opts.on_increment = [&](const IncrementRecord& rec, const States& s) {
      char name[48];
      std::snprintf(name, sizeof name, "increment_%04d.txt", rec.increment);
      write_field_dump((fs::path(out_dir) / "fields" / name).string(), c.mesh, model.dofs_per_node(), rec);
      if (options.on_increment) options.on_increment(rec, s);
    };
  }
  SolveResult res = newton_solve(model, opts);

  write_trace_csv((fs::path(out_dir) / "trace.csv").string(), res.trace);
  const auto curve = load_curve(c, res.increments);
  if (!curve.empty()) {
    auto fd = open_out((fs::path(out_dir) / "force-displacement.csv").string());
    fd << "increment,time,displacement,force\n";
    for (const auto& p : curve)
      fd << p.increment << "," << num(p.time) << "," << num(p.displacement) << "," << num(p.force) << "\n";
    if (c.output.stress_strain) {
      auto ss = open_out((fs::path(out_dir) / "stress-strain.csv").string());
      ss << "increment,time,strain,stress\n";
      for (const auto& p : curve)
        ss << p.increment << "," << num(p.time) << "," << num(p.displacement / c.output.gauge_length)
           << "," << num(p.force / c.output.area) << "\n";
    }
  }
  auto rx = open_out((fs::path(out_dir) / "reactions.csv").string());
  rx << "increment,time,set,rx,ry,rz\n";
  for (const auto& rec : res.increments)
    for (const auto& s : c.output.reaction_sets) {
      const Eigen::Vector3d r = set_resultant(c.mesh, model.dofs_per_node(), s, rec.f_int - rec.f_ext);
      rx << rec.increment << "," << num(rec.time) << "," << s << "," << num(r.x()) << "," << num(r.y())
         << "," << num(r.z()) << "\n";
    }
  return res;
}

}  // namespace constikit::fe
