#include "constikit/fe/assembly.hpp"

#include <cmath>

#include "constikit/voigt.hpp"

namespace constikit::fe {

namespace {

int host_slot(int i, int j) {
  static constexpr int table[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  return table[i][j];
}

StateLayout layout_of(const CaseDefinition& c, const MaterialAssignment& m) {
  return StateLayout{c.regime, m.material->info().nstatv_user};
}

struct PointResponse {
  Tensor2 stress;    // small-strain stress, or first Piola-Kirchhoff P
  Tensor4 modulus;   // d stress / d grad u, indexed (i, J, k, L)
  PointState trial;
};

Tensor4 modulus_from_host(const Eigen::MatrixXd& d) {
  Tensor4 c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) c(i, j, k, l) = d(host_slot(i, j), host_slot(k, l));
  return c;
}

PointResponse small_strain_point(const CaseDefinition& c, const MaterialAssignment& m,
                                 const PointState& committed, const Tensor2& h, double dt,
                                 const bridge::TangentFault& fault) {
  HostRequest req;
  req.regime = Regime::SmallStrain;
  req.par = m.props;
  req.delta = dt;
  req.state = committed.state;
  Tensor2 eps = sym(h);

  auto run = [&]() {
    req.strain = to_host_strain(eps);
    return bridge::eval(req, *m.material, fault);
  };

  HostResponse resp;
  Eigen::MatrixXd d;
  if (c.analysis == Analysis::PlaneStress) {
    eps(2, 2) = committed.state[static_cast<std::size_t>(StateLayout::kStrainSlot + 2)];
    int it = 0;
    for (;; ++it) {
      resp = run();
      const double szz = resp.s[2];
      const double scale = resp.s.vec().norm();
      if (std::abs(szz) <= 1e-8 * scale || scale == 0.0) break;
      if (it >= 25 || resp.tangent(2, 2) <= 0.0)
        throw MaterialError("plane-stress condensation did not converge");
      eps(2, 2) -= szz / resp.tangent(2, 2);
    }
    d = resp.tangent;
    const Eigen::VectorXd col = d.col(2);
    const Eigen::RowVectorXd row = d.row(2);
    d -= col * row / d(2, 2);
  } else {
    resp = run();
    d = resp.tangent;
  }

  PointResponse out;
  out.stress = from_host_stress(resp.s);
  out.modulus = modulus_from_host(d);
  out.trial.state = std::move(resp.state);
  return out;
}

PointResponse finite_strain_point(const MaterialAssignment& m, const PointState& committed,
                                  const Tensor2& h, double dt, const bridge::TangentFault& fault) {
  HostRequest req;
  req.regime = Regime::FiniteStrain;
  req.f_old = committed.f;
  req.f_new = Tensor2::Identity() + h;
  req.par = m.props;
  req.delta = dt;
  req.state = committed.state;
  if (det3(req.f_new) <= 0.0) throw InvalidConfiguration("non-positive det F");
  HostResponse resp = bridge::eval(req, *m.material, fault);

  const Tensor2& f = req.f_new;
  const Tensor2 s = from_host_stress(resp.s);
  PointResponse out;
  out.stress = f * s;
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj)
      for (int k = 0; k < 3; ++k)
        for (int ll = 0; ll < 3; ++ll) {
          double a = i == k ? s(jj, ll) : 0.0;
          for (int mm = 0; mm < 3; ++mm)
            a += f(i, mm) * resp.tangent(pair_index(mm, jj), pair_index(k, ll));
          out.modulus(i, jj, k, ll) = a;
        }
  out.trial.state = std::move(resp.state);
  out.trial.f = f;
  return out;
}

}  // namespace

Tensor2 stored_cauchy(const PointState& p) {
  UmatStress v;
  for (int i = 0; i < 6; ++i) v[i] = p.state[static_cast<std::size_t>(StateLayout::kStressSlot + i)];
  return from_umat_stress(v);
}

Model::Model(const CaseDefinition& c) : case_(&c), ndn_(c.mesh.dim) {
  c.validate();
  for (const auto& e : c.mesh.elements) element_material_.push_back(&c.material_for(e.tag));

  std::map<int, Eigen::Vector3d> loads;
  const double t = c.mesh.dim == 2 ? c.thickness : 1.0;
  for (const auto& bc : c.tractions) {
    for (const auto& f : facets_on(c.mesh, c.mesh.node_set(bc.set))) {
      const auto ids = facet_nodes(c.mesh, f);
      const auto w = facet_load_weights(c.mesh, f, t);
      for (std::size_t a = 0; a < ids.size(); ++a) {
        auto [it, _] = loads.try_emplace(ids[a], Eigen::Vector3d::Zero());
        it->second += w[a] * bc.traction;
      }
    }
  }
  for (const auto& [n, f] : loads) loads_.push_back({n, f});
}

States Model::initial_states() const {
  const CaseDefinition& c = *case_;
  States s(c.mesh.elements.size());
  for (std::size_t e = 0; e < c.mesh.elements.size(); ++e) {
    const MaterialAssignment& m = *element_material_[e];
    const StateLayout layout = layout_of(c, m);
    const std::vector<double> user =
        m.initial_state.empty() ? m.material->initial_state(m.props) : m.initial_state;
    PointState p;
    p.state = pack_state(layout, 0.0, UmatStress{},
                         c.regime == Regime::SmallStrain ? std::optional<UmatStrain>(UmatStrain{})
                                                         : std::nullopt,
                         user);
    s[e].assign(quadrature(c.mesh.elements[e].type).size(), p);
  }
  return s;
}

AssemblyResult Model::assemble(const Eigen::VectorXd& u, const States& committed, double dt,
                               bool want_tangent, const bridge::TangentFault& fault) const {
  const CaseDefinition& c = *case_;
  const int nd = c.mesh.dim;
  const double thickness = nd == 2 ? c.thickness : 1.0;
  AssemblyResult out;
  out.f_int = Eigen::VectorXd::Zero(num_dofs());
  Eigen::VectorXd magnitude = Eigen::VectorXd::Zero(num_dofs());
  out.trial.resize(committed.size());
  std::vector<Eigen::Triplet<double>> triplets;

  for (int ei = 0; ei < c.mesh.num_elements(); ++ei) {
    const Element& e = c.mesh.elements[static_cast<std::size_t>(ei)];
    const MaterialAssignment& m = *element_material_[static_cast<std::size_t>(ei)];
    const int nn = static_cast<int>(e.nodes.size());
    const int ne = nn * nd;
    Eigen::VectorXd fe = Eigen::VectorXd::Zero(ne);
    Eigen::MatrixXd ke = Eigen::MatrixXd::Zero(want_tangent ? ne : 0, want_tangent ? ne : 0);
    const auto& points = quadrature(e.type);
    auto& trial = out.trial[static_cast<std::size_t>(ei)];
    trial.resize(points.size());

    for (std::size_t qi = 0; qi < points.size(); ++qi) {
      const PointGeometry g = point_geometry(c.mesh, e, points[qi].xi);
      Tensor2 h = Tensor2::Zero();
      for (int a = 0; a < nn; ++a)
        for (int i = 0; i < nd; ++i)
          for (int j = 0; j < nd; ++j)
            h(i, j) += u[dof(e.nodes[static_cast<std::size_t>(a)], i)] * g.dndx(a, j);

      PointResponse r;
      const PointState& prev = committed[static_cast<std::size_t>(ei)][qi];
      try {
        r = c.regime == Regime::SmallStrain ? small_strain_point(c, m, prev, h, dt, fault)
                                            : finite_strain_point(m, prev, h, dt, fault);
      } catch (const Error& ex) {
        throw IncrementFailure(ex.what(), ei, static_cast<int>(qi));
      }

      const double w = points[qi].weight * g.det_j * thickness;
      for (int a = 0; a < nn; ++a)
        for (int i = 0; i < nd; ++i) {
          double v = 0.0;
          for (int j = 0; j < nd; ++j) v += r.stress(i, j) * g.dndx(a, j);
          fe[a * nd + i] += w * v;
        }
      if (want_tangent) {
        for (int a = 0; a < nn; ++a)
          for (int i = 0; i < nd; ++i)
            for (int b = 0; b < nn; ++b)
              for (int k = 0; k < nd; ++k) {
                double v = 0.0;
                for (int j = 0; j < nd; ++j)
                  for (int l = 0; l < nd; ++l) v += g.dndx(a, j) * r.modulus(i, j, k, l) * g.dndx(b, l);
                ke(a * nd + i, b * nd + k) += w * v;
              }
      }
      trial[qi] = std::move(r.trial);
    }

    for (int a = 0; a < nn; ++a)
      for (int i = 0; i < nd; ++i) {
        const int gi = dof(e.nodes[static_cast<std::size_t>(a)], i);
        out.f_int[gi] += fe[a * nd + i];
        magnitude[gi] += std::abs(fe[a * nd + i]);
        if (want_tangent)
          for (int b = 0; b < nn; ++b)
            for (int k = 0; k < nd; ++k) {
              const double v = ke(a * nd + i, b * nd + k);
              if (v != 0.0) triplets.emplace_back(gi, dof(e.nodes[static_cast<std::size_t>(b)], k), v);
            }
      }
  }

  int loaded = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < magnitude.size(); ++i)
    if (magnitude[i] > 0.0) {
      ++loaded;
      total += magnitude[i];
    }
  out.force_average = loaded ? total / loaded : 0.0;
  if (want_tangent) {
    out.k.resize(num_dofs(), num_dofs());
    out.k.setFromTriplets(triplets.begin(), triplets.end());
  }
  return out;
}

Eigen::VectorXd Model::external_force(double load_factor) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(num_dofs());
  for (const auto& l : loads_)
    for (int i = 0; i < ndn_; ++i) f[dof(l.node, i)] += load_factor * l.force[i];
  return f;
}

std::map<int, double> Model::prescribed(double load_factor) const {
  const CaseDefinition& c = *case_;
  std::map<int, double> out;
  for (const auto& bc : c.displacements)
    for (int n : c.mesh.node_set(bc.set)) out[dof(n, bc.component)] = load_factor * bc.value;
  for (const auto& bc : c.rotations) {
    const Tensor2 r = rotation_about(bc.axis.normalized(), load_factor * bc.angle);
    for (int n : c.mesh.node_set(bc.set)) {
      const Eigen::Vector3d x = c.mesh.nodes[static_cast<std::size_t>(n)] - bc.center;
      const Eigen::Vector3d disp = r * x - x;
      for (int i = 0; i < ndn_; ++i) out[dof(n, i)] = disp[i];
    }
  }
  return out;
}

NodalFields Model::nodal_fields(const States& states) const {
  const CaseDefinition& c = *case_;
  const int nn = c.mesh.num_nodes();
  NodalFields out;
  out.cauchy = Eigen::MatrixXd::Zero(nn, 6);
  out.plastic = Eigen::VectorXd::Zero(nn);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(nn);
  for (int ei = 0; ei < c.mesh.num_elements(); ++ei) {
    const auto& pts = states[static_cast<std::size_t>(ei)];
    const MaterialAssignment& m = *element_material_[static_cast<std::size_t>(ei)];
    const int header = layout_of(c, m).header_length();
    Tensor2 mean = Tensor2::Zero();
    double plastic = 0.0;
    for (const auto& p : pts) {
      mean += stored_cauchy(p);
      plastic += m.material->plastic_measure(std::span<const double>(p.state).subspan(
          static_cast<std::size_t>(header)));
    }
    mean /= static_cast<double>(pts.size());
    plastic /= static_cast<double>(pts.size());
    const Eigen::Matrix<double, 6, 1> v = to_host_stress(mean).vec();
    for (int n : c.mesh.elements[static_cast<std::size_t>(ei)].nodes) {
      out.cauchy.row(n) += v.transpose();
      out.plastic[n] += plastic;
      count[n] += 1.0;
    }
  }
  for (int n = 0; n < nn; ++n)
    if (count[n] > 0) {
      out.cauchy.row(n) /= count[n];
      out.plastic[n] /= count[n];
    }
  out.hydrostatic = (out.cauchy.col(0) + out.cauchy.col(1) + out.cauchy.col(2)) / 3.0;
  return out;
}

}  // namespace constikit::fe
