#include "constikit/fe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "constikit/errors.hpp"

namespace constikit::fe {

PointGeometry point_geometry(const Mesh& mesh, const Element& e, const Eigen::Vector3d& xi) {
  const int d = dimension(e.type);
  PointGeometry g;
  Eigen::MatrixXd dn;
  shape_functions(e.type, xi, g.n, dn);
  const int nn = static_cast<int>(e.nodes.size());
  Eigen::MatrixXd x(nn, d);
  for (int a = 0; a < nn; ++a) x.row(a) = mesh.nodes[static_cast<std::size_t>(e.nodes[a])].head(d);
  const Eigen::MatrixXd jac = x.transpose() * dn;  // d x d, dX_i/dxi_j
  g.det_j = jac.determinant();
  if (g.det_j <= 0.0) {
    g.dndx.resize(nn, d);
    g.dndx.setZero();
    return g;
  }
  g.dndx = dn * jac.inverse();
  return g;
}

double element_measure(const Mesh& mesh, const Element& e) {
  double v = 0.0;
  for (const auto& q : quadrature(e.type)) v += q.weight * point_geometry(mesh, e, q.xi).det_j;
  return v;
}

void Mesh::validate() const {
  if (dim < 1 || dim > 3) throw ContractViolation("mesh dimension must be 1, 2 or 3");
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const Element& e = elements[k];
    if (static_cast<int>(e.nodes.size()) != node_count(e.type))
      throw ContractViolation("element " + std::to_string(k) + ": expected " +
                              std::to_string(node_count(e.type)) + " nodes");
    if (dimension(e.type) != dim)
      throw ContractViolation("element " + std::to_string(k) + " (" + to_string(e.type) +
                              ") does not match mesh dimension " + std::to_string(dim));
    for (int n : e.nodes)
      if (n < 0 || n >= num_nodes())
        throw ContractViolation("element " + std::to_string(k) + " references node " +
                                std::to_string(n) + " out of range");
    for (const auto& q : quadrature(e.type)) {
      if (point_geometry(*this, e, q.xi).det_j <= 0.0)
        throw ContractViolation("element " + std::to_string(k) +
                                " has a non-positive Jacobian at a quadrature point");
    }
  }
  for (const auto& [name, ids] : node_sets)
    for (int n : ids)
      if (n < 0 || n >= num_nodes())
        throw ContractViolation("node set '" + name + "' references node " + std::to_string(n) +
                                " out of range");
}

std::vector<int> Mesh::select_nodes(int axis, double value, double tol) const {
  std::vector<int> out;
  for (int i = 0; i < num_nodes(); ++i)
    if (std::abs(nodes[static_cast<std::size_t>(i)][axis] - value) <= tol) out.push_back(i);
  return out;
}

const std::vector<int>& Mesh::node_set(const std::string& name) const {
  const auto it = node_sets.find(name);
  if (it == node_sets.end()) throw ContractViolation("unknown node set '" + name + "'");
  return it->second;
}

std::vector<FacetRef> facets_on(const Mesh& mesh, const std::vector<int>& node_set) {
  const std::set<int> members(node_set.begin(), node_set.end());
  std::vector<FacetRef> out;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const Element& e = mesh.elements[static_cast<std::size_t>(k)];
    const auto& fs = facets(e.type);
    for (int f = 0; f < static_cast<int>(fs.size()); ++f) {
      const bool all = std::all_of(fs[static_cast<std::size_t>(f)].begin(),
                                   fs[static_cast<std::size_t>(f)].end(), [&](int a) {
                                     return members.count(e.nodes[static_cast<std::size_t>(a)]) > 0;
                                   });
      if (all) out.push_back({k, f});
    }
  }
  return out;
}

std::vector<int> facet_nodes(const Mesh& mesh, const FacetRef& f) {
  const Element& e = mesh.elements[static_cast<std::size_t>(f.element)];
  std::vector<int> out;
  for (int a : facets(e.type)[static_cast<std::size_t>(f.local)])
    out.push_back(e.nodes[static_cast<std::size_t>(a)]);
  return out;
}

std::vector<double> facet_load_weights(const Mesh& mesh, const FacetRef& f, double thickness) {
  const Element& e = mesh.elements[static_cast<std::size_t>(f.element)];
  const ElementType ft = facet_type(e.type);
  const std::vector<int> ids = facet_nodes(mesh, f);
  const int nn = static_cast<int>(ids.size());
  std::vector<double> w(static_cast<std::size_t>(nn), 0.0);
  Eigen::VectorXd n;
  Eigen::MatrixXd dn;
  for (const auto& q : quadrature(ft)) {
    shape_functions(ft, q.xi, n, dn);
    Eigen::Vector3d t1 = Eigen::Vector3d::Zero(), t2 = Eigen::Vector3d::Zero();
    for (int a = 0; a < nn; ++a) {
      const Eigen::Vector3d& x = mesh.nodes[static_cast<std::size_t>(ids[a])];
      t1 += dn(a, 0) * x;
      if (dn.cols() > 1) t2 += dn(a, 1) * x;
    }
    const double da = dimension(ft) == 1 ? t1.norm() * thickness : t1.cross(t2).norm();
    for (int a = 0; a < nn; ++a) w[static_cast<std::size_t>(a)] += q.weight * n[a] * da;
  }
  return w;
}

namespace {

struct LineReader {
  std::istringstream in;
  int line = 0;
  std::vector<std::string> tokens;

  explicit LineReader(const std::string& text) : in(text) {}

  // Next non-empty, comment-stripped line split into tokens.
  bool next() {
    std::string s;
    while (std::getline(in, s)) {
      ++line;
      const auto hash = s.find('#');
      if (hash != std::string::npos) s.resize(hash);
      std::istringstream ls(s);
      tokens.clear();
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line, 1); }

  double number(std::size_t i) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(tokens.at(i), &used);
      if (used != tokens[i].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("expected a number in field " + std::to_string(i + 1));
    }
  }

  int integer(std::size_t i) const {
    const double v = number(i);
    if (v != std::floor(v)) fail("expected an integer in field " + std::to_string(i + 1));
    return static_cast<int>(v);
  }
};

}  // namespace

Mesh parse_mesh_text(const std::string& text) {
  Mesh mesh;
  LineReader r(text);
  bool have_dim = false;
  while (r.next()) {
    const std::string& key = r.tokens[0];
    if (key == "DIM") {
      if (r.tokens.size() != 2) r.fail("DIM takes one value");
      mesh.dim = r.integer(1);
      have_dim = true;
    } else if (key == "NODES") {
      if (!have_dim) r.fail("DIM must precede NODES");
      const int n = r.integer(1);
      for (int i = 0; i < n; ++i) {
        if (!r.next()) r.fail("unexpected end of file in NODES block");
        if (static_cast<int>(r.tokens.size()) != mesh.dim)
          r.fail("node line needs " + std::to_string(mesh.dim) + " coordinates");
        Eigen::Vector3d x = Eigen::Vector3d::Zero();
        for (int d = 0; d < mesh.dim; ++d) x[d] = r.number(static_cast<std::size_t>(d));
        mesh.nodes.push_back(x);
      }
    } else if (key == "ELEMENTS") {
      const int m = r.integer(1);
      for (int k = 0; k < m; ++k) {
        if (!r.next()) r.fail("unexpected end of file in ELEMENTS block");
        Element e;
        try {
          e.type = element_type_from_string(r.tokens[0]);
        } catch (const ContractViolation& ex) {
          r.fail(ex.what());
        }
        e.tag = r.integer(1);
        if (static_cast<int>(r.tokens.size()) != 2 + node_count(e.type))
          r.fail(std::string(to_string(e.type)) + " needs " + std::to_string(node_count(e.type)) +
                 " node ids");
        for (int a = 0; a < node_count(e.type); ++a)
          e.nodes.push_back(r.integer(static_cast<std::size_t>(2 + a)));
        mesh.elements.push_back(std::move(e));
      }
    } else if (key == "NODESET") {
      if (r.tokens.size() != 3) r.fail("NODESET takes a name and a count");
      const std::string name = r.tokens[1];
      const int k = r.integer(2);
      std::vector<int> ids;
      while (static_cast<int>(ids.size()) < k) {
        if (!r.next()) r.fail("unexpected end of file in NODESET block");
        for (std::size_t i = 0; i < r.tokens.size(); ++i) ids.push_back(r.integer(i));
      }
      if (static_cast<int>(ids.size()) != k) r.fail("NODESET count mismatch");
      mesh.node_sets[name] = std::move(ids);
    } else {
      r.fail("unknown keyword '" + key + "'");
    }
  }
  try {
    mesh.validate();
  } catch (const ContractViolation& ex) {
    throw ParseError(ex.what());
  }
  return mesh;
}

Mesh read_mesh_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh_text(ss.str());
}

std::string write_mesh_text(const Mesh& mesh) {
  std::ostringstream out;
  out.precision(17);
  out << "DIM " << mesh.dim << "\nNODES " << mesh.num_nodes() << "\n";
  for (const auto& x : mesh.nodes) {
    for (int d = 0; d < mesh.dim; ++d) out << (d ? " " : "") << x[d];
    out << "\n";
  }
  out << "ELEMENTS " << mesh.num_elements() << "\n";
  for (const auto& e : mesh.elements) {
    out << to_string(e.type) << " " << e.tag;
    for (int n : e.nodes) out << " " << n;
    out << "\n";
  }
  for (const auto& [name, ids] : mesh.node_sets) {
    out << "NODESET " << name << " " << ids.size() << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ((i + 1) % 16 == 0 ? "\n" : " ");
    out << "\n";
  }
  return out.str();
}

}  // namespace constikit::fe
