#include "constikit/fe/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "constikit/errors.hpp"

namespace constikit::fe {

namespace {

void require_cells(std::initializer_list<int> counts) {
  for (int n : counts)
    if (n < 1) throw ContractViolation("mesh generators need at least one cell per direction");
}

int grid_id(int i, int j, int k, int nx, int ny) { return i + (nx + 1) * (j + (ny + 1) * k); }

std::vector<Eigen::Vector3d> grid_nodes(const Eigen::Vector3d& size, int nx, int ny, int nz) {
  std::vector<Eigen::Vector3d> nodes;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        nodes.emplace_back(size.x() * i / nx, size.y() * j / ny, nz ? size.z() * k / nz : 0.0);
  return nodes;
}

// Hex-cell corner ids in hex8 local order.
std::array<int, 8> cell_corners(int i, int j, int k, int nx, int ny) {
  return {grid_id(i, j, k, nx, ny),         grid_id(i + 1, j, k, nx, ny),
          grid_id(i + 1, j + 1, k, nx, ny), grid_id(i, j + 1, k, nx, ny),
          grid_id(i, j, k + 1, nx, ny),     grid_id(i + 1, j, k + 1, nx, ny),
          grid_id(i + 1, j + 1, k + 1, nx, ny), grid_id(i, j + 1, k + 1, nx, ny)};
}

double signed_volume(const Mesh& m, const std::vector<int>& t) {
  const auto& a = m.nodes[static_cast<std::size_t>(t[0])];
  const Eigen::Vector3d e1 = m.nodes[static_cast<std::size_t>(t[1])] - a;
  const Eigen::Vector3d e2 = m.nodes[static_cast<std::size_t>(t[2])] - a;
  const Eigen::Vector3d e3 = m.nodes[static_cast<std::size_t>(t[3])] - a;
  return e1.dot(e2.cross(e3));
}

double signed_area(const Mesh& m, const std::vector<int>& t) {
  const Eigen::Vector3d e1 = m.nodes[static_cast<std::size_t>(t[1])] - m.nodes[static_cast<std::size_t>(t[0])];
  const Eigen::Vector3d e2 = m.nodes[static_cast<std::size_t>(t[2])] - m.nodes[static_cast<std::size_t>(t[0])];
  return e1.x() * e2.y() - e1.y() * e2.x();
}

void add_tet(Mesh& m, std::vector<int> t) {
  if (signed_volume(m, t) < 0) std::swap(t[1], t[2]);
  m.elements.push_back({ElementType::Tet4, std::move(t), 0});
}

void add_tri(Mesh& m, std::vector<int> t) {
  if (signed_area(m, t) < 0) std::swap(t[1], t[2]);
  m.elements.push_back({ElementType::Tri3, std::move(t), 0});
}

// Quads given as grid of node ids (ni+1) x (nj+1), id(i, j).
template <class Id>
void mesh_quads(Mesh& m, int ni, int nj, Id id, ElementType type) {
  for (int j = 0; j < nj; ++j)
    for (int i = 0; i < ni; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if (type == ElementType::Quad4) {
        std::vector<int> q{a, b, c, d};
        if (signed_area(m, {a, b, c}) < 0) q = {a, d, c, b};
        m.elements.push_back({ElementType::Quad4, q, 0});
      } else {
        add_tri(m, {a, b, c});
        add_tri(m, {a, c, d});
      }
    }
}

void check_2d_type(ElementType type) {
  if (type != ElementType::Tri3 && type != ElementType::Tri6 && type != ElementType::Quad4)
    throw ContractViolation("2D generators support tri3, tri6 and quad4");
}

}  // namespace

void add_bounding_sets(Mesh& mesh, double tol) {
  if (mesh.nodes.empty()) return;
  Eigen::Vector3d lo = mesh.nodes[0], hi = mesh.nodes[0];
  for (const auto& x : mesh.nodes) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const char* names[3] = {"x", "y", "z"};
  for (int d = 0; d < mesh.dim; ++d) {
    mesh.node_sets[std::string(names[d]) + "min"] = mesh.select_nodes(d, lo[d], tol);
    mesh.node_sets[std::string(names[d]) + "max"] = mesh.select_nodes(d, hi[d], tol);
  }
  std::vector<int> all(static_cast<std::size_t>(mesh.num_nodes()));
  for (int i = 0; i < mesh.num_nodes(); ++i) all[static_cast<std::size_t>(i)] = i;
  mesh.node_sets["all"] = std::move(all);
}

Mesh box_hex(const Eigen::Vector3d& size, int nx, int ny, int nz) {
  require_cells({nx, ny, nz});
  Mesh m;
  m.dim = 3;
  m.nodes = grid_nodes(size, nx, ny, nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto c = cell_corners(i, j, k, nx, ny);
        m.elements.push_back({ElementType::Hex8, std::vector<int>(c.begin(), c.end()), 0});
      }
  add_bounding_sets(m, 1e-12 * size.norm());
  return m;
}

Mesh box_tet(const Eigen::Vector3d& size, int nx, int ny, int nz, TetSplit split) {
  require_cells({nx, ny, nz});
  Mesh m;
  m.dim = 3;
  m.nodes = grid_nodes(size, nx, ny, nz);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto c = cell_corners(i, j, k, nx, ny);
        // corner by bit pattern: bit 0 x, bit 1 y, bit 2 z
        auto v = [&](int bits) {
          static constexpr int local[8] = {0, 1, 3, 2, 4, 5, 7, 6};
          return c[static_cast<std::size_t>(local[bits])];
        };
        if (split == TetSplit::Six) {
          static constexpr int perms[6][3] = {{1, 2, 4}, {1, 4, 2}, {2, 1, 4},
                                              {2, 4, 1}, {4, 1, 2}, {4, 2, 1}};
          for (const auto& p : perms) add_tet(m, {v(0), v(p[0]), v(p[0] | p[1]), v(7)});
        } else {
          const bool even = (i + j + k) % 2 == 0;
          const std::array<int, 4> inner = even ? std::array<int, 4>{0, 3, 5, 6}
                                                : std::array<int, 4>{1, 2, 4, 7};
          const std::array<int, 4> outer = even ? std::array<int, 4>{1, 2, 4, 7}
                                                : std::array<int, 4>{0, 3, 5, 6};
          add_tet(m, {v(inner[0]), v(inner[1]), v(inner[2]), v(inner[3])});
          for (int o : outer) add_tet(m, {v(o), v(o ^ 1), v(o ^ 2), v(o ^ 4)});
        }
      }
  add_bounding_sets(m, 1e-12 * size.norm());
  return m;
}

Mesh rectangle(double lx, double ly, int nx, int ny, ElementType type) {
  require_cells({nx, ny});
  check_2d_type(type);
  Mesh m;
  m.dim = 2;
  m.nodes = grid_nodes({lx, ly, 0.0}, nx, ny, 0);
  mesh_quads(m, nx, ny, [&](int i, int j) { return grid_id(i, j, 0, nx, ny); }, type);
  add_bounding_sets(m, 1e-12 * std::hypot(lx, ly));
  if (type == ElementType::Tri6) m = to_quadratic(m);
  return m;
}

Mesh plate_with_hole(double half_width, double half_height, double radius, int n_theta, int n_r,
                     ElementType type) {
  require_cells({n_theta, n_r});
  check_2d_type(type);
  if (radius <= 0 || radius >= std::min(half_width, half_height))
    throw ContractViolation("hole radius must be positive and smaller than the plate");
  if (n_theta < 2) throw ContractViolation("plate_with_hole needs n_theta >= 2");
  const double w = half_width, h = half_height;
  const double corner = std::atan2(h, w);
  const double quarter = 0.5 * std::numbers::pi;
  int n1 = static_cast<int>(std::lround(n_theta * corner / quarter));
  n1 = std::clamp(n1, 1, n_theta - 1);
  const int n2 = n_theta - n1;

  Mesh m;
  m.dim = 2;
  auto id = [&](int i, int j) { return i + (n_theta + 1) * j; };
  for (int j = 0; j <= n_r; ++j) {
    const double s = std::pow(static_cast<double>(j) / n_r, 1.3);
    for (int i = 0; i <= n_theta; ++i) {
      double theta;
      Eigen::Vector3d outer;
      if (i <= n1) {
        theta = corner * i / n1;
        outer = {w, h * i / n1, 0.0};
      } else {
        theta = corner + (quarter - corner) * (i - n1) / n2;
        outer = {w * (1.0 - static_cast<double>(i - n1) / n2), h, 0.0};
      }
      if (i == n_theta) theta = quarter;
      const Eigen::Vector3d inner(radius * std::cos(theta), radius * std::sin(theta), 0.0);
      Eigen::Vector3d x = inner + s * (outer - inner);
      if (i == n_theta) x.x() = 0.0;
      if (i == 0) x.y() = 0.0;
      m.nodes.push_back(x);
    }
  }
  mesh_quads(m, n_theta, n_r, id, type);
  const double tol = 1e-12 * std::hypot(w, h);
  add_bounding_sets(m, tol);
  std::vector<int> hole;
  for (int i = 0; i <= n_theta; ++i) hole.push_back(id(i, 0));
  m.node_sets["hole"] = hole;
  if (type == ElementType::Tri6) {
    m = to_quadratic(m, [radius, tol](const Mesh& mm, int a, int b, Eigen::Vector3d& x) {
      const double ra = mm.nodes[static_cast<std::size_t>(a)].head<2>().norm();
      const double rb = mm.nodes[static_cast<std::size_t>(b)].head<2>().norm();
      if (std::abs(ra - radius) <= tol * 10 && std::abs(rb - radius) <= tol * 10)
        x.head<2>() *= radius / x.head<2>().norm();
    });
  }
  return m;
}

Mesh bar(double length, int n) {
  require_cells({n});
  Mesh m;
  m.dim = 1;
  for (int i = 0; i <= n; ++i) m.nodes.emplace_back(length * i / n, 0.0, 0.0);
  for (int i = 0; i < n; ++i) m.elements.push_back({ElementType::Line2, {i, i + 1}, 0});
  add_bounding_sets(m, 1e-12 * length);
  return m;
}

Mesh to_quadratic(const Mesh& linear, MidsideSnap snap) {
  Mesh m = linear;
  std::map<std::pair<int, int>, int> mids;
  auto midside = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    const auto it = mids.find(key);
    if (it != mids.end()) return it->second;
    Eigen::Vector3d x = 0.5 * (m.nodes[static_cast<std::size_t>(a)] + m.nodes[static_cast<std::size_t>(b)]);
    if (snap) snap(linear, a, b, x);
    const int id = m.num_nodes();
    m.nodes.push_back(x);
    mids.emplace(key, id);
    return id;
  };
  static constexpr int tri_edges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
  static constexpr int tet_edges[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
  for (auto& e : m.elements) {
    const std::vector<int> c = e.nodes;
    if (e.type == ElementType::Tri3) {
      for (const auto& ed : tri_edges) e.nodes.push_back(midside(c[ed[0]], c[ed[1]]));
      e.type = ElementType::Tri6;
    } else if (e.type == ElementType::Tet4) {
      for (const auto& ed : tet_edges) e.nodes.push_back(midside(c[ed[0]], c[ed[1]]));
      e.type = ElementType::Tet10;
    } else {
      throw ContractViolation(std::string("cannot upgrade ") + to_string(e.type) + " elements");
    }
  }
  for (auto& [name, ids] : m.node_sets) {
    const std::set<int> members(ids.begin(), ids.end());
    for (const auto& [edge, id] : mids)
      if (members.count(edge.first) && members.count(edge.second)) ids.push_back(id);
  }
  return m;
}

}  // namespace constikit::fe
