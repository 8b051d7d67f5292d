#include "constikit/fe/element.hpp"

#include <cmath>

#include "constikit/errors.hpp"

namespace constikit::fe {

int node_count(ElementType t) {
  switch (t) {
    case ElementType::Line2: return 2;
    case ElementType::Line3: return 3;
    case ElementType::Tri3: return 3;
    case ElementType::Tri6: return 6;
    case ElementType::Quad4: return 4;
    case ElementType::Tet4: return 4;
    case ElementType::Tet10: return 10;
    case ElementType::Hex8: return 8;
  }
  return 0;
}

int dimension(ElementType t) {
  switch (t) {
    case ElementType::Line2:
    case ElementType::Line3: return 1;
    case ElementType::Tri3:
    case ElementType::Tri6:
    case ElementType::Quad4: return 2;
    default: return 3;
  }
}

const char* to_string(ElementType t) {
  switch (t) {
    case ElementType::Line2: return "line2";
    case ElementType::Line3: return "line3";
    case ElementType::Tri3: return "tri3";
    case ElementType::Tri6: return "tri6";
    case ElementType::Quad4: return "quad4";
    case ElementType::Tet4: return "tet4";
    case ElementType::Tet10: return "tet10";
    case ElementType::Hex8: return "hex8";
  }
  return "?";
}

ElementType element_type_from_string(const std::string& s) {
  for (auto t : {ElementType::Line2, ElementType::Line3, ElementType::Tri3, ElementType::Tri6,
                 ElementType::Quad4, ElementType::Tet4, ElementType::Tet10, ElementType::Hex8}) {
    if (s == to_string(t)) return t;
  }
  throw ContractViolation("unknown element type '" + s + "'");
}

namespace {

std::vector<QuadraturePoint> gauss_line(int n) {
  if (n == 2) {
    const double a = 1.0 / std::sqrt(3.0);
    return {{{-a, 0, 0}, 1.0}, {{a, 0, 0}, 1.0}};
  }
  const double a = std::sqrt(0.6);
  return {{{-a, 0, 0}, 5.0 / 9.0}, {{0, 0, 0}, 8.0 / 9.0}, {{a, 0, 0}, 5.0 / 9.0}};
}

std::vector<QuadraturePoint> gauss_quad() {
  std::vector<QuadraturePoint> out;
  for (const auto& b : gauss_line(2))
    for (const auto& a : gauss_line(2)) out.push_back({{a.xi.x(), b.xi.x(), 0}, 1.0});
  return out;
}

std::vector<QuadraturePoint> gauss_hex() {
  std::vector<QuadraturePoint> out;
  for (const auto& c : gauss_line(2))
    for (const auto& b : gauss_line(2))
      for (const auto& a : gauss_line(2)) out.push_back({{a.xi.x(), b.xi.x(), c.xi.x()}, 1.0});
  return out;
}

std::vector<QuadraturePoint> tri_rule(int n) {
  if (n == 1) return {{{1.0 / 3.0, 1.0 / 3.0, 0}, 0.5}};
  const double w = 1.0 / 6.0;
  return {{{1.0 / 6.0, 1.0 / 6.0, 0}, w}, {{2.0 / 3.0, 1.0 / 6.0, 0}, w}, {{1.0 / 6.0, 2.0 / 3.0, 0}, w}};
}

std::vector<QuadraturePoint> tet_rule(int n) {
  if (n == 1) return {{{0.25, 0.25, 0.25}, 1.0 / 6.0}};
  const double a = 0.5854101966249685;
  const double b = 0.1381966011250105;
  const double w = 1.0 / 24.0;
  return {{{b, b, b}, w}, {{a, b, b}, w}, {{b, a, b}, w}, {{b, b, a}, w}};
}

}  // namespace

const std::vector<QuadraturePoint>& quadrature(ElementType t) {
  static const std::vector<QuadraturePoint> line2 = gauss_line(2);
  static const std::vector<QuadraturePoint> line3 = gauss_line(3);
  static const std::vector<QuadraturePoint> tri1 = tri_rule(1);
  static const std::vector<QuadraturePoint> tri3 = tri_rule(3);
  static const std::vector<QuadraturePoint> quad = gauss_quad();
  static const std::vector<QuadraturePoint> tet1 = tet_rule(1);
  static const std::vector<QuadraturePoint> tet4 = tet_rule(4);
  static const std::vector<QuadraturePoint> hex = gauss_hex();
  switch (t) {
    case ElementType::Line2: return line2;
    case ElementType::Line3: return line3;
    case ElementType::Tri3: return tri1;
    case ElementType::Tri6: return tri3;
    case ElementType::Quad4: return quad;
    case ElementType::Tet4: return tet1;
    case ElementType::Tet10: return tet4;
    case ElementType::Hex8: return hex;
  }
  return hex;
}

void shape_functions(ElementType t, const Eigen::Vector3d& xi, Eigen::VectorXd& n,
                     Eigen::MatrixXd& dn) {
  const int nn = node_count(t);
  const int dim = dimension(t);
  n.setZero(nn);
  dn.setZero(nn, dim);
  const double x = xi.x(), y = xi.y(), z = xi.z();

  switch (t) {
    case ElementType::Line2:
      n << 0.5 * (1 - x), 0.5 * (1 + x);
      dn << -0.5, 0.5;
      return;
    case ElementType::Line3:
      n << 0.5 * x * (x - 1), 0.5 * x * (x + 1), 1 - x * x;
      dn << x - 0.5, x + 0.5, -2 * x;
      return;
    case ElementType::Tri3:
      n << 1 - x - y, x, y;
      dn << -1, -1, 1, 0, 0, 1;
      return;
    case ElementType::Tri6: {
      const double l[3] = {1 - x - y, x, y};
      const double dl[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
      for (int a = 0; a < 3; ++a) {
        n[a] = l[a] * (2 * l[a] - 1);
        for (int d = 0; d < 2; ++d) dn(a, d) = (4 * l[a] - 1) * dl[a][d];
      }
      const int mids[3][2] = {{0, 1}, {1, 2}, {2, 0}};
      for (int m = 0; m < 3; ++m) {
        const int i = mids[m][0], j = mids[m][1];
        n[3 + m] = 4 * l[i] * l[j];
        for (int d = 0; d < 2; ++d) dn(3 + m, d) = 4 * (dl[i][d] * l[j] + l[i] * dl[j][d]);
      }
      return;
    }
    case ElementType::Quad4: {
      const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
      for (int a = 0; a < 4; ++a) {
        n[a] = 0.25 * (1 + sx[a] * x) * (1 + sy[a] * y);
        dn(a, 0) = 0.25 * sx[a] * (1 + sy[a] * y);
        dn(a, 1) = 0.25 * sy[a] * (1 + sx[a] * x);
      }
      return;
    }
    case ElementType::Tet4:
      n << 1 - x - y - z, x, y, z;
      dn << -1, -1, -1, 1, 0, 0, 0, 1, 0, 0, 0, 1;
      return;
    case ElementType::Tet10: {
      const double l[4] = {1 - x - y - z, x, y, z};
      const double dl[4][3] = {{-1, -1, -1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
      for (int a = 0; a < 4; ++a) {
        n[a] = l[a] * (2 * l[a] - 1);
        for (int d = 0; d < 3; ++d) dn(a, d) = (4 * l[a] - 1) * dl[a][d];
      }
      const int mids[6][2] = {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}};
      for (int m = 0; m < 6; ++m) {
        const int i = mids[m][0], j = mids[m][1];
        n[4 + m] = 4 * l[i] * l[j];
        for (int d = 0; d < 3; ++d) dn(4 + m, d) = 4 * (dl[i][d] * l[j] + l[i] * dl[j][d]);
      }
      return;
    }
    case ElementType::Hex8: {
      const double sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
      const double sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
      const double sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
      for (int a = 0; a < 8; ++a) {
        const double fx = 1 + sx[a] * x, fy = 1 + sy[a] * y, fz = 1 + sz[a] * z;
        n[a] = 0.125 * fx * fy * fz;
        dn(a, 0) = 0.125 * sx[a] * fy * fz;
        dn(a, 1) = 0.125 * sy[a] * fx * fz;
        dn(a, 2) = 0.125 * sz[a] * fx * fy;
      }
      return;
    }
  }
}

const std::vector<std::vector<int>>& facets(ElementType t) {
  static const std::vector<std::vector<int>> none;
  static const std::vector<std::vector<int>> tri3 = {{0, 1}, {1, 2}, {2, 0}};
  static const std::vector<std::vector<int>> tri6 = {{0, 1, 3}, {1, 2, 4}, {2, 0, 5}};
  static const std::vector<std::vector<int>> quad4 = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  static const std::vector<std::vector<int>> tet4 = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  static const std::vector<std::vector<int>> tet10 = {
      {0, 2, 1, 6, 5, 4}, {0, 1, 3, 4, 8, 7}, {1, 2, 3, 5, 9, 8}, {0, 3, 2, 7, 9, 6}};
  static const std::vector<std::vector<int>> hex8 = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                                     {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
  switch (t) {
    case ElementType::Tri3: return tri3;
    case ElementType::Tri6: return tri6;
    case ElementType::Quad4: return quad4;
    case ElementType::Tet4: return tet4;
    case ElementType::Tet10: return tet10;
    case ElementType::Hex8: return hex8;
    default: return none;
  }
}

ElementType facet_type(ElementType t) {
  switch (t) {
    case ElementType::Tri3:
    case ElementType::Quad4: return ElementType::Line2;
    case ElementType::Tri6: return ElementType::Line3;
    case ElementType::Tet4: return ElementType::Tri3;
    case ElementType::Tet10: return ElementType::Tri6;
    case ElementType::Hex8: return ElementType::Quad4;
    default: throw ContractViolation(std::string("element type ") + to_string(t) + " has no facets");
  }
}

Eigen::Vector3d node_natural_coordinates(ElementType t, int a) {
  switch (t) {
    case ElementType::Line2: return {a == 0 ? -1.0 : 1.0, 0, 0};
    case ElementType::Line3: return {a == 0 ? -1.0 : (a == 1 ? 1.0 : 0.0), 0, 0};
    case ElementType::Tri3:
    case ElementType::Tri6: {
      const double c[6][2] = {{0, 0}, {1, 0}, {0, 1}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}};
      return {c[a][0], c[a][1], 0};
    }
    case ElementType::Quad4: {
      const double c[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
      return {c[a][0], c[a][1], 0};
    }
    case ElementType::Tet4:
    case ElementType::Tet10: {
      const double c[10][3] = {{0, 0, 0},   {1, 0, 0},     {0, 1, 0},   {0, 0, 1},   {0.5, 0, 0},
                               {0.5, 0.5, 0}, {0, 0.5, 0}, {0, 0, 0.5}, {0.5, 0, 0.5}, {0, 0.5, 0.5}};
      return {c[a][0], c[a][1], c[a][2]};
    }
    case ElementType::Hex8: {
      const double sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
      const double sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
      const double sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
      return {sx[a], sy[a], sz[a]};
    }
  }
  return Eigen::Vector3d::Zero();
}

}  // namespace constikit::fe
