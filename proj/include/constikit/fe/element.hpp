#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace constikit::fe {

// Lagrange element families. Line2/Line3 serve as boundary facets of 2D
// elements and as 1D transport elements.
enum class ElementType { Line2, Line3, Tri3, Tri6, Quad4, Tet4, Tet10, Hex8 };

int node_count(ElementType t);
int dimension(ElementType t);
const char* to_string(ElementType t);
// Throws ParseError-compatible ContractViolation for unknown names.
ElementType element_type_from_string(const std::string& s);

struct QuadraturePoint {
  Eigen::Vector3d xi;
  double weight;
};

// Tri6 and Tet10 use 3- and 4-point rules; Quad4/Hex8 full 2x2(x2) Gauss.
const std::vector<QuadraturePoint>& quadrature(ElementType t);

// Shape functions and their natural derivatives (node_count x dimension).
void shape_functions(ElementType t, const Eigen::Vector3d& xi, Eigen::VectorXd& n,
                     Eigen::MatrixXd& dn);

// Local node lists of the boundary facets (edges in 2D, faces in 3D), each
// ordered so that it is a valid element of facet_type(t).
const std::vector<std::vector<int>>& facets(ElementType t);
ElementType facet_type(ElementType t);

// Natural coordinates of the element nodes.
Eigen::Vector3d node_natural_coordinates(ElementType t, int local_node);

}  // namespace constikit::fe
