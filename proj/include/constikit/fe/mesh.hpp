#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "constikit/fe/element.hpp"

namespace constikit::fe {

struct Element {
  ElementType type = ElementType::Tet4;
  std::vector<int> nodes;
  int tag = 0;  // domain tag, selects the material assignment
};

struct Mesh {
  int dim = 3;  // 2 or 3 (1 for transport bars)
  std::vector<Eigen::Vector3d> nodes;
  std::vector<Element> elements;
  std::map<std::string, std::vector<int>> node_sets;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_elements() const { return static_cast<int>(elements.size()); }

  // Connectivity in range, element dimension equal to dim, and a positive
  // Jacobian at every quadrature point. Throws ContractViolation otherwise.
  void validate() const;

  // Nodes with |x_axis - value| <= tol, sorted.
  std::vector<int> select_nodes(int axis, double value, double tol = 1e-9) const;

  // Throws ContractViolation for an unknown set.
  const std::vector<int>& node_set(const std::string& name) const;
};

// Interpolation data at one point of an element.
struct PointGeometry {
  Eigen::VectorXd n;     // shape functions
  Eigen::MatrixXd dndx;  // reference-configuration gradients, nn x dim
  double det_j = 0.0;
};

PointGeometry point_geometry(const Mesh& mesh, const Element& e, const Eigen::Vector3d& xi);

// Element volume (area in 2D, length in 1D).
double element_measure(const Mesh& mesh, const Element& e);

struct FacetRef {
  int element = 0;
  int local = 0;  // index into facets(type)
};

// Element facets whose nodes all belong to the given node set.
std::vector<FacetRef> facets_on(const Mesh& mesh, const std::vector<int>& node_set);

// Global node ids of a facet.
std::vector<int> facet_nodes(const Mesh& mesh, const FacetRef& f);

// Integrates N_a over a facet: returns, per facet node, the weight such that a
// uniform traction t contributes t * weight to the node. `thickness` scales 2D
// edges.
std::vector<double> facet_load_weights(const Mesh& mesh, const FacetRef& f, double thickness = 1.0);

// Sidecar text format:
//   DIM d
//   NODES n        followed by n lines "x y [z]"
//   ELEMENTS m     followed by m lines "type tag n0 n1 ..."
//   NODESET name k followed by k node ids (any line breaks)
// Node ids are 0-based; '#' starts a comment. Throws ParseError with line numbers.
Mesh read_mesh_text(const std::string& path);
Mesh parse_mesh_text(const std::string& text);
std::string write_mesh_text(const Mesh& mesh);

}  // namespace constikit::fe
