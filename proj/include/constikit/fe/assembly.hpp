#pragma once

#include <Eigen/Sparse>
#include <map>
#include <vector>

#include "constikit/bridge.hpp"
#include "constikit/errors.hpp"
#include "constikit/fe/case.hpp"

namespace constikit::fe {

// Committed data of one Gauss point.
struct PointState {
  std::vector<double> state;           // bridge state vector
  Tensor2 f = Tensor2::Identity();     // deformation gradient (finite strain)
};

using States = std::vector<std::vector<PointState>>;  // [element][point]

// Material failure at a Gauss point during assembly.
class IncrementFailure : public MaterialError {
 public:
  IncrementFailure(const std::string& what, int element, int point)
      : MaterialError("element " + std::to_string(element) + ", point " + std::to_string(point) +
                      ": " + what),
        element_(element),
        point_(point) {}
  int element() const { return element_; }
  int point() const { return point_; }

 private:
  int element_;
  int point_;
};

struct AssemblyResult {
  Eigen::VectorXd f_int;
  Eigen::SparseMatrix<double> k;  // empty unless requested
  States trial;
  // Mean over loaded DOFs of the summed magnitudes of element force
  // contributions, the spatial force average of the force-based norm.
  double force_average = 0.0;
};

struct NodalFields {
  Eigen::MatrixXd cauchy;  // nodes x 6, host order
  Eigen::VectorXd plastic;
  Eigen::VectorXd hydrostatic;
};

// A case prepared for assembly: DOF numbering, boundary facets, materials.
class Model {
 public:
  explicit Model(const CaseDefinition& c);

  const CaseDefinition& definition() const { return *case_; }
  int dofs_per_node() const { return ndn_; }
  int num_dofs() const { return ndn_ * case_->mesh.num_nodes(); }
  int dof(int node, int component) const { return ndn_ * node + component; }

  States initial_states() const;

  // Internal forces (and tangent) at displacement u, evaluating every Gauss
  // point from its committed state over a step of length dt. Throws
  // IncrementFailure.
  AssemblyResult assemble(const Eigen::VectorXd& u, const States& committed, double dt,
                          bool want_tangent, const bridge::TangentFault& fault = {}) const;

  Eigen::VectorXd external_force(double load_factor) const;

  // Prescribed DOF values at a load factor, keyed by DOF, in ascending order.
  std::map<int, double> prescribed(double load_factor) const;

  // Gauss-point Cauchy stress and plastic measure averaged onto nodes.
  NodalFields nodal_fields(const States& states) const;

 private:
  const CaseDefinition* case_;
  int ndn_;
  struct LoadedNode {
    int node;
    Eigen::Vector3d force;  // at load factor 1
  };
  std::vector<LoadedNode> loads_;
  std::vector<const MaterialAssignment*> element_material_;
};

// Cauchy stress stored in a committed bridge state vector.
Tensor2 stored_cauchy(const PointState& p);

}  // namespace constikit::fe
