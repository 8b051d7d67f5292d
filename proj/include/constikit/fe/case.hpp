#pragma once

#include <memory>
#include <string>
#include <vector>

#include "constikit/fe/mesh.hpp"
#include "constikit/fe/norms.hpp"
#include "constikit/material_api.hpp"

namespace constikit::fe {

enum class Analysis { PlaneStress, PlaneStrain, Solid };

const char* to_string(Analysis a);
Analysis analysis_from_string(const std::string& s);

struct MaterialAssignment {
  int tag = 0;
  std::shared_ptr<const UmatMaterial> material;
  std::vector<double> props;
  // User state at t = 0; empty means material->initial_state(props).
  std::vector<double> initial_state;
};

// Boundary values ramp linearly with the load factor t / total_time.
struct DisplacementBC {
  std::string set;
  int component = 0;
  double value = 0.0;  // m at load factor 1
};

// u = (R(angle * lambda) - I)(X - center) on every component of the set.
struct RotationBC {
  std::string set;
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double angle = 0.0;  // rad at load factor 1
};

// Dead-load traction per unit reference area (per unit length times the
// thickness in 2D).
struct TractionBC {
  std::string set;
  Eigen::Vector3d traction = Eigen::Vector3d::Zero();  // Pa at load factor 1
};

struct Stepping {
  bool transient = false;  // material dtime is physical time either way
  int increments = 1;
  double total_time = 1.0;
  double dt() const { return total_time / increments; }
};

struct SolverSettings {
  NormKind norm = NormKind::AbaqusStyle;
  double tolerance = default_tolerance(NormKind::AbaqusStyle);
  int max_iterations = 25;
  int max_cuts = 4;
  std::string linear_solver = "sparse_lu";
};

struct OutputSettings {
  // Force-displacement / stress-strain curve: resultant of the internal
  // forces on force_set along force_component, mean displacement of
  // displacement_set along displacement_component.
  std::string force_set;
  int force_component = 0;
  std::string displacement_set;
  int displacement_component = 0;
  double gauge_length = 1.0;  // strain = displacement / gauge_length
  double area = 1.0;          // stress = force / area
  bool stress_strain = false;
  bool fields = false;        // per-increment nodal dumps
  std::vector<std::string> reaction_sets;
};

struct CaseDefinition {
  std::string name = "case";
  Mesh mesh;
  Analysis analysis = Analysis::Solid;
  Regime regime = Regime::SmallStrain;
  double thickness = 1.0;
  std::vector<MaterialAssignment> materials;
  std::vector<DisplacementBC> displacements;
  std::vector<RotationBC> rotations;
  std::vector<TractionBC> tractions;
  Stepping stepping;
  SolverSettings solver;
  OutputSettings output;

  // Mesh validity, referenced sets exist, every element tag has a material
  // with a matching regime and property count, N >= 1, tolerance > 0.
  // Throws ContractViolation.
  void validate() const;

  const MaterialAssignment& material_for(int tag) const;
};

}  // namespace constikit::fe
