#pragma once

#include <string>
#include <vector>

#include "constikit/fe/solver.hpp"

// CSV output. Every file starts with a header row; numbers use %.10e.
//
//   trace.csv               increment,attempt,cut_level,time,dt,iteration,abaqus_norm,
//                           comsol_norm,converged
//   force-displacement.csv  increment,time,displacement,force
//   stress-strain.csv       increment,time,strain,stress
//   reactions.csv           increment,time,set,rx,ry,rz
//   fields/increment_NNNN.txt
//                           node x y z ux uy uz sxx syy szz syz sxz sxy plastic sigma_h
namespace constikit::fe {

struct CurvePoint {
  int increment = 0;
  double time = 0.0;
  double displacement = 0.0;  // mean over displacement_set
  double force = 0.0;         // resultant over force_set
};

std::vector<CurvePoint> load_curve(const CaseDefinition& c,
                                   const std::vector<IncrementRecord>& increments);

// Sum of the internal forces of a node set.
Eigen::Vector3d set_resultant(const Mesh& mesh, int dofs_per_node, const std::string& set,
                              const Eigen::VectorXd& f_int);

// Largest imbalance between reactions at constrained DOFs and the applied
// loads, per component, over all increments, relative to the summed force
// magnitudes of all components.
double reaction_imbalance(const Model& model, const std::vector<IncrementRecord>& increments);

void write_trace_csv(const std::string& path, const SolverTrace& trace);
void write_field_dump(const std::string& path, const Mesh& mesh, int dofs_per_node,
                      const IncrementRecord& rec);

// Runs the case and writes every output file into out_dir (created when
// missing). Returns the solve result; files are written even on failure.
SolveResult run_case(const CaseDefinition& c, const std::string& out_dir,
                     const SolveOptions& options = {});

}  // namespace constikit::fe
