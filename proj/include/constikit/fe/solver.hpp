#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "constikit/fe/assembly.hpp"

namespace constikit::fe {

// Direct solver behind a small interface so the Newton driver does not care
// whether the factorization is sparse or dense.
class LinearSolver {
 public:
  virtual ~LinearSolver() = default;
  // Throws SingularMatrix.
  virtual void factorize(const Eigen::SparseMatrix<double>& a) = 0;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& b) const = 0;
};

// "sparse_lu" or "dense_lu".
std::unique_ptr<LinearSolver> make_linear_solver(const std::string& name);

struct IterationRecord {
  int iteration = 0;  // number of linear solves so far in this attempt
  double abaqus_norm = 0.0;
  double comsol_norm = 0.0;
};

struct IncrementAttempt {
  int increment = 0;  // 1-based index of the scheduled increment
  int cut_level = 0;  // number of halvings applied
  double time = 0.0;  // time at the end of the attempt
  double dt = 0.0;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::string failure;
  double wall_seconds = 0.0;
};

struct SolverTrace {
  NormKind norm = NormKind::AbaqusStyle;
  double tolerance = 0.0;
  std::vector<IncrementAttempt> attempts;

  // Iterations of the last successful attempt reaching each scheduled
  // increment's end (index 0 = increment 1). Sub-stepped increments report
  // their largest sub-step count.
  std::vector<int> iterations_per_increment() const;
};

// State at the end of a converged scheduled increment.
struct IncrementRecord {
  int increment = 0;
  double time = 0.0;
  double load_factor = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd f_int;
  Eigen::VectorXd f_ext;
  NodalFields fields;
};

struct SolveResult {
  bool converged = false;
  std::string failure;
  SolverTrace trace;
  std::vector<IncrementRecord> increments;
  States states;  // committed at the last converged increment
};

struct SolveOptions {
  bridge::TangentFault fault;
  // Called after each converged scheduled increment.
  std::function<void(const IncrementRecord&, const States&)> on_increment;
};

// Incremental Newton-Raphson driver holding the committed solution, so that
// other solvers can be interleaved between increments.
class NewtonDriver {
 public:
  NewtonDriver(const Model& model, SolveOptions options = {});

  // Solves scheduled increment `inc` (1-based, in order), sub-stepping on
  // failure. Returns false on hard failure; result().failure says why.
  bool advance(int inc);

  const SolveResult& result() const { return result_; }
  SolveResult take_result();
  const Eigen::VectorXd& displacement() const { return u_; }
  const States& states() const { return states_; }

 private:
  bool attempt(int inc, int cuts, double dt, IncrementAttempt& record, Eigen::VectorXd& u_out,
               AssemblyResult& converged);

  const Model* model_;
  SolveOptions options_;
  std::unique_ptr<LinearSolver> solver_;
  std::vector<int> free_of_;
  std::vector<int> free_dofs_;
  Eigen::VectorXd u_;
  States states_;
  std::vector<double> force_history_;
  double fallback_reference_ = 0.0;
  double t_ = 0.0;
  SolveResult result_;
};

// Incremental Newton-Raphson. Each attempt starts with a tangent predictor
// that carries the prescribed displacement increment; every later iteration
// records both convergence norms. On failure the step is halved, up to
// max_cuts times.
SolveResult newton_solve(const Model& model, const SolveOptions& options = {});

// Observed convergence order fitted on the last three values above the noise
// floor: least-squares slope of log e_{k+1} against log e_k. NaN when fewer
// than three usable values are present.
double fitted_convergence_order(const std::vector<double>& norms, double noise_floor = 0.0);

}  // namespace constikit::fe
