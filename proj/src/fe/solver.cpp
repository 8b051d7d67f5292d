#include "constikit/fe/solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "constikit/errors.hpp"

namespace constikit::fe {

namespace {

class SparseLuSolver final : public LinearSolver {
 public:
  void factorize(const Eigen::SparseMatrix<double>& a) override {
    empty_ = a.rows() == 0;
    if (empty_) return;
    lu_.analyzePattern(a);
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success) throw SingularMatrix("sparse LU factorization failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const override {
    if (empty_) return Eigen::VectorXd();
    return lu_.solve(b);
  }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool empty_ = false;
};

class DenseLuSolver final : public LinearSolver {
 public:
  void factorize(const Eigen::SparseMatrix<double>& a) override {
    lu_.compute(Eigen::MatrixXd(a));
    if (a.rows() > 0 && std::abs(lu_.determinant()) == 0.0)
      throw SingularMatrix("dense LU factorization failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const override { return lu_.solve(b); }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

Eigen::SparseMatrix<double> restrict_free(const Eigen::SparseMatrix<double>& k,
                                          const std::vector<int>& free_of, int nf) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(k.nonZeros()));
  for (int col = 0; col < k.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(k, col); it; ++it) {
      const int r = free_of[static_cast<std::size_t>(it.row())];
      const int c = free_of[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  Eigen::SparseMatrix<double> out(nf, nf);
  out.setFromTriplets(t.begin(), t.end());
  out.makeCompressed();
  return out;
}

}  // namespace

std::unique_ptr<LinearSolver> make_linear_solver(const std::string& name) {
  if (name == "sparse_lu") return std::make_unique<SparseLuSolver>();
  if (name == "dense_lu") return std::make_unique<DenseLuSolver>();
  throw ContractViolation("unknown linear solver '" + name + "'");
}

std::vector<int> SolverTrace::iterations_per_increment() const {
  std::vector<int> out;
  for (const auto& a : attempts) {
    if (!a.converged) continue;
    if (static_cast<int>(out.size()) < a.increment) out.resize(static_cast<std::size_t>(a.increment), 0);
    auto& slot = out[static_cast<std::size_t>(a.increment - 1)];
    slot = std::max(slot, a.iterations.empty() ? 0 : a.iterations.back().iteration);
  }
  return out;
}

double fitted_convergence_order(const std::vector<double>& norms, double noise_floor) {
  std::vector<double> usable;
  for (double v : norms)
    if (v > noise_floor && std::isfinite(v)) usable.push_back(v);
  if (usable.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> last(usable.end() - 3, usable.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 2; ++i) {
    const double x = std::log(last[static_cast<std::size_t>(i)]);
    const double y = std::log(last[static_cast<std::size_t>(i + 1)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = 2 * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (2 * sxy - sx * sy) / den;
}

NewtonDriver::NewtonDriver(const Model& model, SolveOptions options)
    : model_(&model), options_(std::move(options)) {
  const CaseDefinition& c = model.definition();
  const int n = model.num_dofs();
  const std::map<int, double> constrained = model.prescribed(1.0);
  free_of_.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i)
    if (!constrained.count(i)) {
      free_of_[static_cast<std::size_t>(i)] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(i);
    }
  solver_ = make_linear_solver(c.solver.linear_solver);
  u_ = Eigen::VectorXd::Zero(n);
  states_ = model.initial_states();
  result_.trace.norm = c.solver.norm;
  result_.trace.tolerance = c.solver.tolerance;
}

SolveResult NewtonDriver::take_result() {
  result_.states = states_;
  return std::move(result_);
}

bool NewtonDriver::attempt(int inc, int cuts, double dt, IncrementAttempt& record,
                           Eigen::VectorXd& u_trial, AssemblyResult& current) {
  const Model& model = *model_;
  const CaseDefinition& c = model.definition();
  const int n = model.num_dofs();
  const int nf = static_cast<int>(free_dofs_.size());
  const double lambda = (t_ + dt) / c.stepping.total_time;
  auto gather = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out(nf);
    for (int i = 0; i < nf; ++i) out[i] = v[free_dofs_[static_cast<std::size_t>(i)]];
    return out;
  };
  record.increment = inc;
  record.cut_level = cuts;
  record.time = t_ + dt;
  record.dt = dt;
  u_trial = u_;

  const Eigen::VectorXd f_ext = model.external_force(lambda);
  Eigen::VectorXd du = Eigen::VectorXd::Zero(n);
  for (const auto& [d, v] : model.prescribed(lambda)) du[d] = v - u_[d];

  // Tangent predictor at the committed state, carrying the prescribed increment.
  AssemblyResult pred = model.assemble(u_, states_, dt, true, options_.fault);
  const Eigen::VectorXd rhs_full = f_ext - pred.f_int - pred.k * du;
  solver_->factorize(restrict_free(pred.k, free_of_, nf));
  const Eigen::VectorXd duf = solver_->solve(gather(rhs_full));
  for (int i = 0; i < nf; ++i) du[free_dofs_[static_cast<std::size_t>(i)]] = duf[i];
  u_trial += du;

  for (int iter = 1;; ++iter) {
    current = model.assemble(u_trial, states_, dt, true, options_.fault);
    if (fallback_reference_ == 0.0 && current.force_average > 0.0)
      fallback_reference_ = current.force_average;
    const Eigen::VectorXd r = gather(f_ext - current.f_int);
    std::vector<double> history = force_history_;
    history.push_back(current.force_average);
    IterationRecord rec;
    rec.iteration = iter;
    rec.abaqus_norm = norm_abaqus_style(r, history, fallback_reference_);
    // Error estimate: the correction the last factorization would apply.
    const Eigen::VectorXd e = nf ? Eigen::VectorXd(solver_->solve(r)) : Eigen::VectorXd();
    rec.comsol_norm = nf ? norm_comsol_style(e, gather(u_trial)) : 0.0;
    record.iterations.push_back(rec);
    const double active = c.solver.norm == NormKind::AbaqusStyle ? rec.abaqus_norm : rec.comsol_norm;
    if (!std::isfinite(rec.abaqus_norm) || !std::isfinite(active))
      throw Error("residual is not finite");
    if (active < c.solver.tolerance) return true;
    if (iter >= c.solver.max_iterations)
      throw Error("no convergence after " + std::to_string(iter) + " iterations");
    solver_->factorize(restrict_free(current.k, free_of_, nf));
    const Eigen::VectorXd corr = solver_->solve(r);
    for (int i = 0; i < nf; ++i) u_trial[free_dofs_[static_cast<std::size_t>(i)]] += corr[i];
  }
}

bool NewtonDriver::advance(int inc) {
  const Model& model = *model_;
  const CaseDefinition& c = model.definition();
  const double total = c.stepping.total_time;
  const double t_end = total * inc / c.stepping.increments;
  const double eps = 1e-12 * total;
  double step = t_end - t_;
  int cuts = 0;
  while (t_ < t_end - eps) {
    const double dt = std::min(step, t_end - t_);
    const auto clock0 = std::chrono::steady_clock::now();
    IncrementAttempt record;
    Eigen::VectorXd u_trial;
    AssemblyResult current;
    try {
      record.converged = attempt(inc, cuts, dt, record, u_trial, current);
    } catch (const Error& ex) {
      record.converged = false;
      record.failure = ex.what();
    }
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();
    const bool ok = record.converged;
    const std::string failure = record.failure;
    result_.trace.attempts.push_back(std::move(record));

    if (!ok) {
      ++cuts;
      if (cuts > c.solver.max_cuts) {
        result_.failure = "increment " + std::to_string(inc) + " failed after " +
                          std::to_string(c.solver.max_cuts) + " cuts: " + failure;
        return false;
      }
      step = dt / 2;
      continue;
    }
    u_ = u_trial;
    states_ = std::move(current.trial);
    t_ += dt;
    force_history_.push_back(current.force_average);
    if (t_ >= t_end - eps) {
      t_ = t_end;
      IncrementRecord rec;
      rec.increment = inc;
      rec.time = t_end;
      rec.load_factor = t_end / total;
      rec.u = u_;
      rec.f_int = current.f_int;
      rec.f_ext = model.external_force(rec.load_factor);
      rec.fields = model.nodal_fields(states_);
      if (options_.on_increment) options_.on_increment(rec, states_);
      result_.increments.push_back(std::move(rec));
    }
  }
  return true;
}

SolveResult newton_solve(const Model& model, const SolveOptions& options) {
  NewtonDriver driver(model, options);
  bool ok = true;
  for (int inc = 1; ok && inc <= model.definition().stepping.increments; ++inc) ok = driver.advance(inc);
  SolveResult r = driver.take_result();
  r.converged = ok;
  return r;
}

}  // namespace constikit::fe
