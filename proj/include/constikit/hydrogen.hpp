#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "constikit/fe/case.hpp"
#include "constikit/fe/mesh.hpp"

// Hydrogen transport with Oriani trapping and hydrostatic-stress drift:
//   d(C_L + C_T)/dt + div(-D_L grad C_L + D_L V_H / (R T) C_L grad sigma_h) = 0
namespace constikit::hydrogen {

inline constexpr double kAvogadro = 6.02214076e23;

struct TransportParams {
  double d_l = 1.27e-8;  // m^2/s
  double n_l = 8.469;    // mol/m^3
  double v_h = 2e-6;     // m^3/mol
  double w_b = 60e3;     // J/mol
  double temperature = 300.0;  // K
  double r = 8.314;      // J/(mol K)
  double c0 = 0.00346;   // mol/m^3

  double binding_factor() const;  // exp(W_B / (R T))
  void validate() const;
};

// Dislocation trap density in mol/m^3:
// 10^(23.26 - 2.33 exp(-5.5 eps_p)) sites/m^3 divided by Avogadro's number.
double trap_density(double eps_p);

// C_T = N_T theta / (1 + theta), theta = C_L / N_L exp(W_B / RT).
double oriani_trapped(double c_l, double n_t, const TransportParams& p);

// dC_T/dC_L = N_T (K / N_L) / (1 + theta)^2.
double capacity(double c_l, double n_t, const TransportParams& p);

struct TransportState {
  Eigen::VectorXd c_l;
  Eigen::VectorXd n_t;
  Eigen::VectorXd c_t;
};

// Galerkin drift-diffusion on any mesh of the fe module with HRZ-lumped
// storage. The storage term uses the change of C_L + C_T between steps, so
// the scheme conserves hydrogen exactly under no-flux boundaries; the trap
// capacity enters the Newton Jacobian. Nodes in `fixed` hold C = C0.
class TransportModel {
 public:
  TransportModel(const fe::Mesh& mesh, TransportParams params, std::vector<int> fixed = {},
                 double thickness = 1.0);

  const TransportParams& params() const { return params_; }
  const Eigen::VectorXd& lumped_mass() const { return mass_; }

  TransportState initial_state(double c_l, const Eigen::VectorXd& eps_p) const;

  // One backward-Euler step. sigma_h and eps_p are nodal values at the end
  // of the step. Throws Error when the Newton iteration fails.
  TransportState step(const TransportState& s, const Eigen::VectorXd& sigma_h,
                      const Eigen::VectorXd& eps_p, double dt) const;

  // Lumped integral of C_L + C_T.
  double total_content(const TransportState& s) const;

 private:
  const fe::Mesh* mesh_;
  TransportParams params_;
  std::vector<int> fixed_;
  double thickness_;
  Eigen::VectorXd mass_;
};

TransportState transport_step(const TransportModel& model, const TransportState& s,
                              const Eigen::VectorXd& sigma_h, const Eigen::VectorXd& eps_p,
                              double dt);

// Staggered mechanics/transport coupling on the mechanics mesh.
struct CoupledStep {
  double time = 0.0;
  int passes = 0;
  TransportState transport;
  Eigen::VectorXd sigma_h;
  Eigen::VectorXd eps_p;
};

struct CoupledResult {
  bool converged = false;
  std::string failure;
  std::vector<CoupledStep> steps;
};

struct StaggerOptions {
  std::vector<int> fixed_nodes;  // C_L = C0
  double initial_c_l = 0.00346;
  double pass_tolerance = 1e-4;  // relative change of C_L between passes
  int max_passes = 10;
};

// Per mechanics increment: solve mechanics, project sigma_h and the plastic
// measure to the nodes, take a transport step, and repeat the pass until C_L
// changes by less than pass_tolerance.
CoupledResult staggered_couple(const fe::CaseDefinition& mechanics, const TransportParams& params,
                               const StaggerOptions& options = {});

// Bundled coupled demo: a 10 mm x 2 mm plane-strain J2 strip bent by
// rotating both end edges in opposite senses, ramped over 10 steps of 200 s.
// Hydrogen starts uniform at C0 with no-flux boundaries. load_scale = 0
// gives the pure-diffusion variant.
fe::CaseDefinition demo_strip_case(double load_scale = 1.0);

// Runs the demo and writes into out_dir:
//   summary.csv              step,time,passes,total_content,corr_cl_sigma_h,min_c_l,max_c_l
//   profiles/step_NNNN.csv   node,x,y,c_l,c_t,n_t,sigma_h,eps_p
CoupledResult run_demo(const std::string& out_dir, double load_scale = 1.0,
                       const TransportParams& params = {});

// Pearson correlation coefficient.
double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace constikit::hydrogen
