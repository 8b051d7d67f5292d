#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>

namespace constikit::fe {

enum class NormKind { AbaqusStyle, ComsolStyle };

const char* to_string(NormKind k);
NormKind norm_kind_from_string(const std::string& s);

// 5e-3 for the force-based norm, 1e-3 for the weighted error norm.
double default_tolerance(NormKind k);

// Mean of the spatial force averages of the converged increments and the
// current one.
double time_averaged_force(std::span<const double> spatial_averages);

// r_max / q~. When q~ is zero the fallback reference is used instead, and
// when that is zero too the plain infinity norm is returned.
double norm_abaqus_style(const Eigen::VectorXd& residual, std::span<const double> force_history,
                         double fallback_reference = 0.0);

// sqrt(1/N sum (|E_i| / W_i)^2) with W_i = max(|U_i|, |mean U|). A component
// with W_i = 0 contributes nothing when E_i = 0 and makes the result +inf
// otherwise.
double norm_comsol_style(const Eigen::VectorXd& error_estimate, const Eigen::VectorXd& solution);

}  // namespace constikit::fe
