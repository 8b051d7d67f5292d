#include "constikit/fe/norms.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "constikit/errors.hpp"

namespace constikit::fe {

const char* to_string(NormKind k) { return k == NormKind::AbaqusStyle ? "abaqus" : "comsol"; }

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "abaqus") return NormKind::AbaqusStyle;
  if (s == "comsol") return NormKind::ComsolStyle;
  throw ContractViolation("unknown norm '" + s + "' (expected abaqus or comsol)");
}

double default_tolerance(NormKind k) { return k == NormKind::AbaqusStyle ? 5e-3 : 1e-3; }

double time_averaged_force(std::span<const double> spatial_averages) {
  if (spatial_averages.empty()) throw ContractViolation("force history is empty");
  return std::accumulate(spatial_averages.begin(), spatial_averages.end(), 0.0) /
         static_cast<double>(spatial_averages.size());
}

double norm_abaqus_style(const Eigen::VectorXd& residual, std::span<const double> force_history,
                         double fallback_reference) {
  const double r_max = residual.size() ? residual.lpNorm<Eigen::Infinity>() : 0.0;
  double q = time_averaged_force(force_history);
  if (q <= 0.0) q = fallback_reference;
  if (q <= 0.0) return r_max;
  return r_max / q;
}

double norm_comsol_style(const Eigen::VectorXd& error_estimate, const Eigen::VectorXd& solution) {
  if (error_estimate.size() != solution.size() || solution.size() == 0)
    throw ContractViolation("error estimate and solution must have the same non-zero length");
  const double s = std::abs(solution.mean());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < solution.size(); ++i) {
    const double w = std::max(std::abs(solution[i]), s);
    const double e = std::abs(error_estimate[i]);
    if (w == 0.0) {
      if (e == 0.0) continue;
      return std::numeric_limits<double>::infinity();
    }
    sum += (e / w) * (e / w);
  }
  return std::sqrt(sum / static_cast<double>(solution.size()));
}

}  // namespace constikit::fe
