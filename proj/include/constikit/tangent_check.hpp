#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "constikit/bridge.hpp"

// Finite-difference oracle for the host tangent returned by bridge::eval.
//
// Each sample takes a committed state (one increment from the reference
// state), then a second increment. The returned tangent is compared with the
// central difference of the returned stress, re-running the second increment
// from the same committed state for every perturbation. Finite strain
// perturbs F_new (9 columns); small strain perturbs the total strain with
// engineering shears (6 columns).
namespace constikit::tangent_check {

struct Options {
  int samples = 20;
  std::uint64_t seed = 0;
  std::optional<double> tolerance;  // default_tolerance() when unset
  std::vector<double> props;        // default_props() when empty
  bridge::TangentFault fault;
};

struct Sample {
  int index = 0;
  double rel_error = 0.0;  // ||K - K_fd||_F / ||K_fd||_F
  double abs_error = 0.0;  // max |K - K_fd|
  Eigen::MatrixXd analytic;
  Eigen::MatrixXd numeric;
  Tensor2 f_old = Tensor2::Identity();
  Tensor2 f_new = Tensor2::Identity();
  HostStrain strain_old;
  HostStrain strain_new;
};

struct Report {
  std::string material;
  Regime regime = Regime::SmallStrain;
  double tolerance = 0.0;
  std::vector<Sample> samples;

  double max_error() const;
  const Sample& worst() const;  // throws ContractViolation when empty
  bool passed() const { return !samples.empty() && max_error() <= tolerance; }
};

// 1e-4 for elastic models, 1e-3 for path-dependent ones (a model with
// nonzero user state).
double default_tolerance(const MaterialInfo& info);

// Properties used when Options::props is empty. Built-in names get their
// reference parameters; other two-property models get [1e6, 0.3]. Throws
// ContractViolation otherwise.
std::vector<double> default_props(const MaterialInfo& info);

Report run(const UmatMaterial& material, const Options& options = {});

// Per-sample CSV: sample,rel_error,abs_error,passed
void write_csv(const std::string& path, const Report& report);

// Human-readable dump of a sample: inputs, both tangents.
std::string describe(const Sample& s, Regime regime);

}  // namespace constikit::tangent_check
