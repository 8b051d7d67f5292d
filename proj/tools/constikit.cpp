// constikit command-line tool.
//
// Exit codes: 0 success, 1 usage or parse error, 2 tangent-check violation,
// 3 solver failure.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "constikit/errors.hpp"
#include "constikit/fe/case_io.hpp"
#include "constikit/fe/results.hpp"
#include "constikit/hydrogen.hpp"
#include "constikit/plugin.hpp"
#include "constikit/registry.hpp"
#include "constikit/tangent_check.hpp"

namespace {

using namespace constikit;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kTangentViolation = 2;
constexpr int kSolverFailure = 3;

struct MaterialChoice {
  std::string name;
  std::string plugin;
};

std::shared_ptr<const UmatMaterial> resolve(const MaterialChoice& m) {
  if (!m.plugin.empty()) return load_plugin_material(m.plugin);
  const UmatMaterial& b = builtin_material(m.name);
  return std::shared_ptr<const UmatMaterial>(&b, [](const UmatMaterial*) {});
}

void print_info(const MaterialInfo& info) {
  std::cout << "name        " << info.name << "\n"
            << "regime      " << to_string(info.regime) << "\n"
            << "nprops      " << info.nprops << "\n"
            << "nstatv_user " << info.nstatv_user << "\n";
  if (!info.prop_names.empty()) {
    std::cout << "props      ";
    for (const auto& p : info.prop_names) std::cout << " " << p;
    std::cout << "\n";
  }
  if (!info.description.empty()) std::cout << info.description << "\n";
}

int tangent_check_cmd(const MaterialChoice& m, tangent_check::Options opts, const std::string& out,
                      bool break_tangent) {
  const auto material = resolve(m);
  if (break_tangent) opts.fault.scale = 1.01;
  const auto report = tangent_check::run(*material, opts);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    tangent_check::write_csv((std::filesystem::path(out) / "tangent-check.csv").string(), report);
  }
  std::printf("%s (%s strain): %zu samples, max relative error %.3e, tolerance %.1e\n",
              report.material.c_str(), to_string(report.regime), report.samples.size(),
              report.max_error(), report.tolerance);
  if (report.passed()) return kOk;
  std::cout << "VIOLATION\n" << tangent_check::describe(report.worst(), report.regime);
  return kTangentViolation;
}

int run_cmd(const std::string& case_path, const std::string& out) {
  const fe::CaseDefinition c = fe::load_case(case_path);
  const fe::SolveResult res = fe::run_case(c, out);
  const auto iters = res.trace.iterations_per_increment();
  std::printf("%s: %zu/%d increments converged\n", c.name.c_str(), res.increments.size(),
              c.stepping.increments);
  if (!res.converged) {
    std::cerr << "error: " << res.failure << "\n";
    return kSolverFailure;
  }
  int worst = 0;
  for (int n : iters) worst = std::max(worst, n);
  std::printf("max Newton iterations per increment: %d\n", worst);
  return kOk;
}

int demo_hydrogen_cmd(const std::string& out, double load_scale) {
  const auto res = hydrogen::run_demo(out, load_scale);
  if (!res.converged) {
    std::cerr << "error: " << res.failure << "\n";
    return kSolverFailure;
  }
  const auto& last = res.steps.back();
  std::printf("hydrogen demo: %zu steps, final corr(C_L, sigma_h) = %.4f, C_L in [%.6e, %.6e]\n",
              res.steps.size(), hydrogen::correlation(last.transport.c_l, last.sigma_h),
              last.transport.c_l.minCoeff(), last.transport.c_l.maxCoeff());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constitutive-model interoperability kernel"};
  app.require_subcommand(1);

  MaterialChoice mat;
  tangent_check::Options tc;
  double tol = 0.0;
  std::string out, case_path;
  bool break_tangent = false;
  double load_scale = 1.0;

  auto* check = app.add_subcommand("tangent-check", "Compare returned tangents with finite differences");
  check->add_option("material,--material", mat.name, "Built-in material name");
  check->add_option("--plugin", mat.plugin, "Plugin library name or path");
  check->add_option("--samples", tc.samples, "Number of random states")->check(CLI::PositiveNumber);
  check->add_option("--seed", tc.seed, "Random seed");
  check->add_option("--tol", tol, "Relative Frobenius tolerance")->check(CLI::PositiveNumber);
  check->add_option("--props", tc.props, "Material properties");
  check->add_option("--out", out, "Directory for tangent-check.csv");
  check->add_flag("--break-tangent", break_tangent)->group("");

  auto* run = app.add_subcommand("run", "Run a case file");
  run->add_option("--case", case_path, "Case file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory")->required();

  auto* material = app.add_subcommand("material", "Inspect materials");
  material->require_subcommand(1);
  auto* list = material->add_subcommand("list", "List built-in materials");
  auto* info = material->add_subcommand("info", "Describe a material");
  info->add_option("name", mat.name, "Built-in material name");
  info->add_option("--plugin", mat.plugin, "Plugin library name or path");

  auto* demo = app.add_subcommand("demo", "Bundled demonstrations");
  demo->require_subcommand(1);
  auto* hydro = demo->add_subcommand("hydrogen", "Coupled hydrogen transport strip");
  hydro->add_option("--out", out, "Output directory")->required();
  hydro->add_option("--load-scale", load_scale, "Multiplier on the bending load");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) {
      if (mat.name.empty() == mat.plugin.empty()) {
        std::cerr << "error: give a material name or --plugin\n";
        return kUsage;
      }
      if (tol > 0) tc.tolerance = tol;
      return tangent_check_cmd(mat, tc, out, break_tangent);
    }
    if (*run) return run_cmd(case_path, out);
    if (*list) {
      for (const auto& n : builtin_material_names()) std::cout << n << "\n";
      return kOk;
    }
    if (*info) {
      if (mat.name.empty() == mat.plugin.empty()) {
        std::cerr << "error: give a material name or --plugin\n";
        return kUsage;
      }
      print_info(resolve(mat)->info());
      return kOk;
    }
    if (*hydro) return demo_hydrogen_cmd(out, load_scale);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const MaterialError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
