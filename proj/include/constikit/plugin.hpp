#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "constikit/material_api.hpp"

// Binary boundary for externally compiled material models.
//
// A plugin is a shared library exporting
//
//   extern "C" void umat_entry(
//       double* stress,        // [6]  in/out, Cauchy, UMAT order
//       double* statev,        // [nstatv] in/out, material slots only
//       double* ddsdde,        // [36] out, column-major
//       const double* stran,   // [6]  engineering shears
//       const double* dstran,  // [6]
//       const double* time,    // [2]  step time, total time
//       double dtime,
//       const double* props,   // [nprops]
//       int32_t nprops,
//       int32_t nstatv,
//       const double* dfgrd0,  // [9]  column-major
//       const double* dfgrd1,  // [9]  column-major
//       const double* drot,    // [9]  column-major
//       int32_t ntens,         // always 6
//       int32_t* status);      // out, 0 = ok
//
// next to a metadata sidecar "<library without extension>.meta":
//
//   name = my_model
//   nprops = 2
//   nstatv_user = 0
//   regime = finite        # or small
//
// Entry points must be reentrant: the host may call from several threads.
namespace constikit {

using UmatEntry = void (*)(double*, double*, double*, const double*, const double*, const double*,
                           double, const double*, int32_t, int32_t, const double*, const double*,
                           const double*, int32_t, int32_t*);

inline constexpr const char* kPluginEntrySymbol = "umat_entry";
inline constexpr const char* kPluginPathVariable = "CONSTIKIT_PLUGIN_PATH";

struct PluginMetadata {
  std::string name;
  int nprops = 0;
  int nstatv_user = 0;
  Regime regime = Regime::SmallStrain;

  friend bool operator==(const PluginMetadata&, const PluginMetadata&) = default;
};

// Parses the sidecar text. Throws ParseError naming the offending key.
PluginMetadata parse_plugin_metadata(const std::string& text);
PluginMetadata read_plugin_metadata(const std::string& path);
std::string sidecar_path(const std::string& library_path);

// A path containing '/' is used as is. A bare name is searched in the
// directories of CONSTIKIT_PLUGIN_PATH as NAME, libNAME.so and NAME.so.
// Throws PluginError when nothing is found.
std::string resolve_plugin_path(const std::string& name_or_path);

class PluginHandle {
 public:
  ~PluginHandle();
  PluginHandle(const PluginHandle&) = delete;
  PluginHandle& operator=(const PluginHandle&) = delete;

  const std::string& path() const { return path_; }
  const PluginMetadata& metadata() const { return metadata_; }
  UmatEntry entry() const { return entry_; }

 private:
  friend std::shared_ptr<PluginHandle> load_plugin(const std::string&,
                                                   const std::optional<PluginMetadata>&);
  PluginHandle() = default;
  std::string path_;
  PluginMetadata metadata_;
  void* library_ = nullptr;
  UmatEntry entry_ = nullptr;
};

// Opens a private copy of the library, so a file rebuilt in place is picked
// up by the next load. Metadata comes from the sidecar; when `expected` is
// given it must agree with the sidecar (or stands in for a missing one).
// Throws PluginError (missing file, missing symbol) or ContractViolation
// (metadata mismatch).
std::shared_ptr<PluginHandle> load_plugin(const std::string& path,
                                          const std::optional<PluginMetadata>& expected = {});

// Marshals the call over the wire convention. Throws MaterialError when the
// plugin reports a non-zero status or returns non-finite values.
UmatResult call_plugin(const PluginHandle& handle, const UmatCall& call);

// Adapter that makes a plugin usable wherever a built-in model is.
class PluginMaterial final : public UmatMaterial {
 public:
  explicit PluginMaterial(std::shared_ptr<PluginHandle> handle);
  const MaterialInfo& info() const override { return info_; }
  UmatResult evaluate(const UmatCall& call) const override;

 private:
  std::shared_ptr<PluginHandle> handle_;
  MaterialInfo info_;
};

std::shared_ptr<const UmatMaterial> load_plugin_material(
    const std::string& name_or_path, const std::optional<PluginMetadata>& expected = {});

}  // namespace constikit
