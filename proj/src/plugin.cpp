#include "constikit/plugin.hpp"

#include <dlfcn.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "constikit/errors.hpp"

namespace constikit {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_count(const std::string& key, const std::string& value, int line) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("metadata key '" + key + "' needs a non-negative integer", line, 1);
  }
}

// Copies the library to a private temporary file so that the dynamic loader
// cannot hand back a stale mapping of an earlier build at the same path.
std::string private_copy(const std::string& path) {
  std::string tmpl = (fs::temp_directory_path() / "constikit-plugin-XXXXXX").string();
  const int fd = mkstemp(tmpl.data());
  if (fd < 0) throw PluginError("cannot create a temporary copy of '" + path + "'");
  close(fd);
  std::error_code ec;
  fs::copy_file(path, tmpl, fs::copy_options::overwrite_existing, ec);
  if (ec) {
    fs::remove(tmpl);
    throw PluginError("cannot copy plugin '" + path + "': " + ec.message());
  }
  return tmpl;
}

}  // namespace

PluginMetadata parse_plugin_metadata(const std::string& text) {
  PluginMetadata m;
  bool seen[4] = {false, false, false, false};
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    if (trim(raw).empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, 1);
    const std::string key = trim(raw.substr(0, eq));
    const std::string value = trim(raw.substr(eq + 1));
    if (key == "name") {
      if (value.empty()) throw ParseError("metadata key 'name' is empty", line, 1);
      m.name = value;
      seen[0] = true;
    } else if (key == "nprops") {
      m.nprops = parse_count(key, value, line);
      seen[1] = true;
    } else if (key == "nstatv_user") {
      m.nstatv_user = parse_count(key, value, line);
      seen[2] = true;
    } else if (key == "regime") {
      try {
        m.regime = regime_from_string(value);
      } catch (const ContractViolation& ex) {
        throw ParseError(std::string("metadata key 'regime': ") + ex.what(), line, 1);
      }
      seen[3] = true;
    } else {
      throw ParseError("unknown metadata key '" + key + "'", line, 1);
    }
  }
  static const char* names[4] = {"name", "nprops", "nstatv_user", "regime"};
  for (int i = 0; i < 4; ++i)
    if (!seen[i]) throw ParseError(std::string("metadata key '") + names[i] + "' is missing");
  return m;
}

PluginMetadata read_plugin_metadata(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PluginError("cannot open plugin metadata '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_plugin_metadata(ss.str());
}

std::string sidecar_path(const std::string& library_path) {
  return fs::path(library_path).replace_extension(".meta").string();
}

std::string resolve_plugin_path(const std::string& name_or_path) {
  if (name_or_path.find('/') != std::string::npos) {
    if (!fs::exists(name_or_path)) throw PluginError("plugin library not found: " + name_or_path);
    return name_or_path;
  }
  const char* env = std::getenv(kPluginPathVariable);
  std::vector<std::string> dirs;
  if (env) {
    std::stringstream ss(env);
    for (std::string d; std::getline(ss, d, ':');)
      if (!d.empty()) dirs.push_back(d);
  }
  for (const auto& d : dirs)
    for (const std::string& f :
         {name_or_path, "lib" + name_or_path + ".so", name_or_path + ".so"}) {
      const fs::path p = fs::path(d) / f;
      if (fs::is_regular_file(p)) return p.string();
    }
  if (fs::is_regular_file(name_or_path)) return name_or_path;
  throw PluginError("plugin '" + name_or_path + "' not found in " + kPluginPathVariable);
}

PluginHandle::~PluginHandle() {
  if (library_) dlclose(library_);
}

std::shared_ptr<PluginHandle> load_plugin(const std::string& path,
                                          const std::optional<PluginMetadata>& expected) {
  if (!fs::is_regular_file(path)) throw PluginError("plugin library not found: " + path);

  PluginMetadata meta;
  const std::string side = sidecar_path(path);
  if (fs::exists(side)) {
    meta = read_plugin_metadata(side);
    if (expected && !(*expected == meta))
      throw ContractViolation("plugin metadata in '" + side + "' does not match the expected " +
                              "declaration for '" + expected->name + "'");
  } else if (expected) {
    meta = *expected;
  } else {
    throw PluginError("plugin metadata sidecar missing: " + side);
  }

  const std::string copy = private_copy(path);
  void* lib = dlopen(copy.c_str(), RTLD_NOW | RTLD_LOCAL);
  const std::string err = lib ? "" : dlerror();
  fs::remove(copy);
  if (!lib) throw PluginError("cannot load plugin '" + path + "': " + err);
  void* sym = dlsym(lib, kPluginEntrySymbol);
  if (!sym) {
    dlclose(lib);
    throw PluginError("plugin '" + path + "' does not export '" + kPluginEntrySymbol + "'");
  }

  std::shared_ptr<PluginHandle> h(new PluginHandle());
  h->path_ = path;
  h->metadata_ = meta;
  h->library_ = lib;
  h->entry_ = reinterpret_cast<UmatEntry>(sym);
  return h;
}

UmatResult call_plugin(const PluginHandle& handle, const UmatCall& call) {
  const PluginMetadata& m = handle.metadata();
  if (static_cast<int>(call.props.size()) != m.nprops)
    throw ContractViolation("plugin '" + m.name + "' expects " + std::to_string(m.nprops) +
                            " properties, got " + std::to_string(call.props.size()));
  if (static_cast<int>(call.statev.size()) != m.nstatv_user)
    throw ContractViolation("plugin '" + m.name + "' expects " + std::to_string(m.nstatv_user) +
                            " state variables, got " + std::to_string(call.statev.size()));

  UmatResult r;
  r.stress = call.stress;
  r.statev = call.statev;
  const double time[2] = {call.time, call.time};
  // Eigen matrices are column-major, which is the wire layout.
  const Tensor2 f0 = call.dfgrd0, f1 = call.dfgrd1, drot = call.drot;
  int32_t status = 0;
  handle.entry()(r.stress.c.data(), r.statev.data(), r.ddsdde.data(), call.stran.c.data(),
                 call.dstran.c.data(), time, call.dtime, call.props.data(),
                 static_cast<int32_t>(call.props.size()), static_cast<int32_t>(r.statev.size()),
                 f0.data(), f1.data(), drot.data(), 6, &status);
  if (status != 0)
    throw MaterialError("plugin '" + m.name + "' reported status " + std::to_string(status));
  bool finite = r.ddsdde.allFinite();
  for (double v : r.stress.c) finite = finite && std::isfinite(v);
  for (double v : r.statev) finite = finite && std::isfinite(v);
  if (!finite) throw MaterialError("plugin '" + m.name + "' returned non-finite output");
  return r;
}

PluginMaterial::PluginMaterial(std::shared_ptr<PluginHandle> handle) : handle_(std::move(handle)) {
  const PluginMetadata& m = handle_->metadata();
  info_.name = m.name;
  info_.nprops = m.nprops;
  info_.nstatv_user = m.nstatv_user;
  info_.regime = m.regime;
  info_.description = "plugin " + handle_->path();
}

UmatResult PluginMaterial::evaluate(const UmatCall& call) const { return call_plugin(*handle_, call); }

std::shared_ptr<const UmatMaterial> load_plugin_material(
    const std::string& name_or_path, const std::optional<PluginMetadata>& expected) {
  return std::make_shared<PluginMaterial>(load_plugin(resolve_plugin_path(name_or_path), expected));
}

}  // namespace constikit
