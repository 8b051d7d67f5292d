#include "constikit/fe/case_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <set>
#include <sstream>

#include "constikit/errors.hpp"
#include "constikit/fe/generators.hpp"
#include "constikit/plugin.hpp"
#include "constikit/registry.hpp"

namespace constikit::fe {

using nlohmann::json;

const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::PlaneStress: return "plane_stress";
    case Analysis::PlaneStrain: return "plane_strain";
    case Analysis::Solid: return "3d";
  }
  return "?";
}

Analysis analysis_from_string(const std::string& s) {
  if (s == "plane_stress") return Analysis::PlaneStress;
  if (s == "plane_strain") return Analysis::PlaneStrain;
  if (s == "3d") return Analysis::Solid;
  throw ContractViolation("unknown analysis '" + s + "' (expected 3d, plane_strain, plane_stress)");
}

const MaterialAssignment& CaseDefinition::material_for(int tag) const {
  for (const auto& m : materials)
    if (m.tag == tag) return m;
  throw ContractViolation("no material assigned to element tag " + std::to_string(tag));
}

void CaseDefinition::validate() const {
  mesh.validate();
  const int expected_dim = analysis == Analysis::Solid ? 3 : 2;
  if (mesh.dim != expected_dim)
    throw ContractViolation(std::string("analysis ") + fe::to_string(analysis) + " needs a " +
                            std::to_string(expected_dim) + "D mesh");
  if (analysis == Analysis::PlaneStress && regime == Regime::FiniteStrain)
    throw ContractViolation("plane stress is available for small strain only");
  if (stepping.increments < 1) throw ContractViolation("stepping needs at least one increment");
  if (!(stepping.total_time > 0)) throw ContractViolation("stepping total_time must be positive");
  if (!(solver.tolerance > 0)) throw ContractViolation("solver tolerance must be positive");
  if (solver.max_iterations < 1) throw ContractViolation("solver max_iterations must be >= 1");
  if (!(thickness > 0)) throw ContractViolation("thickness must be positive");
  std::set<int> tags;
  for (const auto& m : materials) {
    if (!m.material) throw ContractViolation("material for tag " + std::to_string(m.tag) + " is not set");
    const MaterialInfo& info = m.material->info();
    if (info.regime != regime)
      throw ContractViolation("material '" + info.name + "' is " + constikit::to_string(info.regime) +
                              "-strain but the case is " + constikit::to_string(regime) + "-strain");
    if (static_cast<int>(m.props.size()) != info.nprops)
      throw ContractViolation("material '" + info.name + "' needs " + std::to_string(info.nprops) +
                              " props, got " + std::to_string(m.props.size()));
    if (!m.initial_state.empty() && static_cast<int>(m.initial_state.size()) != info.nstatv_user)
      throw ContractViolation("material '" + info.name + "' initial_state needs " +
                              std::to_string(info.nstatv_user) + " values");
    if (!tags.insert(m.tag).second)
      throw ContractViolation("element tag " + std::to_string(m.tag) + " has two materials");
  }
  for (const auto& e : mesh.elements) material_for(e.tag);
  for (const auto& bc : displacements) {
    mesh.node_set(bc.set);
    if (bc.component < 0 || bc.component >= mesh.dim)
      throw ContractViolation("displacement component out of range for set '" + bc.set + "'");
  }
  for (const auto& bc : rotations) mesh.node_set(bc.set);
  for (const auto& bc : tractions) mesh.node_set(bc.set);
  for (const auto& s : output.reaction_sets) mesh.node_set(s);
  if (!output.force_set.empty()) mesh.node_set(output.force_set);
  if (!output.displacement_set.empty()) mesh.node_set(output.displacement_set);
}

namespace {

// Line and column (1-based) of a byte offset.
std::pair<int, int> locate_offset(const std::string& text, std::size_t offset) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  Reader(const std::string& text, std::string base) : text_(text), base_(std::move(base)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string leaf = key.substr(key.find_last_of('.') + 1);
    const std::string bare = leaf.substr(0, leaf.find('['));
    const auto pos = text_.find("\"" + bare + "\"");
    if (pos != std::string::npos) {
      const auto [l, c] = locate_offset(text_, pos);
      throw ParseError("case key '" + key + "': " + what, l, c);
    }
    throw ParseError("case key '" + key + "': " + what);
  }

  const json& need(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing");
    return *it;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }
  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }
  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }
  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }
  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }
  Eigen::Vector3d vec3(const json& v, const std::string& path, int min_len = 2) const {
    const auto x = numbers(v, path);
    if (static_cast<int>(x.size()) < min_len || x.size() > 3)
      fail(path, "expected " + std::to_string(min_len) + " to 3 components");
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < x.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[i];
    return out;
  }
  int component(const json& v, const std::string& path) const {
    if (v.is_number_integer()) {
      const int c = v.get<int>();
      if (c < 0 || c > 2) fail(path, "component must be 0, 1 or 2");
      return c;
    }
    const std::string s = string(v, path);
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
    fail(path, "expected x, y or z");
  }

  template <class F>
  decltype(auto) wrap(const std::string& path, F&& f) const {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& ex) {
      fail(path, ex.what());
    }
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [k, _] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) fail(join(path, k), "unknown key");
    }
  }

  Mesh mesh(const json& m) const {
    const std::string p = "mesh";
    Mesh out;
    if (m.contains("generator")) {
      const std::string g = string(m["generator"], "mesh.generator");
      auto element = [&](ElementType def) {
        if (!m.contains("element")) return def;
        return wrap("mesh.element",
                    [&] { return element_type_from_string(string(m["element"], "mesh.element")); });
      };
      auto cells = [&](int n) {
        const auto c = numbers(need(m, "cells", p), "mesh.cells");
        if (static_cast<int>(c.size()) != n) fail("mesh.cells", "expected " + std::to_string(n) + " counts");
        std::vector<int> out;
        for (double v : c) out.push_back(static_cast<int>(v));
        return out;
      };
      out = wrap(p, [&]() -> Mesh {
        if (g == "box_hex") {
          check_keys(m, p, {"generator", "size", "cells", "tags"});
          const auto c = cells(3);
          return box_hex(vec3(need(m, "size", p), "mesh.size", 3), c[0], c[1], c[2]);
        }
        if (g == "box_tet") {
          check_keys(m, p, {"generator", "size", "cells", "split", "quadratic", "tags"});
          const auto c = cells(3);
          TetSplit split = TetSplit::Six;
          if (m.contains("split")) {
            const std::string s = string(m["split"], "mesh.split");
            if (s == "five") split = TetSplit::Five;
            else if (s != "six") fail("mesh.split", "expected six or five");
          }
          Mesh r = box_tet(vec3(need(m, "size", p), "mesh.size", 3), c[0], c[1], c[2], split);
          if (m.contains("quadratic") && boolean(m["quadratic"], "mesh.quadratic")) r = to_quadratic(r);
          return r;
        }
        if (g == "rectangle") {
          check_keys(m, p, {"generator", "size", "cells", "element", "tags"});
          const auto c = cells(2);
          const auto s = vec3(need(m, "size", p), "mesh.size");
          return rectangle(s.x(), s.y(), c[0], c[1], element(ElementType::Quad4));
        }
        if (g == "plate_with_hole") {
          check_keys(m, p, {"generator", "half_width", "half_height", "radius", "n_theta", "n_r",
                            "element", "tags"});
          return plate_with_hole(number(need(m, "half_width", p), "mesh.half_width"),
                                 number(need(m, "half_height", p), "mesh.half_height"),
                                 number(need(m, "radius", p), "mesh.radius"),
                                 integer(need(m, "n_theta", p), "mesh.n_theta"),
                                 integer(need(m, "n_r", p), "mesh.n_r"), element(ElementType::Tri6));
        }
        fail("mesh.generator", "unknown generator '" + g + "'");
      });
    } else if (m.contains("file")) {
      check_keys(m, p, {"file", "tags"});
      const std::string f = string(m["file"], "mesh.file");
      const std::filesystem::path path = std::filesystem::path(base_) / f;
      try {
        out = read_mesh_text(path.string());
      } catch (const ParseError& ex) {
        throw ParseError("mesh file '" + path.string() + "': " + ex.what());
      }
    } else {
      check_keys(m, p, {"dim", "nodes", "elements", "node_sets", "tags"});
      out.dim = integer(need(m, "dim", p), "mesh.dim");
      const json& nodes = need(m, "nodes", p);
      if (!nodes.is_array()) fail("mesh.nodes", "expected an array");
      for (std::size_t i = 0; i < nodes.size(); ++i)
        out.nodes.push_back(vec3(nodes[i], "mesh.nodes[" + std::to_string(i) + "]", out.dim));
      const json& elems = need(m, "elements", p);
      if (!elems.is_array()) fail("mesh.elements", "expected an array");
      for (std::size_t i = 0; i < elems.size(); ++i) {
        const std::string ep = "mesh.elements[" + std::to_string(i) + "]";
        Element e;
        e.type = wrap(ep + ".type",
                      [&] { return element_type_from_string(string(need(elems[i], "type", ep), ep + ".type")); });
        e.tag = elems[i].contains("tag") ? integer(elems[i]["tag"], ep + ".tag") : 0;
        for (double v : numbers(need(elems[i], "nodes", ep), ep + ".nodes")) e.nodes.push_back(static_cast<int>(v));
        out.elements.push_back(std::move(e));
      }
      if (m.contains("node_sets")) {
        const json& sets = m["node_sets"];
        if (!sets.is_object()) fail("mesh.node_sets", "expected an object");
        for (const auto& [name, ids] : sets.items())
          for (double v : numbers(ids, "mesh.node_sets." + name))
            out.node_sets[name].push_back(static_cast<int>(v));
      }
      add_bounding_sets(out);
    }
    if (m.contains("tags")) {
      if (string(m["tags"], "mesh.tags") != "per_element") fail("mesh.tags", "expected per_element");
      for (int i = 0; i < out.num_elements(); ++i) out.elements[static_cast<std::size_t>(i)].tag = i;
    }
    return out;
  }

  CaseDefinition parse() const {
    json root;
    try {
      root = json::parse(text_);
    } catch (const json::parse_error& ex) {
      const auto [l, c] = locate_offset(text_, ex.byte > 0 ? ex.byte - 1 : 0);
      std::string msg = ex.what();
      throw ParseError("malformed case file: " + msg, l, c);
    }
    check_keys(root, "", {"name", "analysis", "regime", "thickness", "mesh", "node_sets",
                          "materials", "boundary", "stepping", "solver", "output", "description"});
    CaseDefinition c;
    if (root.contains("name")) c.name = string(root["name"], "name");
    c.analysis = wrap("analysis", [&] { return analysis_from_string(string(need(root, "analysis", ""), "analysis")); });
    c.regime = wrap("regime", [&] { return regime_from_string(string(need(root, "regime", ""), "regime")); });
    if (root.contains("thickness")) c.thickness = number(root["thickness"], "thickness");
    c.mesh = mesh(need(root, "mesh", ""));

    if (root.contains("node_sets")) {
      const json& sets = root["node_sets"];
      if (!sets.is_object()) fail("node_sets", "expected an object");
      for (const auto& [name, def] : sets.items()) {
        const std::string p = "node_sets." + name;
        check_keys(def, p, {"axis", "value", "tol"});
        const int axis = component(need(def, "axis", p), p + ".axis");
        const double tol = def.contains("tol") ? number(def["tol"], p + ".tol") : 1e-9;
        c.mesh.node_sets[name] = c.mesh.select_nodes(axis, number(need(def, "value", p), p + ".value"), tol);
        if (c.mesh.node_sets[name].empty()) fail(p, "selects no nodes");
      }
    }

    const json& mats = need(root, "materials", "");
    if (!mats.is_array() || mats.empty()) fail("materials", "expected a non-empty array");
    for (std::size_t i = 0; i < mats.size(); ++i) {
      const std::string p = "materials[" + std::to_string(i) + "]";
      const json& m = mats[i];
      check_keys(m, p, {"tag", "name", "plugin", "props", "initial_state"});
      MaterialAssignment a;
      a.tag = m.contains("tag") ? integer(m["tag"], p + ".tag") : 0;
      if (m.contains("name") == m.contains("plugin")) fail(p, "give exactly one of name or plugin");
      if (m.contains("name")) {
        const UmatMaterial& builtin =
            wrap(p + ".name", [&]() -> const UmatMaterial& { return builtin_material(string(m["name"], p + ".name")); });
        a.material = std::shared_ptr<const UmatMaterial>(&builtin, [](const UmatMaterial*) {});
      } else {
        std::string path = string(m["plugin"], p + ".plugin");
        if (path.find('/') != std::string::npos && std::filesystem::path(path).is_relative())
          path = (std::filesystem::path(base_) / path).string();
        a.material = wrap(p + ".plugin", [&] { return load_plugin_material(path); });
      }
      a.props = numbers(need(m, "props", p), p + ".props");
      if (m.contains("initial_state")) a.initial_state = numbers(m["initial_state"], p + ".initial_state");
      c.materials.push_back(std::move(a));
    }

    if (root.contains("boundary")) {
      const json& bcs = root["boundary"];
      if (!bcs.is_array()) fail("boundary", "expected an array");
      for (std::size_t i = 0; i < bcs.size(); ++i) {
        const std::string p = "boundary[" + std::to_string(i) + "]";
        const json& b = bcs[i];
        const std::string type = string(need(b, "type", p), p + ".type");
        const std::string set = string(need(b, "set", p), p + ".set");
        if (type == "displacement") {
          check_keys(b, p, {"type", "set", "component", "value"});
          c.displacements.push_back({set, component(need(b, "component", p), p + ".component"),
                                     b.contains("value") ? number(b["value"], p + ".value") : 0.0});
        } else if (type == "rotation") {
          check_keys(b, p, {"type", "set", "axis", "center", "angle_deg"});
          RotationBC r;
          r.set = set;
          r.axis = vec3(need(b, "axis", p), p + ".axis", 3);
          if (r.axis.norm() == 0.0) fail(p + ".axis", "axis must be non-zero");
          r.center = vec3(need(b, "center", p), p + ".center");
          r.angle = number(need(b, "angle_deg", p), p + ".angle_deg") * std::numbers::pi / 180.0;
          c.rotations.push_back(r);
        } else if (type == "traction") {
          check_keys(b, p, {"type", "set", "traction"});
          c.tractions.push_back({set, vec3(need(b, "traction", p), p + ".traction")});
        } else {
          fail(p + ".type", "unknown boundary type '" + type + "'");
        }
      }
    }

    if (root.contains("stepping")) {
      const json& s = root["stepping"];
      check_keys(s, "stepping", {"type", "increments", "total_time"});
      if (s.contains("type")) {
        const std::string t = string(s["type"], "stepping.type");
        if (t == "transient") c.stepping.transient = true;
        else if (t != "stationary") fail("stepping.type", "expected stationary or transient");
      }
      if (s.contains("increments")) c.stepping.increments = integer(s["increments"], "stepping.increments");
      if (s.contains("total_time")) c.stepping.total_time = number(s["total_time"], "stepping.total_time");
    }

    if (root.contains("solver")) {
      const json& s = root["solver"];
      check_keys(s, "solver", {"norm", "tolerance", "max_iterations", "max_cuts", "linear_solver"});
      if (s.contains("norm")) {
        c.solver.norm = wrap("solver.norm", [&] { return norm_kind_from_string(string(s["norm"], "solver.norm")); });
        c.solver.tolerance = default_tolerance(c.solver.norm);
      }
      if (s.contains("tolerance")) c.solver.tolerance = number(s["tolerance"], "solver.tolerance");
      if (s.contains("max_iterations")) c.solver.max_iterations = integer(s["max_iterations"], "solver.max_iterations");
      if (s.contains("max_cuts")) c.solver.max_cuts = integer(s["max_cuts"], "solver.max_cuts");
      if (s.contains("linear_solver")) {
        c.solver.linear_solver = string(s["linear_solver"], "solver.linear_solver");
        if (c.solver.linear_solver != "sparse_lu" && c.solver.linear_solver != "dense_lu")
          fail("solver.linear_solver", "expected sparse_lu or dense_lu");
      }
    }

    if (root.contains("output")) {
      const json& o = root["output"];
      check_keys(o, "output", {"force_set", "force_component", "displacement_set", "displacement_component",
                               "gauge_length", "area", "stress_strain", "fields", "reaction_sets"});
      auto& out = c.output;
      if (o.contains("force_set")) out.force_set = string(o["force_set"], "output.force_set");
      if (o.contains("force_component")) out.force_component = component(o["force_component"], "output.force_component");
      if (o.contains("displacement_set")) out.displacement_set = string(o["displacement_set"], "output.displacement_set");
      if (o.contains("displacement_component"))
        out.displacement_component = component(o["displacement_component"], "output.displacement_component");
      if (o.contains("gauge_length")) out.gauge_length = number(o["gauge_length"], "output.gauge_length");
      if (o.contains("area")) out.area = number(o["area"], "output.area");
      if (o.contains("stress_strain")) out.stress_strain = boolean(o["stress_strain"], "output.stress_strain");
      if (o.contains("fields")) out.fields = boolean(o["fields"], "output.fields");
      if (o.contains("reaction_sets")) {
        const json& r = o["reaction_sets"];
        if (!r.is_array()) fail("output.reaction_sets", "expected an array of set names");
        for (std::size_t i = 0; i < r.size(); ++i)
          out.reaction_sets.push_back(string(r[i], "output.reaction_sets[" + std::to_string(i) + "]"));
      }
    }

    try {
      c.validate();
    } catch (const ContractViolation& ex) {
      throw ParseError(std::string("invalid case: ") + ex.what());
    }
    return c;
  }

 private:
  const std::string& text_;
  std::string base_;
};

}  // namespace

CaseDefinition parse_case(const std::string& text, const std::string& base_dir) {
  return Reader(text, base_dir).parse();
}

CaseDefinition load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open case file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_case(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace constikit::fe
