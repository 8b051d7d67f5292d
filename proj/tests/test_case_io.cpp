#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "constikit/errors.hpp"
#include "constikit/fe/case_io.hpp"
#include "constikit/fe/results.hpp"

using namespace constikit;
using namespace constikit::fe;
namespace fs = std::filesystem;

namespace {

const char* kBar = R"({
  "name": "bar",
  "analysis": "3d",
  "regime": "small",
  "mesh": {"generator": "box_hex", "size": [2, 1, 1], "cells": [2, 1, 1]},
  "materials": [{"tag": 0, "name": "linear_elastic", "props": [200e9, 0.3]}],
  "boundary": [
    {"type": "displacement", "set": "xmin", "component": "x", "value": 0},
    {"type": "displacement", "set": "ymin", "component": "y"},
    {"type": "displacement", "set": "zmin", "component": "z"},
    {"type": "displacement", "set": "xmax", "component": "x", "value": 1e-3}
  ],
  "stepping": {"type": "stationary", "increments": 3},
  "solver": {"norm": "comsol"},
  "output": {"force_set": "xmax", "force_component": "x", "displacement_set": "xmax",
             "displacement_component": "x", "fields": true, "reaction_sets": ["xmin"]}
})";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("constikit_case_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_case(text);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParseError";
  return ParseError("none");
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST(CaseIo, ParsesFullDefinition) {
  const CaseDefinition c = parse_case(kBar);
  EXPECT_EQ(c.name, "bar");
  EXPECT_EQ(c.analysis, Analysis::Solid);
  EXPECT_EQ(c.regime, Regime::SmallStrain);
  EXPECT_EQ(c.mesh.num_elements(), 2);
  EXPECT_EQ(c.displacements.size(), 4u);
  EXPECT_EQ(c.displacements[1].component, 1);
  EXPECT_EQ(c.displacements[1].value, 0.0);
  EXPECT_EQ(c.stepping.increments, 3);
  EXPECT_FALSE(c.stepping.transient);
  EXPECT_EQ(c.solver.norm, NormKind::ComsolStyle);
  EXPECT_EQ(c.solver.tolerance, 1e-3);
  EXPECT_EQ(c.solver.max_iterations, 25);
  EXPECT_TRUE(c.output.fields);
  EXPECT_EQ(c.output.reaction_sets, std::vector<std::string>{"xmin"});
}

TEST(CaseIo, SyntaxErrorReportsLineAndColumn) {
  const std::string broken = replace(kBar, "\"regime\": \"small\",", "\"regime\": \"small\"");
  const ParseError e = parse_failure(broken);
  EXPECT_EQ(e.line(), 5);
  EXPECT_GT(e.column(), 0);
  EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos);
}

TEST(CaseIo, SchemaErrorsNameTheKey) {
  const ParseError unknown = parse_failure(replace(kBar, "\"name\": \"bar\",", "\"name\": \"bar\", \"colour\": 1,"));
  EXPECT_NE(std::string(unknown.what()).find("colour"), std::string::npos);
  EXPECT_EQ(unknown.line(), 2);

  const ParseError type = parse_failure(replace(kBar, "\"increments\": 3", "\"increments\": \"three\""));
  EXPECT_NE(std::string(type.what()).find("stepping.increments"), std::string::npos);

  const ParseError mat = parse_failure(replace(kBar, "linear_elastic", "unobtainium"));
  EXPECT_NE(std::string(mat.what()).find("unobtainium"), std::string::npos);

  const ParseError props = parse_failure(replace(kBar, "[200e9, 0.3]", "[200e9]"));
  EXPECT_NE(std::string(props.what()).find("props"), std::string::npos);

  const ParseError set = parse_failure(replace(kBar, "\"set\": \"ymin\"", "\"set\": \"bottom\""));
  EXPECT_NE(std::string(set.what()).find("bottom"), std::string::npos);

  const ParseError missing = parse_failure(replace(kBar, "\"analysis\": \"3d\",", ""));
  EXPECT_NE(std::string(missing.what()).find("analysis"), std::string::npos);

  const ParseError comp = parse_failure(replace(kBar, "\"component\": \"z\"", "\"component\": \"w\""));
  EXPECT_NE(std::string(comp.what()).find("component"), std::string::npos);

  EXPECT_THROW(load_case("/nonexistent/case.json"), ParseError);
}

TEST(CaseIo, InlineMeshAndExtraNodeSets) {
  const std::string text = R"({
    "analysis": "plane_strain", "regime": "small",
    "mesh": {"dim": 2, "nodes": [[0,0],[1,0],[0,1]],
             "elements": [{"type": "tri3", "tag": 3, "nodes": [0,1,2]}],
             "node_sets": {"corner": [0]}},
    "node_sets": {"left": {"axis": "x", "value": 0}},
    "materials": [{"tag": 3, "name": "linear_elastic", "props": [1e9, 0.25]}],
    "boundary": [{"type": "displacement", "set": "corner", "component": "x"}]
  })";
  const CaseDefinition c = parse_case(text);
  EXPECT_EQ(c.mesh.dim, 2);
  EXPECT_EQ(c.mesh.elements[0].tag, 3);
  EXPECT_EQ(c.mesh.node_set("left"), (std::vector<int>{0, 2}));
  EXPECT_EQ(c.mesh.node_set("corner"), std::vector<int>{0});
}

TEST(CaseIo, SidecarMeshRelativeToCaseFile) {
  const fs::path dir = scratch("sidecar");
  {
    std::ofstream m(dir / "tri.txt");
    m << "# one triangle\nDIM 2\nNODES 3\n0 0\n1 0\n0 1\nELEMENTS 1\ntri3 0 0 1 2\nNODESET fixed 2\n0 1\n";
    std::ofstream c(dir / "case.json");
    c << R"({"analysis": "plane_stress", "regime": "small", "thickness": 0.01,
             "mesh": {"file": "tri.txt"},
             "materials": [{"name": "linear_elastic", "props": [1e9, 0.25]}]})";
  }
  const CaseDefinition c = load_case((dir / "case.json").string());
  EXPECT_EQ(c.analysis, Analysis::PlaneStress);
  EXPECT_EQ(c.thickness, 0.01);
  EXPECT_EQ(c.mesh.node_set("fixed"), (std::vector<int>{0, 1}));

  std::ofstream(dir / "tri.txt") << "DIM 2\nNODES 3\n0 0\n1 0\n";
  EXPECT_THROW(load_case((dir / "case.json").string()), ParseError);
}

TEST(CaseIo, RunCaseWritesDeterministicOutputs) {
  const CaseDefinition c = parse_case(kBar);
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const SolveResult ra = run_case(c, a.string());
  ASSERT_TRUE(ra.converged) << ra.failure;
  run_case(c, b.string());
  for (const char* f : {"trace.csv", "force-displacement.csv", "reactions.csv", "fields/increment_0003.txt"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_FALSE(fs::exists(a / "stress-strain.csv"));

  const std::string fd = slurp(a / "force-displacement.csv");
  EXPECT_EQ(fd.substr(0, fd.find('\n')), "increment,time,displacement,force");
  const auto curve = load_curve(c, ra.increments);
  ASSERT_EQ(curve.size(), 3u);
  // Uniaxial strain with lateral rollers on one side only: free contraction, so F = E A u / L.
  EXPECT_NEAR(curve.back().displacement, 1e-3, 1e-15);
  EXPECT_NEAR(curve.back().force, 200e9 * 1.0 * 1e-3 / 2.0, 1e-6 * 1e8);
  const std::string trace = slurp(a / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "increment,attempt,cut_level,time,dt,iteration,abaqus_norm,comsol_norm,converged");
}

TEST(CaseIo, BundledCasesParse) {
  for (const char* name : {"plate_with_hole.json", "twisted_cube.json", "polycrystal.json"}) {
    const CaseDefinition c = load_case((fs::path(CONSTIKIT_CASES_DIR) / name).string());
    EXPECT_GT(c.mesh.num_elements(), 0) << name;
  }
}
