#pragma once

#include <string>

#include "constikit/fe/case.hpp"

// JSON case files. Schema (all lengths in m, stresses in Pa):
//
//   name        string
//   analysis    "3d" | "plane_strain" | "plane_stress"
//   regime      "small" | "finite"
//   thickness   number (2D only, default 1)
//   mesh        one of
//                 {"generator": "box_hex", "size": [x,y,z], "cells": [nx,ny,nz]}
//                 {"generator": "box_tet", "size", "cells", "split": "six"|"five",
//                  "quadratic": bool}
//                 {"generator": "rectangle", "size": [x,y], "cells": [nx,ny], "element"}
//                 {"generator": "plate_with_hole", "half_width", "half_height", "radius",
//                  "n_theta", "n_r", "element"}
//                 {"file": "mesh.txt"}   sidecar, relative to the case file
//                 {"dim", "nodes": [[x,y,(z)]...], "elements": [{"type","tag","nodes"}],
//                  "node_sets": {"name": [ids]}}
//               plus optional "tags": "per_element" (tag = element index)
//   node_sets   {"name": {"axis": "x"|"y"|"z", "value": v, "tol": t}}   extra sets
//   materials   [{"tag": 0, "name": builtin | "plugin": path-or-name,
//                 "props": [...], "initial_state": [...]}]
//   boundary    [{"type": "displacement", "set", "component": "x"|"y"|"z", "value"},
//                {"type": "rotation", "set", "axis": [..], "center": [..], "angle_deg"},
//                {"type": "traction", "set", "traction": [..]}]
//   stepping    {"type": "stationary"|"transient", "increments": N, "total_time": T}
//   solver      {"norm": "abaqus"|"comsol", "tolerance", "max_iterations", "max_cuts",
//                "linear_solver": "sparse_lu"|"dense_lu"}
//   output      {"force_set", "force_component", "displacement_set",
//                "displacement_component", "gauge_length", "area",
//                "stress_strain": bool, "fields": bool, "reaction_sets": [..]}
namespace constikit::fe {

// Throws ParseError with line/column for syntax errors and with the name of
// the offending key for schema errors. `base_dir` resolves relative paths.
CaseDefinition parse_case(const std::string& text, const std::string& base_dir = ".");
CaseDefinition load_case(const std::string& path);

}  // namespace constikit::fe
