#pragma once

#include <functional>

#include "constikit/fe/mesh.hpp"

// Structured mesh generators. Every generator fills named node sets for the
// bounding faces/edges (xmin, xmax, ymin, ymax, zmin, zmax) plus "all".
namespace constikit::fe {

Mesh box_hex(const Eigen::Vector3d& size, int nx, int ny, int nz);

enum class TetSplit {
  Six,   // six tets per cell along the main diagonal
  Five,  // five tets per cell, alternating orientation between neighbours
};
Mesh box_tet(const Eigen::Vector3d& size, int nx, int ny, int nz, TetSplit split = TetSplit::Six);

// Rectangle [0, lx] x [0, ly] of tri3, tri6 or quad4 elements.
Mesh rectangle(double lx, double ly, int nx, int ny, ElementType type);

// Quarter of a plate [0, half_width] x [0, half_height] with a hole of the
// given radius centred at the origin. n_theta cells along the hole, n_r
// cells radially (graded towards the hole). tri3, tri6 or quad4; midside
// nodes of tri6 edges on the hole lie on the circle. Extra node set: "hole".
Mesh plate_with_hole(double half_width, double half_height, double radius, int n_theta, int n_r,
                     ElementType type);

// Bar of line2 elements on [0, length]. Sets "xmin", "xmax", "all".
Mesh bar(double length, int n);

// Adds midside nodes: tri3 -> tri6, tet4 -> tet10. `snap` may move a new
// node given the two corner ids it sits between.
using MidsideSnap = std::function<void(const Mesh&, int a, int b, Eigen::Vector3d& x)>;
Mesh to_quadratic(const Mesh& linear, MidsideSnap snap = nullptr);

// Fills xmin/xmax/... and "all" from the bounding box of the nodes.
void add_bounding_sets(Mesh& mesh, double tol = 1e-9);

}  // namespace constikit::fe
