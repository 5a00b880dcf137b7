#pragma once

#include <iosfwd>
#include <string>

#include "fvgrad/mesh/mesh.hpp"

namespace fvgrad {

/*
 * Plain-text interchange format:
 *
 *   fvgrad-mesh v1
 *   <n_nodes> <n_faces> <n_cells>
 *   x y                        (one line per node, 17 significant digits)
 *   a b owner neighbour        (interior face)
 *   a b owner B:<tag>          (boundary face)
 *   f0 f1 ... fk               (one line per cell, faces counter-clockwise)
 */
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

Mesh read_mesh_file(const std::string& path);

}  // namespace fvgrad
