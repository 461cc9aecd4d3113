#pragma once

#include <iosfwd>

#include "fraclap/mesh.hpp"

namespace fraclap {

/// Text format:
///   fracmesh 1 <n>
///   parameter <h>            (optional; defaults to the max element diameter)
///   vertices <count>         one coordinate line per vertex
///   elements <count>         one 0-based index line per element
///   boundary <count>         one flagged vertex index per line
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

}  // namespace fraclap
