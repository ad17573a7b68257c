#pragma once

// Gmsh MSH 4.1 ASCII import/export and a JSON dump for debugging.
//
// Physical groups: curves named left, right, bottom, top and pore_<k>;
// the solid surface is named solid. Triangles are type 2 (3-node) or 9
// (6-node), boundary segments type 1 or 8.

#include "thermohom/mesh.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <string_view>

namespace thermohom {

std::string export_msh(const Mesh& mesh);

/// Parses the subset above. Pores are recovered by a least-squares circle fit
/// through each pore_<k> group and periodic pairs by coordinate matching
/// within `pairing_tolerance` times the cell edge. Throws GeometryError on
/// malformed input and PeriodicityError on unmatched boundary nodes.
Mesh import_msh(std::string_view text, double pairing_tolerance = 1e-8);

nlohmann::json mesh_to_json(const Mesh& mesh);

}  // namespace thermohom
