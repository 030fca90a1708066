#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "pancad/drawing.hpp"

namespace pancad {

struct DxfParseResult {
  Drawing drawing;
  std::size_t skipped = 0;  // unsupported or degenerate entities
};

/// Reads LINE, CIRCLE, ARC and LWPOLYLINE from the ENTITIES section of an
/// ASCII DXF. Every record is labeled background. The catalog is left as
/// given so parsed drawings can be compared against labeled ones.
DxfParseResult parse_dxf_subset(std::string_view text, const std::string& id = "dxf",
                                const LabelCatalog& catalog = LabelCatalog::full());

/// Writes the entities of `d` as an ASCII DXF that `parse_dxf_subset` reads
/// back. Labels are not stored; the class name goes into the layer field.
std::string write_dxf(const Drawing& d);

}  // namespace pancad
