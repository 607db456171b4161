#pragma once

// SVG rendering of model domains: unit circle, partition arcs, boundary
// pieces (geodesics, chords, basic arcs), shaded lenses, and an optional
// field heatmap with a legend. Output is byte-deterministic for fixed input.

#include <string>

#include "velling/checks.hpp"

namespace velling {

/// Render a star domain. When `partition` is given its arcs are drawn on the
/// unit circle and the lens of each arc is shaded. `field` adds a heatmap of
/// the ScalarField (regular part) over its interior cells plus a legend.
std::string render_svg(const StarDomain& d, const ArcPartition* partition = nullptr,
                       const ScalarField* field = nullptr);

/// Render an instance: Velling domain pieces, basic domain pieces, partition
/// arcs and shaded lenses in one image.
std::string render_svg(const VellingInstance& inst, const ScalarField* field = nullptr);

/// Throws std::runtime_error when the path is unwritable.
void write_svg(const std::string& svg, const std::string& path);

}  // namespace velling
