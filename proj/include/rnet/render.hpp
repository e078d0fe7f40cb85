#pragma once

// Relative resistance change maps and their SVG rendering.

#include <string>
#include <vector>

#include "rnet/lattice.hpp"
#include "rnet/reconstruct.hpp"

namespace rnet {

/// Per-edge (R - R0) / R0, catalog order.
struct DeltaMap {
    LatticeSpec spec{1};
    std::vector<double> delta;

    double operator[](const EdgeId& e) const { return delta[spec.edge_index(e)]; }
    double max_abs() const;
};

DeltaMap compute_delta_map(const ReconstructionResult& baseline, const ReconstructionResult& deformed);
DeltaMap compute_delta_map(const LatticeSpec& spec, const std::vector<double>& r0, const std::vector<double>& r);

struct RenderStyle {
    double cell = 60.0;         // interior node spacing, px
    double margin = 40.0;
    double min_width = 1.0;
    double max_width = 8.0;
    double deadband = 0.005;    // |delta| below this draws neutral
    std::string neutral = "#9e9e9e";
};

/// Stroke color for a delta given the map's max |delta|.
std::string delta_color(double delta, double max_abs, const RenderStyle& style);
double delta_width(double delta, double max_abs, const RenderStyle& style);

/// SVG 1.1 document: one <line class="edge" data-edge="..."> per resistor,
/// followed by a legend.
std::string render_delta_map(const DeltaMap& map, const RenderStyle& style = {});

}  // namespace rnet
