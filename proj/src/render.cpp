#include "rnet/render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace rnet {

double DeltaMap::max_abs() const {
    double m = 0.0;
    for (double d : delta) m = std::max(m, std::abs(d));
    return m;
}

DeltaMap compute_delta_map(const LatticeSpec& spec, const std::vector<double>& r0, const std::vector<double>& r) {
    const auto n = static_cast<std::size_t>(spec.edge_count());
    if (r0.size() != n || r.size() != n) throw SpecMismatch("resistance lists do not match the lattice");
    DeltaMap map{spec, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        if (!(r0[i] > 0.0) || !std::isfinite(r0[i]))
            throw InvalidInput(fmt::format("baseline resistance of {} is {}", spec.edges()[i].to_string(), r0[i]));
        map.delta[i] = (r[i] - r0[i]) / r0[i];
        if (!std::isfinite(map.delta[i]))
            throw InvalidInput(fmt::format("resistance change of {} is not finite", spec.edges()[i].to_string()));
    }
    return map;
}

DeltaMap compute_delta_map(const ReconstructionResult& baseline, const ReconstructionResult& deformed) {
    if (!(baseline.spec == deformed.spec))
        throw SpecMismatch(fmt::format("baseline length {} vs deformed length {}", baseline.spec.length(),
                                       deformed.spec.length()));
    return compute_delta_map(baseline.spec, baseline.resistances(), deformed.resistances());
}

std::string delta_color(double delta, double max_abs, const RenderStyle& style) {
    if (!(std::abs(delta) >= style.deadband) || max_abs <= 0.0) return style.neutral;
    const double t = std::clamp(std::abs(delta) / max_abs, 0.0, 1.0);
    const int pale = static_cast<int>(std::lround(200.0 * (1.0 - t)));
    return delta > 0.0 ? fmt::format("#ff{:02x}{:02x}", pale, pale) : fmt::format("#{:02x}{:02x}ff", pale, pale);
}

double delta_width(double delta, double max_abs, const RenderStyle& style) {
    if (max_abs <= 0.0) return style.min_width;
    const double t = std::clamp(std::abs(delta) / max_abs, 0.0, 1.0);
    return style.min_width + t * (style.max_width - style.min_width);
}

namespace {

struct Point {
    double x, y;
};

Point grid_point(const GridNode& n, const RenderStyle& s) {
    return {s.margin + s.cell * n.col, s.margin + s.cell * n.row};
}

Point boundary_point(const LatticeSpec& spec, int b, const RenderStyle& s) {
    const Point a = grid_point(spec.anchor(b), s);
    switch (spec.face_of(b)) {
        case Face::North: return {a.x, a.y - s.cell};
        case Face::East: return {a.x + s.cell, a.y};
        case Face::South: return {a.x, a.y + s.cell};
        case Face::West: return {a.x - s.cell, a.y};
    }
    return a;
}

}  // namespace

std::string render_delta_map(const DeltaMap& map, const RenderStyle& style) {
    const LatticeSpec& spec = map.spec;
    const int k = spec.length();
    const double extent = 2.0 * style.margin + style.cell * (k + 1);
    const double legend_h = 70.0;
    const double max_abs = map.max_abs();

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
        "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n",
        extent, extent + legend_h);
    svg += fmt::format("<title>relative resistance change, lattice length {}</title>\n", k);
    svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg += "<g id=\"edges\" stroke-linecap=\"round\">\n";

    for (std::size_t i = 0; i < spec.edges().size(); ++i) {
        const EdgeId& e = spec.edges()[i];
        Point p, q;
        switch (e.role) {
            case EdgeRole::Spike:
                p = boundary_point(spec, e.a, style);
                q = grid_point(spec.anchor(e.a), style);
                break;
            case EdgeRole::Horizontal:
                p = grid_point({e.a, e.b}, style);
                q = grid_point({e.a, e.b + 1}, style);
                break;
            case EdgeRole::Vertical:
                p = grid_point({e.a, e.b}, style);
                q = grid_point({e.a + 1, e.b}, style);
                break;
        }
        const double d = map.delta[i];
        svg += fmt::format(
            "<line class=\"edge\" data-edge=\"{}\" data-delta=\"{:.6g}\" x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" "
            "y2=\"{:.1f}\" stroke=\"{}\" stroke-width=\"{:.3f}\"/>\n",
            e.to_string(), d, p.x, p.y, q.x, q.y, delta_color(d, max_abs, style), delta_width(d, max_abs, style));
    }
    svg += "</g>\n";

    // legend: negative ramp, neutral, positive ramp
    const double y = extent + 10.0;
    svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
    constexpr int steps = 5;
    for (int i = -steps; i <= steps; ++i) {
        const double d = max_abs * i / steps;
        svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"16\" height=\"16\" fill=\"{}\"/>\n",
                           style.margin + 18.0 * (i + steps), y, delta_color(d, max_abs, style));
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">-{:.3g}%</text>\n", style.margin, y + 32.0, 100.0 * max_abs);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">+{:.3g}%</text>\n", style.margin + 18.0 * 2 * steps, y + 32.0,
                       100.0 * max_abs);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">max |dR/R0| = {:.4g}</text>\n", style.margin, y + 50.0, max_abs);
    svg += "</g>\n</svg>\n";
    return svg;
}

}  // namespace rnet
