#include "rnet/reconstruct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace rnet {

namespace {

constexpr std::array<const char*, 4> kFaceNames = {"north", "east", "south", "west"};

std::size_t idx(Face f) { return static_cast<std::size_t>(f); }

// Re-throw solver errors with the layer that raised them.
template <class F>
auto at_layer(int layer, F&& body) -> decltype(body()) {
    auto tag = [layer](const std::exception& e) { return fmt::format("layer {}: {}", layer, e.what()); };
    try {
        return body();
    } catch (const SingularBlock& e) {
        throw SingularBlock(tag(e));
    } catch (const DegenerateDelta& e) {
        throw DegenerateDelta(tag(e));
    } catch (const ZeroDivisor& e) {
        throw ZeroDivisor(tag(e));
    } catch (const ResidualTooLarge& e) {
        throw ResidualTooLarge(tag(e));
    } catch (const SingularMatrix& e) {
        throw SingularMatrix(tag(e));
    }
}

double max_diagonal(const DenseMatrix& m) {
    double d = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) d = std::max(d, std::abs(m(i, i)));
    return d;
}

}  // namespace

FaceBlocks face_blocks(const DenseMatrix& lambda) {
    if (!lambda.square() || lambda.rows() == 0 || lambda.rows() % 4 != 0)
        throw DimensionMismatch(fmt::format("face blocks need a 4k x 4k matrix, got {}x{}", lambda.rows(), lambda.cols()));
    FaceBlocks fb;
    const std::size_t k = lambda.rows() / 4;
    fb.k_ = static_cast<int>(k);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) fb.blocks_[r * 4 + c] = lambda.block(r * k, c * k, k, k);
    return fb;
}

DenseMatrix FaceBlocks::assemble() const {
    const auto k = static_cast<std::size_t>(k_);
    DenseMatrix m(4 * k, 4 * k);
    for (std::size_t br = 0; br < 4; ++br)
        for (std::size_t bc = 0; bc < 4; ++bc) {
            const DenseMatrix& b = blocks_[br * 4 + bc];
            for (std::size_t r = 0; r < k; ++r)
                for (std::size_t c = 0; c < k; ++c) m(br * k + r, bc * k + c) = b(r, c);
        }
    return m;
}

FaceTildeSet tilde_face_matrices(const FaceBlocks& b, BlockInversion route) {
    // Face f sees voltages on itself, zero voltage on the other faces except
    // `free`, whose voltages are chosen so `quiet` carries no current.
    struct Route {
        Face face, free, quiet;
    };
    constexpr std::array<Route, 4> routes = {{
        {Face::North, Face::East, Face::West},
        {Face::East, Face::North, Face::South},
        {Face::South, Face::West, Face::East},
        {Face::West, Face::South, Face::North},
    }};

    FaceTildeSet out;
    for (const auto& r : routes) {
        const DenseMatrix& coupling = b(r.quiet, r.free);
        try {
            const LuDecomposition lu(coupling);
            const DenseMatrix inverse = lu.solve(DenseMatrix::identity(coupling.rows()));
            out.block_condition[idx(r.face)] = coupling.norm_inf() * inverse.norm_inf();
            const DenseMatrix correction = route == BlockInversion::Solve
                                               ? b(r.face, r.free) * lu.solve(b(r.quiet, r.face))
                                               : b(r.face, r.free) * inverse * b(r.quiet, r.face);
            out.tilde[idx(r.face)] = b(r.face, r.face) - correction;
        } catch (const SingularMatrix& e) {
            throw SingularBlock(fmt::format("{} face: opposite block singular ({})", kFaceNames[idx(r.face)], e.what()));
        }
    }
    return out;
}

PeelExtraction extract_boundary_conductances(const FaceTildeSet& tilde) {
    const std::size_t k = tilde[Face::North].rows();
    PeelExtraction ex;
    ex.length = static_cast<int>(k);
    ex.spikes.resize(4 * k);

    auto note = [&ex](double g) {
        if (!(g > 0.0) || !std::isfinite(g)) ++ex.nonpositive;
    };

    for (std::size_t f = 0; f < 4; ++f) {
        const DenseMatrix& t = tilde.tilde[f];
        if (t.rows() != k || t.cols() != k) throw DimensionMismatch("tilde matrices differ in size");
        for (std::size_t j = 0; j < k; ++j) {
            ex.spikes[f * k + j] = t(j, j);
            note(t(j, j));
        }
        // Continuation runs west->east for N, south->north for E, east->west
        // for S and north->south for W, so the usable entry sits below the
        // diagonal on N/S and above it on E/W.
        const bool lower = (f == idx(Face::North) || f == idx(Face::South));
        for (std::size_t j = 0; j + 1 < k; ++j) {
            const double g1 = t(j, j);
            const double g2 = t(j + 1, j + 1);
            const double off = lower ? t(j + 1, j) : t(j, j + 1);
            if (!(std::abs(off) >= 1e-13 * std::abs(g1 * g2)))
                throw ZeroDivisor(fmt::format("{} face: off-diagonal {:.3g} at local {} too small", kFaceNames[f], off, j + 1));
            const double g = g1 * g2 / off;
            note(g);
            const int first = static_cast<int>(f * k + j + 1);
            ex.edges.push_back({first, first + 1, g});
        }
    }
    return ex;
}

namespace {

// Peeling noisy data keeps going through nonpositive estimates (they are
// reported, not clamped); only a vanishing or non-finite delta stops it.
DenseMatrix remove_spike(const DenseMatrix& lambda, int node, double gamma) {
    if (!lambda.square()) throw DimensionMismatch("spike removal: matrix not square");
    if (node < 1 || static_cast<std::size_t>(node) > lambda.rows())
        throw InvalidInput(fmt::format("spike removal: node {} out of range", node));
    if (!std::isfinite(gamma))
        throw DegenerateDelta(fmt::format("spike removal at node {}: conductance estimate {}", node, gamma));

    const auto i = static_cast<std::size_t>(node - 1);
    const std::size_t n = lambda.rows();
    const double diag = lambda(i, i);
    const double delta = diag - gamma;
    if (!(std::abs(delta) > 1e-13 * std::abs(diag)))
        throw DegenerateDelta(fmt::format("spike removal at node {}: delta {:.3g} vanishes", node, delta));

    DenseMatrix out(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        const double col = lambda(r, i) / delta;
        for (std::size_t c = 0; c < n; ++c) {
            if (c == i) continue;
            out(r, c) = lambda(r, c) - col * lambda(i, c);
        }
    }
    const double s = -gamma / delta;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        out(i, j) = s * lambda(i, j);
        out(j, i) = s * lambda(j, i);
    }
    out(i, i) = -gamma - gamma * gamma / delta;
    return out;
}

}  // namespace

DenseMatrix apply_spike_removal(const DenseMatrix& lambda, int node, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw InvalidConductance(fmt::format("spike removal: conductance {} must be positive", gamma));
    return remove_spike(lambda, node, gamma);
}

DenseMatrix apply_edge_removal(const DenseMatrix& lambda, int i, int j, double conductance) {
    if (!lambda.square()) throw DimensionMismatch("edge removal: matrix not square");
    const auto n = static_cast<int>(lambda.rows());
    if (i < 1 || j < 1 || i > n || j > n) throw InvalidInput(fmt::format("edge removal: nodes {},{} out of range", i, j));
    if (i == j) throw InvalidInput("edge removal: endpoints must differ");
    DenseMatrix out = lambda;
    const auto a = static_cast<std::size_t>(i - 1);
    const auto b = static_cast<std::size_t>(j - 1);
    out(a, a) -= conductance;
    out(b, b) -= conductance;
    out(a, b) += conductance;
    out(b, a) += conductance;
    return out;
}

PeelState PeelState::initial(const DenseMatrix& lambda) {
    ResponseMatrix checked(lambda);
    PeelState s;
    s.lambda = lambda;
    s.original_length = checked.length();
    s.length = s.original_length;
    s.index_map.resize(lambda.rows());
    for (std::size_t b = 0; b < lambda.rows(); ++b) s.index_map[b].boundary = static_cast<int>(b + 1);
    return s;
}

GridNode PeelState::anchor(int b) const {
    const GridNode local = LatticeSpec(length).anchor(b);
    return {local.row + layer, local.col + layer};
}

EdgeId edge_between(const PhysicalNode& from, const GridNode& to) {
    if (from.is_boundary()) return EdgeId::spike(from.boundary);
    const GridNode& a = from.node;
    if (a.row == to.row && std::abs(a.col - to.col) == 1) return EdgeId::horizontal(a.row, std::min(a.col, to.col));
    if (a.col == to.col && std::abs(a.row - to.row) == 1) return EdgeId::vertical(std::min(a.row, to.row), a.col);
    throw std::logic_error(fmt::format("nodes ({},{}) and ({},{}) are not adjacent", a.row, a.col, to.row, to.col));
}

PeelState peel_layer(const PeelState& state, const PeelExtraction& extraction, const PeelOptions& options) {
    const int k = state.length;
    const int n = 4 * k;
    if (k < 3) throw InvalidInput(fmt::format("peel needs length >= 3, got {}", k));
    if (extraction.length != k || extraction.spikes.size() != static_cast<std::size_t>(n))
        throw DimensionMismatch("extraction does not match the peel state");

    // Corner pairs share one interior node: (k,k+1), (2k,2k+1), (3k,3k+1), (4k,1).
    std::vector<int> representative(static_cast<std::size_t>(n) + 1);
    for (int b = 1; b <= n; ++b) representative[static_cast<std::size_t>(b)] = b;
    std::vector<bool> corner(static_cast<std::size_t>(n) + 1, false);
    struct CornerPair {
        int keep, other;
    };
    std::vector<CornerPair> corners;
    for (int f = 1; f <= 4; ++f) {
        const int a = f * k;
        const int b = a % n + 1;
        const int lo = std::min(a, b);
        const int hi = std::max(a, b);
        const CornerPair p = options.schedule.corner == CornerKeep::LowerIndex ? CornerPair{lo, hi} : CornerPair{hi, lo};
        representative[static_cast<std::size_t>(p.other)] = p.keep;
        corner[static_cast<std::size_t>(a)] = corner[static_cast<std::size_t>(b)] = true;
        corners.push_back(p);
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int b = 1; b <= n; ++b) order[static_cast<std::size_t>(b - 1)] = b;
    if (options.schedule.counter_clockwise) std::reverse(order.begin(), order.end());

    auto spike = [&](int b) { return extraction.spikes[static_cast<std::size_t>(b - 1)]; };

    // (1) spikes to interior nodes
    DenseMatrix m = state.lambda;
    for (int b : order) {
        if (representative[static_cast<std::size_t>(b)] != b) continue;
        m = remove_spike(m, b, spike(b));
    }
    // (2) the second spike at each corner now joins two boundary nodes
    if (options.schedule.counter_clockwise) std::reverse(corners.begin(), corners.end());
    for (const auto& p : corners) m = apply_edge_removal(m, p.keep, p.other, spike(p.other));
    // (3) ring edges between the exposed anchors
    auto edges = extraction.edges;
    if (options.schedule.counter_clockwise) std::reverse(edges.begin(), edges.end());
    for (const auto& e : edges)
        m = apply_edge_removal(m, representative[static_cast<std::size_t>(e.first)],
                               representative[static_cast<std::size_t>(e.second)], e.conductance);

    // Structural compaction: the eight corner indices are now isolated.
    const double scale = max_diagonal(state.lambda);
    double residual = 0.0;
    int worst = 0;
    std::vector<std::size_t> keep;
    for (int b = 1; b <= n; ++b) {
        const auto i = static_cast<std::size_t>(b - 1);
        if (!corner[static_cast<std::size_t>(b)]) {
            keep.push_back(i);
            continue;
        }
        for (std::size_t j = 0; j < m.rows(); ++j) {
            const double v = std::max(std::abs(m(i, j)), std::abs(m(j, i)));
            if (v > residual || std::isnan(v)) {
                residual = v;
                worst = b;
            }
        }
    }
    if (options.fail_on_residual && !(residual <= options.residual_tolerance * scale))
        throw ResidualTooLarge(fmt::format("isolated index {} keeps entry {:.3g} (scale {:.3g})", worst, residual, scale));

    PeelState next;
    next.lambda = symmetrize_average(m.select(keep, keep));
    next.original_length = state.original_length;
    next.length = k - 2;
    next.layer = state.layer + 1;
    next.index_map.reserve(keep.size());
    for (std::size_t i : keep) next.index_map.push_back({0, state.anchor(static_cast<int>(i) + 1)});
    next.diagnostics = state.diagnostics;
    LayerDiagnostics d;
    d.layer = state.layer;
    d.length = k;
    d.residual_max = residual;
    d.asymmetry = asymmetry(state.lambda);
    d.nonpositive = extraction.nonpositive;
    next.diagnostics.push_back(d);
    return next;
}

std::vector<double> ReconstructionResult::resistances() const {
    std::vector<double> r(conductances.size());
    std::transform(conductances.begin(), conductances.end(), r.begin(), [](double g) { return 1.0 / g; });
    return r;
}

ConductanceMap ReconstructionResult::to_conductance_map() const { return ConductanceMap(spec, conductances); }

ReconstructionResult reconstruct_full(const ResponseMatrix& lambda, const ReconstructOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const int k = lambda.length();

    ReconstructionResult result;
    result.spec = LatticeSpec(k);
    result.conductances.assign(static_cast<std::size_t>(result.spec.edge_count()),
                               std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> assigned(result.conductances.size(), false);
    auto assign = [&](const EdgeId& e, double g) {
        const std::size_t i = result.spec.edge_index(e);
        if (assigned[i]) throw std::logic_error("edge " + e.to_string() + " attributed twice");
        assigned[i] = true;
        result.conductances[i] = g;
    };

    const DenseMatrix& m = lambda.matrix();
    const double scale = m.max_abs();
    if (scale > 0.0 && asymmetry(m) / scale > options.asymmetry_warning)
        result.report.warnings.push_back(
            fmt::format("input asymmetry {:.3g} exceeds {:.0e}; symmetrize before reconstructing",
                        asymmetry(m) / scale, options.asymmetry_warning));

    PeelState state = PeelState::initial(m);
    for (;;) {
        const int layer = state.layer;
        const FaceTildeSet tilde = at_layer(layer, [&] { return tilde_face_matrices(face_blocks(state.lambda), options.inversion); });
        const PeelExtraction ex = at_layer(layer, [&] { return extract_boundary_conductances(tilde); });

        for (int b = 1; b <= 4 * state.length; ++b)
            assign(edge_between(state.index_map[static_cast<std::size_t>(b - 1)], state.anchor(b)),
                   ex.spikes[static_cast<std::size_t>(b - 1)]);
        for (const auto& e : ex.edges) assign(edge_between({0, state.anchor(e.first)}, state.anchor(e.second)), e.conductance);
        if (ex.nonpositive > 0)
            result.report.warnings.push_back(fmt::format("layer {}: {} nonpositive conductance estimates", layer, ex.nonpositive));

        if (state.length <= 2) {
            LayerDiagnostics d;
            d.layer = layer;
            d.length = state.length;
            d.condition = tilde.block_condition;
            d.asymmetry = asymmetry(state.lambda);
            d.nonpositive = ex.nonpositive;
            state.diagnostics.push_back(d);
            break;
        }
        state = at_layer(layer, [&] { return peel_layer(state, ex, options.peel); });
        auto& d = state.diagnostics.back();
        d.condition = tilde.block_condition;
        const double tol = options.peel.residual_tolerance * max_diagonal(m);
        if (!(d.residual_max <= tol))
            result.report.warnings.push_back(
                fmt::format("layer {}: isolated rows keep residual {:.3g}", layer, d.residual_max));
    }

    result.report.layers = std::move(state.diagnostics);
    if (std::find(assigned.begin(), assigned.end(), false) != assigned.end())
        throw std::logic_error("reconstruction left edges unassigned");
    result.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace rnet
