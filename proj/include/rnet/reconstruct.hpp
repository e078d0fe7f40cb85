#pragma once

// Layer-peeling inverse solver. Each layer:
//   1. special-function matrices per face give the outer spike and ring-edge
//      conductances,
//   2. spike / edge removal transforms strip those resistors from Lambda,
//   3. the eight corner indices that become isolated are deleted, leaving the
//      response matrix of the lattice two sizes smaller.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rnet/lattice.hpp"
#include "rnet/matrix.hpp"

namespace rnet {

/// The 16 face-pair blocks of a 4k x 4k response matrix.
class FaceBlocks {
public:
    int length() const { return k_; }
    const DenseMatrix& operator()(Face rows, Face cols) const {
        return blocks_[static_cast<std::size_t>(rows) * 4 + static_cast<std::size_t>(cols)];
    }
    DenseMatrix assemble() const;

private:
    friend FaceBlocks face_blocks(const DenseMatrix& lambda);
    int k_ = 0;
    std::array<DenseMatrix, 16> blocks_;
};

FaceBlocks face_blocks(const DenseMatrix& lambda);

struct FaceTildeSet {
    std::array<DenseMatrix, 4> tilde;  // indexed by Face
    /// Condition estimates of the inverted opposite-face blocks
    /// (W->E, S->N, E->W, N->S for faces N, E, S, W).
    std::array<double, 4> block_condition{};

    const DenseMatrix& operator[](Face f) const { return tilde[static_cast<std::size_t>(f)]; }
};

/// How the opposite-face block enters the special-function matrices.
/// Solve applies its LU factors to the right-hand block (backward stable);
/// ExplicitInverse forms the inverse first and multiplies.
enum class BlockInversion { Solve, ExplicitInverse };

FaceTildeSet tilde_face_matrices(const FaceBlocks& blocks, BlockInversion route = BlockInversion::Solve);

struct BoundaryEdgeEstimate {
    int first = 0;   // current boundary index (1-based)
    int second = 0;  // next index clockwise on the same face
    double conductance = 0.0;
};

struct PeelExtraction {
    int length = 0;
    std::vector<double> spikes;  // by current boundary index - 1
    std::vector<BoundaryEdgeEstimate> edges;
    int nonpositive = 0;  // estimates <= 0 or non-finite; reported, never clamped
};

PeelExtraction extract_boundary_conductances(const FaceTildeSet& tilde);

/// Remove the spike hanging off boundary `node` (1-based); the index then
/// names the interior node the spike was attached to.
DenseMatrix apply_spike_removal(const DenseMatrix& lambda, int node, double gamma);

/// Remove a resistor joining boundary nodes i and j (1-based).
DenseMatrix apply_edge_removal(const DenseMatrix& lambda, int i, int j, double conductance);

/// Physical lattice node named by a current boundary index.
struct PhysicalNode {
    int boundary = 0;  // original boundary index when > 0
    GridNode node;     // interior node otherwise

    bool is_boundary() const { return boundary > 0; }
    friend bool operator==(const PhysicalNode&, const PhysicalNode&) = default;
};

struct LayerDiagnostics {
    int layer = 0;
    int length = 0;
    std::array<double, 4> condition{};
    double residual_max = 0.0;  // largest entry left on the deleted rows
    double asymmetry = 0.0;
    int nonpositive = 0;
};

struct PeelState {
    DenseMatrix lambda;
    int original_length = 0;
    int length = 0;
    int layer = 0;
    std::vector<PhysicalNode> index_map;  // current boundary index - 1 -> physical node
    std::vector<LayerDiagnostics> diagnostics;

    static PeelState initial(const DenseMatrix& lambda);
    /// Physical interior node under current boundary index b.
    GridNode anchor(int b) const;
};

enum class CornerKeep { LowerIndex, HigherIndex };

/// Order of resistor removals within one layer. Any valid schedule leaves the
/// same compacted matrix; the alternatives exist for checking that.
struct PeelSchedule {
    CornerKeep corner = CornerKeep::LowerIndex;
    bool counter_clockwise = false;
};

struct PeelOptions {
    PeelSchedule schedule;
    double residual_tolerance = 1e-8;  // relative to the largest diagonal entry
    bool fail_on_residual = false;
};

PeelState peel_layer(const PeelState& state, const PeelExtraction& extraction, const PeelOptions& options = {});

/// Edge joining a physical node to an adjacent interior node.
EdgeId edge_between(const PhysicalNode& from, const GridNode& to);

struct ReconstructionReport {
    std::vector<LayerDiagnostics> layers;
    std::vector<std::string> warnings;
};

struct ReconstructionResult {
    LatticeSpec spec{1};
    std::vector<double> conductances;  // catalog order; may hold nonpositive values under noise
    ReconstructionReport report;
    double elapsed_ms = 0.0;

    double conductance(const EdgeId& e) const { return conductances[spec.edge_index(e)]; }
    double resistance(const EdgeId& e) const { return 1.0 / conductance(e); }
    std::vector<double> resistances() const;
    /// Throws InvalidConductance when an estimate is not a valid conductance.
    ConductanceMap to_conductance_map() const;
};

struct ReconstructOptions {
    PeelOptions peel;
    BlockInversion inversion = BlockInversion::Solve;
    double asymmetry_warning = 1e-6;  // relative to max |Lambda|
};

ReconstructionResult reconstruct_full(const ResponseMatrix& lambda, const ReconstructOptions& options = {});

}  // namespace rnet
