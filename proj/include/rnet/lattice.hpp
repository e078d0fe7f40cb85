#pragma once

// Square lattice resistor network: topology, edge naming, Kirchhoff matrix and
// the boundary response (Dirichlet-to-Neumann) matrix.
//
// Boundary nodes are numbered 1..4k clockwise from the top-left corner:
//   north 1..k (left to right), east k+1..2k (top to bottom),
//   south 2k+1..3k (right to left), west 3k+1..4k (bottom to top).
// Each boundary node hangs off one interior node (its anchor) through a spike;
// the four corner interior nodes carry two spikes each.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rnet/matrix.hpp"

namespace rnet {

enum class EdgeRole { Spike, Horizontal, Vertical };

enum class Face { North = 0, East = 1, South = 2, West = 3 };

/// Interior node position, 1-based (row, col).
struct GridNode {
    int row = 0;
    int col = 0;
    friend auto operator<=>(const GridNode&, const GridNode&) = default;
};

/// Stable resistor name. Spike(b): a = boundary index, b unused.
/// Horizontal(r, c): (r,c)-(r,c+1). Vertical(r, c): (r,c)-(r+1,c).
struct EdgeId {
    EdgeRole role = EdgeRole::Spike;
    int a = 0;
    int b = 0;

    static EdgeId spike(int boundary) { return {EdgeRole::Spike, boundary, 0}; }
    static EdgeId horizontal(int r, int c) { return {EdgeRole::Horizontal, r, c}; }
    static EdgeId vertical(int r, int c) { return {EdgeRole::Vertical, r, c}; }

    /// "S:<b>", "H:<r>:<c>" or "V:<r>:<c>".
    std::string to_string() const;
    static EdgeId parse(const std::string& text);

    friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

class LatticeSpec {
public:
    explicit LatticeSpec(int length);

    int length() const { return k_; }
    int boundary_count() const { return 4 * k_; }
    int interior_count() const { return k_ * k_; }
    int node_count() const { return boundary_count() + interior_count(); }
    int spike_count() const { return 4 * k_; }
    int interior_edge_count() const { return 2 * k_ * (k_ - 1); }
    int edge_count() const { return 2 * k_ * k_ + 2 * k_; }

    /// Spikes by boundary index, then horizontals row-major, then verticals row-major.
    const std::vector<EdgeId>& edges() const { return edges_; }
    bool contains(const EdgeId& e) const;
    /// Position of e in edges(); throws InvalidInput for a foreign edge.
    std::size_t edge_index(const EdgeId& e) const;

    Face face_of(int boundary) const;
    GridNode anchor(int boundary) const;

    /// Kirchhoff node index: boundary b -> b-1, interior (r,c) -> 4k + (r-1)k + (c-1).
    std::size_t node_index_boundary(int boundary) const;
    std::size_t node_index_interior(GridNode n) const;
    /// Kirchhoff node indices of both endpoints.
    std::pair<std::size_t, std::size_t> endpoints(const EdgeId& e) const;

    friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) { return a.k_ == b.k_; }

private:
    int k_;
    std::vector<EdgeId> edges_;
};

/// Boundary index of the node at face-local position j (1-based) of a lattice of length k.
int boundary_index(int k, Face face, int j);

/// Map an edge through a quarter turn clockwise; boundary indices shift by k.
EdgeId rotate_quarter(const EdgeId& e, int k);

/// Every lattice edge carries one positive finite conductance, stored in
/// catalog order.
class ConductanceMap {
public:
    ConductanceMap(LatticeSpec spec, std::vector<double> values);
    static ConductanceMap uniform(const LatticeSpec& spec, double g);
    static ConductanceMap from_resistances(const LatticeSpec& spec, std::span<const double> resistances);

    const LatticeSpec& spec() const { return spec_; }
    std::span<const double> values() const { return values_; }
    double operator[](const EdgeId& e) const { return values_[spec_.edge_index(e)]; }
    double resistance(const EdgeId& e) const { return 1.0 / (*this)[e]; }
    std::vector<double> resistances() const;

    ConductanceMap with(const EdgeId& e, double g) const;
    ConductanceMap scaled(double c) const;
    ConductanceMap rotated_quarter() const;

private:
    LatticeSpec spec_;
    std::vector<double> values_;
};

/// Boundary response matrix Lambda (n = 4k). Laplacian sign convention:
/// positive diagonal, nonpositive off-diagonal, zero row sums.
class ResponseMatrix {
public:
    explicit ResponseMatrix(DenseMatrix m);

    const DenseMatrix& matrix() const { return m_; }
    std::size_t size() const { return m_.rows(); }
    int length() const { return static_cast<int>(m_.rows() / 4); }

private:
    DenseMatrix m_;
};

struct ResponseCheck {
    double asymmetry = 0.0;     // max |L_ij - L_ji|
    double max_row_sum = 0.0;   // max |sum_j L_ij|
    double max_offdiag = 0.0;   // largest off-diagonal entry (should be <= 0)
    double min_diag = 0.0;
};
ResponseCheck check_response(const DenseMatrix& lambda);

/// Permutation conjugating Lambda under a quarter turn: index i -> (i + k) mod 4k.
std::vector<std::size_t> quarter_turn_permutation(int k);

DenseMatrix build_kirchhoff(const ConductanceMap& net);
ResponseMatrix response_matrix(const ConductanceMap& net);

struct BoundaryResponse {
    std::vector<double> currents;            // phi, positive into the network
    std::vector<double> interior_potentials;  // harmonic extension, row-major
};
BoundaryResponse forward_boundary_solve(const ConductanceMap& net, std::span<const double> voltages);

}  // namespace rnet
