#include "rnet/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace rnet {

std::string EdgeId::to_string() const {
    switch (role) {
        case EdgeRole::Spike: return fmt::format("S:{}", a);
        case EdgeRole::Horizontal: return fmt::format("H:{}:{}", a, b);
        case EdgeRole::Vertical: return fmt::format("V:{}:{}", a, b);
    }
    return {};
}

EdgeId EdgeId::parse(const std::string& text) {
    auto bad = [&] { return InvalidInput(fmt::format("bad edge id '{}'", text)); };
    if (text.size() < 3 || text[1] != ':') throw bad();
    auto read_int = [&](std::size_t& pos) {
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos || end - pos > 9) throw bad();
        int v = std::stoi(text.substr(pos, end - pos));
        pos = end;
        return v;
    };
    std::size_t pos = 2;
    const int first = read_int(pos);
    if (text[0] == 'S') {
        if (pos != text.size()) throw bad();
        return spike(first);
    }
    if ((text[0] != 'H' && text[0] != 'V') || pos >= text.size() || text[pos] != ':') throw bad();
    ++pos;
    const int second = read_int(pos);
    if (pos != text.size()) throw bad();
    return text[0] == 'H' ? horizontal(first, second) : vertical(first, second);
}

LatticeSpec::LatticeSpec(int length) : k_(length) {
    if (length < 1) throw InvalidInput(fmt::format("lattice length must be >= 1, got {}", length));
    edges_.reserve(static_cast<std::size_t>(edge_count()));
    for (int b = 1; b <= 4 * k_; ++b) edges_.push_back(EdgeId::spike(b));
    for (int r = 1; r <= k_; ++r)
        for (int c = 1; c < k_; ++c) edges_.push_back(EdgeId::horizontal(r, c));
    for (int r = 1; r < k_; ++r)
        for (int c = 1; c <= k_; ++c) edges_.push_back(EdgeId::vertical(r, c));
}

bool LatticeSpec::contains(const EdgeId& e) const {
    switch (e.role) {
        case EdgeRole::Spike: return e.a >= 1 && e.a <= 4 * k_ && e.b == 0;
        case EdgeRole::Horizontal: return e.a >= 1 && e.a <= k_ && e.b >= 1 && e.b < k_;
        case EdgeRole::Vertical: return e.a >= 1 && e.a < k_ && e.b >= 1 && e.b <= k_;
    }
    return false;
}

std::size_t LatticeSpec::edge_index(const EdgeId& e) const {
    if (!contains(e)) throw InvalidInput(fmt::format("edge {} not in a lattice of length {}", e.to_string(), k_));
    const auto k = static_cast<std::size_t>(k_);
    const auto r = static_cast<std::size_t>(e.a);
    const auto c = static_cast<std::size_t>(e.b);
    switch (e.role) {
        case EdgeRole::Spike: return r - 1;
        case EdgeRole::Horizontal: return 4 * k + (r - 1) * (k - 1) + (c - 1);
        case EdgeRole::Vertical: return 4 * k + k * (k - 1) + (r - 1) * k + (c - 1);
    }
    return 0;
}

Face LatticeSpec::face_of(int boundary) const {
    if (boundary < 1 || boundary > 4 * k_) throw InvalidInput(fmt::format("boundary index {} out of range", boundary));
    return static_cast<Face>((boundary - 1) / k_);
}

GridNode LatticeSpec::anchor(int b) const {
    const int k = k_;
    switch (face_of(b)) {
        case Face::North: return {1, b};
        case Face::East: return {b - k, k};
        case Face::South: return {k, k + 1 - (b - 2 * k)};
        case Face::West: return {k + 1 - (b - 3 * k), 1};
    }
    return {};
}

std::size_t LatticeSpec::node_index_boundary(int boundary) const {
    face_of(boundary);
    return static_cast<std::size_t>(boundary - 1);
}

std::size_t LatticeSpec::node_index_interior(GridNode n) const {
    if (n.row < 1 || n.row > k_ || n.col < 1 || n.col > k_) throw InvalidInput("interior node out of range");
    return static_cast<std::size_t>(4 * k_ + (n.row - 1) * k_ + (n.col - 1));
}

std::pair<std::size_t, std::size_t> LatticeSpec::endpoints(const EdgeId& e) const {
    if (!contains(e)) throw InvalidInput(fmt::format("edge {} not in a lattice of length {}", e.to_string(), k_));
    switch (e.role) {
        case EdgeRole::Spike: return {node_index_boundary(e.a), node_index_interior(anchor(e.a))};
        case EdgeRole::Horizontal:
            return {node_index_interior({e.a, e.b}), node_index_interior({e.a, e.b + 1})};
        case EdgeRole::Vertical:
            return {node_index_interior({e.a, e.b}), node_index_interior({e.a + 1, e.b})};
    }
    return {};
}

int boundary_index(int k, Face face, int j) {
    return static_cast<int>(face) * k + j;
}

EdgeId rotate_quarter(const EdgeId& e, int k) {
    switch (e.role) {
        case EdgeRole::Spike: return EdgeId::spike((e.a - 1 + k) % (4 * k) + 1);
        // (r,c) -> (c, k+1-r)
        case EdgeRole::Horizontal: return EdgeId::vertical(e.b, k + 1 - e.a);
        case EdgeRole::Vertical: return EdgeId::horizontal(e.b, k - e.a);
    }
    return e;
}

ConductanceMap::ConductanceMap(LatticeSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(spec_.edge_count()))
        throw InvalidInput(fmt::format("{} conductances for {} edges", values_.size(), spec_.edge_count()));
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
            throw InvalidConductance(
                fmt::format("edge {} has invalid conductance {}", spec_.edges()[i].to_string(), values_[i]));
    }
}

ConductanceMap ConductanceMap::uniform(const LatticeSpec& spec, double g) {
    return ConductanceMap(spec, std::vector<double>(static_cast<std::size_t>(spec.edge_count()), g));
}

ConductanceMap ConductanceMap::from_resistances(const LatticeSpec& spec, std::span<const double> resistances) {
    std::vector<double> g(resistances.size());
    std::transform(resistances.begin(), resistances.end(), g.begin(), [](double r) { return 1.0 / r; });
    return ConductanceMap(spec, std::move(g));
}

std::vector<double> ConductanceMap::resistances() const {
    std::vector<double> r(values_.size());
    std::transform(values_.begin(), values_.end(), r.begin(), [](double g) { return 1.0 / g; });
    return r;
}

ConductanceMap ConductanceMap::with(const EdgeId& e, double g) const {
    auto v = values_;
    v[spec_.edge_index(e)] = g;
    return ConductanceMap(spec_, std::move(v));
}

ConductanceMap ConductanceMap::scaled(double c) const {
    auto v = values_;
    for (double& x : v) x *= c;
    return ConductanceMap(spec_, std::move(v));
}

ConductanceMap ConductanceMap::rotated_quarter() const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        v[spec_.edge_index(rotate_quarter(spec_.edges()[i], spec_.length()))] = values_[i];
    return ConductanceMap(spec_, std::move(v));
}

ResponseMatrix::ResponseMatrix(DenseMatrix m) : m_(std::move(m)) {
    if (!m_.square() || m_.rows() == 0 || m_.rows() % 4 != 0)
        throw DimensionMismatch(fmt::format("response matrix must be 4k x 4k, got {}x{}", m_.rows(), m_.cols()));
}

ResponseCheck check_response(const DenseMatrix& lambda) {
    ResponseCheck c;
    c.asymmetry = asymmetry(lambda);
    c.max_offdiag = -std::numeric_limits<double>::infinity();
    c.min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lambda.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < lambda.cols(); ++j) {
            s += lambda(i, j);
            if (i != j) c.max_offdiag = std::max(c.max_offdiag, lambda(i, j));
        }
        c.max_row_sum = std::max(c.max_row_sum, std::abs(s));
        c.min_diag = std::min(c.min_diag, lambda(i, i));
    }
    return c;
}

std::vector<std::size_t> quarter_turn_permutation(int k) {
    const auto n = static_cast<std::size_t>(4 * k);
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (i + static_cast<std::size_t>(k)) % n;
    return p;
}

DenseMatrix build_kirchhoff(const ConductanceMap& net) {
    const auto& spec = net.spec();
    const auto n = static_cast<std::size_t>(spec.node_count());
    DenseMatrix kirchhoff(n, n);
    for (std::size_t i = 0; i < spec.edges().size(); ++i) {
        const auto [u, v] = spec.endpoints(spec.edges()[i]);
        const double g = net.values()[i];
        kirchhoff(u, u) += g;
        kirchhoff(v, v) += g;
        kirchhoff(u, v) -= g;
        kirchhoff(v, u) -= g;
    }
    return kirchhoff;
}

namespace {

std::vector<std::size_t> iota_range(std::size_t from, std::size_t to) {
    std::vector<std::size_t> v(to - from);
    std::iota(v.begin(), v.end(), from);
    return v;
}

}  // namespace

ResponseMatrix response_matrix(const ConductanceMap& net) {
    const auto& spec = net.spec();
    const auto nb = static_cast<std::size_t>(spec.boundary_count());
    const auto nn = static_cast<std::size_t>(spec.node_count());
    const auto boundary = iota_range(0, nb);
    const auto interior = iota_range(nb, nn);
    // Exact symmetry for the forward model; elimination leaves ~1e-16 noise.
    return ResponseMatrix(symmetrize_average(schur_complement(build_kirchhoff(net), boundary, interior)));
}

BoundaryResponse forward_boundary_solve(const ConductanceMap& net, std::span<const double> voltages) {
    const auto& spec = net.spec();
    const auto nb = static_cast<std::size_t>(spec.boundary_count());
    const auto nn = static_cast<std::size_t>(spec.node_count());
    if (voltages.size() != nb)
        throw DimensionMismatch(fmt::format("{} boundary voltages for {} boundary nodes", voltages.size(), nb));

    const DenseMatrix k = build_kirchhoff(net);
    const auto boundary = iota_range(0, nb);
    const auto interior = iota_range(nb, nn);
    const DenseMatrix k_ib = k.select(interior, boundary);

    // Interior potentials: K_II x = -K_IB u.
    auto rhs = k_ib * voltages;
    for (double& v : rhs) v = -v;
    BoundaryResponse out;
    out.interior_potentials = LuDecomposition(k.select(interior, interior)).solve(rhs);

    // Boundary currents straight from Kirchhoff's law on the full node set.
    out.currents = k.select(boundary, boundary) * voltages;
    const auto through_interior = k.select(boundary, interior) * std::span<const double>(out.interior_potentials);
    for (std::size_t i = 0; i < nb; ++i) out.currents[i] += through_interior[i];
    return out;
}

}  // namespace rnet
