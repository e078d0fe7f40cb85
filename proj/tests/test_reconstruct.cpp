#include <doctest.h>

#include "oracles.hpp"
#include "rnet/measure.hpp"
#include "rnet/random.hpp"
#include "rnet/reconstruct.hpp"

using namespace rnet;

namespace {

std::vector<std::size_t> inverse_quarter_turn(int k) {
    const std::size_t n = 4 * static_cast<std::size_t>(k);
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (i + n - static_cast<std::size_t>(k)) % n;
    return p;
}

/// Sub-network left after peeling one layer: a lattice two sizes smaller whose
/// spikes are the edges joining the outer ring to the inner block.
ConductanceMap inner_network(const ConductanceMap& net, const PeelState& next) {
    const LatticeSpec inner(next.length);
    std::vector<double> g;
    for (const auto& e : inner.edges()) {
        if (e.role == EdgeRole::Spike) {
            g.push_back(net[edge_between(next.index_map[static_cast<std::size_t>(e.a - 1)], next.anchor(e.a))]);
        } else {
            g.push_back(net[EdgeId{e.role, e.a + 1, e.b + 1}]);
        }
    }
    return ConductanceMap(inner, g);
}

PeelExtraction extract(const DenseMatrix& lambda) {
    return extract_boundary_conductances(tilde_face_matrices(face_blocks(lambda)));
}

}  // namespace

TEST_CASE("face blocks reassemble the matrix") {
    Rng rng(1);
    const auto lambda = response_matrix(random_network(LatticeSpec(3), 1, 2, rng)).matrix();
    const auto blocks = face_blocks(lambda);
    CHECK(blocks.length() == 3);
    CHECK(blocks.assemble() == lambda);
    CHECK(blocks(Face::North, Face::East)(0, 0) == lambda(0, 3));
    CHECK(blocks(Face::West, Face::South)(2, 1) == lambda(11, 7));
    CHECK_THROWS_AS(face_blocks(DenseMatrix(5, 5)), DimensionMismatch);
}

TEST_CASE("special-function matrices of the unit k = 2 lattice") {
    const auto lambda = response_matrix(ConductanceMap::uniform(LatticeSpec(2), 1.0)).matrix();
    const auto tilde = tilde_face_matrices(face_blocks(lambda));
    CHECK(max_abs_diff(tilde[Face::North], {{1, 0}, {1, 1}}) < 1e-12);
    CHECK(max_abs_diff(tilde[Face::South], {{1, 0}, {1, 1}}) < 1e-12);
    CHECK(max_abs_diff(tilde[Face::East], {{1, 1}, {0, 1}}) < 1e-12);
    CHECK(max_abs_diff(tilde[Face::West], {{1, 1}, {0, 1}}) < 1e-12);
    const auto ex = extract_boundary_conductances(tilde);
    for (double s : ex.spikes) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ex.edges.size() == 4);
    for (const auto& e : ex.edges) CHECK(e.conductance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ex.nonpositive == 0);
    for (double c : tilde.block_condition) CHECK(c > 1.0);
}

TEST_CASE("both inversion routes agree on well-conditioned input") {
    Rng rng(4);
    const auto lambda = response_matrix(random_network(LatticeSpec(5), 1, 2, rng)).matrix();
    const auto a = tilde_face_matrices(face_blocks(lambda), BlockInversion::Solve);
    const auto b = tilde_face_matrices(face_blocks(lambda), BlockInversion::ExplicitInverse);
    for (int f = 0; f < 4; ++f) CHECK(max_abs_diff(a.tilde[f], b.tilde[f]) < 1e-9);
}

TEST_CASE("outer layer extraction matches the true network") {
    Rng rng(21);
    for (int k = 1; k <= 6; ++k) {
        const auto net = random_network(LatticeSpec(k), 1, 2, rng);
        const auto ex = extract(response_matrix(net).matrix());
        CHECK(ex.length == k);
        REQUIRE(ex.spikes.size() == static_cast<std::size_t>(4 * k));
        for (int b = 1; b <= 4 * k; ++b)
            CHECK(ex.spikes[static_cast<std::size_t>(b - 1)] == doctest::Approx(net[EdgeId::spike(b)]).epsilon(1e-10));
        CHECK(ex.edges.size() == static_cast<std::size_t>(4 * (k - 1)));
        const auto state = PeelState::initial(response_matrix(net).matrix());
        for (const auto& e : ex.edges) {
            CHECK(LatticeSpec(k).face_of(e.first) == LatticeSpec(k).face_of(e.second));
            const auto id = edge_between({0, state.anchor(e.first)}, state.anchor(e.second));
            CHECK(e.conductance == doctest::Approx(net[id]).epsilon(1e-10));
        }
    }
}

TEST_CASE("spike removal on a star") {
    SUBCASE("unit star") {
        const DenseMatrix lambda = oracle::star_response({1, 1, 1, 1});
        const DenseMatrix out = apply_spike_removal(lambda, 1, 1.0);
        const DenseMatrix expect{{3, -1, -1, -1}, {-1, 1, 0, 0}, {-1, 0, 1, 0}, {-1, 0, 0, 1}};
        CHECK(max_abs_diff(out, expect) < 1e-12);
    }
    SUBCASE("removing a spike exposes the centre") {
        Rng rng(8);
        std::uniform_real_distribution<double> d(0.5, 2.0);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> g{d(rng), d(rng), d(rng), d(rng)};
            const int b = 1 + t % 4;
            const DenseMatrix out = apply_spike_removal(oracle::star_response(g), b, g[b - 1]);
            // the centre now sits at index b, joined to the other three leaves
            DenseMatrix expect(4, 4);
            const auto c = static_cast<std::size_t>(b - 1);
            for (std::size_t j = 0; j < 4; ++j) {
                if (j == c) continue;
                expect(c, c) += g[j];
                expect(j, j) = g[j];
                expect(c, j) = expect(j, c) = -g[j];
            }
            CHECK(max_abs_diff(out, expect) < 1e-12);
        }
    }
    SUBCASE("errors") {
        const DenseMatrix lambda = oracle::star_response({1, 1, 1, 1});
        CHECK_THROWS_AS(apply_spike_removal(lambda, 1, 0.0), InvalidConductance);
        CHECK_THROWS_AS(apply_spike_removal(lambda, 5, 1.0), InvalidInput);
        CHECK_THROWS_AS(apply_spike_removal(lambda, 1, 0.75), DegenerateDelta);
    }
}

TEST_CASE("edge removal") {
    Rng rng(5);
    const auto lambda = response_matrix(random_network(LatticeSpec(2), 1, 2, rng)).matrix();
    const DenseMatrix out = apply_edge_removal(lambda, 2, 5, 0.3);
    DenseMatrix diff = out - lambda;
    CHECK(diff(1, 1) == doctest::Approx(-0.3));
    CHECK(diff(4, 4) == doctest::Approx(-0.3));
    CHECK(diff(1, 4) == doctest::Approx(0.3));
    CHECK(diff(4, 1) == doctest::Approx(0.3));
    diff(1, 1) = diff(4, 4) = diff(1, 4) = diff(4, 1) = 0.0;
    CHECK(diff.max_abs() == 0.0);
    CHECK(max_abs_diff(apply_edge_removal(apply_edge_removal(lambda, 1, 3, 0.2), 2, 3, 0.4),
                       apply_edge_removal(apply_edge_removal(lambda, 2, 3, 0.4), 1, 3, 0.2)) < 1e-15);
    CHECK_THROWS_AS(apply_edge_removal(lambda, 2, 2, 0.3), InvalidInput);
    CHECK_THROWS_AS(apply_edge_removal(lambda, 0, 2, 0.3), InvalidInput);
}

TEST_CASE("one peel leaves the response of the inner lattice") {
    Rng rng(33);
    for (int k = 3; k <= 7; ++k) {
        const auto net = random_network(LatticeSpec(k), 1, 2, rng);
        const auto lambda = response_matrix(net).matrix();
        const auto state = PeelState::initial(lambda);
        const auto next = peel_layer(state, extract(lambda));
        CHECK(next.length == k - 2);
        CHECK(next.layer == 1);
        CHECK(next.index_map.size() == static_cast<std::size_t>(4 * (k - 2)));
        for (const auto& p : next.index_map) CHECK_FALSE(p.is_boundary());
        const auto expect = response_matrix(inner_network(net, next)).matrix();
        CHECK(max_abs_diff(next.lambda, expect) < 1e-9 * expect.max_abs());
        REQUIRE(next.diagnostics.size() == 1);
        CHECK(next.diagnostics[0].residual_max < 1e-9);
    }
    CHECK_THROWS_AS(peel_layer(PeelState::initial(response_matrix(ConductanceMap::uniform(LatticeSpec(2), 1)).matrix()),
                               extract(response_matrix(ConductanceMap::uniform(LatticeSpec(2), 1)).matrix())),
                    InvalidInput);
}

TEST_CASE("removal schedule does not change the peeled matrix (property)") {
    Rng rng(55);
    for (int t = 0; t < 40; ++t) {
        const int k = 3 + t % 3;
        const auto lambda = response_matrix(random_network(LatticeSpec(k), 1, 2, rng)).matrix();
        const auto state = PeelState::initial(lambda);
        const auto ex = extract(lambda);
        const auto base = peel_layer(state, ex).lambda;
        for (auto corner : {CornerKeep::LowerIndex, CornerKeep::HigherIndex}) {
            for (bool ccw : {false, true}) {
                PeelOptions o;
                o.schedule = {corner, ccw};
                CHECK(max_abs_diff(peel_layer(state, ex, o).lambda, base) < 1e-9 * base.max_abs());
            }
        }
    }
}

TEST_CASE("edge_between") {
    CHECK(edge_between({4, {}}, {1, 3}) == EdgeId::spike(4));
    CHECK(edge_between({0, {2, 3}}, {2, 2}) == EdgeId::horizontal(2, 2));
    CHECK(edge_between({0, {2, 3}}, {3, 3}) == EdgeId::vertical(2, 3));
    CHECK_THROWS(edge_between({0, {2, 3}}, {3, 4}));
}

TEST_CASE("full reconstruction round trip") {
    Rng rng(77);
    for (int k = 1; k <= 8; ++k) {
        for (int t = 0; t < 3; ++t) {
            const auto net = random_network(LatticeSpec(k), 1, 2, rng);
            const auto r = reconstruct_full(response_matrix(net));
            CHECK(r.spec == net.spec());
            CHECK(oracle::max_relative_error(r.conductances, net.values()) < 1e-8);
            CHECK(r.report.layers.size() == static_cast<std::size_t>((k + 1) / 2));
            CHECK(r.report.warnings.empty());
            CHECK(r.elapsed_ms >= 0.0);
            CHECK(r.resistance(EdgeId::spike(1)) == doctest::Approx(net.resistance(EdgeId::spike(1))).epsilon(1e-8));
        }
    }
    const auto unit = reconstruct_full(response_matrix(ConductanceMap::uniform(LatticeSpec(2), 1.0)));
    for (double g : unit.conductances) CHECK(g == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruction equivariance (property)") {
    Rng rng(91);
    int instances = 0;
    for (int t = 0; t < 200; ++t) {
        const int k = 1 + t % 5;
        const auto net = random_network(LatticeSpec(k), 1, 2, rng);
        const auto lambda = response_matrix(net).matrix();
        const auto base = reconstruct_full(ResponseMatrix(lambda));

        const double c = 0.25 + static_cast<double>(t % 9);
        const auto scaled = reconstruct_full(ResponseMatrix(lambda * c));
        for (std::size_t i = 0; i < base.conductances.size(); ++i)
            CHECK(scaled.conductances[i] == doctest::Approx(c * base.conductances[i]).epsilon(1e-9));

        const auto rotated = reconstruct_full(ResponseMatrix(lambda.permuted(inverse_quarter_turn(k))));
        const auto expect = base.to_conductance_map().rotated_quarter();
        CHECK(oracle::max_relative_error(rotated.conductances, expect.values()) < 1e-9);
        ++instances;
    }
    CHECK(instances >= 200);
}

TEST_CASE("single changed resistor is attributed to that edge") {
    Rng rng(13);
    const LatticeSpec spec(4);
    const auto net = random_network(spec, 1, 2, rng);
    const auto base = reconstruct_full(response_matrix(net));
    for (const auto& e : spec.edges()) {
        const auto changed = reconstruct_full(response_matrix(net.with(e, net[e] / 5.0)));
        for (const auto& f : spec.edges()) {
            const double rel = changed.resistance(f) / base.resistance(f) - 1.0;
            CHECK(rel == doctest::Approx(f == e ? 4.0 : 0.0).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("reconstruction failures and warnings") {
    SUBCASE("zero matrix has singular blocks") {
        try {
            reconstruct_full(ResponseMatrix(DenseMatrix(8, 8)));
            FAIL("expected a solver error");
        } catch (const SolverError& e) {
            CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
        }
    }
    SUBCASE("asymmetric input is flagged") {
        Rng rng(2);
        DenseMatrix lambda = response_matrix(random_network(LatticeSpec(3), 1, 2, rng)).matrix();
        lambda(0, 1) += 1e-3;
        const auto r = reconstruct_full(ResponseMatrix(lambda));
        CHECK_FALSE(r.report.warnings.empty());
    }
    SUBCASE("heavy noise yields flagged estimates or a solver error, never an input error") {
        Rng rng(12);
        const auto lambda = response_matrix(random_network(LatticeSpec(6), 1, 2, rng));
        int flagged = 0;
        for (std::uint64_t s = 0; s < 40; ++s) {
            try {
                const auto r = reconstruct_full(apply_elementwise_noise(lambda, 0.05, s));
                for (const auto& d : r.report.layers) flagged += d.nonpositive;
            } catch (const SolverError&) {
            }
        }
        CHECK(flagged > 0);
    }
    SUBCASE("residual check can be made fatal") {
        Rng rng(6);
        DenseMatrix lambda = response_matrix(random_network(LatticeSpec(5), 1, 2, rng)).matrix();
        for (std::size_t i = 0; i < lambda.rows(); ++i)
            for (std::size_t j = 0; j < lambda.cols(); ++j) lambda(i, j) *= 1.0 + 1e-3 * std::sin(static_cast<double>(7 * i + 3 * j));
        lambda = symmetrize_average(lambda);
        ReconstructOptions o;
        o.peel.fail_on_residual = true;
        o.peel.residual_tolerance = 1e-14;
        CHECK_THROWS_AS(reconstruct_full(ResponseMatrix(lambda), o), SolverError);
        o.peel.fail_on_residual = false;
        const auto r = reconstruct_full(ResponseMatrix(lambda), o);
        CHECK(r.report.layers.front().residual_max > 0.0);
    }
}
