#include <doctest.h>

#include <cmath>

#include "rnet/experiments.hpp"
#include "rnet/random.hpp"

using namespace rnet;

TEST_CASE("rmse metrics on resistances") {
    const LatticeSpec spec(1);
    const auto truth = ConductanceMap::from_resistances(spec, std::vector<double>{1, 2, 4, 5});
    ReconstructionResult r;
    r.spec = spec;
    // estimated resistances 1, 2, 5, 3: errors 0, 0, 1, -2
    r.conductances = {1.0, 0.5, 0.2, 1.0 / 3.0};
    const auto m = rmse_metrics(truth, r);
    CHECK(m.rmse == doctest::Approx(std::sqrt(5.0 / 4.0)));
    CHECK(m.rel_rmse == doctest::Approx(std::sqrt((0.0625 + 0.16) / 4.0)));
    r.spec = LatticeSpec(2);
    CHECK_THROWS_AS(rmse_metrics(truth, r), SpecMismatch);
}

TEST_CASE("log-log slope") {
    const std::vector<double> x{1, 2, 4, 8, 16};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v * v);
    CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
    CHECK_THROWS_AS(loglog_slope({1}, {1}), InvalidInput);
    CHECK_THROWS_AS(loglog_slope({1, 2}, {1, 0}), InvalidInput);
}

TEST_CASE("size sweep is exact and independent of the worker count") {
    SweepOptions o;
    o.seed = 11;
    o.trials = 6;
    o.workers = 1;
    const auto a = run_size_sweep({2, 3, 4}, o);
    o.workers = 3;
    const auto b = run_size_sweep({2, 3, 4}, o);
    CHECK(to_csv(a) == to_csv(b));
    REQUIRE(a.rows.size() == 3);
    for (const auto& row : a.rows) {
        CHECK(row.trials == 6);
        CHECK(row.failures == 0);
        CHECK(row.rmse_mean < 1e-10);
        CHECK_FALSE(row.timed);
    }
    CHECK(a.rows[1].param == "3");
    o.seed = 12;
    CHECK(to_csv(run_size_sweep({2, 3, 4}, o)) != to_csv(a));
}

TEST_CASE("noise sweep grows with sigma and labels rows by point") {
    SweepOptions o;
    o.seed = 3;
    o.trials = 20;
    o.workers = 2;
    const auto r = run_noise_sweep({3}, {1e-4, 1e-3, 1e-2}, o);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].param == "3,0.0001");
    CHECK(r.rows[0].rmse_mean < r.rows[1].rmse_mean);
    CHECK(r.rows[1].rmse_mean < r.rows[2].rmse_mean);
    CHECK(r.rows[2].sigma == 0.01);
    const std::string csv = to_csv(r);
    CHECK(csv.find("\"3,0.0001\",20,") != std::string::npos);
    CHECK(csv.find("# sweep: noise\n") == 0);
    CHECK(csv.find("# sigmas: 0.0001 0.001 0.01\n") != std::string::npos);
    CHECK(csv == to_csv(run_noise_sweep({3}, {1e-4, 1e-3, 1e-2}, o)));
    CHECK_THROWS_AS(run_noise_sweep({3}, {}, o), InvalidInput);
    CHECK_THROWS_AS(run_noise_sweep({3}, {-1.0}, o), InvalidInput);
}

TEST_CASE("timing profile fills the time columns") {
    SweepOptions o;
    o.trials = 3;
    const auto r = run_timing_profile({2, 4}, o);
    REQUIRE(r.rows.size() == 2);
    for (const auto& row : r.rows) {
        CHECK(row.timed);
        CHECK(row.time_ms_mean > 0.0);
    }
    const std::string csv = to_csv(r);
    const std::string header = "param,trials,rmse_mean,rmse_std,rel_rmse_mean,time_ms_mean,time_ms_std,failures\n";
    CHECK(csv.find(header) != std::string::npos);
    CHECK(csv.find(",,") == std::string::npos);
    CHECK(to_csv(run_size_sweep({2}, o)).find(",,,0\n") != std::string::npos);
}

TEST_CASE("sweep option validation") {
    SweepOptions o;
    o.trials = 0;
    CHECK_THROWS_AS(run_size_sweep({2}, o), InvalidInput);
    o.trials = 1;
    CHECK_THROWS_AS(run_size_sweep({}, o), InvalidInput);
    CHECK_THROWS_AS(run_size_sweep({0}, o), InvalidInput);
    o.resistance_low = 3;
    o.resistance_high = 2;
    CHECK_THROWS_AS(run_size_sweep({2}, o), InvalidInput);
}
