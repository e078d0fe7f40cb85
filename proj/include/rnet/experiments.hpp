#pragma once

// Seeded Monte-Carlo studies of reconstruction accuracy: error versus lattice
// length, error versus measurement noise, and reconstruction timing.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rnet/lattice.hpp"
#include "rnet/reconstruct.hpp"

namespace rnet {

struct ErrorMetrics {
    double rmse = 0.0;      // over per-edge resistances
    double rel_rmse = 0.0;  // over (R_hat - R) / R
};

ErrorMetrics rmse_metrics(const ConductanceMap& truth, const ReconstructionResult& recon);

struct SweepRow {
    std::string param;  // CSV label of the parameter point
    int length = 0;
    double sigma = 0.0;
    int trials = 0;
    double rmse_mean = 0.0;
    double rmse_std = 0.0;
    double rel_rmse_mean = 0.0;
    double time_ms_mean = 0.0;
    double time_ms_std = 0.0;
    bool timed = false;
    int failures = 0;
};

struct SweepResult {
    std::string kind;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<SweepRow> rows;
};

struct SweepOptions {
    std::uint64_t seed = 1;
    int trials = 100;
    double resistance_low = 1.0;
    double resistance_high = 2.0;
    unsigned workers = 0;  // 0 = hardware concurrency
    ReconstructOptions reconstruct;
};

SweepResult run_size_sweep(const std::vector<int>& lengths, const SweepOptions& options);
SweepResult run_noise_sweep(const std::vector<int>& lengths, const std::vector<double>& sigmas,
                            const SweepOptions& options);
/// Sequential; one warm-up reconstruction per length is discarded.
SweepResult run_timing_profile(const std::vector<int>& lengths, const SweepOptions& options);

/// Least-squares slope of log10(y) against log10(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Header `param,trials,rmse_mean,rmse_std,rel_rmse_mean,time_ms_mean,time_ms_std,failures`
/// preceded by `#` config lines. Timing fields are empty for untimed sweeps.
std::string to_csv(const SweepResult& result);

}  // namespace rnet
