#include "rnet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "rnet/measure.hpp"
#include "rnet/random.hpp"

namespace rnet {

ErrorMetrics rmse_metrics(const ConductanceMap& truth, const ReconstructionResult& recon) {
    if (!(truth.spec() == recon.spec))
        throw SpecMismatch(fmt::format("truth has length {}, reconstruction {}", truth.spec().length(), recon.spec.length()));
    const auto r_true = truth.resistances();
    const auto r_hat = recon.resistances();
    double abs_sq = 0.0;
    double rel_sq = 0.0;
    for (std::size_t i = 0; i < r_true.size(); ++i) {
        const double d = r_hat[i] - r_true[i];
        abs_sq += d * d;
        rel_sq += (d / r_true[i]) * (d / r_true[i]);
    }
    const auto n = static_cast<double>(r_true.size());
    return {std::sqrt(abs_sq / n), std::sqrt(rel_sq / n)};
}

namespace {

struct TrialOutcome {
    bool failed = false;
    ErrorMetrics metrics;
    double time_ms = 0.0;
};

// Runs trials [0, count) on a bounded pool; outcomes land in trial order.
std::vector<TrialOutcome> run_trials(int count, unsigned workers, const std::function<TrialOutcome(int)>& trial) {
    std::vector<TrialOutcome> out(static_cast<std::size_t>(count));
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1)));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int t = next++; t < count; t = next++) out[static_cast<std::size_t>(t)] = trial(t);
    };
    if (workers == 1) {
        work();
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    pool.clear();
    return out;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? std::nan("") : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SweepRow summarize(std::string param, int length, double sigma, const std::vector<TrialOutcome>& outcomes, bool timed) {
    SweepRow row;
    row.param = std::move(param);
    row.length = length;
    row.sigma = sigma;
    row.trials = static_cast<int>(outcomes.size());
    row.timed = timed;
    std::vector<double> rmse, rel, time;
    for (const auto& o : outcomes) {
        if (o.failed) {
            ++row.failures;
            continue;
        }
        rmse.push_back(o.metrics.rmse);
        rel.push_back(o.metrics.rel_rmse);
        time.push_back(o.time_ms);
    }
    row.rmse_mean = mean(rmse);
    row.rmse_std = sample_std(rmse);
    row.rel_rmse_mean = mean(rel);
    if (timed) {
        row.time_ms_mean = mean(time);
        row.time_ms_std = sample_std(time);
    }
    return row;
}

TrialOutcome reconstruct_trial(const ConductanceMap& truth, const ResponseMatrix& lambda, const ReconstructOptions& options) {
    TrialOutcome o;
    try {
        const auto start = std::chrono::steady_clock::now();
        const ReconstructionResult recon = reconstruct_full(lambda, options);
        o.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        o.metrics = rmse_metrics(truth, recon);
        // Zero or non-finite conductances poison the mean; count them with the failures.
        o.failed = !std::isfinite(o.metrics.rmse) || !std::isfinite(o.metrics.rel_rmse);
    } catch (const SolverError&) {
        o.failed = true;
    }
    return o;
}

void validate(const std::vector<int>& lengths, const SweepOptions& options) {
    if (options.trials < 1) throw InvalidInput("trials must be >= 1");
    if (lengths.empty()) throw InvalidInput("no lattice lengths given");
    for (int k : lengths)
        if (k < 1) throw InvalidInput(fmt::format("lattice length must be >= 1, got {}", k));
    if (!(options.resistance_low > 0.0) || !(options.resistance_high >= options.resistance_low))
        throw InvalidInput("bad resistance range");
}

std::vector<std::pair<std::string, std::string>> base_config(const std::vector<int>& lengths, const SweepOptions& o) {
    return {
        {"lengths", fmt::format("{}", fmt::join(lengths, " "))},
        {"trials", std::to_string(o.trials)},
        {"resistance_range", fmt::format("{}:{}", o.resistance_low, o.resistance_high)},
        {"seed", std::to_string(o.seed)},
        {"block_inversion", o.reconstruct.inversion == BlockInversion::Solve ? "solve" : "explicit-inverse"},
    };
}

}  // namespace

SweepResult run_size_sweep(const std::vector<int>& lengths, const SweepOptions& options) {
    validate(lengths, options);
    SweepResult result{"size", options.seed, base_config(lengths, options), {}};
    for (std::size_t p = 0; p < lengths.size(); ++p) {
        const int k = lengths[p];
        const LatticeSpec spec(k);
        const std::uint64_t point_seed = derive_seed(options.seed, static_cast<std::uint64_t>(k));
        auto outcomes = run_trials(options.trials, options.workers, [&](int t) {
            Rng rng(derive_seed(point_seed, static_cast<std::uint64_t>(t)));
            const ConductanceMap truth = random_network(spec, options.resistance_low, options.resistance_high, rng);
            return reconstruct_trial(truth, response_matrix(truth), options.reconstruct);
        });
        result.rows.push_back(summarize(std::to_string(k), k, 0.0, outcomes, false));
    }
    return result;
}

SweepResult run_noise_sweep(const std::vector<int>& lengths, const std::vector<double>& sigmas,
                            const SweepOptions& options) {
    validate(lengths, options);
    if (sigmas.empty()) throw InvalidInput("no noise levels given");
    for (double s : sigmas)
        if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput(fmt::format("noise sigma must be >= 0, got {}", s));

    SweepResult result{"noise", options.seed, base_config(lengths, options), {}};
    result.config.emplace_back("sigmas", fmt::format("{}", fmt::join(sigmas, " ")));
    for (int k : lengths) {
        const LatticeSpec spec(k);
        // Networks depend on (k, trial) only, so every sigma sees the same networks.
        const std::uint64_t point_seed = derive_seed(options.seed, static_cast<std::uint64_t>(k));
        for (std::size_t si = 0; si < sigmas.size(); ++si) {
            const double sigma = sigmas[si];
            auto outcomes = run_trials(options.trials, options.workers, [&](int t) {
                const std::uint64_t trial_seed = derive_seed(point_seed, static_cast<std::uint64_t>(t));
                Rng rng(trial_seed);
                const ConductanceMap truth = random_network(spec, options.resistance_low, options.resistance_high, rng);
                const ResponseMatrix noisy =
                    apply_elementwise_noise(response_matrix(truth), sigma, derive_seed(trial_seed, 1000 + si));
                return reconstruct_trial(truth, noisy, options.reconstruct);
            });
            result.rows.push_back(summarize(fmt::format("{},{}", k, sigma), k, sigma, outcomes, false));
        }
    }
    return result;
}

SweepResult run_timing_profile(const std::vector<int>& lengths, const SweepOptions& options) {
    validate(lengths, options);
    SweepResult result{"timing", options.seed, base_config(lengths, options), {}};
    for (int k : lengths) {
        const LatticeSpec spec(k);
        const std::uint64_t point_seed = derive_seed(options.seed, static_cast<std::uint64_t>(k));
        auto make = [&](std::uint64_t stream) {
            Rng rng(derive_seed(point_seed, stream));
            return random_network(spec, options.resistance_low, options.resistance_high, rng);
        };
        {
            const ConductanceMap warm = make(~std::uint64_t{0});
            reconstruct_trial(warm, response_matrix(warm), options.reconstruct);
        }
        auto outcomes = run_trials(options.trials, 1, [&](int t) {
            const ConductanceMap truth = make(static_cast<std::uint64_t>(t));
            const ResponseMatrix lambda = response_matrix(truth);
            return reconstruct_trial(truth, lambda, options.reconstruct);
        });
        result.rows.push_back(summarize(std::to_string(k), k, 0.0, outcomes, true));
    }
    return result;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("slope fit needs two or more matching points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidInput("slope fit needs positive data");
        lx.push_back(std::log10(x[i]));
        ly.push_back(std::log10(y[i]));
    }
    const double mx = mean(lx);
    const double my = mean(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string to_csv(const SweepResult& result) {
    std::string out = fmt::format("# sweep: {}\n", result.kind);
    for (const auto& [key, value] : result.config) out += fmt::format("# {}: {}\n", key, value);
    out += "param,trials,rmse_mean,rmse_std,rel_rmse_mean,time_ms_mean,time_ms_std,failures\n";
    for (const auto& r : result.rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.param), r.trials, num(r.rmse_mean), num(r.rmse_std),
                           num(r.rel_rmse_mean), r.timed ? num(r.time_ms_mean) : "", r.timed ? num(r.time_ms_std) : "",
                           r.failures);
    }
    return out;
}

}  // namespace rnet
