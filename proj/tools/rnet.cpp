// rnet: resistor network tomography from the command line.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rnet/experiments.hpp"
#include "rnet/io.hpp"
#include "rnet/lattice.hpp"
#include "rnet/measure.hpp"
#include "rnet/random.hpp"
#include "rnet/reconstruct.hpp"
#include "rnet/render.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, sep)) parts.push_back(p);
    return parts;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw rnet::InvalidInput(fmt::format("bad number '{}'", s));
    return v;
}

int to_int(const std::string& s) {
    const double v = to_double(s);
    if (v != static_cast<int>(v)) throw rnet::InvalidInput(fmt::format("bad integer '{}'", s));
    return static_cast<int>(v);
}

/// "4,6,8" or "lo:hi[:step]".
std::vector<int> parse_lengths(const std::string& s) {
    std::vector<int> out;
    if (s.find(':') != std::string::npos) {
        const auto p = split(s, ':');
        if (p.size() < 2 || p.size() > 3) throw rnet::InvalidInput(fmt::format("bad length range '{}'", s));
        const int lo = to_int(p[0]);
        const int hi = to_int(p[1]);
        const int step = p.size() == 3 ? to_int(p[2]) : 1;
        if (step < 1 || hi < lo) throw rnet::InvalidInput(fmt::format("bad length range '{}'", s));
        for (int k = lo; k <= hi; k += step) out.push_back(k);
    } else {
        for (const auto& p : split(s, ',')) out.push_back(to_int(p));
    }
    return out;
}

std::vector<double> parse_sigmas(const std::string& s) {
    std::vector<double> out;
    for (const auto& p : split(s, ',')) out.push_back(to_double(p));
    return out;
}

std::pair<double, double> parse_range(const std::string& s) {
    const auto p = split(s, ':');
    if (p.size() != 2) throw rnet::InvalidInput(fmt::format("bad resistance range '{}'", s));
    const double lo = to_double(p[0]);
    const double hi = to_double(p[1]);
    if (!(lo > 0.0) || !(hi >= lo)) throw rnet::InvalidInput(fmt::format("bad resistance range '{}'", s));
    return {lo, hi};
}

void emit(const std::string& out, const std::string& content) {
    if (out.empty() || out == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        rnet::write_file_atomic(out, content);
    }
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return rnet::read_text_file(path);
}

rnet::ResponseMatrix read_lambda(const std::string& path) {
    return rnet::ResponseMatrix(rnet::matrix_from_csv(read_input(path)));
}

void require_format(const std::string& format, std::initializer_list<const char*> allowed, const char* command) {
    for (const char* a : allowed)
        if (format == a) return;
    throw rnet::InvalidInput(fmt::format("{} does not write format '{}'", command, format));
}

struct Options {
    int length = 4;
    std::uint64_t seed = 1;
    int trials = 100;
    std::string noise = "none";
    std::string range = "1:2";
    std::string out;
    std::string format;
    std::string lengths;
    std::string sigmas = "1e-4,3e-4,1e-3,3e-3,1e-2";
    unsigned workers = 0;
    bool explicit_inverse = false;
    std::string input;
    std::string input2;
};

rnet::SweepOptions sweep_options(const Options& o) {
    rnet::SweepOptions s;
    s.seed = o.seed;
    s.trials = o.trials;
    std::tie(s.resistance_low, s.resistance_high) = parse_range(o.range);
    s.workers = o.workers;
    if (o.explicit_inverse) s.reconstruct.inversion = rnet::BlockInversion::ExplicitInverse;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resistor network tomography: forward model, reconstruction and sweeps"};
    app.require_subcommand(1);
    Options o;

    auto* generate = app.add_subcommand("generate", "Random network with uniform resistances");
    generate->add_option("--length", o.length, "Lattice length k")->required();
    generate->add_option("--seed", o.seed, "RNG seed");
    generate->add_option("--resistance-range", o.range, "Resistance range lo:hi");
    generate->add_option("--out", o.out, "Output path (default stdout)");
    generate->add_option("--format", o.format, "json");

    auto* forward = app.add_subcommand("forward", "Response matrix of a network (CSV)");
    forward->add_option("network", o.input, "Network JSON")->required();
    forward->add_option("--out", o.out, "Output path");
    forward->add_option("--format", o.format, "csv");

    auto* measure = app.add_subcommand("measure", "Simulated noisy measurement of the response matrix");
    measure->add_option("network", o.input, "Network JSON")->required();
    measure->add_option("--noise", o.noise, "none | elementwise:<sigma> | protocol:<snr>[:<quantStep>]");
    measure->add_option("--seed", o.seed, "RNG seed");
    measure->add_option("--out", o.out, "Output path");
    measure->add_option("--format", o.format, "csv");

    auto* reconstruct = app.add_subcommand("reconstruct", "Recover every resistor from a response matrix");
    reconstruct->add_option("lambda", o.input, "Response matrix CSV")->required();
    reconstruct->add_option("--length", o.length, "Expected lattice length (checked against the matrix)");
    reconstruct->add_option("--out", o.out, "Output path");
    reconstruct->add_option("--format", o.format, "json | csv");
    reconstruct->add_flag("--explicit-inverse", o.explicit_inverse, "Form block inverses explicitly");

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo studies");
    sweep->require_subcommand(1);
    auto add_common = [&](CLI::App* c, const char* default_lengths) {
        o.lengths = default_lengths;
        c->add_option("--length", o.lengths, "Lengths: k, k1,k2,... or lo:hi[:step]");
        c->add_option("--trials", o.trials, "Trials per point");
        c->add_option("--seed", o.seed, "RNG seed");
        c->add_option("--resistance-range", o.range, "Resistance range lo:hi");
        c->add_option("--out", o.out, "Output path");
        c->add_option("--format", o.format, "csv");
        c->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
        c->add_flag("--explicit-inverse", o.explicit_inverse, "Form block inverses explicitly");
    };
    auto* sweep_size = sweep->add_subcommand("size", "Error versus lattice length");
    add_common(sweep_size, "4:14:2");
    auto* sweep_noise = sweep->add_subcommand("noise", "Error versus elementwise noise");
    add_common(sweep_noise, "4");
    sweep_noise->add_option("--sigma", o.sigmas, "Comma-separated noise levels");
    auto* sweep_timing = sweep->add_subcommand("timing", "Reconstruction wall time versus length");
    add_common(sweep_timing, "2:14");

    auto* delta = app.add_subcommand("delta", "Relative resistance change between two reconstructions");
    delta->add_option("baseline", o.input, "Baseline reconstruction JSON")->required();
    delta->add_option("deformed", o.input2, "Deformed reconstruction JSON")->required();
    delta->add_option("--out", o.out, "Output path");
    delta->add_option("--format", o.format, "json | csv | svg");

    auto* render = app.add_subcommand("render", "SVG map of a delta map");
    render->add_option("delta", o.input, "Delta map JSON")->required();
    render->add_option("--out", o.out, "Output path");
    render->add_option("--format", o.format, "svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInvalid;
    }

    try {
        if (*generate) {
            require_format(o.format.empty() ? "json" : o.format, {"json"}, "generate");
            const auto [lo, hi] = parse_range(o.range);
            rnet::Rng rng(o.seed);
            emit(o.out, rnet::network_to_json(rnet::random_network(rnet::LatticeSpec(o.length), lo, hi, rng)));
        } else if (*forward) {
            require_format(o.format.empty() ? "csv" : o.format, {"csv"}, "forward");
            const auto net = rnet::network_from_json(read_input(o.input));
            emit(o.out, rnet::to_csv(rnet::response_matrix(net).matrix()));
        } else if (*measure) {
            require_format(o.format.empty() ? "csv" : o.format, {"csv"}, "measure");
            const auto net = rnet::network_from_json(read_input(o.input));
            const auto rec = rnet::simulate_measurement(net, rnet::NoiseModel::parse(o.noise), o.seed);
            emit(o.out, rnet::to_csv(rec.lambda.matrix()));
        } else if (*reconstruct) {
            const std::string format = o.format.empty() ? "json" : o.format;
            require_format(format, {"json", "csv"}, "reconstruct");
            const auto lambda = read_lambda(o.input);
            if (reconstruct->count("--length") && lambda.length() != o.length)
                throw rnet::DimensionMismatch(
                    fmt::format("matrix is {}x{}, expected length {}", lambda.size(), lambda.size(), o.length));
            rnet::ReconstructOptions ro;
            if (o.explicit_inverse) ro.inversion = rnet::BlockInversion::ExplicitInverse;
            const auto result = rnet::reconstruct_full(lambda, ro);
            for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
            emit(o.out, format == "json" ? rnet::reconstruction_to_json(result) : rnet::reconstruction_to_csv(result));
        } else if (*sweep) {
            require_format(o.format.empty() ? "csv" : o.format, {"csv"}, "sweep");
            const auto lengths = parse_lengths(o.lengths);
            const auto so = sweep_options(o);
            rnet::SweepResult r;
            if (*sweep_size) r = rnet::run_size_sweep(lengths, so);
            else if (*sweep_noise) r = rnet::run_noise_sweep(lengths, parse_sigmas(o.sigmas), so);
            else r = rnet::run_timing_profile(lengths, so);
            emit(o.out, rnet::to_csv(r));
        } else if (*delta) {
            const std::string format = o.format.empty() ? "json" : o.format;
            require_format(format, {"json", "csv", "svg"}, "delta");
            const auto map = rnet::compute_delta_map(rnet::reconstruction_from_json(read_input(o.input)),
                                                     rnet::reconstruction_from_json(read_input(o.input2)));
            emit(o.out, format == "json"  ? rnet::delta_to_json(map)
                        : format == "csv" ? rnet::delta_to_csv(map)
                                          : rnet::render_delta_map(map));
        } else if (*render) {
            require_format(o.format.empty() ? "svg" : o.format, {"svg"}, "render");
            emit(o.out, rnet::render_delta_map(rnet::delta_from_json(read_input(o.input))));
        }
    } catch (const rnet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case rnet::ErrorKind::InvalidInput: return kExitInvalid;
            case rnet::ErrorKind::SolverFailure: return kExitSolver;
            case rnet::ErrorKind::Io: return kExitIo;
        }
    }
    return 0;
}
