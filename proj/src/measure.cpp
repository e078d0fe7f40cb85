#include "rnet/measure.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "rnet/random.hpp"

namespace rnet {

ConductanceMap random_network(const LatticeSpec& spec, double low, double high, Rng& rng) {
    if (!(low > 0.0) || !(high >= low)) throw InvalidInput(fmt::format("bad resistance range {}:{}", low, high));
    std::uniform_real_distribution<double> dist(low, high);
    std::vector<double> r(static_cast<std::size_t>(spec.edge_count()));
    for (double& x : r) x = dist(rng);
    return ConductanceMap::from_resistances(spec, r);
}

NoiseModel NoiseModel::elementwise(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput(fmt::format("noise sigma must be >= 0, got {}", sigma));
    NoiseModel m;
    m.kind = Kind::Elementwise;
    m.sigma = sigma;
    return m;
}

NoiseModel NoiseModel::protocol(double snr, double quant_step, double source_volts) {
    if (!(snr > 0.0)) throw InvalidInput(fmt::format("snr must be > 0, got {}", snr));
    if (!(quant_step >= 0.0) || !std::isfinite(quant_step))
        throw InvalidInput(fmt::format("quantization step must be >= 0, got {}", quant_step));
    if (!(source_volts > 0.0) || !std::isfinite(source_volts))
        throw InvalidInput(fmt::format("source voltage must be > 0, got {}", source_volts));
    NoiseModel m;
    m.kind = Kind::Protocol;
    m.snr = snr;
    m.quant_step = quant_step;
    m.source_volts = source_volts;
    return m;
}

namespace {

double parse_number(const std::string& text, const std::string& whole) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw InvalidInput(fmt::format("bad noise spec '{}'", whole));
    return v;
}

}  // namespace

NoiseModel NoiseModel::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.empty()) throw InvalidInput("empty noise spec");
    if (parts[0] == "none" && parts.size() == 1) return none();
    if (parts[0] == "elementwise" && parts.size() == 2) return elementwise(parse_number(parts[1], text));
    if (parts[0] == "protocol" && (parts.size() == 2 || parts.size() == 3))
        return protocol(parse_number(parts[1], text), parts.size() == 3 ? parse_number(parts[2], text) : 0.0);
    throw InvalidInput(fmt::format("bad noise spec '{}'", text));
}

std::string NoiseModel::to_string() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::Elementwise: return fmt::format("elementwise:{}", sigma);
        case Kind::Protocol:
            return quant_step > 0.0 ? fmt::format("protocol:{}:{}", snr, quant_step) : fmt::format("protocol:{}", snr);
    }
    return {};
}

double NoiseModel::relative_sigma() const {
    switch (kind) {
        case Kind::None: return 0.0;
        case Kind::Elementwise: return sigma;
        case Kind::Protocol: return snr_to_sigma(snr);
    }
    return 0.0;
}

double snr_to_sigma(double snr) {
    if (!(snr > 0.0)) throw InvalidInput(fmt::format("snr must be > 0, got {}", snr));
    return 1.0 / snr;
}

MeasurementRecord simulate_measurement(const ConductanceMap& net, const NoiseModel& model, std::uint64_t seed) {
    const DenseMatrix exact = response_matrix(net).matrix();
    const std::size_t n = exact.rows();
    const double volts = model.kind == NoiseModel::Kind::Protocol ? model.source_volts : 1.0;
    const double sigma = model.relative_sigma();

    MeasurementRecord rec{ResponseMatrix(exact), {}, seed, model};
    rec.raw_columns.resize(n);
    DenseMatrix assembled(n, n);
    for (std::size_t driven = 0; driven < n; ++driven) {
        Rng rng(derive_seed(seed, driven));
        std::normal_distribution<double> gauss(1.0, sigma);
        std::vector<double> current(n);
        double others = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == driven) continue;
            double amps = exact(i, driven) * volts;
            if (sigma > 0.0) amps *= gauss(rng);
            if (model.quant_step > 0.0) amps = std::round(amps / model.quant_step) * model.quant_step;
            current[i] = amps;
            others += amps;
        }
        // The driven current is never read; conservation supplies it.
        current[driven] = -others;
        auto& col = rec.raw_columns[driven];
        col.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = current[i] / volts;
            assembled(i, driven) = col[i];
        }
    }
    rec.lambda = ResponseMatrix(symmetrize_average(assembled));
    return rec;
}

ResponseMatrix apply_elementwise_noise(const ResponseMatrix& lambda, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput(fmt::format("noise sigma must be >= 0, got {}", sigma));
    if (sigma == 0.0) return lambda;
    Rng rng(seed);
    std::normal_distribution<double> gauss(1.0, sigma);
    DenseMatrix m = lambda.matrix();
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) *= gauss(rng);
    return ResponseMatrix(symmetrize_average(m));
}

}  // namespace rnet
