#pragma once

// Virtual acquisition rig: drive one boundary node at a time, read the other
// currents through a noisy ammeter, infer the driven current from
// conservation, then symmetrize.

#include <cstdint>
#include <string>
#include <vector>

#include "rnet/lattice.hpp"

namespace rnet {

struct NoiseModel {
    enum class Kind { None, Elementwise, Protocol };

    Kind kind = Kind::None;
    double sigma = 0.0;         // Elementwise: relative std-dev
    double snr = 0.0;           // Protocol: mean / std-dev of a repeated reading
    double quant_step = 0.0;    // Protocol: current LSB in amperes, 0 = off
    double source_volts = 5.0;  // Protocol: drive voltage

    static NoiseModel none() { return {}; }
    static NoiseModel elementwise(double sigma);
    static NoiseModel protocol(double snr, double quant_step = 0.0, double source_volts = 5.0);

    /// "none", "elementwise:<sigma>", "protocol:<snr>[:<quantStep>]".
    static NoiseModel parse(const std::string& text);
    std::string to_string() const;

    /// Relative per-reading std-dev applied to measured currents.
    double relative_sigma() const;
};

double snr_to_sigma(double snr);

struct MeasurementRecord {
    ResponseMatrix lambda;                        // symmetrized
    std::vector<std::vector<double>> raw_columns;  // before symmetrization, conductance units
    std::uint64_t seed = 0;
    NoiseModel model;
};

MeasurementRecord simulate_measurement(const ConductanceMap& net, const NoiseModel& model, std::uint64_t seed);

/// Multiply every entry by an independent N(1, sigma) draw, then symmetrize.
ResponseMatrix apply_elementwise_noise(const ResponseMatrix& lambda, double sigma, std::uint64_t seed);

}  // namespace rnet
