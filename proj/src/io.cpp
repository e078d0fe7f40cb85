#include "rnet/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace rnet {

using nlohmann::json;

namespace {

constexpr const char* kNetworkSchema = "rnet-network/1";
constexpr const char* kReconSchema = "rnet-recon/1";
constexpr const char* kDeltaSchema = "rnet-delta/1";

// Parse, rejecting duplicate keys inside the object stored under `section`.
json parse_strict(const std::string& text, const std::string& section) {
    std::string top_key;
    std::set<std::string> seen;
    std::string duplicate;
    auto cb = [&](int depth, json::parse_event_t ev, json& parsed) {
        if (ev == json::parse_event_t::key) {
            const auto key = parsed.get<std::string>();
            if (depth == 1) {
                top_key = key;
            } else if (depth == 2 && top_key == section && !seen.insert(key).second && duplicate.empty()) {
                duplicate = key;
            }
        }
        return true;
    };
    json doc;
    try {
        doc = json::parse(text, cb);
    } catch (const json::parse_error& e) {
        throw InvalidInput(fmt::format("malformed JSON: {}", e.what()));
    }
    if (!duplicate.empty()) throw InvalidInput(fmt::format("duplicate entry '{}' in '{}'", duplicate, section));
    if (!doc.is_object()) throw InvalidInput("document is not a JSON object");
    return doc;
}

void expect_schema(const json& doc, const char* schema) {
    if (!doc.contains("schema") || doc["schema"] != schema)
        throw InvalidInput(fmt::format("expected schema '{}'", schema));
}

int read_length(const json& doc) {
    if (!doc.contains("length") || !doc["length"].is_number_integer())
        throw InvalidInput("missing integer 'length'");
    return doc["length"].get<int>();
}

double read_number(const json& v, const std::string& what) {
    if (!v.is_number()) throw InvalidInput(fmt::format("{} is not a number", what));
    return v.get<double>();
}

// Fill catalog-ordered values from an {"<edge-id>": number} object.
std::vector<double> read_edge_object(const json& obj, const LatticeSpec& spec, const std::string& section) {
    if (!obj.is_object()) throw InvalidInput(fmt::format("'{}' must be an object", section));
    const auto n = static_cast<std::size_t>(spec.edge_count());
    std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<bool> present(n, false);
    for (const auto& [key, value] : obj.items()) {
        const EdgeId e = EdgeId::parse(key);
        if (!spec.contains(e)) throw InvalidInput(fmt::format("edge {} is not part of a length-{} lattice", key, spec.length()));
        const std::size_t i = spec.edge_index(e);
        values[i] = read_number(value, key);
        present[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!present[i]) throw InvalidInput(fmt::format("edge {} missing", spec.edges()[i].to_string()));
    return values;
}

// Non-finite values have no JSON literal; write them as null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string network_to_json(const ConductanceMap& net) {
    json doc;
    doc["schema"] = kNetworkSchema;
    doc["length"] = net.spec().length();
    json g = json::object();
    for (std::size_t i = 0; i < net.values().size(); ++i) g[net.spec().edges()[i].to_string()] = net.values()[i];
    doc["conductances"] = g;
    return doc.dump(2) + "\n";
}

ConductanceMap network_from_json(const std::string& text) {
    const json doc = parse_strict(text, "conductances");
    expect_schema(doc, kNetworkSchema);
    const LatticeSpec spec(read_length(doc));
    if (!doc.contains("conductances")) throw InvalidInput("missing 'conductances'");
    return ConductanceMap(spec, read_edge_object(doc["conductances"], spec, "conductances"));
}

std::string reconstruction_to_json(const ReconstructionResult& result) {
    json doc;
    doc["schema"] = kReconSchema;
    doc["length"] = result.spec.length();
    json edges = json::array();
    for (std::size_t i = 0; i < result.conductances.size(); ++i) {
        const double g = result.conductances[i];
        edges.push_back({{"id", result.spec.edges()[i].to_string()},
                         {"conductance", number_or_null(g)},
                         {"resistance", number_or_null(1.0 / g)}});
    }
    doc["edges"] = edges;
    json layers = json::array();
    for (const auto& d : result.report.layers) {
        json cond = json::array();
        for (double c : d.condition) cond.push_back(number_or_null(c));
        layers.push_back({{"layer", d.layer},
                          {"length", d.length},
                          {"condition", cond},
                          {"residualMax", number_or_null(d.residual_max)},
                          {"asymmetry", number_or_null(d.asymmetry)},
                          {"nonpositive", d.nonpositive}});
    }
    doc["diagnostics"] = {{"layers", layers}, {"elapsedMs", result.elapsed_ms}, {"warnings", result.report.warnings}};
    return doc.dump(2) + "\n";
}

ReconstructionResult reconstruction_from_json(const std::string& text) {
    const json doc = parse_strict(text, "");
    expect_schema(doc, kReconSchema);
    ReconstructionResult r;
    r.spec = LatticeSpec(read_length(doc));
    if (!doc.contains("edges") || !doc["edges"].is_array()) throw InvalidInput("missing 'edges' array");
    json by_id = json::object();
    std::set<std::string> seen;
    for (const auto& e : doc["edges"]) {
        if (!e.is_object() || !e.contains("id") || !e["id"].is_string()) throw InvalidInput("edge entry without 'id'");
        const auto id = e["id"].get<std::string>();
        if (!seen.insert(id).second) throw InvalidInput(fmt::format("duplicate entry '{}' in 'edges'", id));
        if (!e.contains("conductance")) throw InvalidInput(fmt::format("edge {} has no conductance", id));
        by_id[id] = e["conductance"].is_null() ? json(std::numeric_limits<double>::quiet_NaN()) : e["conductance"];
    }
    r.conductances = read_edge_object(by_id, r.spec, "edges");
    if (doc.contains("diagnostics") && doc["diagnostics"].contains("elapsedMs"))
        r.elapsed_ms = read_number(doc["diagnostics"]["elapsedMs"], "elapsedMs");
    return r;
}

std::string reconstruction_to_csv(const ReconstructionResult& result) {
    std::string out = "id,conductance,resistance\n";
    for (std::size_t i = 0; i < result.conductances.size(); ++i) {
        const double g = result.conductances[i];
        out += fmt::format("{},{:.17g},{:.17g}\n", result.spec.edges()[i].to_string(), g, 1.0 / g);
    }
    return out;
}

std::string delta_to_json(const DeltaMap& map) {
    json doc;
    doc["schema"] = kDeltaSchema;
    doc["length"] = map.spec.length();
    json d = json::object();
    for (std::size_t i = 0; i < map.delta.size(); ++i) d[map.spec.edges()[i].to_string()] = map.delta[i];
    doc["delta"] = d;
    return doc.dump(2) + "\n";
}

DeltaMap delta_from_json(const std::string& text) {
    const json doc = parse_strict(text, "delta");
    expect_schema(doc, kDeltaSchema);
    const LatticeSpec spec(read_length(doc));
    if (!doc.contains("delta")) throw InvalidInput("missing 'delta'");
    DeltaMap map{spec, read_edge_object(doc["delta"], spec, "delta")};
    for (double d : map.delta)
        if (!std::isfinite(d)) throw InvalidInput("delta values must be finite");
    return map;
}

std::string delta_to_csv(const DeltaMap& map) {
    std::string out = "id,delta\n";
    for (std::size_t i = 0; i < map.delta.size(); ++i)
        out += fmt::format("{},{:.17g}\n", map.spec.edges()[i].to_string(), map.delta[i]);
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError(fmt::format("failed reading '{}'", path));
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        out.flush();
        if (!out) throw IoError(fmt::format("failed writing '{}'", tmp.string()));
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError(fmt::format("cannot move output into '{}'", path));
    }
}

}  // namespace rnet
