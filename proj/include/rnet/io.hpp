#pragma once

// Document formats exchanged by the command-line tool.
//   network:        {"schema": "rnet-network/1", "length": k, "conductances": {"S:1": g, ...}}
//   reconstruction: {"schema": "rnet-recon/1", "length": k, "edges": [...], "diagnostics": {...}}
//   delta map:      {"schema": "rnet-delta/1", "length": k, "delta": {"S:1": d, ...}}

#include <string>

#include "rnet/lattice.hpp"
#include "rnet/reconstruct.hpp"
#include "rnet/render.hpp"

namespace rnet {

std::string network_to_json(const ConductanceMap& net);
/// Rejects missing, extra or duplicate edges and nonpositive values.
ConductanceMap network_from_json(const std::string& text);

std::string reconstruction_to_json(const ReconstructionResult& result);
/// Edges and elapsed time only; diagnostics are not read back.
ReconstructionResult reconstruction_from_json(const std::string& text);
std::string reconstruction_to_csv(const ReconstructionResult& result);

std::string delta_to_json(const DeltaMap& map);
DeltaMap delta_from_json(const std::string& text);
std::string delta_to_csv(const DeltaMap& map);

std::string read_text_file(const std::string& path);
/// Write to a temporary sibling, then rename over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace rnet
