#pragma once

#include <string>
#include <vector>

#include "atomgraph/error.hpp"
#include "atomgraph/sampler.hpp"

namespace atomgraph {

/// Whole-file text I/O. Paths ending in ".gz" are written gzip-compressed;
/// reads accept both plain and gzip input. Failures raise Errc::io.
std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// "u v" per line, 0-based, in the given order.
std::string format_edge_list(const std::vector<EdgePair>& edges);
/// Header lines "# shape <id> <order> u-v ..." then "shape_id v1 ... vr" per atom.
std::string format_atom_list(const GeneratedGraph& g);
/// "vertex,type" rows with shortest round-trip decimal types.
std::string format_types_csv(const std::vector<double>& types);

/// Skips blank lines and '#' comments; InvalidArgument on malformed lines.
std::vector<EdgePair> parse_edge_list(const std::string& text);
std::vector<double> parse_types_csv(const std::string& text);

void write_edge_list(const std::string& path, const std::vector<EdgePair>& edges);
std::vector<EdgePair> read_edge_list(const std::string& path);

}  // namespace atomgraph
