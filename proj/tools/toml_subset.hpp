#pragma once

#include <string>

#include "json.hpp"

namespace atomgraph::cli {

/// Parses the TOML subset used by family configs into a JSON object tree:
/// [table] and [[array-of-tables]] headers, bare or quoted keys, basic and
/// literal strings, integers, floats (inf/nan included), booleans, arrays
/// (nested, multi-line) and inline tables. Dotted keys, dates and multi-line
/// strings are rejected. Errors are InvalidArgument naming the line.
nlohmann::json parse_toml(const std::string& text);

}  // namespace atomgraph::cli
