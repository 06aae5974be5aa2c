#pragma once

#include <string>

#include "causal/dataset.hpp"

namespace causal {

/// Reads a header + numeric-body CSV. ParseError messages carry the
/// offending line (1-based) and column for ragged rows, non-numeric cells,
/// and duplicate headers.
Dataset read_csv(const std::string& path);

/// Parses CSV text; `origin` names the source in error messages.
Dataset parse_csv(const std::string& text, const std::string& origin = "<string>");

/// Writes with 17 significant digits so a read-back reproduces the values
/// bit for bit.
void write_csv(const Dataset& data, const std::string& path);
std::string csv_to_string(const Dataset& data);

}  // namespace causal
