#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "invclt/array_core.hpp"

namespace invclt {

/// n lines of n comma-separated decimals. Blank lines are ignored.
RawMatrix parse_matrix_csv(std::string_view text);

/// {"n": int, "entries": [[...], ...]}
RawMatrix parse_matrix_json(std::string_view text);

/// Dispatches on extension (.json / anything else as CSV); a leading '{'
/// also selects JSON.
RawMatrix read_matrix(const std::filesystem::path& path);

std::string matrix_to_csv(const SquareMatrix& m);

nlohmann::json to_json(const MomentSummary& m);

}  // namespace invclt
