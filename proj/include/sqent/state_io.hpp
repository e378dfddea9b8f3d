#pragma once

// JSON state-file format:
//   {"layout":[["A",2],["B",2]], "matrix":[[[re,im],...],...], "weight":1.0}
// Matrix rows are row-major over the listed factor order; doubles round-trip
// bit-exactly.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sqent/state.hpp"

namespace sqent {

nlohmann::json to_json(const DensityOperator& omega);
DensityOperator density_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const PureStateVector& psi);

DensityOperator load_state(const std::filesystem::path& path);
void save_state(const std::filesystem::path& path, const DensityOperator& omega);

/// Number formatting shared by every JSON/CSV emitter: finite values as-is,
/// infinities as the string "inf"; NaN is rejected.
nlohmann::json json_number(double value);
/// Shortest round-trip decimal form for CSV cells, "inf" for infinities.
std::string csv_number(double value);

/// Writes a whole file; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace sqent
