#pragma once

#include "fracflow/core.hpp"
#include "fracflow/stochastic.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace fracflow {

// Shortest text that reads back to the same double.
std::string format_double(double v);

// CSV: "# grid: d,N...,L...,origin..." then x_1,...,x_d,value rows.
void write_field_csv(const std::string& path, const ScalarField& f);
// Several value columns over one grid (vector fields).
void write_fields_csv(const std::string& path, const std::vector<ScalarField>& fields);
// Reads value column `column` (0-based among the value columns).
ScalarField read_field_csv(const std::string& path, std::size_t column = 0);
std::size_t field_csv_columns(const std::string& path);
// Grid from the header line only.
Grid read_field_grid(const std::string& path);

// x_1,...,x_d rows.
void write_ensemble_csv(const std::string& path, const Ensemble& e);

// Writes to a temporary file next to `path`, then renames it into place.
void write_text_atomic(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

// foo.csv -> foo.json; anything else gets ".json" appended.
std::string sidecar_path(const std::string& data_path);

nlohmann::json grid_json(const Grid& g);
nlohmann::json frame_json(const Frame& f);
nlohmann::json jump_json(const JumpLaw& j);
nlohmann::json descriptor_json(const ProcessDescriptor& d);

}  // namespace fracflow
