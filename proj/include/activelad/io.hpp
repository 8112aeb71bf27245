#pragma once

// Plain-text and JSON formats used by the command-line tools.
//
//   design matrix: headerless CSV of reals, one row per line
//   labels:        one real per line
//   numbers are written with 17 significant digits, so files round-trip
//   bit-exactly.

#include <cstddef>
#include <string>
#include <string_view>

#include <json.hpp>

#include "activelad/l1solve.hpp"
#include "activelad/linalg.hpp"
#include "activelad/sketch.hpp"

namespace activelad {

using Json = nlohmann::json;

std::string format_double(double v);

/// Parses one label line. Errors name the file and line number.
double parse_label_line(std::string_view line, const std::string& path, std::size_t line_no);

Matrix read_matrix_csv(const std::string& path);
Vector read_vector(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& x);
void write_vector(const std::string& path, std::span<const double> v);

void write_json(const std::string& path, const Json& j);
Json read_json(const std::string& path);

/// {"n", "N", "seed", "stream", "substream", "draws": [[i, scale], ...]}
Json sketch_to_json(const Sketch& s);
Sketch sketch_from_json(const Json& j);

Json weights_to_json(const WeightVector& w);
WeightVector weights_from_json(const Json& j);

Json solution_to_json(const LadSolution& s);

}  // namespace activelad
