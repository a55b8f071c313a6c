#pragma once

// File formats.
//
// CSV, single matrix: m lines of 2c comma-separated numbers,
//   Re a_i1, Im a_i1, Re a_i2, Im a_i2, ...
// CSV, stacked draws: the same with a leading draw_index column, draws in
//   order, m lines per draw. No header. Lines starting with '#' and blank
//   lines are ignored on input.
// JSON, single matrix: [[[re, im], ...], ...] row-major.
// JSON, stacked draws: an array of single-matrix values.
//
// Numbers are written with 17 significant digits so values round-trip exactly.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmacg/linalg.hpp"

namespace cmacg::io {

enum class Format { Csv, Json };

Format parse_format(std::string_view name);

std::string format_double(double x);

std::string matrix_to_csv(const ComplexMatrix& a);
ComplexMatrix matrix_from_csv(std::string_view text);

std::string draws_to_csv(const std::vector<ComplexMatrix>& draws);
/// Parses stacked draws of m x r matrices; rows must carry consecutive
/// draw indices starting at 0.
std::vector<ComplexMatrix> draws_from_csv(std::string_view text, std::size_t m, std::size_t r);

nlohmann::json matrix_to_json(const ComplexMatrix& a);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

std::string draws_to_json(const std::vector<ComplexMatrix>& draws);
std::vector<ComplexMatrix> draws_from_json(std::string_view text, std::size_t m, std::size_t r);

std::string write_matrix(const ComplexMatrix& a, Format f);
ComplexMatrix read_matrix(std::string_view text, Format f);
std::string write_draws(const std::vector<ComplexMatrix>& draws, Format f);
std::vector<ComplexMatrix> read_draws(std::string_view text, Format f, std::size_t m, std::size_t r);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Format implied by a file extension (.json -> Json, anything else Csv).
Format format_from_extension(const std::filesystem::path& path);

} // namespace cmacg::io
