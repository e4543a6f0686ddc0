#pragma once

#include <string>
#include <vector>

#include "fhodge/dec.hpp"
#include "fhodge/geometry.hpp"

namespace fhodge {

/// Writes vertices and triangles in OFF text format and vertex weights to `path + ".weights"`.
void write_off(const SimplicialMesh& mesh, const std::string& path);

/// Reads an OFF triangle mesh; vertex weights come from the `.weights` sidecar when it exists,
/// otherwise f = 0. Throws ConfigError on malformed input.
SimplicialMesh read_off(const std::string& path);

/// Coordinate-format Matrix Market export (1-based indices, full precision).
void write_matrix_market(const SparseMatrix& matrix, const std::string& path);

/// Plain CSV with a header row; values written with 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace fhodge
