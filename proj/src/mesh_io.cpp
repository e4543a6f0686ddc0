#include "fhodge/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "fhodge/errors.hpp"

namespace fhodge {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  return out;
}

// Next non-empty, non-comment line.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

}  // namespace

void write_off(const SimplicialMesh& mesh, const std::string& path) {
  auto out = open_out(path);
  out << "OFF\n" << mesh.vertex_count() << ' ' << mesh.face_count() << " 0\n";
  for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  auto weights = open_out(path + ".weights");
  for (double w : mesh.vertex_weight) weights << w << '\n';
}

SimplicialMesh read_off(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  if (!next_line(in, line) || line.rfind("OFF", 0) != 0) throw ConfigError(path + ": missing OFF header");
  if (!next_line(in, line)) throw ConfigError(path + ": missing counts line");
  std::size_t nv = 0, nf = 0;
  {
    std::istringstream counts(line);
    if (!(counts >> nv >> nf)) throw ConfigError(path + ": malformed counts line");
  }
  std::vector<Eigen::Vector3d> vertices(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (!next_line(in, line)) throw ConfigError(path + ": truncated vertex list");
    std::istringstream s(line);
    if (!(s >> vertices[i].x() >> vertices[i].y() >> vertices[i].z()))
      throw ConfigError(path + ": malformed vertex " + std::to_string(i));
  }
  std::vector<std::array<int, 3>> triangles(nf);
  for (std::size_t i = 0; i < nf; ++i) {
    if (!next_line(in, line)) throw ConfigError(path + ": truncated face list");
    std::istringstream s(line);
    int n = 0;
    auto& t = triangles[i];
    if (!(s >> n >> t[0] >> t[1] >> t[2]) || n != 3) throw ConfigError(path + ": face " + std::to_string(i) + " is not a triangle");
    for (int c : t)
      if (c < 0 || static_cast<std::size_t>(c) >= nv) throw ConfigError(path + ": face " + std::to_string(i) + " index out of range");
  }
  std::vector<double> weights(nv, 0.0);
  std::ifstream win(path + ".weights");
  if (win) {
    for (std::size_t i = 0; i < nv; ++i)
      if (!(win >> weights[i])) throw ConfigError(path + ".weights: expected " + std::to_string(nv) + " values");
  }
  return make_euclidean_mesh(std::move(vertices), std::move(triangles), std::move(weights));
}

void write_matrix_market(const SparseMatrix& matrix, const std::string& path) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows() << ' ' << matrix.cols() << ' ' << matrix.nonZeros() << '\n';
  for (Eigen::Index c = 0; c < matrix.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(matrix, c); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

}  // namespace fhodge
