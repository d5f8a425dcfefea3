#pragma once

// File formats: CSV matrices (row = vertex, column = sample) and JSON graphs
// and reports.

#include <iosfwd>
#include <string>
#include <vector>

#include "glk/graph.hpp"

namespace glk {

/// Values are written with 17 significant digits so a read reproduces them
/// exactly.
void write_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& header = {});
void write_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header = {});

/// With has_header the first line is skipped. Blank lines are ignored.
Matrix read_csv(std::istream& is, bool has_header = false);
Matrix read_csv(const std::string& path, bool has_header = false);

struct GraphFile {
  Matrix matrix;
  ShiftKind kind = ShiftKind::Adjacency;
  bool directed = false;
};

/// {"n", "kind", "directed", "edges": [{"i", "j", "w"}]}. Laplacians list
/// adjacency weights; generic and precision matrices list diagonal entries as
/// i == j edges.
std::string graph_to_json(const Matrix& m, ShiftKind kind, bool directed = false, double threshold = 0.0);
GraphFile graph_from_json(const std::string& text);

void write_graph(const std::string& path, const Matrix& m, ShiftKind kind, bool directed = false,
                 double threshold = 0.0);
GraphFile read_graph(const std::string& path);

/// Reads either a graph JSON file (by extension .json) or a dense CSV matrix.
Matrix read_matrix_any(const std::string& path);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace glk
