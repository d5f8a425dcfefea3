#include "glk/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace glk {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view cell, Index row) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    fail(ErrorCode::BadInput, "CSV line " + std::to_string(row + 1) + ": cannot parse '" + std::string(cell) + "'");
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_csv(std::ostream& os, const Matrix& m, const std::vector<std::string>& header) {
  if (!header.empty()) {
    require(static_cast<Index>(header.size()) == m.cols(), ErrorCode::BadDimension, "header width mismatch");
    for (size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_double(m(i, j));
    os << '\n';
  }
}

void write_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header) {
  std::ostringstream os;
  write_csv(os, m, header);
  write_text(path, os.str());
}

Matrix read_csv(std::istream& is, bool has_header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  Index lineno = -1;
  bool skipped = !has_header;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!skipped) {
      skipped = true;
      continue;
    }
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      size_t comma = rest.find(',');
      row.push_back(parse_double(rest.substr(0, comma), lineno));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::BadInput, "CSV line " + std::to_string(lineno + 1) + " has " + std::to_string(row.size()) +
                                    " fields, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::BadInput, "CSV input is empty");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return m;
}

Matrix read_csv(const std::string& path, bool has_header) {
  std::istringstream is(read_text(path));
  return read_csv(is, has_header);
}

std::string graph_to_json(const Matrix& m, ShiftKind kind, bool directed, double threshold) {
  require(m.rows() == m.cols(), ErrorCode::BadDimension, "graph matrix must be square");
  const Index n = m.rows();
  const bool keep_diag = kind == ShiftKind::Generic || kind == ShiftKind::Precision;
  nlohmann::ordered_json j;
  j["n"] = n;
  j["kind"] = std::string(to_string(kind));
  j["directed"] = directed;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (Index a = 0; a < n; ++a)
    for (Index b = directed ? 0 : a; b < n; ++b) {
      if (a == b && !keep_diag) continue;
      double w = kind == ShiftKind::Laplacian ? -m(a, b) : m(a, b);
      if (std::abs(w) <= threshold || w == 0.0) continue;
      edges.push_back({{"i", a}, {"j", b}, {"w", w}});
    }
  j["edges"] = std::move(edges);
  return j.dump(1) + "\n";
}

GraphFile graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadInput, std::string("graph JSON: ") + e.what());
  }
  try {
    GraphFile g;
    const Index n = j.at("n").get<Index>();
    require(n >= 1, ErrorCode::BadDimension, "graph JSON: n must be positive");
    g.kind = j.contains("kind") ? shift_kind_from_string(j.at("kind").get<std::string>()) : ShiftKind::Adjacency;
    g.directed = j.value("directed", false);
    Matrix w = Matrix::Zero(n, n);
    for (const auto& e : j.at("edges")) {
      Index a = e.at("i").get<Index>();
      Index b = e.at("j").get<Index>();
      double v = e.contains("w") ? e.at("w").get<double>() : 1.0;
      require(a >= 0 && a < n && b >= 0 && b < n, ErrorCode::BadIndex,
              "graph JSON: edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
      require(std::isfinite(v), ErrorCode::InvalidWeight, "graph JSON: non-finite weight");
      w(a, b) = v;
      if (!g.directed) w(b, a) = v;
    }
    g.matrix = g.kind == ShiftKind::Laplacian ? laplacian_from_adjacency(w) : w;
    return g;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadInput, std::string("graph JSON: ") + e.what());
  }
}

void write_graph(const std::string& path, const Matrix& m, ShiftKind kind, bool directed, double threshold) {
  write_text(path, graph_to_json(m, kind, directed, threshold));
}

GraphFile read_graph(const std::string& path) { return graph_from_json(read_text(path)); }

Matrix read_matrix_any(const std::string& path) {
  if (ends_with(path, ".json")) return read_graph(path).matrix;
  return read_csv(path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::BadInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::BadInput, "cannot write " + path);
  out << text;
  require(static_cast<bool>(out), ErrorCode::BadInput, "write failed for " + path);
}

}  // namespace glk
