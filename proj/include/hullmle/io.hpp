#pragma once

// Text formats: headerless CSV matrices, edge-list graphs, dyad masks.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hullmle/expfam.hpp"
#include "hullmle/numerics.hpp"

namespace hullmle {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A file that cannot be opened.
class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view tok, const std::string& source, std::size_t line) {
  tok = trim(tok);
  if (tok.empty()) throw ParseError(source, line, "empty field");
  if (tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(source, line, "not a number: '" + std::string(tok) + "'");
  if (!std::isfinite(v)) throw ParseError(source, line, "non-finite value '" + std::string(tok) + "'");
  return v;
}

inline long long parse_integer(std::string_view tok, const std::string& source, std::size_t line) {
  tok = trim(tok);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(source, line, "not an integer: '" + std::string(tok) + "'");
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

/// Rows of comma-separated decimals, no header. Blank lines are skipped;
/// every other line must have the same number of fields.
inline Matrix read_matrix_csv(std::istream& in, const std::string& source = "<input>") {
  Matrix m;
  std::string line;
  std::size_t lineno = 0, cols = 0;
  Vector row;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = detail::trim(line);
    if (s.empty()) continue;
    row.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      row.push_back(detail::parse_double(s.substr(start, comma - start), source, lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (m.rows() == 0) {
      cols = row.size();
      m = Matrix(0, cols);
    } else if (row.size() != cols) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(cols) + " fields, found " + std::to_string(row.size()));
    }
    m.append_row(row);
  }
  if (m.rows() == 0) throw ParseError(source, lineno, "no data rows");
  return m;
}

inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  return read_matrix_csv(in, path);
}

/// 17 significant digits, so values re-read exactly.
inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

/// First non-blank line: vertex count n. Each further non-blank line: an
/// edge "i j" with 1-based vertices.
inline Graph read_graph(std::istream& in, const std::string& source = "<graph>") {
  std::string line;
  std::size_t lineno = 0;
  Graph g;
  bool have_n = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (!have_n) {
      if (tok.size() != 1) throw ParseError(source, lineno, "first line must hold the vertex count");
      const long long n = detail::parse_integer(tok[0], source, lineno);
      if (n < 2) throw ParseError(source, lineno, "need at least two vertices");
      if (n > 100000) throw ParseError(source, lineno, "vertex count too large");
      g = Graph(static_cast<std::size_t>(n));
      have_n = true;
      continue;
    }
    if (tok.size() != 2) throw ParseError(source, lineno, "expected an edge 'i j'");
    const long long i = detail::parse_integer(tok[0], source, lineno);
    const long long j = detail::parse_integer(tok[1], source, lineno);
    const auto n = static_cast<long long>(g.vertices());
    if (i < 1 || j < 1 || i > n || j > n) throw ParseError(source, lineno, "vertex out of range 1.." + std::to_string(n));
    if (i == j) throw ParseError(source, lineno, "self-loop");
    if (g.has_edge(i - 1, j - 1)) throw ParseError(source, lineno, "duplicate edge");
    g.set_edge(i - 1, j - 1, true);
  }
  if (!have_n) throw ParseError(source, lineno, "empty graph file");
  return g;
}

inline Graph read_graph(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  return read_graph(in, path);
}

/// Lines "i j v" (1-based, v in {0, 1}) list the observed dyads and their
/// values; unlisted dyads are missing. Values must agree with y.
inline ObservationMask read_mask(std::istream& in, const Graph& y, const std::string& source = "<mask>") {
  std::vector<std::uint8_t> obs(y.dyads(), 0);
  std::string line;
  std::size_t lineno = 0;
  const auto n = static_cast<long long>(y.vertices());
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3) throw ParseError(source, lineno, "expected 'i j value'");
    const long long i = detail::parse_integer(tok[0], source, lineno);
    const long long j = detail::parse_integer(tok[1], source, lineno);
    const long long v = detail::parse_integer(tok[2], source, lineno);
    if (i < 1 || j < 1 || i > n || j > n) throw ParseError(source, lineno, "vertex out of range 1.." + std::to_string(n));
    if (i == j) throw ParseError(source, lineno, "self-loop");
    if (v != 0 && v != 1) throw ParseError(source, lineno, "value must be 0 or 1");
    const std::size_t k = y.dyad_index(i - 1, j - 1);
    if (obs[k]) throw ParseError(source, lineno, "dyad listed twice");
    if (y.has_edge(i - 1, j - 1) != (v == 1)) throw ParseError(source, lineno, "value disagrees with the graph");
    obs[k] = 1;
  }
  return ObservationMask(y, std::move(obs));
}

inline ObservationMask read_mask(const std::string& path, const Graph& y) {
  std::ifstream in = detail::open_input(path);
  return read_mask(in, y, path);
}

}  // namespace hullmle
