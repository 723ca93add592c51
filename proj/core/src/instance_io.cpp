#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "bcmsdp/error.hpp"
#include "bcmsdp/problem.hpp"

namespace bcmsdp {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
      ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end])))
      ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::int64_t parse_int(std::string_view tok, const std::string& src,
                       std::size_t line, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(src, line,
                     std::string("invalid ") + what + " '" + std::string(tok) + "'");
  }
  return v;
}

double parse_real(std::string_view tok, const std::string& src,
                  std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(src, line, "invalid weight '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) {
    throw ParseError(src, line, "non-finite weight '" + std::string(tok) + "'");
  }
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

ProblemInstance parse_edge_list(std::istream& in, const std::string& src) {
  std::vector<Triplet> raw;
  std::int64_t max_index = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    const auto tok = split_ws(view);
    if (tok.empty()) continue;
    if (tok.size() != 2 && tok.size() != 3) {
      throw ParseError(src, lineno, "expected 'i j w', got " +
                                        std::to_string(tok.size()) + " fields");
    }
    const std::int64_t i = parse_int(tok[0], src, lineno, "index");
    const std::int64_t j = parse_int(tok[1], src, lineno, "index");
    const double w = tok.size() == 3 ? parse_real(tok[2], src, lineno) : 1.0;
    if (i < 1 || j < 1) {
      throw ParseError(src, lineno, "index out of bounds (indices are 1-based)");
    }
    max_index = std::max({max_index, i, j});
    if (i == j) {
      raw.push_back({i - 1, i - 1, w});
    } else {
      raw.push_back({i - 1, j - 1, w});
      raw.push_back({j - 1, i - 1, w});
    }
  }
  if (max_index == 0) throw ParseError(src, lineno, "edge list has no entries");
  return ProblemInstance::from_triplets(max_index, raw);
}

ProblemInstance parse_matrix_market(std::istream& in, const std::string& src) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(src, 1, "empty file");
  ++lineno;
  const auto head = split_ws(line);
  if (head.size() != 5 || lower(head[0]) != "%%matrixmarket" ||
      lower(head[1]) != "matrix") {
    throw ParseError(src, lineno, "missing '%%MatrixMarket matrix' banner");
  }
  if (lower(head[2]) != "coordinate") {
    throw ParseError(src, lineno, "only the coordinate format is supported");
  }
  const std::string field = lower(head[3]);
  if (field != "real" && field != "integer" && field != "pattern" &&
      field != "double") {
    throw ParseError(src, lineno, "unsupported field '" + field + "'");
  }
  const std::string symmetry = lower(head[4]);
  if (symmetry != "general" && symmetry != "symmetric") {
    throw ParseError(src, lineno, "unsupported symmetry '" + symmetry + "'");
  }
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  std::int64_t rows = -1, cols = -1, declared = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 3) throw ParseError(src, lineno, "expected 'rows cols nnz'");
    rows = parse_int(tok[0], src, lineno, "row count");
    cols = parse_int(tok[1], src, lineno, "column count");
    declared = parse_int(tok[2], src, lineno, "entry count");
    break;
  }
  if (rows < 0) throw ParseError(src, lineno, "missing size line");
  if (rows != cols || rows < 1) {
    throw ParseError(src, lineno, "matrix must be square and non-empty");
  }

  std::vector<Triplet> raw;
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '%') continue;
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    const std::size_t want = pattern ? 2 : 3;
    if (tok.size() != want) {
      throw ParseError(src, lineno, "expected " + std::to_string(want) + " fields");
    }
    const std::int64_t i = parse_int(tok[0], src, lineno, "index");
    const std::int64_t j = parse_int(tok[1], src, lineno, "index");
    const double w = pattern ? 1.0 : parse_real(tok[2], src, lineno);
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw ParseError(src, lineno, "index out of bounds");
    }
    raw.push_back({i - 1, j - 1, w});
    if (symmetric && i != j) raw.push_back({j - 1, i - 1, w});
    ++seen;
  }
  if (seen != declared) {
    throw ParseError(src, lineno, "declared " + std::to_string(declared) +
                                      " entries, found " + std::to_string(seen));
  }
  return ProblemInstance::from_triplets(rows, raw);
}

}  // namespace

ProblemInstance parse_instance(std::istream& in, InstanceFormat format,
                               const std::string& source) {
  switch (format) {
    case InstanceFormat::MatrixMarket:
      return parse_matrix_market(in, source);
    case InstanceFormat::EdgeList:
      return parse_edge_list(in, source);
  }
  throw ValidationError("unknown instance format");
}

ProblemInstance load_instance(const std::filesystem::path& path,
                              InstanceFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_instance(in, format, path.string());
}

void write_matrix_market(std::ostream& out, const ProblemInstance& instance) {
  const Index n = instance.n();
  const auto& a = instance.matrix();
  std::int64_t lower_nnz = 0;
  for (Index i = 0; i < n; ++i)
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      if (it.col() < i) ++lower_nnz;
  const bool write_diag = instance.trace_offset() != 0.0;
  if (write_diag) lower_nnz += n;

  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << n << ' ' << n << ' ' << lower_nnz << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const double diag = instance.trace_offset() / static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it)
      if (it.col() < i) out << i + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    if (write_diag) out << i + 1 << ' ' << i + 1 << ' ' << diag << '\n';
  }
}

}  // namespace bcmsdp
