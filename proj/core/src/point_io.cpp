#include "bcmsdp/point_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "bcmsdp/error.hpp"

namespace bcmsdp {
namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(b[k], b[sizeof(T) - 1 - k]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <typename T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw IoError("truncated binary point file");
  }
  return to_little(v);
}

bool has_csv_extension(const std::filesystem::path& path) {
  return path.extension() == ".csv";
}

}  // namespace

void write_point_binary(std::ostream& out, const FactorPoint& point) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(point.n()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(point.r()));
  for (Index i = 0; i < point.n(); ++i)
    for (Index k = 0; k < point.r(); ++k) put<double>(out, point.matrix()(i, k));
}

FactorPoint read_point_binary(std::istream& in, bool allow_rank_one) {
  const auto n = get<std::uint64_t>(in);
  const auto r = get<std::uint64_t>(in);
  if (n == 0 || r == 0 || n > (1ULL << 32) || r > (1ULL << 20)) {
    throw IoError("implausible point dimensions in binary header");
  }
  Matrix m(static_cast<Index>(n), static_cast<Index>(r));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k) m(i, k) = get<double>(in);
  return FactorPoint(std::move(m), allow_rank_one);
}

void write_point_csv(std::ostream& out, const FactorPoint& point) {
  char buf[64];
  for (Index i = 0; i < point.n(); ++i) {
    for (Index k = 0; k < point.r(); ++k) {
      if (k) out << ',';
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, point.matrix()(i, k));
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

FactorPoint read_point_csv(std::istream& in, bool allow_rank_one) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      std::size_t a = pos, b = end;
      while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
      while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(line.data() + a, line.data() + b, v);
      if (ec != std::errc() || ptr != line.data() + b || a == b) {
        throw ParseError("<point csv>", lineno, "invalid number");
      }
      row.push_back(v);
      pos = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("<point csv>", lineno, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty point file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k)
      m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  return FactorPoint(std::move(m), allow_rank_one);
}

void save_point(const std::filesystem::path& path, const FactorPoint& point) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  if (has_csv_extension(path)) write_point_csv(out, point);
  else write_point_binary(out, point);
  if (!out) throw IoError("write failed for " + path.string());
}

FactorPoint load_point(const std::filesystem::path& path, bool allow_rank_one) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return has_csv_extension(path) ? read_point_csv(in, allow_rank_one)
                                 : read_point_binary(in, allow_rank_one);
}

}  // namespace bcmsdp
