#pragma once

#include <filesystem>
#include <iosfwd>

#include "bcmsdp/point.hpp"

namespace bcmsdp {

/// Little-endian u64 n, u64 r, then n*r f64 in row-major order.
void write_point_binary(std::ostream& out, const FactorPoint& point);
FactorPoint read_point_binary(std::istream& in, bool allow_rank_one = false);

/// One row per line, r comma-separated reals, shortest round-trip form.
void write_point_csv(std::ostream& out, const FactorPoint& point);
FactorPoint read_point_csv(std::istream& in, bool allow_rank_one = false);

/// Format chosen by extension: ".csv" is text, anything else binary.
void save_point(const std::filesystem::path& path, const FactorPoint& point);
FactorPoint load_point(const std::filesystem::path& path, bool allow_rank_one = false);

}  // namespace bcmsdp
