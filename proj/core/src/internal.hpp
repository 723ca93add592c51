#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>

#include "bcmsdp/point.hpp"
#include "bcmsdp/problem.hpp"
#include "bcmsdp/trace.hpp"

namespace bcmsdp::detail {

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void describe_run(SolveTrace& trace, const ProblemInstance& instance,
                         const FactorPoint& initial) {
  trace.set("git", std::string(build_describe()));
  trace.set("n", static_cast<std::int64_t>(instance.n()));
  trace.set("r", static_cast<std::int64_t>(initial.r()));
  trace.set("nnz", instance.nnz());
  trace.set("one_norm", instance.one_norm());
  trace.set("trace_offset", instance.trace_offset());
  trace.set("instance_checksum", hex64(instance.checksum()));
  trace.set("initial_checksum", hex64(initial.checksum()));
}

/// Elapsed seconds since construction, or nothing when timing is disabled.
class TraceClock {
 public:
  explicit TraceClock(bool enabled)
      : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}

  std::optional<double> now() const {
    if (!enabled_) return std::nullopt;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace bcmsdp::detail
