#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bcmsdp {

enum class StepKind { Bcm, Escape };

const char* to_string(StepKind kind);

/// One trace row. BCM rows summarize the coordinate steps since the
/// previous row (normally one epoch of n steps); escape rows describe a
/// single second-order step.
struct TraceRecord {
  std::int64_t epoch = 0;         // completed epochs, bcm_steps / n + escape_steps
  std::int64_t bcm_steps = 0;     // cumulative coordinate steps
  std::int64_t escape_steps = 0;  // cumulative second-order steps
  StepKind kind = StepKind::Bcm;
  double f = 0.0;                 // objective including trace offset
  double f_raw = 0.0;             // factorized objective <A, Sigma Sigma^T>
  double grad_metric_sq = 0.0;
  double ascent = 0.0;            // f gained by the steps this row covers
  std::int64_t steps = 0;         // coordinate steps covered by this row
  std::int64_t idle_steps = 0;    // selections with zero ascent
  std::int64_t distinct_coords = 0;
  double rayleigh = 0.0;          // escape rows: <u, Hess f[u]> of the direction
  std::int64_t lanczos_iters = 0; // escape rows
  std::optional<double> wall_seconds;
};

/// Ordered header fields; values are strings, integers or reals.
using HeaderValue = std::variant<std::string, std::int64_t, double, bool>;

struct SolveTrace {
  std::vector<std::pair<std::string, HeaderValue>> header;
  std::vector<TraceRecord> records;

  void set(const std::string& key, HeaderValue value);
  const HeaderValue* find(const std::string& key) const;
};

inline constexpr const char* kTraceSchema = "trace_v1";

/// First line is the header object {"schema": "trace_v1", ...}; each record
/// follows as one JSON object per line.
void write_trace_jsonl(std::ostream& out, const SolveTrace& trace);

/// Header fields as '# key=value' comment lines, then one CSV row per record.
void write_trace_csv(std::ostream& out, const SolveTrace& trace);

/// Inverse of write_trace_jsonl.
SolveTrace read_trace_jsonl(std::istream& in);

/// Build identifier recorded in trace headers.
const char* build_describe();

}  // namespace bcmsdp
