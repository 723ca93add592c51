#include "bcmsdp/trace.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "bcmsdp/error.hpp"

#ifndef BCMSDP_GIT_DESCRIBE
#define BCMSDP_GIT_DESCRIBE "unknown"
#endif

namespace bcmsdp {
namespace {

using nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

ordered_json header_value(const HeaderValue& v) {
  return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

std::string header_text(const HeaderValue& v) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return shortest(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, v);
}

ordered_json record_json(const TraceRecord& r) {
  ordered_json j;
  j["epoch"] = r.epoch;
  j["bcm_steps"] = r.bcm_steps;
  j["escape_steps"] = r.escape_steps;
  j["kind"] = to_string(r.kind);
  j["f"] = r.f;
  j["f_raw"] = r.f_raw;
  j["grad_metric_sq"] = r.grad_metric_sq;
  j["ascent"] = r.ascent;
  j["steps"] = r.steps;
  j["idle_steps"] = r.idle_steps;
  j["distinct_coords"] = r.distinct_coords;
  j["rayleigh"] = r.rayleigh;
  j["lanczos_iters"] = r.lanczos_iters;
  if (r.wall_seconds) j["wall_seconds"] = *r.wall_seconds;
  return j;
}

}  // namespace

const char* to_string(StepKind kind) {
  return kind == StepKind::Bcm ? "bcm" : "escape";
}

const char* build_describe() { return BCMSDP_GIT_DESCRIBE; }

void SolveTrace::set(const std::string& key, HeaderValue value) {
  for (auto& [k, v] : header) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  header.emplace_back(key, std::move(value));
}

const HeaderValue* SolveTrace::find(const std::string& key) const {
  for (const auto& [k, v] : header)
    if (k == key) return &v;
  return nullptr;
}

void write_trace_jsonl(std::ostream& out, const SolveTrace& trace) {
  ordered_json head;
  head["schema"] = kTraceSchema;
  head["type"] = "header";
  for (const auto& [k, v] : trace.header) head[k] = header_value(v);
  out << head.dump() << '\n';
  for (const auto& r : trace.records) out << record_json(r).dump() << '\n';
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace) {
  out << "# schema=" << kTraceSchema << '\n';
  for (const auto& [k, v] : trace.header) out << "# " << k << '=' << header_text(v) << '\n';
  const bool timed = !trace.records.empty() && trace.records.front().wall_seconds;
  out << "epoch,bcm_steps,escape_steps,kind,f,f_raw,grad_metric_sq,ascent,steps,"
         "idle_steps,distinct_coords,rayleigh,lanczos_iters";
  if (timed) out << ",wall_seconds";
  out << '\n';
  for (const auto& r : trace.records) {
    out << r.epoch << ',' << r.bcm_steps << ',' << r.escape_steps << ','
        << to_string(r.kind) << ',' << shortest(r.f) << ',' << shortest(r.f_raw) << ','
        << shortest(r.grad_metric_sq) << ',' << shortest(r.ascent) << ',' << r.steps
        << ',' << r.idle_steps << ',' << r.distinct_coords << ','
        << shortest(r.rayleigh) << ',' << r.lanczos_iters;
    if (timed) out << ',' << shortest(r.wall_seconds.value_or(0.0));
    out << '\n';
  }
}

SolveTrace read_trace_jsonl(std::istream& in) {
  SolveTrace trace;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error& e) {
      throw ParseError("<trace>", lineno, e.what());
    }
    if (!have_header) {
      if (j.value("schema", "") != kTraceSchema) {
        throw ParseError("<trace>", lineno, "expected a trace_v1 header");
      }
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "schema" || it.key() == "type") continue;
        const auto& v = it.value();
        if (v.is_boolean()) trace.set(it.key(), v.get<bool>());
        else if (v.is_number_integer()) trace.set(it.key(), v.get<std::int64_t>());
        else if (v.is_number()) trace.set(it.key(), v.get<double>());
        else if (v.is_string()) trace.set(it.key(), v.get<std::string>());
        else trace.set(it.key(), v.dump());
      }
      have_header = true;
      continue;
    }
    TraceRecord r;
    try {
      r.epoch = j.at("epoch").get<std::int64_t>();
      r.bcm_steps = j.at("bcm_steps").get<std::int64_t>();
      r.escape_steps = j.at("escape_steps").get<std::int64_t>();
      r.kind = j.at("kind").get<std::string>() == "escape" ? StepKind::Escape : StepKind::Bcm;
      r.f = j.at("f").get<double>();
      r.f_raw = j.at("f_raw").get<double>();
      r.grad_metric_sq = j.at("grad_metric_sq").get<double>();
      r.ascent = j.at("ascent").get<double>();
      r.steps = j.at("steps").get<std::int64_t>();
      r.idle_steps = j.at("idle_steps").get<std::int64_t>();
      r.distinct_coords = j.at("distinct_coords").get<std::int64_t>();
      r.rayleigh = j.at("rayleigh").get<double>();
      r.lanczos_iters = j.at("lanczos_iters").get<std::int64_t>();
      if (j.contains("wall_seconds")) r.wall_seconds = j["wall_seconds"].get<double>();
    } catch (const ordered_json::exception& e) {
      throw ParseError("<trace>", lineno, e.what());
    }
    trace.records.push_back(r);
  }
  if (!have_header) throw ParseError("<trace>", lineno, "empty trace");
  return trace;
}

}  // namespace bcmsdp
