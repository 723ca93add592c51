#include "cli.hpp"

#include <charconv>
#include <iomanip>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bcmsdp/certify.hpp"
#include "bcmsdp/error.hpp"
#include "bcmsdp/point_io.hpp"
#include "bcmsdp/trace.hpp"

namespace bcmsdp::cli {
namespace {

using nlohmann::ordered_json;

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("generator parameter '" + item + "' is not key=value");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

std::int64_t to_int(const std::map<std::string, std::string>& kv, const std::string& key,
                    std::optional<std::int64_t> fallback) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    if (fallback) return *fallback;
    throw ValidationError("generator needs '" + key + "='");
  }
  std::int64_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("generator parameter " + key + "='" + s + "' is not an integer");
  }
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Index resolve_rank(const RunSpec& spec, const ProblemInstance& instance) {
  const Index r = spec.r > 0 ? spec.r : default_rank(instance.n());
  if (r == 1 && !spec.allow_r1) throw ValidationError("r = 1 requires --allow-r1");
  return r;
}

std::optional<FactorPoint> initial_point(const RunSpec& spec) {
  if (spec.init_point.empty()) return std::nullopt;
  return load_point(spec.init_point, spec.allow_r1);
}

SolveResult solve_with(const std::string& method, SelectionRule rule, const RunSpec& spec,
                       const ProblemInstance& instance, Index r,
                       std::optional<FactorPoint> initial) {
  SolverConfig cfg = spec.solver;
  cfg.rule = rule;
  if (method == "bcm") return run(instance, cfg, r, std::move(initial));
  if (method == "bcm2") return run_bcm2(instance, cfg, spec.escape, r, std::move(initial));
  throw ValidationError("unknown method '" + method + "' (expected bcm or bcm2)");
}

void write_file(const std::string& path, const auto& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  writer(out);
  if (!out) throw IoError("write failed for " + path);
}

ordered_json summary_json(const SolveResult& res, const ProblemInstance& instance) {
  ordered_json j;
  j["method"] = std::get<std::string>(*res.trace.find("method"));
  j["termination"] = to_string(res.termination);
  j["f"] = res.f(instance);
  j["f_raw"] = res.f_raw;
  j["grad_metric_sq"] = res.grad_metric_sq;
  j["epochs"] = res.bcm_steps / std::max<Index>(1, instance.n()) + res.escape_steps;
  j["bcm_steps"] = res.bcm_steps;
  j["escape_steps"] = res.escape_steps;
  j["wall_seconds"] = res.wall_seconds;
  return j;
}

}  // namespace

Index default_rank(Index n) {
  Index r = static_cast<Index>(std::sqrt(2.0 * static_cast<double>(n)));
  while (r * r < 2 * n) ++r;
  while (r > 1 && (r - 1) * (r - 1) >= 2 * n) --r;
  return std::max<Index>(r, 1);
}

ProblemInstance generate(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const auto kv = parse_kv(colon == std::string::npos ? "" : spec.substr(colon + 1));
  if (kind == "gaussian") {
    return gen_gaussian(to_int(kv, "n", std::nullopt),
                        static_cast<std::uint64_t>(to_int(kv, "seed", 0)));
  }
  if (kind == "er" || kind == "erdos-renyi") {
    return gen_erdos_renyi(to_int(kv, "n", std::nullopt), to_int(kv, "edges", std::nullopt),
                           static_cast<int>(to_int(kv, "sign", -1)),
                           static_cast<std::uint64_t>(to_int(kv, "seed", 0)));
  }
  throw ValidationError("unknown generator '" + kind + "' (expected gaussian or er)");
}

ProblemInstance make_instance(const InstanceSource& source) {
  const int given = !source.generator.empty() + !source.edge_list.empty() +
                    !source.matrix_market.empty();
  if (given != 1) {
    throw ValidationError("give exactly one of --gen, --edge-list, --mtx");
  }
  if (!source.generator.empty()) return generate(source.generator);
  if (!source.edge_list.empty()) return load_instance(source.edge_list, InstanceFormat::EdgeList);
  return load_instance(source.matrix_market, InstanceFormat::MatrixMarket);
}

int cmd_gen(const RunSpec& spec, std::ostream& out) {
  const ProblemInstance instance = make_instance(spec.source);
  if (!spec.out.empty()) {
    write_file(spec.out, [&](std::ostream& os) { write_matrix_market(os, instance); });
  } else {
    write_matrix_market(out, instance);
    return kOk;
  }
  ordered_json j;
  j["n"] = instance.n();
  j["nnz"] = instance.nnz();
  j["one_norm"] = instance.one_norm();
  j["l11_norm"] = instance.l11_norm();
  j["trace_offset"] = instance.trace_offset();
  j["checksum"] = hex64(instance.checksum());
  out << j.dump() << '\n';
  return kOk;
}

int cmd_solve(const RunSpec& spec, std::ostream& out) {
  const ProblemInstance instance = make_instance(spec.source);
  const Index r = resolve_rank(spec, instance);
  const SolveResult res =
      solve_with(spec.method, spec.solver.rule, spec, instance, r, initial_point(spec));
  if (!spec.trace_jsonl.empty()) {
    write_file(spec.trace_jsonl, [&](std::ostream& os) { write_trace_jsonl(os, res.trace); });
  }
  if (!spec.trace_csv.empty()) {
    write_file(spec.trace_csv, [&](std::ostream& os) { write_trace_csv(os, res.trace); });
  }
  if (!spec.point_out.empty()) save_point(spec.point_out, res.point);
  out << summary_json(res, instance).dump() << '\n';
  return kOk;
}

int cmd_bench(const RunSpec& spec, std::ostream& out) {
  if (spec.configs.empty()) {
    throw ValidationError("bench needs at least one --config (e.g. bcm:cyclic or bcm2)");
  }
  const ProblemInstance instance = make_instance(spec.source);
  const Index r = resolve_rank(spec, instance);
  const FactorPoint shared = initial_point(spec).value_or(
      FactorPoint::random(instance.n(), r, spec.solver.seed, spec.allow_r1));

  struct Column {
    std::string label;
    SolveResult result;
  };
  std::vector<Column> columns;
  for (const auto& config : spec.configs) {
    const auto colon = config.find(':');
    const std::string method = config.substr(0, colon);
    SelectionRule rule = spec.solver.rule;
    if (colon != std::string::npos) rule = parse_rule(config.substr(colon + 1));
    std::string label = method;
    if (method == "bcm") label += std::string("_") + to_string(rule);
    columns.push_back({label, solve_with(method, rule, spec, instance, r, shared)});
  }

  std::int64_t last_epoch = 0;
  for (const auto& c : columns)
    for (const auto& rec : c.result.trace.records) last_epoch = std::max(last_epoch, rec.epoch);

  auto emit = [&](std::ostream& os) {
    os << "# schema=bench_v1\n";
    os << "# git=" << build_describe() << '\n';
    os << "# instance_checksum=" << hex64(instance.checksum()) << '\n';
    os << "# initial_checksum=" << hex64(shared.checksum()) << '\n';
    os << "# n=" << instance.n() << " r=" << r << '\n';
    for (const auto& c : columns) {
      os << "# config " << c.label << " termination=" << to_string(c.result.termination)
         << '\n';
    }
    os << "epoch";
    for (const auto& c : columns) os << ",f_" << c.label << ",gm_" << c.label;
    os << '\n';
    std::vector<std::size_t> cursor(columns.size(), 0);
    os << std::setprecision(17);
    for (std::int64_t e = 0; e <= last_epoch; ++e) {
      os << e;
      for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto& recs = columns[k].result.trace.records;
        const TraceRecord* hit = nullptr;
        while (cursor[k] < recs.size() && recs[cursor[k]].epoch <= e) {
          if (recs[cursor[k]].epoch == e) hit = &recs[cursor[k]];
          ++cursor[k];
        }
        if (hit) os << ',' << hit->f << ',' << hit->grad_metric_sq;
        else os << ",,";
      }
      os << '\n';
    }
  };
  if (!spec.out.empty()) write_file(spec.out, emit);
  else emit(out);

  if (!spec.out.empty()) {
    ordered_json j;
    j["initial_checksum"] = hex64(shared.checksum());
    for (const auto& c : columns) j["runs"][c.label] = summary_json(c.result, instance);
    out << j.dump() << '\n';
  }
  return kOk;
}

int cmd_certify(const RunSpec& spec, std::ostream& out) {
  const ProblemInstance instance = make_instance(spec.source);
  if (spec.point_path.empty()) throw ValidationError("certify needs --point");
  const FactorPoint point = load_point(spec.point_path, true);
  if (point.n() != instance.n()) {
    throw DimensionError("point has " + std::to_string(point.n()) + " rows, instance has n = " +
                         std::to_string(instance.n()));
  }
  const GradientCache cache = init_cache(instance, point);
  const Certificate cert = dual_upper_bound(instance, point, cache);

  ordered_json j;
  j["n"] = instance.n();
  j["r"] = point.r();
  j["instance_checksum"] = hex64(instance.checksum());
  auto& c = j["certificate"];
  c["f"] = cert.f;
  c["upper_bound"] = cert.upper_bound;
  c["slack"] = cert.slack;
  c["gap"] = cert.gap;
  c["trace_offset"] = instance.trace_offset();
  c["exact_eigensolve"] = cert.exact_eigensolve;
  c["lambda"] = std::vector<double>(cert.lambda.data(), cert.lambda.data() + cert.lambda.size());

  if (point.r() >= 2) {
    const ApproxReport rep = approx_report(instance, point, cache, point.r(), spec.escape.epsilon);
    auto& rj = j["report"];
    rj["epsilon"] = rep.epsilon;
    rj["f"] = rep.f;
    rj["upper_bound"] = rep.upper_bound;
    rj["ratio"] = rep.ratio;
    rj["floor_concave"] = rep.floor_concave;
    rj["floor_concave_vacuous"] = rep.floor_concave_vacuous;
    rj["floor_rank"] = rep.floor_rank;
    rj["floor_rank_vacuous"] = rep.floor_rank_vacuous;
    rj["guarantees_conditional_on_psd"] = true;
    rj["notes"] = rep.notes;
  }
  if (spec.trials > 0) {
    const Cut cut = round_cut(instance, point, spec.trials, spec.round_seed);
    auto& cj = j["cut"];
    cj["trials"] = spec.trials;
    cj["seed"] = spec.round_seed;
    cj["value"] = cut.value;
    cj["value_with_offset"] = cut.value_with_offset(instance);
    cj["signs"] = cut.signs;
  }
  out << j.dump(2) << '\n';
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank diagonally constrained SDP solver (block-coordinate maximization)"};
  app.require_subcommand(1);
  RunSpec spec;
  std::string rule = "greedy";
  std::optional<double> grad_tol;
  std::optional<Index> lanczos_iters;
  bool no_reorth = false;

  auto add_source = [&](CLI::App* sub) {
    sub->add_option("--gen", spec.source.generator,
                    "Generator: gaussian:n=N,seed=S or er:n=N,edges=M,sign=-1,seed=S");
    sub->add_option("--edge-list", spec.source.edge_list, "Edge list file 'i j w' (1-based)");
    sub->add_option("--mtx", spec.source.matrix_market, "Matrix Market coordinate file");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--r", spec.r, "Factorization rank (default ceil(sqrt(2n)))");
    sub->add_flag("--allow-r1", spec.allow_r1, "Permit rank r = 1");
    sub->add_option("--rule", rule, "Coordinate rule: uniform|importance|greedy|cyclic")
        ->check(CLI::IsMember({"uniform", "importance", "greedy", "cyclic"}));
    sub->add_option("--max-epochs", spec.solver.max_epochs, "Epoch limit");
    sub->add_option("--grad-tol", grad_tol, "Gradient metric tolerance");
    sub->add_option("--refresh-period", spec.solver.refresh_period,
                    "Epochs between full gradient-cache rebuilds");
    sub->add_option("--seed", spec.solver.seed, "Seed for the initial point and sampling");
    sub->add_option("--init", spec.init_point, "Initial point (.csv or binary)");
    sub->add_flag("--record-time", spec.solver.record_time, "Record wall-clock in traces");
    sub->add_option("--epsilon", spec.escape.epsilon, "Target accuracy for BCM2");
    sub->add_option("--delta", spec.escape.delta, "Lanczos failure probability");
    sub->add_flag("--auto-epsilon", spec.escape.auto_epsilon,
                  "epsilon = 2 U / (n (r-1)) from the running dual bound U");
    sub->add_option("--escape-retries", spec.escape.escape_retries,
                    "Extra Lanczos starts before declaring a concave point");
    sub->add_flag("--no-reorth", no_reorth, "Disable Lanczos reorthogonalization");
    sub->add_option("--lanczos-iters", lanczos_iters, "Override the Lanczos budget");
    sub->add_option("--escape-seed", spec.escape.seed, "Seed for Lanczos start vectors");
  };

  auto* gen = app.add_subcommand("gen", "Generate an instance");
  add_source(gen);
  gen->add_option("--out", spec.out, "Matrix Market output (stdout if omitted)");

  auto* solve = app.add_subcommand("solve", "Run BCM or BCM2");
  add_source(solve);
  add_solver(solve);
  solve->add_option("--method", spec.method, "bcm or bcm2")
      ->check(CLI::IsMember({"bcm", "bcm2"}));
  solve->add_option("--trace", spec.trace_jsonl, "Trace output (JSON lines)");
  solve->add_option("--trace-csv", spec.trace_csv, "Trace output (CSV)");
  solve->add_option("--point-out", spec.point_out, "Final point (.csv or binary)");

  auto* bench = app.add_subcommand("bench", "Compare methods from a shared initial point");
  add_source(bench);
  add_solver(bench);
  bench->add_option("--config", spec.configs, "method[:rule], repeatable or comma-separated")
      ->delimiter(',');
  bench->add_option("--out", spec.out, "Wide CSV output (stdout if omitted)");

  auto* certify = app.add_subcommand("certify", "Dual bound, approximation report, rounding");
  add_source(certify);
  certify->add_option("--point", spec.point_path, "Point file (.csv or binary)")->required();
  certify->add_option("--epsilon", spec.escape.epsilon, "epsilon used in the report floors");
  certify->add_option("--trials", spec.trials, "Hyperplane rounding trials (0 = skip)");
  certify->add_option("--seed", spec.round_seed, "Rounding seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    spec.solver.rule = parse_rule(rule);
    spec.solver.grad_tol = grad_tol;
    spec.escape.lanczos_iters = lanczos_iters;
    spec.escape.lanczos_reorth = !no_reorth;
    if (*gen) return cmd_gen(spec, out);
    if (*solve) return cmd_solve(spec, out);
    if (*bench) return cmd_bench(spec, out);
    if (*certify) return cmd_certify(spec, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kValidation;
}

}  // namespace bcmsdp::cli
