#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcmsdp/bcm.hpp"
#include "bcmsdp/escape.hpp"
#include "bcmsdp/problem.hpp"

namespace bcmsdp::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kIo = 3, kNumerical = 4 };

/// Where the cost matrix comes from: exactly one of the three is set.
struct InstanceSource {
  std::string generator;  // "gaussian:n=500,seed=1" or "er:n=10,edges=15,sign=-1,seed=2"
  std::string edge_list;
  std::string matrix_market;
};

struct RunSpec {
  std::string subcommand;
  InstanceSource source;
  Index r = 0;  // 0 selects ceil(sqrt(2n))
  bool allow_r1 = false;
  std::string method = "bcm";
  SolverConfig solver;
  EscapeConfig escape;
  std::vector<std::string> configs;  // bench: "bcm:cyclic", "bcm2", ...
  std::string init_point;
  std::string point_path;  // certify input
  std::string trace_jsonl;
  std::string trace_csv;
  std::string point_out;
  std::string out;         // gen: matrix market; bench: wide csv
  std::int64_t trials = 0;
  std::uint64_t round_seed = 0;
};

ProblemInstance make_instance(const InstanceSource& source);
ProblemInstance generate(const std::string& spec);

/// Smallest r with r^2 >= 2n.
Index default_rank(Index n);

int cmd_gen(const RunSpec& spec, std::ostream& out);
int cmd_solve(const RunSpec& spec, std::ostream& out);
int cmd_bench(const RunSpec& spec, std::ostream& out);
int cmd_certify(const RunSpec& spec, std::ostream& out);

/// Parses argv, dispatches, and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcmsdp::cli
