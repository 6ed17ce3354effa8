// Command-line surface. Exit codes: 0 success, 1 verification failure,
// 2 malformed input or criterion violation, 3 internal assertion trips.
// Errors print one machine-readable JSON record to stdout.
#pragma once

#include <cstdint>
#include <string>

namespace lll {

struct RunConfig {
  std::string instance_path;
  std::string mode = "sequential";  // sequential | parallel-r2 | parallel-r3
  std::string order = "declaration";
  std::uint64_t seed = 0;
  std::string check = "every-step";  // every-step | sampled
  std::string out_dir;               // artifacts directory; empty = don't write
};

struct GenConfig {
  std::string family;  // hyper-orient | weak-split | random-r3 | random-r2
  std::uint64_t seed = 1;
  std::string out_path;
  int nodes = 12;       // hyper-orient ring size
  bool dense = false;   // hyper-orient: add the degree-7 showcase edge
  int v_count = 9, u_count = 9, v_degree = 3, colors = 16, coverage = 2;
  int events = 12, d_max = 4, domain = 3;  // random families
};

int cmd_run(const RunConfig& cfg);
int cmd_verify(const std::string& instance_path,
               const std::string& assignment_path,
               const std::string& trace_path);
int cmd_gen(const GenConfig& cfg);
int cmd_simulate(const RunConfig& cfg);  // mode: parallel-r2 | parallel-r3
int cmd_certify(int grid, int samples, std::uint64_t seed);
int cmd_srep_mesh(const std::string& step, const std::string& out_path);

// Parses argv and dispatches; catches Error and maps kinds to exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace lll
