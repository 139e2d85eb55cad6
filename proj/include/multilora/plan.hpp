#ifndef MULTILORA_PLAN_HPP
#define MULTILORA_PLAN_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "multilora/sim.hpp"
#include "multilora/stats.hpp"

namespace multilora {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A batch experiment: a base scenario plus sweep axes. Every listed axis is
// crossed with the others; missing axes take the base scenario's value.
struct ExperimentPlan {
  Scenario base;
  std::vector<int> sweep_setups;
  std::vector<int> sweep_packet_sizes;
  std::vector<int> sweep_node_counts;  // 10/50/100/200, mapped to the grids
  int repetitions = 33;
  std::uint64_t base_seed = 1;
  CiMethod ci = CiMethod::NormalZ;
};

// Line-oriented key/value format with [scenario], [sweep] and [run]
// sections. Unknown keys or malformed values fail the parse.
ExperimentPlan parse_plan(std::istream& in);
ExperimentPlan parse_plan_file(const std::string& path);

// Grid used for an evaluated node count (10 -> 2x5, 50 -> 10x5,
// 100 -> 10x10, 200 -> 10x20; gateway added at the centroid).
GridSpec grid_for_node_count(int node_count, double spacing_m);

struct RepSample {
  std::uint64_t seed = 0;
  double plr_percent = 0.0;
  double apd_s = 0.0;
  double jitter_s = 0.0;
  long sent = 0;
  long received = 0;
  std::uint64_t collisions = 0;

  bool operator==(const RepSample&) const = default;
};

struct SweepResult {
  int setup = 0;
  int packet_size = 0;
  int node_count = 0;
  std::vector<RepSample> samples;
  StatsSummary plr;
  StatsSummary apd;
  StatsSummary jitter;
  std::string error;  // non-empty when the sweep point aborted

  bool operator==(const SweepResult&) const = default;
};

struct ResultTable {
  int repetitions = 0;
  std::uint64_t base_seed = 0;
  CiMethod ci = CiMethod::NormalZ;
  std::vector<SweepResult> rows;

  bool operator==(const ResultTable&) const = default;
};

// Runs every sweep point for the configured repetitions (seeds base_seed,
// base_seed+1, ...). A failing point is recorded and the sweep continues.
ResultTable execute(const ExperimentPlan& plan, int workers = 1);

// Fixed column order:
// setup,packet_size,node_count,plr_mean,plr_ci_lo,plr_ci_hi,apd_mean,
// apd_ci_lo,apd_ci_hi,jitter_mean,jitter_ci_lo,jitter_ci_hi,reps
std::string to_csv(const ResultTable& results);

// Raw per-repetition samples; parse_results_json inverts it exactly.
std::string to_json(const ResultTable& results);
ResultTable parse_results_json(const std::string& text);

// Writes results.csv and raw.json under out_dir. Throws std::runtime_error
// on empty results or I/O failure.
void emit(const ResultTable& results, const std::string& out_dir);

}  // namespace multilora

#endif  // MULTILORA_PLAN_HPP
