// Batch experiment front end: runs plan files, validates them, and exposes
// the time-on-air calculator.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "multilora/phy.hpp"
#include "multilora/plan.hpp"

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

int cmd_run(const std::string& plan_path, std::string out_dir, long seed_flag,
            int parallel) {
  multilora::ExperimentPlan plan = multilora::parse_plan_file(plan_path);

  // Precedence: explicit flag, then environment, then the plan file.
  const std::string env_seed = env_or("MULTILORA_SEED", "");
  if (seed_flag >= 0) {
    plan.base_seed = static_cast<std::uint64_t>(seed_flag);
  } else if (!env_seed.empty()) {
    plan.base_seed = static_cast<std::uint64_t>(std::stoll(env_seed));
  }
  if (out_dir.empty()) {
    out_dir = env_or("MULTILORA_OUT", "results");
  }

  const multilora::ResultTable table = multilora::execute(plan, parallel);
  multilora::emit(table, out_dir);

  bool failed = false;
  for (const multilora::SweepResult& row : table.rows) {
    if (!row.error.empty()) {
      std::cerr << "sweep point setup=" << row.setup
                << " packet_size=" << row.packet_size
                << " nodes=" << row.node_count << " failed: " << row.error << "\n";
      failed = true;
    }
  }
  std::cout << "wrote " << out_dir << "/results.csv and " << out_dir
            << "/raw.json (" << table.rows.size() << " sweep points, "
            << table.repetitions << " repetitions, seed " << table.base_seed
            << ")\n";
  return failed ? 1 : 0;
}

int cmd_validate(const std::string& plan_path) {
  const multilora::ExperimentPlan plan = multilora::parse_plan_file(plan_path);
  const std::size_t setups =
      plan.sweep_setups.empty() ? 1 : plan.sweep_setups.size();
  const std::size_t sizes =
      plan.sweep_packet_sizes.empty() ? 1 : plan.sweep_packet_sizes.size();
  const std::size_t counts =
      plan.sweep_node_counts.empty() ? 1 : plan.sweep_node_counts.size();
  std::cout << plan_path << ": ok\n"
            << "  sweep points: " << setups * sizes * counts << "\n"
            << "  repetitions:  " << plan.repetitions << "\n"
            << "  base seed:    " << plan.base_seed << "\n";
  return 0;
}

int cmd_toa(int bytes, int sf, int bw_khz) {
  multilora::RadioConfig cfg;
  cfg.spreading_factor = sf;
  cfg.bandwidth_hz = bw_khz * 1000;
  const double toa = multilora::time_on_air(bytes, cfg);
  std::printf("%d bytes, SF%d, BW %d kHz, CR 4/8, preamble 8: %.3f ms\n", bytes,
              sf, bw_khz, toa * 1e3);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-LoRa mesh experiment runner"};
  app.require_subcommand(1);

  std::string plan_path;
  std::string out_dir;
  long seed = -1;
  int parallel = 1;
  CLI::App* run = app.add_subcommand("run", "execute a plan file");
  run->add_option("plan", plan_path, "plan file")->required();
  run->add_option("--out", out_dir, "output directory (default: results)");
  run->add_option("--seed", seed, "override the base seed")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--parallel", parallel, "worker threads")
      ->check(CLI::Range(1, 256));

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a plan file");
  validate->add_option("plan", validate_path, "plan file")->required();

  int toa_bytes = 0, toa_sf = 7, toa_bw = 125;
  CLI::App* toa = app.add_subcommand("toa", "time-on-air calculator");
  toa->add_option("bytes", toa_bytes, "frame length in bytes")->required();
  toa->add_option("sf", toa_sf, "spreading factor 7..12")->required();
  toa->add_option("bw", toa_bw, "bandwidth in kHz (125/250/500)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(plan_path, out_dir, seed, parallel);
    if (validate->parsed()) return cmd_validate(validate_path);
    if (toa->parsed()) return cmd_toa(toa_bytes, toa_sf, toa_bw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
