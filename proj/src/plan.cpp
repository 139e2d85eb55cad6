#include "multilora/plan.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace multilora {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream is(value);
  while (std::getline(is, item, ',')) {
    items.push_back(trim(item));
  }
  return items;
}

long parse_long(const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected an integer, got '" + value + "'");
  }
}

double parse_double(const std::string& value, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + value + "'");
  }
}

Priority parse_priority(const std::string& value, int line) {
  const long p = parse_long(value, line);
  if (p < 1 || p > 3) throw ParseError(line, "priority must be 1..3");
  return static_cast<Priority>(p);
}

void apply_scenario_key(Scenario& s, const std::string& key,
                        const std::string& value, int line) {
  if (key == "rows") s.grid.rows = static_cast<int>(parse_long(value, line));
  else if (key == "cols") s.grid.cols = static_cast<int>(parse_long(value, line));
  else if (key == "spacing_m") s.grid.spacing_m = parse_double(value, line);
  else if (key == "gateway") {
    if (value == "replace_center") {
      s.grid.gateway_mode = GridSpec::GatewayMode::ReplaceCenter;
    } else if (value == "add_center") {
      s.grid.gateway_mode = GridSpec::GatewayMode::AddCenter;
    } else {
      throw ParseError(line, "gateway must be replace_center or add_center");
    }
  } else if (key == "tx_range_m") s.tx_range_m = parse_double(value, line);
  else if (key == "setup") {
    const long v = parse_long(value, line);
    if (v < 1 || v > 3) throw ParseError(line, "setup must be 1, 2 or 3");
    s.setup = static_cast<int>(v);
  } else if (key == "packet_size_bytes") {
    s.packet_size_bytes = static_cast<int>(parse_long(value, line));
  } else if (key == "requests_per_node") {
    s.requests_per_node = static_cast<int>(parse_long(value, line));
  } else if (key == "total_request_cap") {
    s.total_request_cap = parse_long(value, line);
  } else if (key == "hello_period_s") s.hello_period_s = parse_double(value, line);
  else if (key == "route_period_s") s.route_period_s = parse_double(value, line);
  else if (key == "discovery_duration_s") {
    s.discovery_duration_s = parse_double(value, line);
  } else if (key == "learning_duration_s") {
    s.learning_duration_s = parse_double(value, line);
  } else if (key == "sim_duration_s") s.sim_duration_s = parse_double(value, line);
  else if (key == "reply_timeout_s") s.reply_timeout_s = parse_double(value, line);
  else if (key == "request_interval_s") {
    s.request_interval_s = parse_double(value, line);
  } else if (key == "retransmit") {
    if (value == "on") s.retransmit_on_timeout = true;
    else if (value == "off") s.retransmit_on_timeout = false;
    else throw ParseError(line, "retransmit must be on or off");
  } else if (key == "backoff_max_s") s.backoff_max_s = parse_double(value, line);
  else if (key == "signaling_jitter_frac") {
    s.signaling_jitter_frac = parse_double(value, line);
  } else if (key == "app_dither_max_s") {
    s.app_dither_max_s = parse_double(value, line);
  }
  else if (key == "success_threshold") {
    s.success_threshold = parse_double(value, line);
  } else if (key == "data_ttl") s.data_ttl = static_cast<int>(parse_long(value, line));
  else if (key == "max_route_distance") {
    s.max_route_distance = static_cast<int>(parse_long(value, line));
  }
  else if (key == "queue_capacity") {
    s.queue_capacity = static_cast<std::size_t>(parse_long(value, line));
  } else if (key == "default_priority") {
    s.default_priority = parse_priority(value, line);
  } else if (key == "priority_override") {
    const auto colon = value.find(':');
    if (colon == std::string::npos) {
      throw ParseError(line, "priority_override expects <client>:<priority>");
    }
    const int idx = static_cast<int>(parse_long(trim(value.substr(0, colon)), line));
    s.priority_overrides[idx] = parse_priority(trim(value.substr(colon + 1)), line);
  } else if (key == "collisions") {
    if (value == "on") s.collisions_enabled = true;
    else if (value == "off") s.collisions_enabled = false;
    else throw ParseError(line, "collisions must be on or off");
  } else {
    throw ParseError(line, "unknown scenario key '" + key + "'");
  }
}

void apply_sweep_key(ExperimentPlan& plan, const std::string& key,
                     const std::string& value, int line) {
  std::vector<int> items;
  for (const std::string& item : split_list(value)) {
    items.push_back(static_cast<int>(parse_long(item, line)));
  }
  if (items.empty()) throw ParseError(line, "empty sweep list");
  if (key == "setup") {
    for (int v : items) {
      if (v < 1 || v > 3) throw ParseError(line, "setup must be 1, 2 or 3");
    }
    plan.sweep_setups = items;
  } else if (key == "packet_size_bytes") {
    plan.sweep_packet_sizes = items;
  } else if (key == "node_count") {
    for (int v : items) {
      try {
        grid_for_node_count(v, 1.0);
      } catch (const InvalidSpecError& e) {
        throw ParseError(line, e.what());
      }
    }
    plan.sweep_node_counts = items;
  } else {
    throw ParseError(line, "unknown sweep key '" + key + "'");
  }
}

void apply_run_key(ExperimentPlan& plan, const std::string& key,
                   const std::string& value, int line) {
  if (key == "repetitions") {
    const long v = parse_long(value, line);
    if (v < 1) throw ParseError(line, "repetitions must be >= 1");
    plan.repetitions = static_cast<int>(v);
  } else if (key == "base_seed") {
    plan.base_seed = static_cast<std::uint64_t>(parse_long(value, line));
  } else if (key == "ci") {
    if (value == "z") plan.ci = CiMethod::NormalZ;
    else if (value == "t") plan.ci = CiMethod::StudentT;
    else throw ParseError(line, "ci must be z or t");
  } else {
    throw ParseError(line, "unknown run key '" + key + "'");
  }
}

}  // namespace

GridSpec grid_for_node_count(int node_count, double spacing_m) {
  GridSpec g;
  g.spacing_m = spacing_m;
  g.gateway_mode = GridSpec::GatewayMode::AddCenter;
  switch (node_count) {
    case 10: g.rows = 2; g.cols = 5; break;
    case 50: g.rows = 10; g.cols = 5; break;
    case 100: g.rows = 10; g.cols = 10; break;
    case 200: g.rows = 10; g.cols = 20; break;
    default:
      throw InvalidSpecError("node_count must be one of 10, 50, 100, 200");
  }
  return g;
}

ExperimentPlan parse_plan(std::istream& in) {
  ExperimentPlan plan;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.back() != ']') throw ParseError(line, "unterminated section header");
      section = text.substr(1, text.size() - 2);
      if (section != "scenario" && section != "sweep" && section != "run") {
        throw ParseError(line, "unknown section '" + section + "'");
      }
      continue;
    }

    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line, "expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError(line, "expected 'key = value'");
    }
    if (section == "scenario") {
      apply_scenario_key(plan.base, key, value, line);
    } else if (section == "sweep") {
      apply_sweep_key(plan, key, value, line);
    } else if (section == "run") {
      apply_run_key(plan, key, value, line);
    } else {
      throw ParseError(line, "key outside of any section");
    }
  }
  try {
    plan.base.validate();
  } catch (const InvalidSpecError& e) {
    throw ParseError(line, std::string("invalid scenario: ") + e.what());
  }
  return plan;
}

ExperimentPlan parse_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open plan file: " + path);
  }
  return parse_plan(in);
}

ResultTable execute(const ExperimentPlan& plan, int workers) {
  ResultTable table;
  table.repetitions = plan.repetitions;
  table.base_seed = plan.base_seed;
  table.ci = plan.ci;

  const std::vector<int> setups =
      plan.sweep_setups.empty() ? std::vector<int>{plan.base.setup} : plan.sweep_setups;
  const std::vector<int> sizes = plan.sweep_packet_sizes.empty()
                                     ? std::vector<int>{plan.base.packet_size_bytes}
                                     : plan.sweep_packet_sizes;
  const std::vector<int> counts = plan.sweep_node_counts.empty()
                                      ? std::vector<int>{-1}
                                      : plan.sweep_node_counts;

  for (int setup : setups) {
    for (int size : sizes) {
      for (int count : counts) {
        Scenario s = plan.base;
        s.setup = setup;
        s.packet_size_bytes = size;
        if (count > 0) {
          s.grid = grid_for_node_count(count, s.grid.spacing_m);
        }
        SweepResult row;
        row.setup = setup;
        row.packet_size = size;
        row.node_count = count > 0 ? count : 0;
        try {
          row.node_count = build_grid(s.grid).client_count();
          s.validate();
          const std::vector<MetricsReport> reports =
              run_repetitions(s, plan.repetitions, plan.base_seed, workers);
          std::vector<double> plr, apd, jit;
          for (int i = 0; i < plan.repetitions; ++i) {
            const MetricsReport& r = reports[static_cast<std::size_t>(i)];
            RepSample sample;
            sample.seed = plan.base_seed + static_cast<std::uint64_t>(i);
            sample.plr_percent = r.plr_percent;
            sample.apd_s = r.apd_s;
            sample.jitter_s = r.jitter_s;
            sample.sent = r.sent;
            sample.received = r.received;
            sample.collisions = r.collisions;
            row.samples.push_back(sample);
            plr.push_back(r.plr_percent);
            apd.push_back(r.apd_s);
            jit.push_back(r.jitter_s);
          }
          row.plr = summarize(plr, plan.ci);
          row.apd = summarize(apd, plan.ci);
          row.jitter = summarize(jit, plan.ci);
        } catch (const std::exception& e) {
          row.samples.clear();
          row.error = e.what();
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string to_csv(const ResultTable& results) {
  std::ostringstream os;
  os << "setup,packet_size,node_count,plr_mean,plr_ci_lo,plr_ci_hi,"
        "apd_mean,apd_ci_lo,apd_ci_hi,jitter_mean,jitter_ci_lo,jitter_ci_hi,"
        "reps\n";
  for (const SweepResult& row : results.rows) {
    if (!row.error.empty()) continue;
    os << row.setup << ',' << row.packet_size << ',' << row.node_count << ','
       << fmt(row.plr.mean) << ',' << fmt(row.plr.ci95_low) << ','
       << fmt(row.plr.ci95_high) << ',' << fmt(row.apd.mean) << ','
       << fmt(row.apd.ci95_low) << ',' << fmt(row.apd.ci95_high) << ','
       << fmt(row.jitter.mean) << ',' << fmt(row.jitter.ci95_low) << ','
       << fmt(row.jitter.ci95_high) << ',' << row.plr.n << '\n';
  }
  return os.str();
}

std::string to_json(const ResultTable& results) {
  nlohmann::ordered_json doc;
  doc["repetitions"] = results.repetitions;
  doc["base_seed"] = results.base_seed;
  doc["ci"] = results.ci == CiMethod::StudentT ? "t" : "z";
  doc["results"] = nlohmann::ordered_json::array();
  for (const SweepResult& row : results.rows) {
    nlohmann::ordered_json jrow;
    jrow["setup"] = row.setup;
    jrow["packet_size"] = row.packet_size;
    jrow["node_count"] = row.node_count;
    if (!row.error.empty()) {
      jrow["error"] = row.error;
    }
    jrow["samples"] = nlohmann::ordered_json::array();
    for (const RepSample& s : row.samples) {
      nlohmann::ordered_json js;
      js["seed"] = s.seed;
      js["plr_percent"] = s.plr_percent;
      js["apd_s"] = s.apd_s;
      js["jitter_s"] = s.jitter_s;
      js["sent"] = s.sent;
      js["received"] = s.received;
      js["collisions"] = s.collisions;
      jrow["samples"].push_back(std::move(js));
    }
    doc["results"].push_back(std::move(jrow));
  }
  return doc.dump(2) + "\n";
}

ResultTable parse_results_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  ResultTable table;
  table.repetitions = doc.at("repetitions").get<int>();
  table.base_seed = doc.at("base_seed").get<std::uint64_t>();
  table.ci = doc.at("ci").get<std::string>() == "t" ? CiMethod::StudentT
                                                    : CiMethod::NormalZ;
  for (const auto& jrow : doc.at("results")) {
    SweepResult row;
    row.setup = jrow.at("setup").get<int>();
    row.packet_size = jrow.at("packet_size").get<int>();
    row.node_count = jrow.at("node_count").get<int>();
    if (jrow.contains("error")) {
      row.error = jrow.at("error").get<std::string>();
    }
    std::vector<double> plr, apd, jit;
    for (const auto& js : jrow.at("samples")) {
      RepSample s;
      s.seed = js.at("seed").get<std::uint64_t>();
      s.plr_percent = js.at("plr_percent").get<double>();
      s.apd_s = js.at("apd_s").get<double>();
      s.jitter_s = js.at("jitter_s").get<double>();
      s.sent = js.at("sent").get<long>();
      s.received = js.at("received").get<long>();
      s.collisions = js.at("collisions").get<std::uint64_t>();
      row.samples.push_back(s);
      plr.push_back(s.plr_percent);
      apd.push_back(s.apd_s);
      jit.push_back(s.jitter_s);
    }
    if (row.error.empty()) {
      row.plr = summarize(plr, table.ci);
      row.apd = summarize(apd, table.ci);
      row.jitter = summarize(jit, table.ci);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void emit(const ResultTable& results, const std::string& out_dir) {
  if (results.rows.empty()) {
    throw std::runtime_error("refusing to emit an empty result table");
  }
  std::filesystem::create_directories(out_dir);
  const auto write = [&](const std::string& name, const std::string& content) {
    const std::filesystem::path path = std::filesystem::path(out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
    if (!out) {
      throw std::runtime_error("short write to " + path.string());
    }
  };
  write("results.csv", to_csv(results));
  write("raw.json", to_json(results));
}

}  // namespace multilora
