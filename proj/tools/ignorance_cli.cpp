#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ignorance/scenario.hpp"

namespace fs = std::filesystem;
using namespace ignorance;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Job {
  std::string label;  // file path or fixture name
  std::string source;
};

struct Outcome {
  int code = 0;
  std::string report;
  std::string errors;
};

Outcome run_one(const Job& job, const RunConfig& config, bool text, bool lenient, const std::string& event_log) {
  Outcome out;
  try {
    std::vector<std::string> warnings;
    const ScenarioScript script = parse_scenario(job.source, lenient, &warnings);
    for (const auto& w : warnings) out.errors += fmt::format("{}: warning: {}\n", job.label, w);
    if (!event_log.empty()) {
      std::ofstream log(event_log, std::ios::binary);
      if (!log) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot write '{}'", event_log));
      log << write_event_log(script.events);
    }
    const RunReport report = run(script, config);
    out.report = text ? render_text(report) : render_json(report);
    out.code = exit_code(report);
  } catch (const Error& e) {
    out.errors += fmt::format("{}: error: {}\n", job.label, e.what());
    out.code = exit_code(e);
  } catch (const std::exception& e) {
    out.errors += fmt::format("{}: error: {}\n", job.label, e.what());
    out.code = 3;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ignorance scenario runner"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "Replay a scenario script and answer its queries");
  std::string script_path, mode = "anticipation", report_kind = "json", batch_dir, event_log;
  std::vector<std::string> fixture_names;
  double tolerance = 1e-6;
  bool with_oracle = false, lenient = false, all_fixtures = false;
  run_cmd->add_option("script", script_path, "Scenario JSON file");
  run_cmd->add_option("--mode", mode, "Probability reading")->check(CLI::IsMember({"normalized", "anticipation"}));
  run_cmd->add_option("--tolerance", tolerance, "Oracle tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--oracle", with_oracle, "Check every query against brute force");
  run_cmd->add_option("--report", report_kind, "Report format")->check(CLI::IsMember({"json", "text"}));
  run_cmd->add_option("--batch", batch_dir, "Run every *.json script in a directory")->check(CLI::ExistingDirectory);
  run_cmd->add_option("--fixture", fixture_names, "Run an embedded fixture (repeatable)");
  run_cmd->add_flag("--all-fixtures", all_fixtures, "Run every embedded fixture");
  run_cmd->add_option("--event-log", event_log, "Write the script's events as NDJSON");
  run_cmd->add_flag("--lenient", lenient, "Warn about unknown fields instead of rejecting them");

  auto* fixtures_cmd = app.add_subcommand("fixtures", "List the embedded fixtures");
  std::string show;
  fixtures_cmd->add_option("--show", show, "Print one fixture's source");

  app.add_subcommand("schema", "Print the scenario JSON schema");

  auto* replay_cmd = app.add_subcommand("replay", "Replay an NDJSON event log and print the final digest");
  std::string log_path;
  replay_cmd->add_option("log", log_path, "Event log")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("schema")) {
      std::cout << scenario_schema();
      return 0;
    }
    if (app.got_subcommand("fixtures")) {
      if (!show.empty()) {
        std::cout << fixture_source(show);
        return 0;
      }
      for (const auto& name : list_fixtures()) std::cout << name << "\n";
      return 0;
    }
    if (app.got_subcommand("replay")) {
      const Session s = replay(read_event_log(read_file(log_path)));
      std::cout << fmt::format("state  {}\ndigest {}\n", s.label(), digest(s));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }

  std::vector<Job> jobs;
  try {
    if (!script_path.empty()) jobs.push_back({script_path, read_file(script_path)});
    if (all_fixtures) fixture_names = list_fixtures();
    for (const auto& name : fixture_names) jobs.push_back({name, fixture_source(name)});
    if (!batch_dir.empty()) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(batch_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) jobs.push_back({f.string(), read_file(f.string())});
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  }
  if (jobs.empty()) {
    std::cerr << "error: give a script, --fixture, --all-fixtures or --batch\n";
    return 2;
  }
  if (jobs.size() > 1 && !event_log.empty()) {
    std::cerr << "error: --event-log needs a single scenario\n";
    return 2;
  }

  RunConfig config;
  config.mode = assignment_mode_from_string(mode);
  config.tolerance = tolerance;
  config.oracle = with_oracle;
  const bool text = report_kind == "text";

  std::vector<std::future<Outcome>> pending;
  for (const auto& job : jobs)
    pending.push_back(std::async(std::launch::async, run_one, job, config, text, lenient, event_log));

  // Reports come out in job order whatever the finishing order.
  int code = 0;
  std::vector<std::string> reports;
  for (auto& f : pending) {
    Outcome o = f.get();
    std::cerr << o.errors;
    code = std::max(code, o.code);
    if (!o.report.empty()) reports.push_back(std::move(o.report));
  }
  if (text || jobs.size() == 1) {
    for (std::size_t i = 0; i < reports.size(); ++i) std::cout << (i ? "\n" : "") << reports[i];
  } else {
    json all = json::array();
    for (const auto& r : reports) all.push_back(json::parse(r));
    std::cout << all.dump(2) << "\n";
  }
  return code;
}
