// polytrain command line: live trainer server, headless simulation, log
// rescoring and offline analysis.
//
// Exit status: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polytrain/config.hpp"
#include "polytrain/error.hpp"
#include "polytrain/log_io.hpp"
#include "polytrain/report.hpp"
#include "polytrain/server.hpp"
#include "polytrain/simulation.hpp"
#include "polytrain/summary.hpp"

namespace fs = std::filesystem;
using namespace polytrain;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 2;

std::optional<std::string> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

Json brief(const SessionSummary& s) {
  Json j = to_json(s);
  j.erase("series");
  return j;
}

int cmd_print_config(const std::string& config) {
  std::cout << to_json(load_config(opt_path(config))).dump(2) << '\n';
  return kExitOk;
}

int cmd_serve(const std::string& config, const std::string& listen, const std::string& out) {
  ServeOptions opts;
  opts.listen = parse_listen_address(listen);
  opts.out_dir = out;
  opts.on_listening = [](int port) { std::cerr << "listening on port " << port << std::endl; };
  const ServeResult r = serve(load_config(opt_path(config)), opts);
  if (r.log_path) std::cerr << "log: " << r.log_path->string() << '\n';
  if (r.summary_path) std::cerr << "summary: " << r.summary_path->string() << '\n';
  if (r.dropped_updates > 0) std::cerr << "dropped state updates: " << r.dropped_updates << '\n';
  return kExitOk;
}

int cmd_run_sim(const std::string& config, const std::string& batch, std::optional<std::uint64_t> seed,
                const std::string& out) {
  const auto runs = batch_from_json(read_json_file(batch), load_config(opt_path(config)), seed);
  fs::create_directories(out);
  int status = kExitOk;
  for (const auto& r : run_batch(runs)) {
    if (!r.ok()) {
      std::cerr << r.label << ": failed: " << r.error << '\n';
      status = kExitData;
      continue;
    }
    const SessionSummary s = summarize(*r.log);
    save_log((fs::path(out) / (r.label + ".jsonl")).string(), *r.log);
    write_text(fs::path(out) / (r.label + ".summary.json"), to_json(s).dump(2) + "\n");
    std::cout << r.label << ": segments=" << s.segments.size() << " training_blocks=" << s.training_blocks
              << " total_score=" << (s.total_score ? format_number(*s.total_score) : "undefined") << '\n';
  }
  return status;
}

int cmd_rescore(const std::string& log_path, const std::string& out) {
  const SessionSummary s = rescore(load_log(log_path));
  if (!out.empty()) write_text(out, to_json(s).dump(2) + "\n");
  std::cout << brief(s).dump(2) << '\n';
  return kExitOk;
}

int cmd_analyze(const std::vector<std::string>& paths, const std::string& out, const std::string& csv,
                bool want_csv) {
  std::vector<NamedLog> logs;
  logs.reserve(paths.size());
  for (const auto& p : paths) logs.push_back({p, load_log(p)});
  write_text(out, analysis_report(logs).dump(2) + "\n");
  if (want_csv) {
    const fs::path csv_path = csv.empty() ? fs::path(out).replace_extension(".csv") : fs::path(csv);
    std::vector<std::pair<std::string, const SessionLog*>> rows;
    for (const auto& l : logs) rows.emplace_back(l.name, &l.log);
    std::ostringstream text;
    write_scores_csv(text, rows);
    write_text(csv_path, text.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bimanual polyrhythm trainer engine"};
  app.require_subcommand(1);
  std::string config;
  app.add_option("--config", config, "Config JSON (defaults <- file <- POLYTRAIN_* environment)");

  auto* print_config = app.add_subcommand("print-config", "Print the effective configuration");

  auto* serve_cmd = app.add_subcommand("serve", "Run a live session for one client");
  std::string listen = "127.0.0.1:7878";
  std::string serve_out = ".";
  serve_cmd->add_option("--listen", listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--out", serve_out, "Directory for the session log and summary")->capture_default_str();

  auto* sim = app.add_subcommand("run-sim", "Run a batch of simulated sessions");
  std::string batch;
  std::optional<std::uint64_t> seed;
  std::string sim_out = "runs";
  sim->add_option("--batch", batch, "Batch JSON file")->required();
  sim->add_option("--seed", seed, "Base seed; run i uses seed + i");
  sim->add_option("--out", sim_out, "Output directory")->capture_default_str();

  auto* resc = app.add_subcommand("rescore", "Recompute and verify a session log");
  std::string rescore_log;
  std::string rescore_out;
  resc->add_option("log", rescore_log, "Session log (JSONL)")->required();
  resc->add_option("--out", rescore_out, "Write the full summary JSON here");

  auto* analyze = app.add_subcommand("analyze", "Statistics over session logs");
  std::vector<std::string> logs;
  std::string report_out = "report.json";
  std::string csv_out;
  analyze->add_option("logs", logs, "Session logs (JSONL)")->required();
  analyze->add_option("--out", report_out, "Report JSON")->capture_default_str();
  auto* csv_opt = analyze->add_option("--csv", csv_out, "Also write per-frame CSV (default: report path with .csv)")
                      ->expected(0, 1);

  for (auto* sub : {print_config, serve_cmd, sim, resc, analyze}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : 1;
  }

  try {
    if (*print_config) return cmd_print_config(config);
    if (*serve_cmd) return cmd_serve(config, listen, serve_out);
    if (*sim) return cmd_run_sim(config, batch, seed, sim_out);
    if (*resc) return cmd_rescore(rescore_log, rescore_out);
    if (*analyze) return cmd_analyze(logs, report_out, csv_out, csv_opt->count() > 0);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
