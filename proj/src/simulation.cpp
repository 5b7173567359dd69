#include "polytrain/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "polytrain/config.hpp"
#include "polytrain/error.hpp"

namespace polytrain {

SessionLog simulate_session(const SimulationRun& run) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  meta["subject"] = run.label;
  meta["seed"] = run.subject.seed;
  meta["subject_params"] = to_json(run.subject);

  Session session(run.session, std::move(meta));
  VirtualSubject subject(run.subject, run.session.centers);
  const double dt = 1.0 / run.session.frame_rate;

  while (!session.ended()) {
    const StepResult r = session.step(subject.sensed());
    if (r.ended) break;
    subject.step(r.nd_force, r.dom_force, dt, r.mode);
  }
  return session.take_log();
}

std::vector<BatchResult> run_batch(const std::vector<SimulationRun>& runs) {
  std::vector<BatchResult> results(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      results[i].label = runs[i].label;
      try {
        results[i].log = simulate_session(runs[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n = std::min(hw, runs.size());
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

std::vector<SimulationRun> batch_from_json(const Json& doc, const ConfigFile& base,
                                           std::optional<std::uint64_t> seed) {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, "batch: " + msg); };
  if (!doc.is_object()) fail("expected an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "config" && key != "runs") fail("unknown key '" + key + "'");
  }
  Json shared = to_json(base);
  if (auto c = doc.find("config"); c != doc.end()) {
    if (!c->is_object()) fail("'config' must be an object");
    shared.merge_patch(*c);
  }
  auto runs_it = doc.find("runs");
  if (runs_it == doc.end() || !runs_it->is_array()) fail("'runs' must be an array");

  std::vector<SimulationRun> runs;
  std::set<std::string> labels;
  for (std::size_t i = 0; i < runs_it->size(); ++i) {
    const Json& r = (*runs_it)[i];
    const std::string where = "runs[" + std::to_string(i) + "]";
    if (!r.is_object()) fail(where + " must be an object");
    Json merged = shared;
    std::string label = "run" + std::to_string(i);
    for (const auto& [key, value] : r.items()) {
      if (key == "label") {
        if (!value.is_string() || value.get<std::string>().empty()) fail(where + ".label must be a non-empty string");
        label = value.get<std::string>();
      } else if (key == "config") {
        if (!value.is_object()) fail(where + ".config must be an object");
        merged.merge_patch(value);
      } else if (key == "subject") {
        if (!value.is_object()) fail(where + ".subject must be an object");
        merged["subject"].merge_patch(value);
      } else {
        fail(where + ": unknown key '" + key + "'");
      }
    }
    if (!labels.insert(label).second) fail("duplicate label '" + label + "'");
    const ConfigFile cfg = config_file_from_json(merged);
    SimulationRun run{label, cfg.session, cfg.subject};
    if (seed) run.subject.seed = *seed + i;
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace polytrain
