#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polytrain/config.hpp"
#include "polytrain/session.hpp"
#include "polytrain/subject.hpp"

namespace polytrain {

struct SimulationRun {
  std::string label;
  SessionConfig session;
  SubjectParams subject;
};

// Runs one full session headlessly with the virtual subject in the loop.
SessionLog simulate_session(const SimulationRun& run);

struct BatchResult {
  std::string label;
  std::optional<SessionLog> log;
  std::string error;  // set when the run failed

  bool ok() const { return log.has_value(); }
};

// Each run is independent; a failing run is reported without stopping the rest.
std::vector<BatchResult> run_batch(const std::vector<SimulationRun>& runs);

// Batch file:
//   {"config": {...shared overrides...},
//    "runs": [{"label": "a", "config": {...}, "subject": {...}}, ...]}
// Overrides are merged over `base`; labels must be unique. When `seed` is
// given, run i uses subject seed seed + i.
std::vector<SimulationRun> batch_from_json(const Json& doc, const ConfigFile& base,
                                           std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace polytrain
