#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "polytrain/session.hpp"
#include "polytrain/subject.hpp"

namespace polytrain {

using Json = nlohmann::ordered_json;

// Prefix for environment overrides. Every leaf key of the config document can
// be overridden as POLYTRAIN_<SECTION>_<KEY>[_<SUBKEY>], upper-cased, e.g.
// POLYTRAIN_SESSION_FRAME_RATE=200 or POLYTRAIN_SESSION_RATIO_Q=4.
inline constexpr const char* kEnvPrefix = "POLYTRAIN_";

// Full human-editable configuration document.
struct ConfigFile {
  SessionConfig session;
  SubjectParams subject;
};

// Sections "session", "scoring", "trainer".
Json to_json(const SessionConfig& config);
Json to_json(const SubjectParams& params);
Json to_json(const ConfigFile& config);

// Strict readers: missing keys keep their defaults, unknown keys are rejected
// with Error(kInvalidConfig). The results are validated.
SessionConfig session_config_from_json(const Json& doc);
SubjectParams subject_params_from_json(const Json& doc);
ConfigFile config_file_from_json(const Json& doc);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> process_env(const std::string& name);

// Overlays environment overrides onto `doc` for every key known to the
// default document.
void apply_env_overrides(Json& doc, const EnvLookup& env = process_env);

// Defaults <- file (if given) <- environment.
ConfigFile load_config(const std::optional<std::string>& path, const EnvLookup& env = process_env);

Json read_json_file(const std::string& path);

}  // namespace polytrain
