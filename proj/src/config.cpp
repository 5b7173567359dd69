#include "polytrain/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "polytrain/error.hpp"

namespace polytrain {

namespace {

// Reads keys out of one JSON object and complains about anything left over.
class StrictObject {
 public:
  StrictObject(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  void read_optional(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if (it->is_null()) {
      out.reset();
    } else if (it->is_number()) {
      out = it->get<double>();
    } else {
      fail(std::string("bad value for '") + key + "'");
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::kInvalidConfig, path_ + ": " + msg);
  }

  const std::string& path() const { return path_; }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

Json point_json(PlanarPoint p) { return Json{{"y", p.y}, {"z", p.z}}; }

PlanarPoint read_point(const Json& j, const std::string& path, PlanarPoint fallback) {
  StrictObject o(j, path);
  o.read("y", fallback.y);
  o.read("z", fallback.z);
  o.finish();
  return fallback;
}

std::string folding_name(ErrorFolding f) { return f == ErrorFolding::kCircular ? "circular" : "clamp"; }

std::string env_name(const std::string& path) {
  std::string out = kEnvPrefix;
  for (char ch : path) {
    out.push_back(ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  return out;
}

void overlay_leaves(const Json& defaults, Json& doc, const std::string& prefix, const EnvLookup& env) {
  for (const auto& [key, value] : defaults.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      if (!doc.contains(key)) {
        // Only materialise a missing section if some override lands in it.
        Json sub = Json::object();
        overlay_leaves(value, sub, path, env);
        if (!sub.empty()) doc[key] = std::move(sub);
      } else if (doc[key].is_object()) {
        overlay_leaves(value, doc[key], path, env);
      }
      continue;
    }
    const auto raw = env(env_name(path));
    if (!raw) continue;
    Json parsed = Json::parse(*raw, nullptr, false);
    doc[key] = parsed.is_discarded() ? Json(*raw) : parsed;
  }
}

}  // namespace

Json to_json(const SessionConfig& c) {
  Json session = Json::object();
  session["ratio"] = Json{{"p", c.ratio.p()}, {"q", c.ratio.q()}};
  session["frame_rate"] = c.frame_rate;
  session["train_block"] = c.train_block;
  session["test_block"] = c.test_block;
  session["threshold_fraction"] = c.threshold_fraction;
  session["max_duration"] = c.max_duration;
  session["prior_best_score"] = c.prior_best_score ? Json(*c.prior_best_score) : Json(nullptr);
  session["reset_windows_on_transition"] = c.reset_windows_on_transition;
  session["nd_center"] = point_json(c.centers.nd);
  session["dom_center"] = point_json(c.centers.dom);

  Json scoring = Json::object();
  scoring["current_window"] = c.scoring.current_window;
  scoring["speed_window"] = c.scoring.speed_window;
  scoring["velocity_amplitude"] = c.scoring.velocity_shape.amplitude;
  scoring["velocity_sharpness"] = c.scoring.velocity_shape.sharpness;
  scoring["stall_speed"] = c.scoring.stall_speed;
  scoring["dead_zone"] = c.scoring.dead_zone;
  scoring["error_folding"] = folding_name(c.scoring.folding);

  Json trainer = Json::object();
  trainer["stiffness"] = c.trainer.spring.stiffness;
  trainer["velocity_gain"] = c.trainer.spring.velocity_gain;
  trainer["force_cap"] = c.trainer.spring.force_cap;
  trainer["radius"] = c.trainer.radius;
  trainer["nd_angular_speed"] = c.trainer.nd_angular_speed;

  return Json{{"session", session}, {"scoring", scoring}, {"trainer", trainer}};
}

Json to_json(const SubjectParams& s) {
  Json j = Json::object();
  j["coupling"] = s.coupling;
  j["learning_rate"] = s.learning_rate;
  j["motor_noise"] = s.motor_noise;
  j["nd_speed"] = s.nd_speed;
  j["dom_speed"] = s.dom_speed;
  j["hand_stiffness"] = s.hand_stiffness;
  j["hand_damping"] = s.hand_damping;
  j["hand_mass"] = s.hand_mass;
  j["compliance"] = s.compliance;
  j["radius"] = s.radius;
  j["nd_start_phase"] = s.nd_start_phase;
  j["dom_start_phase"] = s.dom_start_phase;
  j["seed"] = s.seed;
  return j;
}

Json to_json(const ConfigFile& c) {
  Json j = to_json(c.session);
  j["subject"] = to_json(c.subject);
  return j;
}

namespace {

void read_session_sections(StrictObject& top, SessionConfig& c) {
  if (const Json* s = top.child("session")) {
    StrictObject o(*s, "session");
    if (const Json* r = o.child("ratio")) {
      StrictObject ro(*r, "session.ratio");
      int p = c.ratio.p();
      int q = c.ratio.q();
      ro.read("p", p);
      ro.read("q", q);
      ro.finish();
      try {
        c.ratio = PolyrhythmRatio(p, q);
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidConfig, std::string("session.ratio: ") + e.what());
      }
    }
    o.read("frame_rate", c.frame_rate);
    o.read("train_block", c.train_block);
    o.read("test_block", c.test_block);
    o.read("threshold_fraction", c.threshold_fraction);
    o.read("max_duration", c.max_duration);
    o.read_optional("prior_best_score", c.prior_best_score);
    o.read("reset_windows_on_transition", c.reset_windows_on_transition);
    if (const Json* p = o.child("nd_center")) c.centers.nd = read_point(*p, "session.nd_center", c.centers.nd);
    if (const Json* p = o.child("dom_center")) c.centers.dom = read_point(*p, "session.dom_center", c.centers.dom);
    o.finish();
  }
  if (const Json* s = top.child("scoring")) {
    StrictObject o(*s, "scoring");
    o.read("current_window", c.scoring.current_window);
    o.read("speed_window", c.scoring.speed_window);
    o.read("velocity_amplitude", c.scoring.velocity_shape.amplitude);
    o.read("velocity_sharpness", c.scoring.velocity_shape.sharpness);
    o.read("stall_speed", c.scoring.stall_speed);
    o.read("dead_zone", c.scoring.dead_zone);
    std::string folding = folding_name(c.scoring.folding);
    o.read("error_folding", folding);
    if (folding == "circular") {
      c.scoring.folding = ErrorFolding::kCircular;
    } else if (folding == "clamp") {
      c.scoring.folding = ErrorFolding::kClamp;
    } else {
      o.fail("error_folding must be 'circular' or 'clamp'");
    }
    o.finish();
  }
  if (const Json* s = top.child("trainer")) {
    StrictObject o(*s, "trainer");
    o.read("stiffness", c.trainer.spring.stiffness);
    o.read("velocity_gain", c.trainer.spring.velocity_gain);
    o.read("force_cap", c.trainer.spring.force_cap);
    o.read("radius", c.trainer.radius);
    o.read("nd_angular_speed", c.trainer.nd_angular_speed);
    o.finish();
  }
}

}  // namespace

SessionConfig session_config_from_json(const Json& doc) {
  SessionConfig c;
  StrictObject top(doc, "config");
  read_session_sections(top, c);
  top.finish();
  c.validate();
  return c;
}

SubjectParams subject_params_from_json(const Json& doc) {
  SubjectParams s;
  StrictObject o(doc, "subject");
  o.read("coupling", s.coupling);
  o.read("learning_rate", s.learning_rate);
  o.read("motor_noise", s.motor_noise);
  o.read("nd_speed", s.nd_speed);
  o.read("dom_speed", s.dom_speed);
  o.read("hand_stiffness", s.hand_stiffness);
  o.read("hand_damping", s.hand_damping);
  o.read("hand_mass", s.hand_mass);
  o.read("compliance", s.compliance);
  o.read("radius", s.radius);
  o.read("nd_start_phase", s.nd_start_phase);
  o.read("dom_start_phase", s.dom_start_phase);
  o.read("seed", s.seed);
  o.finish();
  s.validate();
  return s;
}

ConfigFile config_file_from_json(const Json& doc) {
  ConfigFile c;
  StrictObject top(doc, "config");
  read_session_sections(top, c.session);
  if (const Json* s = top.child("subject")) c.subject = subject_params_from_json(*s);
  top.finish();
  c.session.validate();
  return c;
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

void apply_env_overrides(Json& doc, const EnvLookup& env) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidConfig, "config document must be an object");
  overlay_leaves(to_json(ConfigFile{}), doc, "", env);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Json doc = Json::parse(ss.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::kInvalidConfig, "'" + path + "' is not valid JSON");
  return doc;
}

ConfigFile load_config(const std::optional<std::string>& path, const EnvLookup& env) {
  Json doc = path ? read_json_file(*path) : Json::object();
  apply_env_overrides(doc, env);
  return config_file_from_json(doc);
}

}  // namespace polytrain
