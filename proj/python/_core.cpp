#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polytrain/analysis.hpp"
#include "polytrain/config.hpp"
#include "polytrain/error.hpp"
#include "polytrain/kinematics.hpp"
#include "polytrain/log_io.hpp"
#include "polytrain/report.hpp"
#include "polytrain/scoring.hpp"
#include "polytrain/session.hpp"
#include "polytrain/simulation.hpp"
#include "polytrain/summary.hpp"
#include "polytrain/trainer.hpp"

namespace py = pybind11;
using namespace polytrain;

namespace {

// JSON crosses the boundary as text; the python package decodes it.
ConfigFile config_from_text(const std::string& text) {
  if (text.empty()) return ConfigFile{};
  return config_file_from_json(Json::parse(text));
}

std::vector<double> unwrap_series(const std::vector<double>& raw, double period) {
  std::vector<double> out;
  if (raw.empty()) return out;
  auto state = UnwrappedAngle::from_raw(raw.front());
  out.push_back(state.degrees);
  for (std::size_t i = 1; i < raw.size(); ++i) {
    state = unwrap_step(state, raw[i], period);
    out.push_back(state.degrees);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Polyrhythm trainer engine";
  py::register_exception<Error>(m, "PolytrainError", PyExc_ValueError);

  py::enum_<TrainingMode>(m, "TrainingMode")
      .value("Full", TrainingMode::kFull)
      .value("Adaptive", TrainingMode::kAdaptive)
      .value("Half", TrainingMode::kHalf)
      .value("Test", TrainingMode::kTest);

  py::class_<PolyrhythmRatio>(m, "Ratio")
      .def(py::init<>())
      .def(py::init<int, int>(), py::arg("p"), py::arg("q"))
      .def_property_readonly("p", &PolyrhythmRatio::p)
      .def_property_readonly("q", &PolyrhythmRatio::q);

  m.def("desired_angle", &desired_angle, py::arg("nd_unwrapped_deg"), py::arg("ratio") = PolyrhythmRatio{});
  m.def(
      "position_score",
      [](double dom, double desired, bool clamp) {
        return position_score(dom, desired, clamp ? ErrorFolding::kClamp : ErrorFolding::kCircular);
      },
      py::arg("dom_deg"), py::arg("desired_deg"), py::arg("clamp") = false);
  m.def(
      "velocity_score",
      [](double rel_v, const PolyrhythmRatio& ratio, double amplitude, double sharpness) {
        return velocity_score(rel_v, ratio, {amplitude, sharpness});
      },
      py::arg("rel_v"), py::arg("ratio") = PolyrhythmRatio{}, py::arg("amplitude") = 100.0,
      py::arg("sharpness") = 1.0);
  m.def("relative_velocity", &relative_velocity, py::arg("dom_avg_speed"), py::arg("nd_avg_speed"),
        py::arg("stall_speed") = 1.0);
  m.def("total_score", &total_score, py::arg("position"), py::arg("velocity"));
  m.def("unwrap", &unwrap_series, py::arg("raw_deg"), py::arg("period") = 0.0,
        "Unwrap a series of raw angles; a positive period re-bases into [0, period).");
  m.def(
      "training_power",
      [](TrainingMode mode, double current) {
        const auto p = training_power(mode, current);
        return py::make_tuple(p.nd, p.dom);
      },
      py::arg("mode"), py::arg("current_score"));
  m.def(
      "guidance_force",
      [](double power, std::pair<double, double> target, std::pair<double, double> pos, double stiffness,
         double cap) {
        SpringParams spring;
        spring.stiffness = stiffness;
        spring.force_cap = cap;
        spring.validate();
        const auto f =
            guidance_force(power, PlanarPoint{target.first, target.second}, PlanarPoint{pos.first, pos.second}, spring);
        return py::make_tuple(f.fy, f.fz);
      },
      py::arg("power"), py::arg("target"), py::arg("pos"), py::arg("stiffness") = 1.0,
      py::arg("force_cap") = kMaxDeviceForce);

  m.def(
      "anova_oneway",
      [](const Groups& groups) {
        const auto r = anova_oneway(groups);
        py::dict d;
        d["f"] = r.f;
        d["df1"] = r.df1;
        d["df2"] = r.df2;
        d["p"] = r.p;
        return d;
      },
      py::arg("groups"));
  m.def(
      "posthoc_pairwise",
      [](const Groups& groups) {
        const auto t = posthoc_pairwise(groups);
        std::vector<std::vector<double>> out(t.size(), std::vector<double>(t.size()));
        for (std::size_t i = 0; i < t.size(); ++i) {
          for (std::size_t j = 0; j < t.size(); ++j) out[i][j] = t.at(i, j);
        }
        return out;
      },
      py::arg("groups"));
  m.def(
      "pearson", [](const std::vector<double>& a, const std::vector<double>& b) { return pearson(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "pearson_resampled",
      [](const std::vector<double>& a, const std::vector<double>& b) { return pearson_resampled(a, b); },
      py::arg("a"), py::arg("b"));
  m.def(
      "percent_change", [](const std::vector<double>& means) { return percent_change(means); },
      py::arg("means"));

  m.def(
      "default_config_json", [] { return to_json(ConfigFile{}).dump(); });
  m.def(
      "simulate_json",
      [](const std::string& config_text, const std::string& label) {
        const ConfigFile cfg = config_from_text(config_text);
        SessionLog log;
        {
          py::gil_scoped_release release;
          log = simulate_session({label, cfg.session, cfg.subject});
        }
        return log_to_string(log);
      },
      py::arg("config_json") = "", py::arg("label") = "sim",
      "Run one simulated session; returns the JSONL log text.");
  m.def(
      "rescore_json",
      [](const std::string& log_text) { return to_json(rescore(parse_log_string(log_text))).dump(); },
      py::arg("log_text"));
  m.def(
      "summarize_json",
      [](const std::string& log_text) { return to_json(summarize(parse_log_string(log_text))).dump(); },
      py::arg("log_text"));
  m.def(
      "analyze_json",
      [](const std::vector<std::pair<std::string, std::string>>& named) {
        std::vector<NamedLog> logs;
        for (const auto& [name, text] : named) logs.push_back({name, parse_log_string(text)});
        return analysis_report(logs).dump();
      },
      py::arg("logs"));
}
