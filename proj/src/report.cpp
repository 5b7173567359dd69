#include "polytrain/report.hpp"

#include "polytrain/error.hpp"
#include "polytrain/summary.hpp"

namespace polytrain {

namespace {

Json error_json(const Error& e) {
  return Json{{"error", to_string(e.code())}, {"message", e.what()}};
}

Json anova_json(const Groups& groups) {
  if (groups.size() < 2) {
    return Json{{"error", to_string(ErrorCode::kDegenerateGroups)},
                {"message", "fewer than two testing segments"}};
  }
  try {
    const AnovaResult r = anova_oneway(groups);
    Json j = Json::object();
    j["f"] = r.f_infinite() ? Json(nullptr) : Json(r.f);
    j["f_infinite"] = r.f_infinite();
    j["df1"] = r.df1;
    j["df2"] = r.df2;
    j["p"] = r.p;
    return j;
  } catch (const Error& e) {
    return error_json(e);
  }
}

Json posthoc_json(const Groups& groups, PosthocMethod method) {
  if (groups.size() < 2) {
    return Json{{"error", to_string(ErrorCode::kDegenerateGroups)},
                {"message", "fewer than two testing segments"}};
  }
  try {
    const PairwiseTable table = posthoc_pairwise(groups, method);
    Json upper = Json::array();
    for (std::size_t i = 0; i < table.size(); ++i) {
      Json row = Json::array();
      for (std::size_t j = i + 1; j < table.size(); ++j) row.push_back(table.at(i, j));
      upper.push_back(std::move(row));
    }
    return Json{{"method", "welch-bonferroni"}, {"upper", std::move(upper)}};
  } catch (const Error& e) {
    return error_json(e);
  }
}

std::vector<double> test_totals(const SessionLog& log) {
  std::vector<double> out;
  for (const auto& f : log.frames) {
    if (f.mode == TrainingMode::kTest) out.push_back(f.scores.total);
  }
  return out;
}

}  // namespace

Json analysis_report(const std::vector<NamedLog>& logs, PosthocMethod method) {
  Json report = Json::object();
  Json sections = Json::array();
  for (const auto& [name, log] : logs) {
    const SessionSummary summary = summarize(log);
    Json s = Json::object();
    s["name"] = name;
    s["subject"] = log.metadata.value("subject", std::string());
    s["total_score"] = summary.total_score ? Json(*summary.total_score) : Json(nullptr);
    s["duration"] = summary.duration;
    s["training_blocks"] = summary.training_blocks;
    s["segment_count"] = summary.segments.size();

    Json segs = Json::array();
    std::vector<double> means;
    Groups groups;
    for (const auto& seg : summary.segments) {
      segs.push_back(Json{{"index", seg.index},
                          {"start", seg.start},
                          {"end", seg.end},
                          {"frames", seg.frames()},
                          {"mean", seg.mean}});
      means.push_back(seg.mean);
      groups.push_back(seg.totals);
    }
    s["segments"] = std::move(segs);
    s["segment_means"] = means;

    Json pct = Json::array();
    for (const auto& v : percent_change(means)) pct.push_back(v ? Json(*v) : Json(nullptr));
    s["percent_change"] = std::move(pct);
    s["anova"] = anova_json(groups);
    s["posthoc"] = posthoc_json(groups, method);
    sections.push_back(std::move(s));
  }
  report["logs"] = std::move(sections);

  Json corr = Json::array();
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto a = test_totals(logs[i].log);
    for (std::size_t j = i + 1; j < logs.size(); ++j) {
      const auto b = test_totals(logs[j].log);
      Json c = Json{{"a", logs[i].name}, {"b", logs[j].name}};
      if (a.size() < 2 || b.size() < 2) {
        c["r"] = nullptr;
        c["error"] = "too few Test frames";
      } else {
        try {
          c["r"] = pearson_resampled(a, b);
        } catch (const Error& e) {
          c["r"] = nullptr;
          c["error"] = to_string(e.code());
        }
      }
      corr.push_back(std::move(c));
    }
  }
  report["correlations"] = std::move(corr);
  return report;
}

}  // namespace polytrain
