#include "binvis/eval.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binvis/error.hpp"

namespace binvis::eval {
using dataset::Label;
using nlohmann::ordered_json;

namespace {

Ratio ratio(std::uint64_t num, std::uint64_t den, const char* reason) {
  if (den == 0) return {std::nullopt, reason};
  return {static_cast<double>(num) / static_cast<double>(den), {}};
}

ordered_json ratio_json(const Ratio& r) {
  return r.value ? ordered_json(*r.value) : ordered_json(nullptr);
}

ordered_json view_json(const MetricsReport& m) {
  ordered_json j;
  j["tp"] = m.counts.tp;
  j["tn"] = m.counts.tn;
  j["fp"] = m.counts.fp;
  j["fn"] = m.counts.fn;
  j["accuracy"] = m.accuracy;
  j["precision"] = ratio_json(m.precision);
  j["recall"] = ratio_json(m.recall);
  j["f1"] = ratio_json(m.f1);
  ordered_json undefined = ordered_json::object();
  if (!m.precision.defined()) undefined["precision"] = m.precision.undefined_reason;
  if (!m.recall.defined()) undefined["recall"] = m.recall.undefined_reason;
  if (!m.f1.defined()) undefined["f1"] = m.f1.undefined_reason;
  if (!undefined.empty()) j["undefined"] = undefined;
  return j;
}

std::string pct(const Ratio& r) {
  if (!r.value) return "undefined (" + r.undefined_reason + ")";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * *r.value << '%';
  return os.str();
}

void format_view(std::ostream& os, const char* title, const MetricsReport& m) {
  os << title << '\n';
  os << "  TP " << m.counts.tp << "  TN " << m.counts.tn << "  FP " << m.counts.fp << "  FN "
     << m.counts.fn << '\n';
  os << "  accuracy   " << pct({m.accuracy, {}}) << '\n';
  os << "  precision  " << pct(m.precision) << '\n';
  os << "  recall     " << pct(m.recall) << '\n';
  os << "  f1         " << pct(m.f1) << '\n';
}

}  // namespace

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = "predictions line " + std::to_string(line_no);
    PredictionRecord p;
    try {
      const auto j = nlohmann::json::parse(line);
      p.image_path = j.at("image_path").get<std::string>();
      if (j.contains("predicted_label") && !j["predicted_label"].is_null()) {
        p.predicted_label = dataset::parse_label(j["predicted_label"].get<std::string>());
        if (!p.predicted_label) {
          throw Error(ErrorCode::BadPrediction, where + ": unknown predicted_label");
        }
      }
      if (j.contains("score") && !j["score"].is_null()) {
        p.score = j["score"].get<double>();
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::BadPrediction, where + ": " + ex.what());
    }
    if (!p.predicted_label && !p.score) {
      throw Error(ErrorCode::BadPrediction, where + ": needs predicted_label or score");
    }
    if (p.score && !(*p.score >= 0.0 && *p.score <= 1.0)) {
      throw Error(ErrorCode::BadPrediction, where + ": score outside [0, 1]");
    }
    if (p.score && p.predicted_label &&
        *p.predicted_label != effective_label({p.image_path, std::nullopt, p.score},
                                              kDefaultThreshold)) {
      throw Error(ErrorCode::BadPrediction,
                  where + ": predicted_label disagrees with score at threshold 0.5");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PredictionRecord> read_predictions_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::IoError, "cannot open " + path);
  }
  return read_predictions(in);
}

void write_predictions(std::ostream& out, std::span<const PredictionRecord> predictions) {
  for (const auto& p : predictions) {
    ordered_json j;
    j["image_path"] = p.image_path;
    if (p.predicted_label) j["predicted_label"] = dataset::to_string(*p.predicted_label);
    if (p.score) j["score"] = *p.score;
    out << j.dump() << '\n';
  }
}

Label effective_label(const PredictionRecord& p, double threshold) {
  if (p.score) return *p.score >= threshold ? Label::Malware : Label::Normal;
  return p.predicted_label.value_or(Label::Normal);
}

Confusion confusion(const dataset::Manifest& manifest, std::span<const PredictionRecord> predictions,
                    double threshold, Label positive) {
  std::map<std::string, Label> truth;
  for (const auto& e : manifest) {
    if (e.split == dataset::Split::Test) truth.emplace(e.image_path, e.label);
  }

  std::map<std::string, bool> seen;
  Confusion c;
  for (const auto& p : predictions) {
    const auto it = truth.find(p.image_path);
    if (it == truth.end()) {
      throw Error(ErrorCode::UnknownImage, p.image_path + " is not a test-split manifest entry");
    }
    if (!seen.emplace(p.image_path, true).second) {
      throw Error(ErrorCode::DuplicatePrediction, "second prediction for " + p.image_path);
    }
    const bool actual = it->second == positive;
    const bool predicted = effective_label(p, threshold) == positive;
    if (actual && predicted) ++c.tp;
    else if (!actual && !predicted) ++c.tn;
    else if (!actual && predicted) ++c.fp;
    else ++c.fn;
  }
  if (seen.size() != truth.size()) {
    std::size_t missing = 0;
    std::string first;
    for (const auto& [path, label] : truth) {
      if (!seen.contains(path)) {
        if (missing++ == 0) first = path;
      }
    }
    throw Error(ErrorCode::MissingPrediction, std::to_string(missing) +
                                                  " test images have no prediction (first: " +
                                                  first + ")");
  }
  return c;
}

std::optional<double> f1_score(double precision, double recall) noexcept {
  if (precision + recall == 0.0) return std::nullopt;
  return 2.0 * precision * recall / (precision + recall);
}

MetricsReport metrics(const Confusion& c) {
  if (c.total() == 0) {
    throw Error(ErrorCode::EmptyConfusion, "no predictions to score");
  }
  MetricsReport m;
  m.counts = c;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.precision = ratio(c.tp, c.tp + c.fp, "no positive predictions");
  m.recall = ratio(c.tp, c.tp + c.fn, "no positive instances");
  if (!m.precision.defined() || !m.recall.defined()) {
    m.f1 = {std::nullopt, "precision or recall undefined"};
  } else if (auto f = f1_score(*m.precision.value, *m.recall.value)) {
    m.f1 = {f, {}};
  } else {
    m.f1 = {std::nullopt, "precision and recall are both zero"};
  }
  return m;
}

std::vector<RowVerdict> consistency_check(std::span<const ReportedRow> rows, double tolerance_pp) {
  std::vector<RowVerdict> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    RowVerdict v;
    v.name = row.name;
    v.reported_f1 = row.f1;
    v.computed_f1 = f1_score(row.precision, row.recall).value_or(0.0);
    v.difference_pp = std::abs(v.computed_f1 - row.f1);
    v.consistent = v.difference_pp <= tolerance_pp;
    out.push_back(std::move(v));
  }
  return out;
}

std::string format_report(const MetricsReport& malware_positive,
                          const MetricsReport& normal_positive) {
  std::ostringstream os;
  os << "evaluated: " << malware_positive.counts.total() << " predictions\n";
  format_view(os, "malware as positive class:", malware_positive);
  format_view(os, "normal as positive class:", normal_positive);
  return os.str();
}

std::string report_json(const MetricsReport& malware_positive,
                        const MetricsReport& normal_positive, double threshold) {
  ordered_json j;
  j["threshold"] = threshold;
  j["malware_positive"] = view_json(malware_positive);
  j["normal_positive"] = view_json(normal_positive);
  return j.dump();
}

}  // namespace binvis::eval
