#pragma once

// Scoring classifier output against a dataset manifest. Malware is the
// positive class: TP counts malware images predicted as malware.
//
//   A  = (TP + TN) / (TP + TN + FP + FN)
//   P  = TP / (TP + FP)
//   R  = TP / (TP + FN)
//   F1 = 2PR / (P + R)

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "binvis/dataset.hpp"

namespace binvis::eval {

inline constexpr double kDefaultThreshold = 0.5;

/// One line of a predictions file:
///   {"image_path": ..., "predicted_label": "normal"|"malware", "score": p}
/// At least one of predicted_label and score must be present.
struct PredictionRecord {
  std::string image_path;
  std::optional<dataset::Label> predicted_label;
  std::optional<double> score;  // malware probability
};

/// Throws Error(BadPrediction) on malformed lines, scores outside [0, 1], or
/// a label that disagrees with its score at the default threshold.
std::vector<PredictionRecord> read_predictions(std::istream& in);
std::vector<PredictionRecord> read_predictions_file(const std::string& path);
void write_predictions(std::ostream& out, std::span<const PredictionRecord> predictions);

/// The label a prediction stands for: the score against threshold when a
/// score is present, the stated label otherwise.
[[nodiscard]] dataset::Label effective_label(const PredictionRecord& p, double threshold);

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
  /// The same counts with the other class taken as positive.
  [[nodiscard]] Confusion swapped() const noexcept { return {tn, tp, fn, fp}; }

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Joins predictions with the test split of the manifest. Throws
/// MissingPrediction, UnknownImage (not a test-split image) or
/// DuplicatePrediction.
[[nodiscard]] Confusion confusion(const dataset::Manifest& manifest,
                                  std::span<const PredictionRecord> predictions,
                                  double threshold = kDefaultThreshold,
                                  dataset::Label positive = dataset::Label::Malware);

/// A ratio that may be undefined because its denominator is zero.
struct Ratio {
  std::optional<double> value;
  std::string undefined_reason;

  [[nodiscard]] bool defined() const noexcept { return value.has_value(); }
};

struct MetricsReport {
  Confusion counts;
  double accuracy = 0.0;
  Ratio precision;
  Ratio recall;
  Ratio f1;
};

/// Throws Error(EmptyConfusion) when all four counts are zero.
[[nodiscard]] MetricsReport metrics(const Confusion& c);

/// F1 from precision and recall (any common scale); nullopt when P + R == 0.
[[nodiscard]] std::optional<double> f1_score(double precision, double recall) noexcept;

/// A row of a published results table, values in percent.
struct ReportedRow {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline constexpr double kConsistencyTolerancePp = 0.05;

struct RowVerdict {
  std::string name;
  double computed_f1 = 0.0;  // percent
  double reported_f1 = 0.0;
  double difference_pp = 0.0;
  bool consistent = false;
};

/// Recomputes each row's F1 from its P and R and compares it with the
/// reported F1 within tolerance_pp percentage points.
[[nodiscard]] std::vector<RowVerdict> consistency_check(std::span<const ReportedRow> rows,
                                                        double tolerance_pp = kConsistencyTolerancePp);

/// Human-readable report: malware-positive view, then the normal-positive view.
std::string format_report(const MetricsReport& malware_positive,
                          const MetricsReport& normal_positive);
/// {"malware_positive": {...}, "normal_positive": {...}} on one line.
std::string report_json(const MetricsReport& malware_positive,
                        const MetricsReport& normal_positive, double threshold);

}  // namespace binvis::eval
