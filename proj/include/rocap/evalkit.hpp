#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rocap/capture.hpp"
#include "rocap/transforms.hpp"

namespace rocap {

/// An externally produced pose prediction keyed to a manifest record.
struct PredictionRecord {
  std::string record_id;
  UnitQuaternion quaternion;
  Pixel pixel_center = Pixel::Zero();
  std::optional<int> state_id;
};

inline constexpr double kDefaultAccuracyThreshold = 0.35;  // rad, about 20 deg

/// Geodesic angle between predicted and true orientation, sign-invariant.
double orientation_error(const UnitQuaternion& pred, const UnitQuaternion& gt);

/// Percent of predictions whose orientation error is within `threshold`
/// (closed interval). In strict mode the denominator is the full manifest
/// and ground-truth records without a prediction count as failures.
/// Throws UnknownRecordId for unmatched prediction ids and
/// EmptyPredictionSet for an empty input.
double accuracy_at(double threshold, const std::vector<PredictionRecord>& predictions,
                   const Manifest& manifest, bool strict = false);

struct PerStateAccuracy {
  std::map<int, double> by_state;  // percent per state id
  double mean = 0.0;               // unweighted mean over states
};

/// accuracy_at within each state group declared by the manifest's object
/// spec. Throws EmptyState for a declared state with no records, and
/// EmptyPredictionSet for a state with records but no predictions when
/// strict is off (strict mode scores such a state 0).
PerStateAccuracy per_state_mean(double threshold,
                                const std::vector<PredictionRecord>& predictions,
                                const Manifest& manifest, bool strict = false);

struct PixelErrorStats {
  double mean = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  std::size_t count = 0;
};

/// Euclidean pixel-center error statistics over matched predictions.
/// Quantiles use linear interpolation between order statistics.
PixelErrorStats pixel_error(const std::vector<PredictionRecord>& predictions,
                            const Manifest& manifest);

/// Percent of predictions whose state id matches the ground truth. Every
/// prediction must carry a state id.
double state_accuracy(const std::vector<PredictionRecord>& predictions,
                      const Manifest& manifest);

struct EvalReport {
  std::string object_name;
  double threshold_rad = kDefaultAccuracyThreshold;
  std::map<int, double> per_state_accuracy;
  double mean_accuracy = 0.0;
  PixelErrorStats pixel;
  std::optional<double> state_classification_accuracy;
  std::size_t record_count = 0;
  std::size_t prediction_count = 0;
};

/// Full evaluation of one prediction set against one manifest.
EvalReport evaluate(const std::vector<PredictionRecord>& predictions, const Manifest& manifest,
                    double threshold = kDefaultAccuracyThreshold, bool strict = false);

/// One table cell, one decimal place; `alt` renders parenthesized after
/// the value, e.g. 87.1 with alt 66.9 prints as "87.1(66.9)".
struct ReportCell {
  double value = 0.0;
  std::optional<double> alt;
};

std::string format_cell(const ReportCell& cell);

/// One (method, object) table entry for the comparison report.
struct ReportEntry {
  std::string method;
  std::string object;
  ReportCell cell;
};

/// Plain-text comparison table: methods as rows, objects as columns in
/// first-appearance order, two-space column gap.
std::string render_report_text(const std::vector<ReportEntry>& entries);

/// Same table as CSV. Round-trips through parse_report_csv.
std::string render_report_csv(const std::vector<ReportEntry>& entries);

std::vector<ReportEntry> parse_report_csv(const std::string& csv);

}  // namespace rocap
