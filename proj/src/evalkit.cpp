#include "rocap/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rocap/parallel.hpp"

namespace rocap {
namespace {

using RecordIndex = std::unordered_map<std::string, std::size_t>;

RecordIndex index_records(const Manifest& manifest) {
  RecordIndex index;
  for (std::size_t i = 0; i < manifest.records.size(); ++i)
    index.emplace(manifest.records[i].record_id, i);
  return index;
}

// Resolves every prediction to its manifest record, rejecting unknown and
// duplicate ids.
std::vector<std::size_t> match_predictions(const std::vector<PredictionRecord>& predictions,
                                           const Manifest& manifest, const RecordIndex& index) {
  if (predictions.empty()) throw EmptyPredictionSet("no predictions to evaluate");
  std::vector<std::size_t> matched(predictions.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto it = index.find(predictions[i].record_id);
    if (it == index.end())
      throw UnknownRecordId("prediction references unknown record " +
                            predictions[i].record_id);
    if (!seen.insert(predictions[i].record_id).second)
      throw DataError("duplicate prediction for record " + predictions[i].record_id);
    matched[i] = it->second;
  }
  (void)manifest;
  return matched;
}

std::vector<double> matched_errors(const std::vector<PredictionRecord>& predictions,
                                   const Manifest& manifest,
                                   const std::vector<std::size_t>& matched) {
  std::vector<double> errors(predictions.size());
  parallel_for(predictions.size(), [&](std::size_t i) {
    errors[i] = orientation_error(predictions[i].quaternion,
                                  manifest.records[matched[i]].label_quaternion);
  });
  return errors;
}

double quantile_interp(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, n - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double orientation_error(const UnitQuaternion& pred, const UnitQuaternion& gt) {
  return arc_distance(pred, gt);
}

double accuracy_at(double threshold, const std::vector<PredictionRecord>& predictions,
                   const Manifest& manifest, bool strict) {
  const RecordIndex index = index_records(manifest);
  const auto matched = match_predictions(predictions, manifest, index);
  const auto errors = matched_errors(predictions, manifest, matched);

  std::size_t hits = 0;
  for (double e : errors)
    if (e <= threshold) ++hits;
  const std::size_t denom = strict ? manifest.records.size() : predictions.size();
  if (denom == 0) throw EmptyPredictionSet("manifest has no records");
  return 100.0 * static_cast<double>(hits) / static_cast<double>(denom);
}

PerStateAccuracy per_state_mean(double threshold,
                                const std::vector<PredictionRecord>& predictions,
                                const Manifest& manifest, bool strict) {
  const RecordIndex index = index_records(manifest);
  const auto matched = match_predictions(predictions, manifest, index);
  const auto errors = matched_errors(predictions, manifest, matched);

  // States come from the object spec when declared, otherwise from the
  // record set itself.
  std::map<int, std::size_t> state_record_counts;
  if (!manifest.object.states.empty())
    for (const ObjectState& s : manifest.object.states) state_record_counts[s.id] = 0;
  for (const CaptureRecord& rec : manifest.records) {
    const auto it = state_record_counts.find(rec.state_id);
    if (it != state_record_counts.end())
      ++it->second;
    else if (manifest.object.states.empty())
      ++state_record_counts[rec.state_id];
    else
      throw DataError("record " + rec.record_id + " has undeclared state " +
                      std::to_string(rec.state_id));
  }

  std::map<int, std::size_t> hits, preds;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int state = manifest.records[matched[i]].state_id;
    ++preds[state];
    if (errors[i] <= threshold) ++hits[state];
  }

  PerStateAccuracy out;
  double sum = 0.0;
  for (const auto& [state, record_count] : state_record_counts) {
    if (record_count == 0)
      throw EmptyState("state " + std::to_string(state) + " has no records");
    const std::size_t p = preds.count(state) ? preds.at(state) : 0;
    const std::size_t h = hits.count(state) ? hits.at(state) : 0;
    double acc;
    if (strict) {
      acc = 100.0 * static_cast<double>(h) / static_cast<double>(record_count);
    } else {
      if (p == 0)
        throw EmptyPredictionSet("state " + std::to_string(state) + " has no predictions");
      acc = 100.0 * static_cast<double>(h) / static_cast<double>(p);
    }
    out.by_state[state] = acc;
    sum += acc;
  }
  out.mean = sum / static_cast<double>(out.by_state.size());
  return out;
}

PixelErrorStats pixel_error(const std::vector<PredictionRecord>& predictions,
                            const Manifest& manifest) {
  const RecordIndex index = index_records(manifest);
  const auto matched = match_predictions(predictions, manifest, index);

  std::vector<double> errors(predictions.size());
  parallel_for(predictions.size(), [&](std::size_t i) {
    errors[i] =
        (predictions[i].pixel_center - manifest.records[matched[i]].label_pixel_center).norm();
  });

  PixelErrorStats stats;
  stats.count = errors.size();
  for (double e : errors) stats.mean += e;
  stats.mean /= static_cast<double>(errors.size());
  std::sort(errors.begin(), errors.end());
  stats.p50 = quantile_interp(errors, 0.50);
  stats.p90 = quantile_interp(errors, 0.90);
  stats.p99 = quantile_interp(errors, 0.99);
  return stats;
}

double state_accuracy(const std::vector<PredictionRecord>& predictions,
                      const Manifest& manifest) {
  const RecordIndex index = index_records(manifest);
  const auto matched = match_predictions(predictions, manifest, index);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!predictions[i].state_id)
      throw DataError("prediction " + predictions[i].record_id + " is missing a state id");
    if (*predictions[i].state_id == manifest.records[matched[i]].state_id) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(predictions.size());
}

EvalReport evaluate(const std::vector<PredictionRecord>& predictions, const Manifest& manifest,
                    double threshold, bool strict) {
  EvalReport report;
  report.object_name = manifest.object.name;
  report.threshold_rad = threshold;
  report.record_count = manifest.records.size();
  report.prediction_count = predictions.size();

  const PerStateAccuracy per_state = per_state_mean(threshold, predictions, manifest, strict);
  report.per_state_accuracy = per_state.by_state;
  report.mean_accuracy = per_state.mean;
  report.pixel = pixel_error(predictions, manifest);

  const bool all_have_states = std::all_of(predictions.begin(), predictions.end(),
                                           [](const PredictionRecord& p) {
                                             return p.state_id.has_value();
                                           });
  if (all_have_states) report.state_classification_accuracy = state_accuracy(predictions, manifest);
  return report;
}

std::string format_cell(const ReportCell& cell) {
  char buf[64];
  if (cell.alt)
    std::snprintf(buf, sizeof(buf), "%.1f(%.1f)", cell.value, *cell.alt);
  else
    std::snprintf(buf, sizeof(buf), "%.1f", cell.value);
  return std::string(buf);
}

namespace {

struct TableLayout {
  std::vector<std::string> methods;  // row order
  std::vector<std::string> objects;  // column order
  std::map<std::pair<std::string, std::string>, std::string> cells;
};

TableLayout layout_table(const std::vector<ReportEntry>& entries) {
  if (entries.empty()) throw DataError("report has no entries");
  TableLayout t;
  for (const ReportEntry& e : entries) {
    if (std::find(t.methods.begin(), t.methods.end(), e.method) == t.methods.end())
      t.methods.push_back(e.method);
    if (std::find(t.objects.begin(), t.objects.end(), e.object) == t.objects.end())
      t.objects.push_back(e.object);
    t.cells[{e.method, e.object}] = format_cell(e.cell);
  }
  return t;
}

}  // namespace

std::string render_report_text(const std::vector<ReportEntry>& entries) {
  const TableLayout t = layout_table(entries);

  std::size_t method_width = std::string("method").size();
  for (const auto& m : t.methods) method_width = std::max(method_width, m.size());
  std::vector<std::size_t> col_width(t.objects.size());
  for (std::size_t c = 0; c < t.objects.size(); ++c) {
    col_width[c] = t.objects[c].size();
    for (const auto& m : t.methods) {
      const auto it = t.cells.find({m, t.objects[c]});
      if (it != t.cells.end()) col_width[c] = std::max(col_width[c], it->second.size());
    }
  }

  const auto pad = [](const std::string& s, std::size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  std::ostringstream out;
  out << pad("method", method_width);
  for (std::size_t c = 0; c < t.objects.size(); ++c) {
    out << "  " << (c + 1 < t.objects.size() ? pad(t.objects[c], col_width[c]) : t.objects[c]);
  }
  out << "\n";
  for (const auto& m : t.methods) {
    out << pad(m, method_width);
    for (std::size_t c = 0; c < t.objects.size(); ++c) {
      const auto it = t.cells.find({m, t.objects[c]});
      const std::string cell = it != t.cells.end() ? it->second : std::string("-");
      out << "  " << (c + 1 < t.objects.size() ? pad(cell, col_width[c]) : cell);
    }
    out << "\n";
  }
  return out.str();
}

std::string render_report_csv(const std::vector<ReportEntry>& entries) {
  const TableLayout t = layout_table(entries);
  std::ostringstream out;
  out << "method";
  for (const auto& o : t.objects) out << "," << o;
  out << "\n";
  for (const auto& m : t.methods) {
    out << m;
    for (const auto& o : t.objects) {
      const auto it = t.cells.find({m, o});
      out << "," << (it != t.cells.end() ? it->second : std::string());
    }
    out << "\n";
  }
  return out.str();
}

std::vector<ReportEntry> parse_report_csv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty report CSV");

  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream fs(s);
    while (std::getline(fs, field, ',')) fields.push_back(field);
    if (!s.empty() && s.back() == ',') fields.push_back("");
    return fields;
  };

  const auto header = split(line);
  if (header.empty() || header[0] != "method")
    throw DataError("report CSV must start with a 'method' header");

  std::vector<ReportEntry> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size())
      throw DataError("report CSV row has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      if (fields[c].empty()) continue;
      ReportEntry e;
      e.method = fields[0];
      e.object = header[c];
      double value = 0.0, alt = 0.0;
      if (std::sscanf(fields[c].c_str(), "%lf(%lf)", &value, &alt) == 2) {
        e.cell.value = value;
        e.cell.alt = alt;
      } else if (std::sscanf(fields[c].c_str(), "%lf", &value) == 1) {
        e.cell.value = value;
      } else {
        throw DataError("unparseable report cell: " + fields[c]);
      }
      entries.push_back(std::move(e));
    }
  }
  if (entries.empty()) throw DataError("report CSV has no data rows");
  return entries;
}

}  // namespace rocap
