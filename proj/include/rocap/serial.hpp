#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rocap/annotate.hpp"
#include "rocap/capture.hpp"
#include "rocap/evalkit.hpp"
#include "rocap/handeye.hpp"
#include "rocap/object.hpp"
#include "rocap/sampler.hpp"
#include "rocap/transforms.hpp"

namespace rocap {

using Json = nlohmann::json;

// Transforms serialize as row-major 4x4 arrays (16 numbers), quaternions
// as [w, x, y, z]. All writers emit sorted keys and 2-space indentation so
// equal inputs give byte-equal files.

Json to_json(const Transform& t);
Transform transform_from_json(const Json& j);

Json to_json(const UnitQuaternion& q);
UnitQuaternion quat_from_json(const Json& j);

Json to_json(const ObjectSpec& object);
ObjectSpec object_from_json(const Json& j);

Json to_json(const Manifest& manifest);
Manifest manifest_from_json(const Json& j);

Json to_json(const CapturePlan& plan);
CapturePlan plan_from_json(const Json& j);

Json to_json(const CalibrationResult& calibration);
CalibrationResult calibration_from_json(const Json& j);

Json stations_to_json(const std::vector<Station>& stations);
std::vector<Station> stations_from_json(const Json& j);

Json prompts_to_json(const std::vector<PromptSet>& prompts);
std::vector<PromptSet> prompts_from_json(const Json& j);

Json predictions_to_json(const std::vector<PredictionRecord>& predictions);
std::vector<PredictionRecord> predictions_from_json(const Json& j);

/// Parses a file into JSON. Throws IoError when unreadable and DataError
/// on malformed JSON.
Json load_json(const std::filesystem::path& path);

/// Writes dump(2) plus a trailing newline. Throws IoError.
void save_json(const Json& j, const std::filesystem::path& path);

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

void write_plan(const CapturePlan& plan, const std::filesystem::path& path);
CapturePlan read_plan(const std::filesystem::path& path);

void write_calibration(const CalibrationResult& calibration,
                       const std::filesystem::path& path);
CalibrationResult read_calibration(const std::filesystem::path& path);

void write_stations(const std::vector<Station>& stations, const std::filesystem::path& path);
std::vector<Station> read_stations(const std::filesystem::path& path);

void write_prompts(const std::vector<PromptSet>& prompts, const std::filesystem::path& path);
std::vector<PromptSet> read_prompts(const std::filesystem::path& path);

void write_predictions(const std::vector<PredictionRecord>& predictions,
                       const std::filesystem::path& path);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

/// Writes a string verbatim (used for CSV and text reports).
void write_text(const std::string& text, const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

}  // namespace rocap
