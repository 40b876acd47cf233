#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rocap/config.hpp"
#include "rocap/errors.hpp"
#include "rocap/evalkit.hpp"
#include "rocap/parallel.hpp"
#include "rocap/serial.hpp"

namespace {

using namespace rocap;

namespace fs = std::filesystem;

std::string fmt1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return std::string(buf);
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf);
}

fs::path out_path(const ToolkitConfig& config, const std::string& flag_value,
                  const char* default_name) {
  if (!flag_value.empty()) return flag_value;
  return fs::path(config.paths.output_dir) / default_name;
}

struct CommonArgs {
  std::string config_path;
  unsigned threads = 0;  // 0 = ROCAPKIT_THREADS, else hardware
};

ToolkitConfig load_or_default(const std::string& config_path) {
  if (config_path.empty()) return ToolkitConfig();
  return load_config(config_path);
}

unsigned resolve_threads(unsigned flag) {
  return flag > 0 ? flag : default_thread_count();
}

int cmd_config(const std::string& output) {
  const ToolkitConfig config;
  if (output.empty() || output == "-")
    std::cout << config_to_json(config).dump(2) << "\n";
  else
    save_config(config, output);
  return 0;
}

int cmd_calibrate(const CommonArgs& common, const std::string& stations_path,
                  const std::string& output, const std::string& pairing_name) {
  const ToolkitConfig config = load_or_default(common.config_path);
  const std::vector<Station> stations = read_stations(stations_path);

  PairingStrategy pairing = PairingStrategy::kAuto;
  if (pairing_name == "consecutive") pairing = PairingStrategy::kConsecutive;
  else if (pairing_name == "all") pairing = PairingStrategy::kAllPairs;
  else if (pairing_name != "auto") throw DataError("unknown pairing '" + pairing_name + "'");

  const auto pairs = build_motion_pairs(stations, pairing);
  const CalibrationResult result = solve_ax_xb(pairs, stations);
  write_calibration(result, out_path(config, output, "calibration.json"));
  std::cout << "stations: " << stations.size() << "\n"
            << "motion_pairs: " << pairs.size() << "\n"
            << "rot_residual_rms: " << result.rot_residual_rms << "\n"
            << "trans_residual_rms: " << result.trans_residual_rms << "\n";
  return 0;
}

int cmd_plan(const CommonArgs& common, const std::string& object_name, double step_override,
             const std::string& plan_out, const std::string& coverage_out) {
  const ToolkitConfig config = load_or_default(common.config_path);
  const ObjectSpec& object = config.object_named(object_name);
  const double step = step_override > 0.0 ? step_override : config.sampler.step_deg;

  std::vector<OrientationSample> samples = sample_euler_grid(step);
  dedup_by_arc(samples, config.sampler.dedup_threshold);

  ReachabilityOptions reach;
  reach.position_jitter = config.sampler.position_jitter;
  reach.seed = derive_seed(config.seed, "reachability");
  reach.threads = resolve_threads(common.threads);
  filter_reachable(samples, config.chain, config.sampler.capture_position,
                   config.sampler.tool_offset, reach);

  const CapturePlan plan = build_capture_plan(samples, object, config.chain,
                                              config.sampler.capture_position,
                                              config.sampler.ordering);

  write_plan(plan, out_path(config, plan_out, "plan.json"));
  write_coverage_csv(samples, out_path(config, coverage_out, "coverage.csv"));

  std::size_t retained = 0, reachable = 0;
  for (const auto& s : samples) {
    retained += s.retained ? 1 : 0;
    reachable += s.reachable ? 1 : 0;
  }
  std::cout << "samples: " << samples.size() << "\n"
            << "retained: " << retained << "\n"
            << "reachable: " << reachable << "\n"
            << "waypoints: " << plan.waypoints.size() << "\n";
  return 0;
}

int cmd_capture(const CommonArgs& common, const std::string& plan_path,
                const std::string& calibration_path, const std::string& object_name,
                bool sim, bool dry_run, bool render, const std::string& frames_dir,
                const std::string& output, std::int64_t seed_flag, bool wait) {
  const ToolkitConfig config = load_or_default(common.config_path);
  if (!sim && !dry_run) throw DataError("choose a capture mode: --sim or --dry-run");
  if (calibration_path.empty())
    throw CalibrationMissing("capture requires --calibration (run calibrate first)");

  const CapturePlan plan = read_plan(plan_path);
  const CalibrationResult calibration = read_calibration(calibration_path);
  const ObjectSpec& object =
      config.object_named(!object_name.empty() ? object_name : plan.object_ref);

  CaptureOptions options;
  options.mode = dry_run ? CaptureMode::kDryRun : CaptureMode::kSim;
  options.seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : config.seed;
  options.chain = &config.chain;
  options.calibration_ref = calibration_path;
  options.intrinsics_ref = common.config_path;  // intrinsics live in the config
  options.render.enabled = render || config.render.enabled;
  options.render.directory = frames_dir.empty()
                                 ? fs::path(config.paths.output_dir) / "frames"
                                 : fs::path(frames_dir);
  options.render.extension = config.render.extension;
  options.render.object_extent = config.render.object_extent;
  options.render.gripper_patch = config.render.gripper_patch;

  if (wait) {
    for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
      if (!plan.waypoints[i].operator_pause) continue;
      std::cerr << "state change to state " << plan.waypoints[i].state_id
                << " required; press Enter to continue\n";
      std::string line;
      if (!std::getline(std::cin, line)) break;  // EOF acknowledges the rest
    }
  }

  const Manifest manifest = run_capture(plan, calibration, config.intrinsics, object, options);
  validate_manifest(manifest);
  write_manifest(manifest, out_path(config, output, "manifest.json"));
  std::cout << "records: " << manifest.records.size() << "\n"
            << "operator_events: " << manifest.events.size() << "\n";
  return 0;
}

int cmd_annotate(const CommonArgs& common, const std::string& manifest_path,
                 const std::string& output) {
  const ToolkitConfig config = load_or_default(common.config_path);
  const Manifest manifest = read_manifest(manifest_path);

  std::vector<PromptSet> prompts;
  std::size_t skipped = 0;
  for (const CaptureRecord& rec : manifest.records) {
    std::optional<Image> frame;
    if (!rec.image_path.empty() && fs::exists(rec.image_path))
      frame = read_image(rec.image_path);
    const auto prompt = build_prompt(config.intrinsics, rec.record_id, rec.image_path,
                                     rec.camera_to_object, config.annotate.cube_size,
                                     frame ? &*frame : nullptr, config.annotate.green);
    if (prompt)
      prompts.push_back(*prompt);
    else
      ++skipped;
  }
  write_prompts(prompts, out_path(config, output, "prompts.json"));
  std::cout << "prompts: " << prompts.size() << "\n"
            << "skipped: " << skipped << "\n";
  return 0;
}

int cmd_validate_masks(const CommonArgs& common, const std::string& prompts_path,
                       const std::string& masks_dir, const std::string& output,
                       double ratio_override) {
  const ToolkitConfig config = load_or_default(common.config_path);
  const std::vector<PromptSet> prompts = read_prompts(prompts_path);
  const double min_ratio =
      ratio_override >= 0.0 ? ratio_override : config.annotate.min_inside_ratio;

  Json reports = Json::array();
  std::size_t accepted = 0;
  for (const PromptSet& prompt : prompts) {
    fs::path mask_path = fs::path(masks_dir) / (prompt.record_id + "_mask.png");
    if (!fs::exists(mask_path))
      mask_path = fs::path(masks_dir) / (prompt.record_id + "_mask.pgm");

    MaskReport report;
    report.record_id = prompt.record_id;
    if (fs::exists(mask_path)) {
      const Image mask = read_image(mask_path);
      report = validate_mask(mask, prompt, min_ratio);
    }
    accepted += report.accepted ? 1 : 0;

    Json jr;
    jr["record_id"] = report.record_id;
    jr["mask_area_px"] = report.mask_area_px;
    jr["inside_bbox_ratio"] = report.inside_bbox_ratio;
    jr["verdict"] = report.accepted ? "accept" : "discard";
    reports.push_back(jr);
  }
  save_json(reports, out_path(config, output, "mask_reports.json"));
  std::cout << "accepted: " << accepted << " of " << prompts.size() << "\n";
  return 0;
}

int cmd_augment(const CommonArgs& common, const std::string& manifest_path, int count,
                const std::string& output_dir, const std::string& output,
                std::int64_t seed_flag) {
  const ToolkitConfig config = load_or_default(common.config_path);
  const Manifest manifest = read_manifest(manifest_path);
  if (count < 1) throw DataError("--count must be >= 1");

  std::vector<const CaptureRecord*> with_images;
  for (const CaptureRecord& rec : manifest.records)
    if (!rec.image_path.empty()) with_images.push_back(&rec);
  if (with_images.empty()) throw DataError("manifest has no rendered frames to augment");

  const std::uint64_t seed =
      seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : config.seed;
  const auto params = sample_augment_params(config.augment, derive_seed(seed, "augment"),
                                            with_images.size() * static_cast<std::size_t>(count));

  const fs::path dir = output_dir.empty()
                           ? fs::path(config.paths.output_dir) / "augmented"
                           : fs::path(output_dir);
  fs::create_directories(dir);

  Json entries = Json::array();
  std::size_t p = 0;
  for (const CaptureRecord* rec : with_images) {
    const Image source = read_image(rec->image_path);
    for (int k = 0; k < count; ++k, ++p) {
      const Image derived = augment(source, params[p]);
      const fs::path file =
          dir / (rec->record_id + "_aug" + std::to_string(k) +
                 fs::path(rec->image_path).extension().string());
      write_image(derived, file);
      Json je;
      je["record_id"] = rec->record_id;
      je["source_image"] = rec->image_path;
      je["image_path"] = file.string();
      je["exposure_gain"] = params[p].exposure_gain;
      je["contrast"] = params[p].contrast;
      je["saturation"] = params[p].saturation;
      je["seed"] = params[p].seed;
      entries.push_back(je);
    }
  }
  save_json(entries, out_path(config, output, "augmented.json"));
  std::cout << "augmented: " << entries.size() << "\n";
  return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& predictions_path,
                 double threshold, bool strict, const std::string& output) {
  const Manifest manifest = read_manifest(manifest_path);
  const std::vector<PredictionRecord> predictions = read_predictions(predictions_path);
  const EvalReport report = evaluate(predictions, manifest, threshold, strict);

  std::cout << "object: " << report.object_name << "\n"
            << "records: " << report.record_count << "\n"
            << "predictions: " << report.prediction_count << "\n";
  for (const auto& [state, acc] : report.per_state_accuracy)
    std::cout << "state_" << state << "_accuracy: " << fmt1(acc) << "\n";
  std::cout << "mean_accuracy: " << fmt1(report.mean_accuracy) << "\n"
            << "pixel_error_mean: " << fmt2(report.pixel.mean) << "\n"
            << "pixel_error_p50: " << fmt2(report.pixel.p50) << "\n"
            << "pixel_error_p90: " << fmt2(report.pixel.p90) << "\n"
            << "pixel_error_p99: " << fmt2(report.pixel.p99) << "\n";
  if (report.state_classification_accuracy)
    std::cout << "state_classification_accuracy: "
              << fmt1(*report.state_classification_accuracy) << "\n";

  if (!output.empty()) {
    Json j;
    j["object"] = report.object_name;
    j["threshold_rad"] = report.threshold_rad;
    Json per_state;
    for (const auto& [state, acc] : report.per_state_accuracy)
      per_state[std::to_string(state)] = acc;
    j["per_state_accuracy"] = per_state;
    j["mean_accuracy"] = report.mean_accuracy;
    j["pixel_error"] = {{"mean", report.pixel.mean},
                        {"p50", report.pixel.p50},
                        {"p90", report.pixel.p90},
                        {"p99", report.pixel.p99}};
    if (report.state_classification_accuracy)
      j["state_classification_accuracy"] = *report.state_classification_accuracy;
    j["counts"] = {{"records", report.record_count},
                   {"predictions", report.prediction_count}};
    save_json(j, output);
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& entry_files, const std::string& csv_out) {
  std::vector<ReportEntry> entries;
  for (const std::string& file : entry_files) {
    const Json j = load_json(file);
    if (!j.is_array()) throw DataError(file + ": report entries must be a JSON list");
    for (const Json& je : j) {
      ReportEntry e;
      e.method = je.at("method").get<std::string>();
      e.object = je.at("object").get<std::string>();
      e.cell.value = je.at("value").get<double>();
      if (je.contains("alt")) e.cell.alt = je.at("alt").get<double>();
      entries.push_back(std::move(e));
    }
  }
  std::cout << render_report_text(entries);
  if (!csv_out.empty()) write_text(render_report_csv(entries), csv_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rocapkit: capture planning, calibration, labeling, and evaluation toolkit"};
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("--threads", common.threads,
                 "worker threads (default: ROCAPKIT_THREADS or hardware)");

  std::string cfg_output;
  auto* sc_config = app.add_subcommand("config", "write the default configuration");
  sc_config->add_option("-o,--output", cfg_output, "output path ('-' for stdout)");

  std::string cal_stations, cal_output, cal_pairing = "auto";
  auto* sc_cal = app.add_subcommand("calibrate", "solve the fixed camera pose from stations");
  sc_cal->add_option("-c,--config", common.config_path, "config file");
  sc_cal->add_option("--stations", cal_stations, "stations JSON file")->required();
  sc_cal->add_option("-o,--output", cal_output, "calibration output file");
  sc_cal->add_option("--pairing", cal_pairing, "auto|consecutive|all");

  std::string plan_object, plan_output, plan_coverage;
  double plan_step = 0.0;
  auto* sc_plan = app.add_subcommand("plan", "sample orientations and build a capture plan");
  sc_plan->add_option("-c,--config", common.config_path, "config file");
  sc_plan->add_option("--object", plan_object, "object name from the config");
  sc_plan->add_option("--step", plan_step, "Euler grid step in degrees");
  sc_plan->add_option("-o,--output", plan_output, "plan output file");
  sc_plan->add_option("--coverage", plan_coverage, "coverage CSV output file");

  std::string cap_plan, cap_calibration, cap_object, cap_frames, cap_output;
  bool cap_sim = false, cap_dry = false, cap_render = false, cap_wait = false;
  std::int64_t cap_seed = -1;
  auto* sc_cap = app.add_subcommand("capture", "run a simulated capture session");
  sc_cap->add_option("-c,--config", common.config_path, "config file");
  sc_cap->add_option("--plan", cap_plan, "plan JSON file")->required();
  sc_cap->add_option("--calibration", cap_calibration, "calibration JSON file");
  sc_cap->add_option("--object", cap_object, "object name (default: plan's object)");
  sc_cap->add_flag("--sim", cap_sim, "simulated session");
  sc_cap->add_flag("--dry-run", cap_dry, "records only, no frames");
  sc_cap->add_flag("--render", cap_render, "render synthetic frames");
  sc_cap->add_flag("--wait", cap_wait, "block for operator acknowledgment on manual changes");
  sc_cap->add_option("--frames", cap_frames, "frame output directory");
  sc_cap->add_option("--seed", cap_seed, "session seed (default: config seed)");
  sc_cap->add_option("-o,--output", cap_output, "manifest output file");

  std::string ann_manifest, ann_output;
  auto* sc_ann = app.add_subcommand("annotate", "generate segmentation prompts");
  sc_ann->add_option("-c,--config", common.config_path, "config file");
  sc_ann->add_option("--manifest", ann_manifest, "manifest JSON file")->required();
  sc_ann->add_option("-o,--output", ann_output, "prompts output file");

  std::string vm_prompts, vm_masks, vm_output;
  double vm_ratio = -1.0;
  auto* sc_vm = app.add_subcommand("validate-masks", "check externally produced masks");
  sc_vm->add_option("-c,--config", common.config_path, "config file");
  sc_vm->add_option("--prompts", vm_prompts, "prompts JSON file")->required();
  sc_vm->add_option("--masks", vm_masks, "directory of <record_id>_mask images")->required();
  sc_vm->add_option("--min-inside-ratio", vm_ratio, "acceptance ratio override");
  sc_vm->add_option("-o,--output", vm_output, "mask report output file");

  std::string aug_manifest, aug_dir, aug_output;
  int aug_count = 1;
  std::int64_t aug_seed = -1;
  auto* sc_aug = app.add_subcommand("augment", "photometrically augment captured frames");
  sc_aug->add_option("-c,--config", common.config_path, "config file");
  sc_aug->add_option("--manifest", aug_manifest, "manifest JSON file")->required();
  sc_aug->add_option("--count", aug_count, "derived images per frame");
  sc_aug->add_option("--output-dir", aug_dir, "derived image directory");
  sc_aug->add_option("--seed", aug_seed, "augmentation seed (default: config seed)");
  sc_aug->add_option("-o,--output", aug_output, "augmentation manifest output file");

  std::string ev_manifest, ev_predictions, ev_output;
  double ev_threshold = kDefaultAccuracyThreshold;
  bool ev_strict = false;
  auto* sc_ev = app.add_subcommand("evaluate", "score predictions against a manifest");
  sc_ev->add_option("--manifest", ev_manifest, "ground-truth manifest")->required();
  sc_ev->add_option("--predictions", ev_predictions, "predictions JSON file")->required();
  sc_ev->add_option("--threshold", ev_threshold, "orientation threshold in radians");
  sc_ev->add_flag("--strict", ev_strict, "count unmatched ground truth as failures");
  sc_ev->add_option("-o,--output", ev_output, "evaluation report JSON output");

  std::vector<std::string> rep_files;
  std::string rep_csv;
  auto* sc_rep = app.add_subcommand("report", "render a method-by-object comparison table");
  sc_rep->add_option("entries", rep_files, "entry JSON files")->required();
  sc_rep->add_option("--csv", rep_csv, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (common.threads > 0)
    setenv("ROCAPKIT_THREADS", std::to_string(common.threads).c_str(), 1);

  try {
    if (sc_config->parsed()) return cmd_config(cfg_output);
    if (sc_cal->parsed()) return cmd_calibrate(common, cal_stations, cal_output, cal_pairing);
    if (sc_plan->parsed())
      return cmd_plan(common, plan_object, plan_step, plan_output, plan_coverage);
    if (sc_cap->parsed())
      return cmd_capture(common, cap_plan, cap_calibration, cap_object, cap_sim, cap_dry,
                         cap_render, cap_frames, cap_output, cap_seed, cap_wait);
    if (sc_ann->parsed()) return cmd_annotate(common, ann_manifest, ann_output);
    if (sc_vm->parsed())
      return cmd_validate_masks(common, vm_prompts, vm_masks, vm_output, vm_ratio);
    if (sc_aug->parsed())
      return cmd_augment(common, aug_manifest, aug_count, aug_dir, aug_output, aug_seed);
    if (sc_ev->parsed())
      return cmd_evaluate(ev_manifest, ev_predictions, ev_threshold, ev_strict, ev_output);
    if (sc_rep->parsed()) return cmd_report(rep_files, rep_csv);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
