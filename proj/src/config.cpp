#include "rocap/config.hpp"

#include <algorithm>
#include <cmath>

namespace rocap {
namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* ctx) {
  if (!j.is_object()) throw ConfigError(std::string(ctx) + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known)
      throw ConfigError(std::string(ctx) + ": unknown key '" + it.key() + "'");
  }
}

DHChain chain_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw ConfigError("chain must be a non-empty list of links");
  std::vector<DHLink> links;
  for (const Json& jl : j) {
    check_keys(jl, {"a", "alpha", "d", "theta_offset", "limit_min", "limit_max"},
               "chain link");
    DHLink link;
    link.a = jl.value("a", 0.0);
    link.alpha = jl.value("alpha", 0.0);
    link.d = jl.value("d", 0.0);
    link.theta_offset = jl.value("theta_offset", 0.0);
    link.limit_min = jl.value("limit_min", -M_PI);
    link.limit_max = jl.value("limit_max", M_PI);
    links.push_back(link);
  }
  return DHChain(std::move(links));
}

Json chain_to_json(const DHChain& chain) {
  Json arr = Json::array();
  for (const DHLink& link : chain.links()) {
    Json jl;
    jl["a"] = link.a;
    jl["alpha"] = link.alpha;
    jl["d"] = link.d;
    jl["theta_offset"] = link.theta_offset;
    jl["limit_min"] = link.limit_min;
    jl["limit_max"] = link.limit_max;
    arr.push_back(jl);
  }
  return arr;
}

ObjectSpec strict_object_from_json(const Json& j) {
  check_keys(j, {"name", "category", "gripper_to_object", "states"}, "object");
  for (const Json& js : j.at("states")) {
    check_keys(js, {"id", "name", "change"}, "object state");
    check_keys(js.at("change"), {"kind", "grip_force"}, "state change");
  }
  return object_from_json(j);
}

std::pair<double, double> range_from_json(const Json& j, const char* ctx) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(std::string(ctx) + " range must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3_from_config(const Json& j, const char* ctx) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(std::string(ctx) + " must be a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

ToolkitConfig::ToolkitConfig()
    : chain(reference_chain()) {
  intrinsics.fx = 600.0;
  intrinsics.fy = 600.0;
  intrinsics.cx = 320.0;
  intrinsics.cy = 240.0;
  intrinsics.width = 640;
  intrinsics.height = 480;
  board.inner_rows = 6;
  board.inner_cols = 8;
  board.square_size = 0.025;

  ObjectSpec sponge;
  sponge.name = "sponge";
  sponge.category = ObjectCategory::kDeformable;
  sponge.states = {
      {0, "light_grip", {StateChangeKind::kAutomatic, 5.0}},
      {1, "medium_grip", {StateChangeKind::kAutomatic, 15.0}},
      {2, "firm_grip", {StateChangeKind::kAutomatic, 30.0}},
  };
  objects.push_back(std::move(sponge));
}

void ToolkitConfig::validate() const {
  if (version != 1) throw ConfigError("unsupported config version " + std::to_string(version));
  intrinsics.validate();
  board.validate();
  if (!(sampler.step_deg > 0.0) || sampler.step_deg > 360.0 ||
      std::abs(std::round(360.0 / sampler.step_deg) * sampler.step_deg - 360.0) > 1e-9)
    throw ConfigError("sampler step must divide 360 degrees");
  if (!(sampler.dedup_threshold > 0.0))
    throw ConfigError("dedup threshold must be positive");
  if (sampler.position_jitter < 0.0) throw ConfigError("position jitter must be >= 0");
  for (const ObjectSpec& object : objects) object.validate();
  if (!(augment.gain_min > 0.0 && augment.gain_min <= augment.gain_max))
    throw ConfigError("invalid exposure gain range");
  if (!(augment.contrast_min > 0.0 && augment.contrast_min <= augment.contrast_max))
    throw ConfigError("invalid contrast range");
  if (!(augment.saturation_min >= 0.0 && augment.saturation_min <= augment.saturation_max))
    throw ConfigError("invalid saturation range");
  if (!(annotate.cube_size > 0.0)) throw ConfigError("cube size must be positive");
  if (annotate.min_inside_ratio < 0.0 || annotate.min_inside_ratio > 1.0)
    throw ConfigError("min inside ratio must be in [0, 1]");
  if (render.extension != ".ppm" && render.extension != ".png")
    throw ConfigError("render extension must be .ppm or .png");
  if (!(render.object_extent > 0.0)) throw ConfigError("object extent must be positive");
}

const ObjectSpec& ToolkitConfig::object_named(const std::string& name) const {
  if (objects.empty()) throw ConfigError("config declares no objects");
  if (name.empty()) return objects.front();
  for (const ObjectSpec& object : objects)
    if (object.name == name) return object;
  throw ConfigError("config has no object named '" + name + "'");
}

ToolkitConfig config_from_json(const Json& j) {
  check_keys(j,
             {"version", "seed", "chain", "intrinsics", "checkerboard", "sampler", "objects",
              "augment", "annotate", "render", "paths"},
             "config");
  if (!j.contains("version")) throw ConfigError("config is missing the version field");

  ToolkitConfig config;
  config.version = j.at("version").get<int>();
  config.seed = j.value("seed", std::uint64_t{0});

  if (j.contains("chain")) config.chain = chain_from_json(j.at("chain"));

  if (j.contains("intrinsics")) {
    const Json& ji = j.at("intrinsics");
    check_keys(ji, {"fx", "fy", "cx", "cy", "width", "height"}, "intrinsics");
    config.intrinsics.fx = ji.at("fx").get<double>();
    config.intrinsics.fy = ji.at("fy").get<double>();
    config.intrinsics.cx = ji.at("cx").get<double>();
    config.intrinsics.cy = ji.at("cy").get<double>();
    config.intrinsics.width = ji.at("width").get<int>();
    config.intrinsics.height = ji.at("height").get<int>();
  }

  if (j.contains("checkerboard")) {
    const Json& jb = j.at("checkerboard");
    check_keys(jb, {"inner_rows", "inner_cols", "square_size"}, "checkerboard");
    config.board.inner_rows = jb.at("inner_rows").get<int>();
    config.board.inner_cols = jb.at("inner_cols").get<int>();
    config.board.square_size = jb.at("square_size").get<double>();
  }

  if (j.contains("sampler")) {
    const Json& js = j.at("sampler");
    check_keys(js,
               {"step_deg", "dedup_threshold", "capture_position", "tool_offset", "ordering",
                "position_jitter"},
               "sampler");
    config.sampler.step_deg = js.value("step_deg", config.sampler.step_deg);
    config.sampler.dedup_threshold = js.value("dedup_threshold", config.sampler.dedup_threshold);
    if (js.contains("capture_position"))
      config.sampler.capture_position =
          vec3_from_config(js.at("capture_position"), "capture_position");
    if (js.contains("tool_offset"))
      config.sampler.tool_offset = transform_from_json(js.at("tool_offset"));
    if (js.contains("ordering")) {
      const std::string ordering = js.at("ordering").get<std::string>();
      if (ordering == "grid")
        config.sampler.ordering = PlanOrdering::kGrid;
      else if (ordering == "nearest_neighbor")
        config.sampler.ordering = PlanOrdering::kNearestNeighbor;
      else
        throw ConfigError("unknown plan ordering '" + ordering + "'");
    }
    config.sampler.position_jitter = js.value("position_jitter", 0.0);
  }

  if (j.contains("objects")) {
    config.objects.clear();
    for (const Json& jo : j.at("objects")) config.objects.push_back(strict_object_from_json(jo));
  }

  if (j.contains("augment")) {
    const Json& ja = j.at("augment");
    check_keys(ja, {"gain", "contrast", "saturation"}, "augment");
    if (ja.contains("gain"))
      std::tie(config.augment.gain_min, config.augment.gain_max) =
          range_from_json(ja.at("gain"), "gain");
    if (ja.contains("contrast"))
      std::tie(config.augment.contrast_min, config.augment.contrast_max) =
          range_from_json(ja.at("contrast"), "contrast");
    if (ja.contains("saturation"))
      std::tie(config.augment.saturation_min, config.augment.saturation_max) =
          range_from_json(ja.at("saturation"), "saturation");
  }

  if (j.contains("annotate")) {
    const Json& jn = j.at("annotate");
    check_keys(jn,
               {"cube_size", "hue_min_deg", "hue_max_deg", "sat_min", "val_min", "min_count",
                "min_inside_ratio"},
               "annotate");
    config.annotate.cube_size = jn.value("cube_size", config.annotate.cube_size);
    config.annotate.green.hue_min_deg = jn.value("hue_min_deg", config.annotate.green.hue_min_deg);
    config.annotate.green.hue_max_deg = jn.value("hue_max_deg", config.annotate.green.hue_max_deg);
    config.annotate.green.sat_min = jn.value("sat_min", config.annotate.green.sat_min);
    config.annotate.green.val_min = jn.value("val_min", config.annotate.green.val_min);
    config.annotate.green.min_count =
        jn.value("min_count", config.annotate.green.min_count);
    config.annotate.min_inside_ratio =
        jn.value("min_inside_ratio", config.annotate.min_inside_ratio);
  }

  if (j.contains("render")) {
    const Json& jr = j.at("render");
    check_keys(jr, {"enabled", "extension", "object_extent", "gripper_patch"}, "render");
    config.render.enabled = jr.value("enabled", config.render.enabled);
    config.render.extension = jr.value("extension", config.render.extension);
    config.render.object_extent = jr.value("object_extent", config.render.object_extent);
    config.render.gripper_patch = jr.value("gripper_patch", config.render.gripper_patch);
  }

  if (j.contains("paths")) {
    const Json& jp = j.at("paths");
    check_keys(jp, {"output_dir"}, "paths");
    config.paths.output_dir = jp.value("output_dir", config.paths.output_dir);
  }

  config.validate();
  return config;
}

Json config_to_json(const ToolkitConfig& config) {
  Json j;
  j["version"] = config.version;
  j["seed"] = config.seed;
  j["chain"] = chain_to_json(config.chain);
  j["intrinsics"] = {{"fx", config.intrinsics.fx}, {"fy", config.intrinsics.fy},
                     {"cx", config.intrinsics.cx}, {"cy", config.intrinsics.cy},
                     {"width", config.intrinsics.width}, {"height", config.intrinsics.height}};
  j["checkerboard"] = {{"inner_rows", config.board.inner_rows},
                       {"inner_cols", config.board.inner_cols},
                       {"square_size", config.board.square_size}};
  j["sampler"] = {
      {"step_deg", config.sampler.step_deg},
      {"dedup_threshold", config.sampler.dedup_threshold},
      {"capture_position",
       Json::array({config.sampler.capture_position.x(), config.sampler.capture_position.y(),
                    config.sampler.capture_position.z()})},
      {"tool_offset", to_json(config.sampler.tool_offset)},
      {"ordering",
       config.sampler.ordering == PlanOrdering::kNearestNeighbor ? "nearest_neighbor" : "grid"},
      {"position_jitter", config.sampler.position_jitter}};
  Json objects = Json::array();
  for (const ObjectSpec& object : config.objects) objects.push_back(to_json(object));
  j["objects"] = objects;
  j["augment"] = {{"gain", Json::array({config.augment.gain_min, config.augment.gain_max})},
                  {"contrast",
                   Json::array({config.augment.contrast_min, config.augment.contrast_max})},
                  {"saturation", Json::array({config.augment.saturation_min,
                                              config.augment.saturation_max})}};
  j["annotate"] = {{"cube_size", config.annotate.cube_size},
                   {"hue_min_deg", config.annotate.green.hue_min_deg},
                   {"hue_max_deg", config.annotate.green.hue_max_deg},
                   {"sat_min", config.annotate.green.sat_min},
                   {"val_min", config.annotate.green.val_min},
                   {"min_count", config.annotate.green.min_count},
                   {"min_inside_ratio", config.annotate.min_inside_ratio}};
  j["render"] = {{"enabled", config.render.enabled},
                 {"extension", config.render.extension},
                 {"object_extent", config.render.object_extent},
                 {"gripper_patch", config.render.gripper_patch}};
  j["paths"] = {{"output_dir", config.paths.output_dir}};
  return j;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
  return config_from_json(load_json(path));
}

void save_config(const ToolkitConfig& config, const std::filesystem::path& path) {
  save_json(config_to_json(config), path);
}

}  // namespace rocap
