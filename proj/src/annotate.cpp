#include "rocap/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rocap/parallel.hpp"

namespace rocap {
namespace {

// Rec.601 luma from [0, 255] channel values.
double luminance(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

struct Hsv {
  double h;  // degrees, [0, 360)
  double s;  // [0, 1]
  double v;  // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out{0.0, 0.0, mx};
  if (mx > 0.0) out.s = delta / mx;
  if (delta > 0.0) {
    if (mx == r)
      out.h = 60.0 * std::fmod((g - b) / delta, 6.0);
    else if (mx == g)
      out.h = 60.0 * ((b - r) / delta + 2.0);
    else
      out.h = 60.0 * ((r - g) / delta + 4.0);
    if (out.h < 0.0) out.h += 360.0;
  }
  return out;
}

double uniform_draw(std::mt19937_64& rng, double lo, double hi) {
  // 53-bit mantissa draw; bit-stable across standard libraries, unlike
  // std::uniform_real_distribution.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

}  // namespace

void PromptSet::validate() const {
  if (!(bbox.x0 < bbox.x1) || !(bbox.y0 < bbox.y1))
    throw DataError("prompt " + record_id + ": degenerate bounding box");
  for (const Pixel& p : positive_points)
    if (!bbox.contains(p))
      throw DataError("prompt " + record_id + ": positive point outside bounding box");
}

void AugmentParams::validate() const {
  if (!(exposure_gain > 0.0) || !std::isfinite(exposure_gain))
    throw DataError("exposure gain must be positive");
  if (!(contrast > 0.0) || !std::isfinite(contrast))
    throw DataError("contrast must be positive");
  if (!(saturation >= 0.0) || !std::isfinite(saturation))
    throw DataError("saturation must be non-negative");
}

std::optional<BBox> bbox_from_cube(const CameraIntrinsics& k, const Transform& camera_to_object,
                                   double cube_size) {
  const double h = 0.5 * cube_size;
  double u_min = 1e300, u_max = -1e300, v_min = 1e300, v_max = -1e300;
  bool any = false;
  for (int ix : {-1, 1})
    for (int iy : {-1, 1})
      for (int iz : {-1, 1}) {
        const Vec3 corner = camera_to_object * Vec3(ix * h, iy * h, iz * h);
        const auto px = project_point(k, corner);
        if (!px) continue;
        any = true;
        u_min = std::min(u_min, px->x());
        u_max = std::max(u_max, px->x());
        v_min = std::min(v_min, px->y());
        v_max = std::max(v_max, px->y());
      }
  if (!any) return std::nullopt;
  BBox box;
  box.x0 = std::clamp(u_min, 0.0, static_cast<double>(k.width - 1));
  box.x1 = std::clamp(u_max, 0.0, static_cast<double>(k.width - 1));
  box.y0 = std::clamp(v_min, 0.0, static_cast<double>(k.height - 1));
  box.y1 = std::clamp(v_max, 0.0, static_cast<double>(k.height - 1));
  return box;
}

std::optional<Pixel> center_point_prompt(const CameraIntrinsics& k,
                                         const Transform& camera_to_object) {
  return project_point(k, camera_to_object.translation());
}

std::optional<GreenRegion> detect_green_region(const Image& image,
                                               const GreenDetectParams& params) {
  if (image.channels != 3) throw DimensionMismatch("green detection needs an RGB image");
  double sum_u = 0.0, sum_v = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const Hsv hsv = rgb_to_hsv(image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2));
      if (hsv.h < params.hue_min_deg || hsv.h > params.hue_max_deg) continue;
      if (hsv.s < params.sat_min || hsv.v < params.val_min) continue;
      sum_u += x;
      sum_v += y;
      ++count;
    }
  }
  if (count < params.min_count) return std::nullopt;
  GreenRegion region;
  region.centroid = Pixel(sum_u / count, sum_v / count);
  region.pixel_count = count;
  return region;
}

std::optional<PromptSet> build_prompt(const CameraIntrinsics& k, const std::string& record_id,
                                      const std::string& image_path,
                                      const Transform& camera_to_object, double cube_size,
                                      const Image* frame, const GreenDetectParams& green) {
  const auto box = bbox_from_cube(k, camera_to_object, cube_size);
  if (!box || !(box->x0 < box->x1) || !(box->y0 < box->y1)) return std::nullopt;

  PromptSet prompt;
  prompt.record_id = record_id;
  prompt.image_path = image_path;
  prompt.bbox = *box;
  if (const auto center = center_point_prompt(k, camera_to_object)) {
    const bool in_image = center->x() >= 0.0 && center->x() <= k.width - 1 &&
                          center->y() >= 0.0 && center->y() <= k.height - 1;
    if (in_image) prompt.positive_points.push_back(*center);
  }
  if (frame) {
    if (const auto region = detect_green_region(*frame, green))
      prompt.negative_points.push_back(region->centroid);
  }
  prompt.validate();
  return prompt;
}

Image augment(const Image& image, const AugmentParams& params) {
  if (image.channels != 3) throw DimensionMismatch("augmentation needs an RGB image");
  params.validate();
  if (params.is_identity()) return image;

  const std::size_t n = image.pixel_count();
  std::vector<double> buf(n * 3);
  for (std::size_t i = 0; i < n * 3; ++i)
    buf[i] = std::clamp(image.data[i] * params.exposure_gain, 0.0, 255.0);

  double mean_luma = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    mean_luma += luminance(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]);
  mean_luma /= static_cast<double>(n);
  for (std::size_t i = 0; i < n * 3; ++i)
    buf[i] = std::clamp(params.contrast * (buf[i] - mean_luma) + mean_luma, 0.0, 255.0);

  Image out = image;
  for (std::size_t i = 0; i < n; ++i) {
    const double luma = luminance(buf[3 * i], buf[3 * i + 1], buf[3 * i + 2]);
    for (int c = 0; c < 3; ++c) {
      const double v =
          std::clamp(luma + params.saturation * (buf[3 * i + c] - luma), 0.0, 255.0);
      out.data[3 * i + c] = static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return out;
}

std::vector<AugmentParams> sample_augment_params(const AugmentRanges& ranges, std::uint64_t seed,
                                                 std::size_t n) {
  const auto check = [](double lo, double hi, double floor, const char* what) {
    if (!(lo <= hi) || !(lo >= floor) || !std::isfinite(hi))
      throw InvalidRange(std::string("invalid ") + what + " range");
  };
  check(ranges.gain_min, ranges.gain_max, 1e-6, "exposure gain");
  check(ranges.contrast_min, ranges.contrast_max, 1e-6, "contrast");
  check(ranges.saturation_min, ranges.saturation_max, 0.0, "saturation");

  std::vector<AugmentParams> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t sub = derive_seed(seed, "augment-" + std::to_string(i));
    std::mt19937_64 rng(sub);
    out[i].exposure_gain = uniform_draw(rng, ranges.gain_min, ranges.gain_max);
    out[i].contrast = uniform_draw(rng, ranges.contrast_min, ranges.contrast_max);
    out[i].saturation = uniform_draw(rng, ranges.saturation_min, ranges.saturation_max);
    out[i].seed = sub;
  }
  return out;
}

MaskReport validate_mask(const Image& mask, const PromptSet& prompt, double min_inside_ratio) {
  if (mask.channels != 1) throw DimensionMismatch("mask must be single channel");
  if (prompt.bbox.x1 > mask.width - 1 || prompt.bbox.y1 > mask.height - 1)
    throw DimensionMismatch("mask smaller than the prompt frame");

  MaskReport report;
  report.record_id = prompt.record_id;
  std::size_t inside = 0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y, 0) == 0) continue;
      ++report.mask_area_px;
      if (prompt.bbox.contains(Pixel(x, y))) ++inside;
    }
  if (report.mask_area_px == 0) {
    report.accepted = false;
    return report;
  }
  report.inside_bbox_ratio =
      static_cast<double>(inside) / static_cast<double>(report.mask_area_px);
  report.accepted = report.inside_bbox_ratio >= min_inside_ratio;
  return report;
}

}  // namespace rocap
