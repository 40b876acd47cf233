#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rocap/camera.hpp"
#include "rocap/image.hpp"
#include "rocap/transforms.hpp"

namespace rocap {

/// Pixel-space bounding box, x0 < x1 and y0 < y1 once validated.
struct BBox {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  bool contains(const Pixel& p) const {
    return p.x() >= x0 && p.x() <= x1 && p.y() >= y0 && p.y() <= y1;
  }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
};

/// Segmentation hints for one record: a box plus positive (object) and
/// negative (gripper) point prompts.
struct PromptSet {
  std::string record_id;
  std::string image_path;
  BBox bbox;
  std::vector<Pixel> positive_points;
  std::vector<Pixel> negative_points;

  void validate() const;  // x0 < x1, y0 < y1, positives inside bbox
};

/// Photometric augmentation parameters; (1, 1, 1) is the identity.
struct AugmentParams {
  double exposure_gain = 1.0;  // > 0
  double contrast = 1.0;       // > 0
  double saturation = 1.0;     // >= 0
  std::uint64_t seed = 0;

  void validate() const;
  bool is_identity() const {
    return exposure_gain == 1.0 && contrast == 1.0 && saturation == 1.0;
  }
};

struct AugmentRanges {
  double gain_min = 0.7, gain_max = 1.3;
  double contrast_min = 0.7, contrast_max = 1.3;
  double saturation_min = 0.5, saturation_max = 1.5;
};

struct MaskReport {
  std::string record_id;
  std::size_t mask_area_px = 0;
  double inside_bbox_ratio = 0.0;  // meaningful only when area > 0
  bool accepted = false;
};

inline constexpr double kDefaultCubeSize = 0.15;  // m

/// Bounding box of the projected object cube: min/max over the corners in
/// front of the camera, clipped to image bounds. Returns nullopt when all
/// corners are behind the camera.
std::optional<BBox> bbox_from_cube(const CameraIntrinsics& k, const Transform& camera_to_object,
                                   double cube_size = kDefaultCubeSize);

/// Projected object origin, the positive point prompt. Returns nullopt
/// when the origin is behind the camera.
std::optional<Pixel> center_point_prompt(const CameraIntrinsics& k,
                                         const Transform& camera_to_object);

struct GreenDetectParams {
  double hue_min_deg = 90.0;
  double hue_max_deg = 150.0;
  double sat_min = 0.4;
  double val_min = 0.2;
  std::size_t min_count = 25;
};

struct GreenRegion {
  Pixel centroid = Pixel::Zero();
  std::size_t pixel_count = 0;
};

/// Centroid of pixels passing the hue/saturation/value gate, used as the
/// negative (gripper tape) prompt. Returns nullopt when fewer than
/// min_count pixels pass.
std::optional<GreenRegion> detect_green_region(const Image& image,
                                               const GreenDetectParams& params = {});

/// Assembles the prompt set for one record: cube bbox, center positive
/// point (when inside the image), green-centroid negative point (when a
/// frame is supplied and the tape is found). Returns nullopt when the
/// cube is fully behind the camera or its silhouette degenerates.
std::optional<PromptSet> build_prompt(const CameraIntrinsics& k, const std::string& record_id,
                                      const std::string& image_path,
                                      const Transform& camera_to_object,
                                      double cube_size = kDefaultCubeSize,
                                      const Image* frame = nullptr,
                                      const GreenDetectParams& green = {});

/// Exposure, then contrast about the mean luminance, then saturation about
/// the per-pixel luminance (Rec.601 weights); each stage clamped to
/// [0, 255]. Identity parameters return the input bytes unchanged.
Image augment(const Image& image, const AugmentParams& params);

/// Seeded uniform draws from the given ranges, one parameter triple per
/// output image. Throws InvalidRange on inverted or non-positive ranges.
std::vector<AugmentParams> sample_augment_params(const AugmentRanges& ranges, std::uint64_t seed,
                                                 std::size_t n);

/// Accepts a mask iff it has foreground and at least min_inside_ratio of
/// its pixels fall inside the prompt bbox. Throws DimensionMismatch for a
/// multi-channel mask or one smaller than the bbox.
MaskReport validate_mask(const Image& mask, const PromptSet& prompt,
                         double min_inside_ratio = 0.8);

}  // namespace rocap
