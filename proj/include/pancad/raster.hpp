#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pancad/drawing.hpp"

namespace pancad {

inline constexpr std::size_t kDefaultPixelCap = 100'000'000;

/// Per-pixel class indices over a drawing's extent. Storage is tiled and only
/// tiles touched by a stroke are materialized, so large sparse canvases are
/// cheap. Pixel (col, row) has its center at origin + ((col+0.5)/scale,
/// (row+0.5)/scale); rows grow with y.
class LabelMask {
 public:
  static constexpr int kTile = 64;

  LabelMask(int width, int height, double scale, Point2 origin);

  int width() const { return width_; }
  int height() const { return height_; }
  double scale() const { return scale_; }
  Point2 origin() const { return origin_; }

  int at(int col, int row) const;
  void set(int col, int row, int label);
  /// Class at a point in drawing coordinates; background outside the canvas.
  int at_point(Point2 p) const;
  Point2 pixel_center(int col, int row) const;

  std::size_t materialized_pixels() const { return materialized_tiles_ * kTile * kTile; }

  /// Binary PGM, top row = largest y. Gray level = class index + 1,
  /// background = 0.
  std::string to_pgm() const;

 private:
  std::int16_t* tile_for(int col, int row, bool create);

  int width_;
  int height_;
  double scale_;
  Point2 origin_;
  int tiles_x_;
  int tiles_y_;
  std::vector<std::unique_ptr<std::int16_t[]>> tiles_;
  std::size_t materialized_tiles_ = 0;
};

/// Canvas dimensions covering `extent` at `scale` pixels per mm.
std::pair<int, int> canvas_size(const Box& extent, double scale);

/// Disk-swept strokes: every pixel whose center lies within line_width/2
/// pixels of the entity. Later records overwrite earlier ones. The pixel
/// cap applies to materialized pixels.
LabelMask render_label_mask(const Drawing& d, double scale, double line_width_px = 5.0,
                            std::size_t pixel_cap = kDefaultPixelCap);

/// Majority class over `n_samples` sampled points per entity, background
/// samples excluded. Ties go to the smallest class index; all-background
/// entities get kBackground.
std::vector<int> vote_entity_labels(const LabelMask& mask, const Drawing& d, int n_samples = 32);

/// One dense level of a feature pyramid, channels innermost.
struct FeatureLevel {
  int width = 0;
  int height = 0;
  int channels = 0;
  double scale = 1.0;  // pixels per mm
  Point2 origin;
  std::vector<float> data;

  float at(int col, int row, int ch) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  float& at(int col, int row, int ch) { return data[(static_cast<std::size_t>(row) * width + col) * channels + ch]; }
};

class FeaturePyramid {
 public:
  FeaturePyramid() = default;
  explicit FeaturePyramid(std::vector<FeatureLevel> levels);

  std::size_t level_count() const { return levels_.size(); }
  int channels() const { return levels_.empty() ? 0 : levels_.front().channels; }
  const FeatureLevel& level(std::size_t l) const { return levels_[l]; }
  std::size_t feature_size() const { return levels_.size() * static_cast<std::size_t>(channels()); }

 private:
  std::vector<FeatureLevel> levels_;
};

inline constexpr int kPyramidChannels = 8;

/// Fixed filter bank over the binary rasterization: occupancy, clipped
/// distance transform, its x/y gradients and four oriented line responses.
/// Higher levels are 2x average pooled.
FeaturePyramid build_feature_pyramid(const Drawing& d, double scale, int levels = 4, double line_width_px = 1.0,
                                     std::size_t pixel_cap = kDefaultPixelCap);

/// Bilinear sample of every level at `p` (clamped to the grid), concatenated.
std::vector<double> fetch_aligned_feature(const FeaturePyramid& pyramid, Point2 p);

}  // namespace pancad
