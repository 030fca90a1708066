#include "pancad/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "pancad/errors.hpp"

namespace pancad {

std::pair<int, int> canvas_size(const Box& extent, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error("scale must be positive");
  double w = std::floor(std::max(0.0, extent.width()) * scale) + 1.0;
  double h = std::floor(std::max(0.0, extent.height()) * scale) + 1.0;
  if (w > std::numeric_limits<int>::max() / 2 || h > std::numeric_limits<int>::max() / 2)
    throw CanvasTooLarge("canvas dimensions overflow");
  return {static_cast<int>(w), static_cast<int>(h)};
}

LabelMask::LabelMask(int width, int height, double scale, Point2 origin)
    : width_(width), height_(height), scale_(scale), origin_(origin) {
  if (width < 1 || height < 1) throw Error("mask dimensions must be positive");
  if (!(scale > 0.0)) throw Error("scale must be positive");
  tiles_x_ = (width + kTile - 1) / kTile;
  tiles_y_ = (height + kTile - 1) / kTile;
  tiles_.resize(static_cast<std::size_t>(tiles_x_) * tiles_y_);
}

std::int16_t* LabelMask::tile_for(int col, int row, bool create) {
  auto& t = tiles_[static_cast<std::size_t>(row / kTile) * tiles_x_ + col / kTile];
  if (!t && create) {
    t = std::make_unique<std::int16_t[]>(kTile * kTile);
    std::fill(t.get(), t.get() + kTile * kTile, static_cast<std::int16_t>(kBackground));
    ++materialized_tiles_;
  }
  return t.get();
}

int LabelMask::at(int col, int row) const {
  if (col < 0 || row < 0 || col >= width_ || row >= height_) return kBackground;
  const auto& t = tiles_[static_cast<std::size_t>(row / kTile) * tiles_x_ + col / kTile];
  if (!t) return kBackground;
  return t[(row % kTile) * kTile + col % kTile];
}

void LabelMask::set(int col, int row, int label) {
  if (col < 0 || row < 0 || col >= width_ || row >= height_) return;
  tile_for(col, row, true)[(row % kTile) * kTile + col % kTile] = static_cast<std::int16_t>(label);
}

int LabelMask::at_point(Point2 p) const {
  double u = (p.x - origin_.x) * scale_;
  double v = (p.y - origin_.y) * scale_;
  if (!(u >= 0.0 && v >= 0.0)) return kBackground;
  return at(static_cast<int>(std::floor(u)), static_cast<int>(std::floor(v)));
}

Point2 LabelMask::pixel_center(int col, int row) const {
  return {origin_.x + (col + 0.5) / scale_, origin_.y + (row + 0.5) / scale_};
}

std::string LabelMask::to_pgm() const {
  std::string out = "P5\n" + std::to_string(width_) + " " + std::to_string(height_) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(width_) * height_);
  for (int row = height_ - 1; row >= 0; --row)
    for (int col = 0; col < width_; ++col) {
      int v = at(col, row);
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::clamp(v + 1, 0, 255))));
    }
  return out;
}

namespace {

// Calls f(col, row) for every pixel whose center is within half_width pixels
// of the entity, restricted to a width x height canvas.
template <class F>
void stroke_pixels(const Entity& e, Point2 origin, double scale, double half_width, int width, int height, F&& f) {
  auto stroke_one = [&](const Entity& part) {
    Box b = entity_bbox(part);
    // Arc/circle boxes come from samples; pad so the true curve is covered.
    double pad = half_width / scale;
    if (std::holds_alternative<Arc>(part) || std::holds_alternative<Circle>(part)) {
      double r = std::holds_alternative<Arc>(part) ? std::get<Arc>(part).radius : std::get<Circle>(part).radius;
      pad += r * (1.0 - std::cos(kPi / 63.0));
    }
    int c0 = std::max(0, static_cast<int>(std::floor((b.xmin - pad - origin.x) * scale - 0.5)));
    int r0 = std::max(0, static_cast<int>(std::floor((b.ymin - pad - origin.y) * scale - 0.5)));
    int c1 = std::min(width - 1, static_cast<int>(std::ceil((b.xmax + pad - origin.x) * scale - 0.5)));
    int r1 = std::min(height - 1, static_cast<int>(std::ceil((b.ymax + pad - origin.y) * scale - 0.5)));
    const double limit = half_width / scale;
    // Blocks farther from the entity than the stroke plus their half-diagonal
    // hold no stroked pixel, which keeps long diagonals cheap.
    constexpr int kBlock = 16;
    const double block_reach = limit + kBlock * std::sqrt(0.5) / scale;
    for (int br = r0; br <= r1; br += kBlock)
      for (int bc = c0; bc <= c1; bc += kBlock) {
        const int br1 = std::min(r1, br + kBlock - 1), bc1 = std::min(c1, bc + kBlock - 1);
        Point2 mid{origin.x + (0.5 * (bc + bc1) + 0.5) / scale, origin.y + (0.5 * (br + br1) + 0.5) / scale};
        if (point_entity_distance(mid, part) > block_reach) continue;
        for (int row = br; row <= br1; ++row)
          for (int col = bc; col <= bc1; ++col) {
            Point2 c{origin.x + (col + 0.5) / scale, origin.y + (row + 0.5) / scale};
            if (point_entity_distance(c, part) <= limit) f(col, row);
          }
      }
  };
  if (const auto* pl = std::get_if<Polyline>(&e)) {
    for (std::size_t i = 1; i < pl->vertices.size(); ++i) stroke_one(Segment{pl->vertices[i - 1], pl->vertices[i]});
  } else {
    stroke_one(e);
  }
}

}  // namespace

LabelMask render_label_mask(const Drawing& d, double scale, double line_width_px, std::size_t pixel_cap) {
  auto [w, h] = canvas_size(d.extent, scale);
  LabelMask mask(w, h, scale, {d.extent.xmin, d.extent.ymin});
  const double half = 0.5 * line_width_px;
  for (const auto& r : d.records) {
    if (r.label == kBackground) continue;
    stroke_pixels(r.entity, mask.origin(), scale, half, w, h, [&](int col, int row) { mask.set(col, row, r.label); });
    if (mask.materialized_pixels() > pixel_cap)
      throw CanvasTooLarge("label mask exceeds " + std::to_string(pixel_cap) + " pixels");
  }
  return mask;
}

std::vector<int> vote_entity_labels(const LabelMask& mask, const Drawing& d, int n_samples) {
  std::vector<int> out;
  out.reserve(d.size());
  std::map<int, int> counts;
  for (const auto& r : d.records) {
    counts.clear();
    for (const auto& p : sample_points(r.entity, n_samples)) {
      int c = mask.at_point(p);
      if (c != kBackground) ++counts[c];
    }
    int best = kBackground;
    int best_count = 0;
    for (auto [c, n] : counts)  // ascending class index, so ties keep the smaller one
      if (n > best_count) {
        best = c;
        best_count = n;
      }
    out.push_back(best);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Feature pyramid

FeaturePyramid::FeaturePyramid(std::vector<FeatureLevel> levels) : levels_(std::move(levels)) {
  for (const auto& l : levels_) {
    if (l.width < 1 || l.height < 1 || l.channels < 1) throw Error("feature level dimensions must be positive");
    if (l.data.size() != static_cast<std::size_t>(l.width) * l.height * l.channels)
      throw DimensionMismatch("feature level data size does not match its shape");
    if (l.channels != levels_.front().channels) throw DimensionMismatch("levels must share the channel count");
  }
}

namespace {

// Squared 1-D distance transform, lower envelope of parabolas. Empty
// samples carry kFar instead of infinity so the envelope math stays finite.
constexpr double kFar = 1e12;

void edt_1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double diff = q - v[k];
    d[q] = std::min(kFar, diff * diff + f[v[k]]);
  }
}

// Euclidean distance (pixels) to the nearest occupied pixel.
std::vector<double> distance_transform(const std::vector<std::uint8_t>& occ, int w, int h) {
  std::vector<double> g(occ.size());
  for (std::size_t i = 0; i < occ.size(); ++i) g[i] = occ[i] ? 0.0 : kFar;
  const int n = std::max(w, h);
  std::vector<double> f, d;
  std::vector<int> v(static_cast<std::size_t>(n));
  std::vector<double> z(static_cast<std::size_t>(n) + 1);
  f.resize(static_cast<std::size_t>(h));
  d.resize(static_cast<std::size_t>(h));
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = g[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int y = 0; y < h; ++y) g[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  f.resize(static_cast<std::size_t>(w));
  d.resize(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = g[static_cast<std::size_t>(y) * w + x];
    edt_1d(f, d, v, z);
    for (int x = 0; x < w; ++x) g[static_cast<std::size_t>(y) * w + x] = std::sqrt(d[x]);
  }
  return g;
}

}  // namespace

FeaturePyramid build_feature_pyramid(const Drawing& d, double scale, int levels, double line_width_px,
                                     std::size_t pixel_cap) {
  if (levels < 1) throw Error("pyramid needs at least one level");
  auto [w, h] = canvas_size(d.extent, scale);
  if (static_cast<std::size_t>(w) * static_cast<std::size_t>(h) > pixel_cap)
    throw CanvasTooLarge("feature canvas exceeds " + std::to_string(pixel_cap) + " pixels");
  const Point2 origin{d.extent.xmin, d.extent.ymin};

  std::vector<std::uint8_t> occ(static_cast<std::size_t>(w) * h, 0);
  for (const auto& r : d.records)
    stroke_pixels(r.entity, origin, scale, 0.5 * line_width_px, w, h,
                  [&](int col, int row) { occ[static_cast<std::size_t>(row) * w + col] = 1; });

  constexpr double kDistanceClip = 8.0;
  auto dist = distance_transform(occ, w, h);
  std::vector<double> dt(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) dt[i] = std::min(dist[i], kDistanceClip) / kDistanceClip;

  FeatureLevel base;
  base.width = w;
  base.height = h;
  base.channels = kPyramidChannels;
  base.scale = scale;
  base.origin = origin;
  base.data.assign(static_cast<std::size_t>(w) * h * kPyramidChannels, 0.0f);

  auto occ_at = [&](int x, int y) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return occ[static_cast<std::size_t>(y) * w + x];
  };
  auto dt_at = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return dt[static_cast<std::size_t>(y) * w + x];
  };
  static constexpr int kDirs[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      base.at(x, y, 0) = static_cast<float>(occ_at(x, y));
      base.at(x, y, 1) = static_cast<float>(dt_at(x, y));
      base.at(x, y, 2) = static_cast<float>(0.5 * (dt_at(x + 1, y) - dt_at(x - 1, y)));
      base.at(x, y, 3) = static_cast<float>(0.5 * (dt_at(x, y + 1) - dt_at(x, y - 1)));
      for (int k = 0; k < 4; ++k) {
        double sum = 0.0;
        for (int t = -2; t <= 2; ++t) sum += occ_at(x + t * kDirs[k][0], y + t * kDirs[k][1]);
        base.at(x, y, 4 + k) = static_cast<float>(sum / 5.0);
      }
    }

  std::vector<FeatureLevel> out;
  out.push_back(std::move(base));
  for (int l = 1; l < levels; ++l) {
    const FeatureLevel& prev = out.back();
    FeatureLevel next;
    next.width = (prev.width + 1) / 2;
    next.height = (prev.height + 1) / 2;
    next.channels = prev.channels;
    next.scale = prev.scale / 2.0;
    next.origin = prev.origin;
    next.data.assign(static_cast<std::size_t>(next.width) * next.height * next.channels, 0.0f);
    for (int y = 0; y < next.height; ++y)
      for (int x = 0; x < next.width; ++x)
        for (int c = 0; c < next.channels; ++c) {
          double sum = 0.0;
          int n = 0;
          for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx) {
              int px = 2 * x + dx, py = 2 * y + dy;
              if (px < prev.width && py < prev.height) {
                sum += prev.at(px, py, c);
                ++n;
              }
            }
          next.at(x, y, c) = static_cast<float>(sum / n);
        }
    out.push_back(std::move(next));
  }
  return FeaturePyramid(std::move(out));
}

std::vector<double> fetch_aligned_feature(const FeaturePyramid& pyramid, Point2 p) {
  std::vector<double> out;
  out.reserve(pyramid.feature_size());
  for (std::size_t l = 0; l < pyramid.level_count(); ++l) {
    const FeatureLevel& lv = pyramid.level(l);
    double u = std::clamp((p.x - lv.origin.x) * lv.scale - 0.5, 0.0, static_cast<double>(lv.width - 1));
    double v = std::clamp((p.y - lv.origin.y) * lv.scale - 0.5, 0.0, static_cast<double>(lv.height - 1));
    int x0 = static_cast<int>(std::floor(u));
    int y0 = static_cast<int>(std::floor(v));
    int x1 = std::min(x0 + 1, lv.width - 1);
    int y1 = std::min(y0 + 1, lv.height - 1);
    double fx = u - x0;
    double fy = v - y0;
    for (int c = 0; c < lv.channels; ++c) {
      double top = (1.0 - fx) * lv.at(x0, y0, c) + fx * lv.at(x1, y0, c);
      double bottom = (1.0 - fx) * lv.at(x0, y1, c) + fx * lv.at(x1, y1, c);
      out.push_back((1.0 - fy) * top + fy * bottom);
    }
  }
  return out;
}

}  // namespace pancad
