#pragma once

#include <cstdint>
#include <vector>

#include "pancad/drawing.hpp"

namespace pancad {

/// Parameters of the synthetic floor-plan generator. Drawings are always
/// 20 m x 20 m blocks.
struct SynthConfig {
  std::uint64_t seed = 0;
  int rooms_x = 3;
  int rooms_y = 3;
  double room_min = 3600.0;  // mm, room pitch between wall centerlines
  double room_max = 4600.0;
  double wall_thickness = 240.0;
  double door_density = 0.8;       // probability per interior wall piece
  double window_density = 0.6;     // probability per exterior wall piece
  double parking_density = 0.7;    // fraction of available stalls
  double furniture_density = 0.8;  // probability of a table per room
  LabelCatalog classes = LabelCatalog::synthetic();
  bool overlap_free = true;
  bool rotate = true;  // random multiple of 90 degrees about the block center

  static constexpr double kBlockSize = 20000.0;

  void validate() const;
};

/// Walls are parallel face pairs (stuff), doors a leaf segment plus a
/// quarter arc, windows three parallel lines in a wall gap, parking a grid
/// of stall lines (stuff), tables a rectangle or circle. Classes of the
/// catalog without a dedicated motif get a generic furniture glyph. Every
/// catalog class appears at least once; motifs whose class is missing from
/// the catalog are not drawn. Throws InfeasibleConfig.
Drawing generate_floorplan(const SynthConfig& cfg);

struct NoiseConfig {
  double flip_probability = 0.0;
  double drop_probability = 0.0;
  double jitter_mm = 0.0;
};

struct CorruptedPrediction {
  std::vector<int> labels;
  std::vector<InstanceBox> boxes;
};

/// Flips each labeled entity to a uniformly chosen other class with the
/// flip probability; jitters each ground-truth box corner by up to
/// `jitter_mm` and drops boxes with the drop probability.
CorruptedPrediction corrupt_prediction(const Drawing& d, const NoiseConfig& noise, std::uint64_t seed);

}  // namespace pancad
