#pragma once

#include <vector>

#include "pancad/drawing.hpp"

namespace pancad {

enum class UnboxedThings {
  kKeepLabel,  // keep the semantic label with instance 0
  kDemote,     // relabel as background
};

struct AssembleConfig {
  int samples = 32;
  double min_inside_fraction = 0.5;
  UnboxedThings unboxed = UnboxedThings::kKeepLabel;
};

struct PanopticPrediction {
  std::vector<int> labels;
  std::vector<int> instances;
};

/// Fuses per-entity labels with instance boxes. Stuff entities get (l, 0).
/// Boxes are visited by descending score; each claims the unassigned
/// entities whose label equals the box class and whose sampled points lie
/// at least half inside the box. Instance ids are dense from 1 in claim
/// order. Throws UnknownClass for a box whose class is not a thing class.
PanopticPrediction assemble_panoptic(const Drawing& d, const std::vector<int>& entity_labels,
                                     const std::vector<InstanceBox>& boxes, const AssembleConfig& cfg = {});

/// Copy of `d` with labels and instances replaced by the prediction.
Drawing apply_prediction(const Drawing& d, const PanopticPrediction& p);

/// Copy of `d` with labels replaced and every instance set to 0.
Drawing apply_labels(const Drawing& d, const std::vector<int>& labels);

}  // namespace pancad
