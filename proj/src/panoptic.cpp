#include "pancad/panoptic.hpp"

#include <algorithm>
#include <numeric>

#include "pancad/errors.hpp"

namespace pancad {

PanopticPrediction assemble_panoptic(const Drawing& d, const std::vector<int>& entity_labels,
                                     const std::vector<InstanceBox>& boxes, const AssembleConfig& cfg) {
  if (entity_labels.size() != d.size()) throw LengthMismatch("label count does not match entity count");
  for (const auto& b : boxes)
    if (!d.catalog.is_thing(b.label)) throw UnknownClass(d.catalog.label_name(b.label) + " is not a thing class");

  const std::size_t n = d.size();
  PanopticPrediction out;
  out.labels = entity_labels;
  out.instances.assign(n, 0);

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return boxes[a].score > boxes[b].score; });

  // Sampled points are shared by every box test.
  std::vector<std::vector<Point2>> samples(n);
  std::vector<bool> assigned(n, false);
  for (std::size_t i = 0; i < n; ++i)
    if (d.catalog.is_thing(entity_labels[i])) samples[i] = sample_points(d.records[i].entity, cfg.samples);

  int next_id = 1;
  for (std::size_t k : order) {
    const InstanceBox& box = boxes[k];
    bool claimed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (assigned[i] || entity_labels[i] != box.label) continue;
      std::size_t inside = 0;
      for (const auto& p : samples[i])
        if (box.box.contains(p)) ++inside;
      if (static_cast<double>(inside) >= cfg.min_inside_fraction * static_cast<double>(samples[i].size())) {
        assigned[i] = true;
        out.instances[i] = next_id;
        claimed = true;
      }
    }
    if (claimed) ++next_id;
  }

  if (cfg.unboxed == UnboxedThings::kDemote)
    for (std::size_t i = 0; i < n; ++i)
      if (d.catalog.is_thing(entity_labels[i]) && !assigned[i]) out.labels[i] = kBackground;
  return out;
}

Drawing apply_prediction(const Drawing& d, const PanopticPrediction& p) {
  if (p.labels.size() != d.size() || p.instances.size() != d.size())
    throw LengthMismatch("prediction length does not match entity count");
  Drawing out = d;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out.records[i].label = p.labels[i];
    out.records[i].instance = p.instances[i];
  }
  return out;
}

Drawing apply_labels(const Drawing& d, const std::vector<int>& labels) {
  return apply_prediction(d, {labels, std::vector<int>(labels.size(), 0)});
}

}  // namespace pancad
