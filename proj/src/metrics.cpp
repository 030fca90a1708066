#include "pancad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "pancad/errors.hpp"

namespace pancad {

std::vector<double> entity_log_lengths(const Drawing& d) {
  std::vector<double> w;
  w.reserve(d.size());
  for (const auto& r : d.records) w.push_back(std::log1p(arc_length(r.entity)));
  return w;
}

double symbol_iou(const Symbol& a, const Symbol& b, const std::vector<double>& weights) {
  double inter = 0.0;
  double uni = 0.0;
  auto ia = a.entities.begin();
  auto ib = b.entities.begin();
  while (ia != a.entities.end() || ib != b.entities.end()) {
    if (ib == b.entities.end() || (ia != a.entities.end() && *ia < *ib)) {
      uni += weights.at(*ia++);
    } else if (ia == a.entities.end() || *ib < *ia) {
      uni += weights.at(*ib++);
    } else {
      double w = weights.at(*ia);
      inter += w;
      uni += w;
      ++ia;
      ++ib;
    }
  }
  return uni > 0.0 ? inter / uni : 0.0;
}

double symbol_iou(const Symbol& a, const Symbol& b, const Drawing& d) {
  return symbol_iou(a, b, entity_log_lengths(d));
}

MatchResult match_symbols(const std::vector<Symbol>& preds, const std::vector<Symbol>& gts,
                          const std::vector<double>& weights) {
  std::vector<MatchPair> admissible;
  for (std::size_t p = 0; p < preds.size(); ++p)
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (preds[p].label != gts[g].label) continue;
      double iou = symbol_iou(preds[p], gts[g], weights);
      if (iou > 0.5) admissible.push_back({p, g, iou});
    }
  std::stable_sort(admissible.begin(), admissible.end(),
                   [](const MatchPair& a, const MatchPair& b) { return a.iou > b.iou; });

  MatchResult out;
  std::vector<bool> pred_used(preds.size(), false), gt_used(gts.size(), false);
  for (const auto& m : admissible) {
    if (pred_used[m.pred] || gt_used[m.gt]) continue;
    pred_used[m.pred] = gt_used[m.gt] = true;
    out.tp.push_back(m);
  }
  std::sort(out.tp.begin(), out.tp.end(), [](const MatchPair& a, const MatchPair& b) { return a.pred < b.pred; });
  for (std::size_t p = 0; p < preds.size(); ++p)
    if (!pred_used[p]) out.fp.push_back(p);
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!gt_used[g]) out.fn.push_back(g);
  return out;
}

MatchResult match_symbols(const std::vector<Symbol>& preds, const std::vector<Symbol>& gts, const Drawing& d) {
  return match_symbols(preds, gts, entity_log_lengths(d));
}

void QualityCounts::merge(const QualityCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  iou_sum += o.iou_sum;
}

Quality quality_from_counts(const QualityCounts& c) {
  Quality q;
  q.counts = c;
  double tp = static_cast<double>(c.tp);
  double denom = tp + 0.5 * static_cast<double>(c.fp) + 0.5 * static_cast<double>(c.fn);
  q.rq = denom > 0.0 ? tp / denom : 0.0;
  q.sq = c.tp > 0 ? c.iou_sum / tp : 0.0;
  q.pq = q.rq * q.sq;
  return q;
}

void PanopticAccumulator::add(const MatchResult& m, const std::vector<Symbol>& preds, const std::vector<Symbol>& gts) {
  for (const auto& t : m.tp) {
    auto& c = counts_[gts[t.gt].label];
    ++c.tp;
    c.iou_sum += t.iou;
  }
  for (auto p : m.fp) ++counts_[preds[p].label].fp;
  for (auto g : m.fn) ++counts_[gts[g].label].fn;
  for (const auto& g : gts) in_gt_[g.label] = true;
}

void PanopticAccumulator::merge(const PanopticAccumulator& o) {
  for (const auto& [label, c] : o.counts_) counts_[label].merge(c);
  for (const auto& [label, present] : o.in_gt_)
    if (present) in_gt_[label] = true;
}

PanopticScores PanopticAccumulator::scores() const {
  PanopticScores s;
  QualityCounts pooled;
  double pq = 0.0, sq = 0.0, rq = 0.0;
  std::size_t present = 0;
  for (const auto& [label, c] : counts_) {
    Quality q = quality_from_counts(c);
    s.per_class[label] = q;
    pooled.merge(c);
    if (in_gt_.count(label)) {
      pq += q.pq;
      sq += q.sq;
      rq += q.rq;
      ++present;
    }
  }
  s.pooled = quality_from_counts(pooled);
  s.macro.counts = pooled;
  if (present > 0) {
    s.macro.pq = pq / static_cast<double>(present);
    s.macro.sq = sq / static_cast<double>(present);
    s.macro.rq = rq / static_cast<double>(present);
  }
  return s;
}

PanopticScores panoptic_scores(const MatchResult& m, const std::vector<Symbol>& preds,
                               const std::vector<Symbol>& gts) {
  PanopticAccumulator acc;
  acc.add(m, preds, gts);
  return acc.scores();
}

PanopticAccumulator evaluate_panoptic(const Drawing& pred, const Drawing& gt, StuffGrouping stuff) {
  if (pred.size() != gt.size()) throw LengthMismatch("prediction and ground truth have different entity counts");
  auto ps = group_symbols(pred, stuff);
  auto gs = group_symbols(gt, stuff);
  auto weights = entity_log_lengths(gt);
  PanopticAccumulator acc;
  acc.add(match_symbols(ps, gs, weights), ps, gs);
  return acc;
}

// ---------------------------------------------------------------------------
// Semantic

void F1Counts::merge(const F1Counts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
}

F1Score f1_from_counts(const F1Counts& c) {
  F1Score s;
  s.precision = c.tp + c.fp > 0.0 ? c.tp / (c.tp + c.fp) : 0.0;
  s.recall = c.tp + c.fn > 0.0 ? c.tp / (c.tp + c.fn) : 0.0;
  double denom = c.tp + 0.5 * c.fp + 0.5 * c.fn;
  s.f1 = denom > 0.0 ? c.tp / denom : 0.0;
  return s;
}

void SemanticCounts::merge(const SemanticCounts& o) {
  for (const auto& [l, c] : o.unweighted) unweighted[l].merge(c);
  for (const auto& [l, c] : o.weighted) weighted[l].merge(c);
}

SemanticCounts semantic_counts(const std::vector<int>& pred, const std::vector<int>& gt,
                               const std::vector<double>& weights) {
  if (pred.size() != gt.size() || weights.size() != gt.size())
    throw LengthMismatch("prediction, ground truth and weights must have equal length");
  SemanticCounts c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const int p = pred[i];
    const int g = gt[i];
    const double w = weights[i];
    if (p == g) {
      if (g == kBackground) continue;
      c.unweighted[g].tp += 1.0;
      c.weighted[g].tp += w;
      continue;
    }
    if (p != kBackground) {
      c.unweighted[p].fp += 1.0;
      c.weighted[p].fp += w;
    }
    if (g != kBackground) {
      c.unweighted[g].fn += 1.0;
      c.weighted[g].fn += w;
    }
  }
  return c;
}

SemanticScores semantic_scores(const SemanticCounts& counts) {
  SemanticScores s;
  F1Counts total, total_w;
  for (const auto& [l, c] : counts.unweighted) {
    s.per_class[l] = f1_from_counts(c);
    total.merge(c);
  }
  for (const auto& [l, c] : counts.weighted) {
    s.per_class_weighted[l] = f1_from_counts(c);
    total_w.merge(c);
  }
  s.total = f1_from_counts(total);
  s.total_weighted = f1_from_counts(total_w);
  return s;
}

SemanticScores semantic_scores(const std::vector<int>& pred, const std::vector<int>& gt, const Drawing& d) {
  return semantic_scores(semantic_counts(pred, gt, entity_log_lengths(d)));
}

// ---------------------------------------------------------------------------
// Detection

double DetectionScores::class_map(int label) const {
  auto it = per_class.find(label);
  if (it == per_class.end()) return 0.0;
  return std::accumulate(it->second.begin(), it->second.end(), 0.0) / static_cast<double>(it->second.size());
}

double interpolated_ap(const std::vector<double>& precision, const std::vector<double>& recall) {
  if (precision.size() != recall.size()) throw LengthMismatch("precision and recall lengths differ");
  std::vector<double> envelope = precision;
  for (std::size_t i = envelope.size(); i-- > 1;) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    double r = k / 100.0;
    auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += envelope[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

DetectionScores detection_ap(const std::vector<DetectionImage>& images) {
  std::map<int, std::size_t> gt_count;
  for (const auto& im : images)
    for (const auto& g : im.gts) ++gt_count[g.label];

  struct Det {
    double score;
    std::size_t image;
    std::size_t index;
  };

  DetectionScores out;
  for (const auto& [label, n_gt] : gt_count) {
    std::vector<Det> dets;
    for (std::size_t im = 0; im < images.size(); ++im)
      for (std::size_t k = 0; k < images[im].preds.size(); ++k)
        if (images[im].preds[k].label == label) dets.push_back({images[im].preds[k].score, im, k});
    std::stable_sort(dets.begin(), dets.end(), [](const Det& a, const Det& b) { return a.score > b.score; });

    std::array<double, kCocoThresholds.size()> aps{};
    for (std::size_t t = 0; t < kCocoThresholds.size(); ++t) {
      const double thr = kCocoThresholds[t];
      std::vector<std::vector<bool>> used(images.size());
      for (std::size_t im = 0; im < images.size(); ++im) used[im].assign(images[im].gts.size(), false);
      std::vector<double> precision, recall;
      double tp = 0.0, fp = 0.0;
      for (const auto& det : dets) {
        const auto& im = images[det.image];
        const Box& pb = im.preds[det.index].box;
        double best = -1.0;
        std::size_t best_g = 0;
        for (std::size_t g = 0; g < im.gts.size(); ++g) {
          if (im.gts[g].label != label || used[det.image][g]) continue;
          double iou = box_iou(pb, im.gts[g].box);
          if (iou >= thr && iou > best) {
            best = iou;
            best_g = g;
          }
        }
        if (best >= 0.0) {
          used[det.image][best_g] = true;
          tp += 1.0;
        } else {
          fp += 1.0;
        }
        precision.push_back(tp / (tp + fp));
        recall.push_back(tp / static_cast<double>(n_gt));
      }
      aps[t] = interpolated_ap(precision, recall);
    }
    out.per_class[label] = aps;
  }

  if (!out.per_class.empty()) {
    double s50 = 0.0, s75 = 0.0, sall = 0.0;
    for (const auto& [label, aps] : out.per_class) {
      s50 += aps[0];
      s75 += aps[5];
      sall += std::accumulate(aps.begin(), aps.end(), 0.0) / static_cast<double>(aps.size());
    }
    const auto n = static_cast<double>(out.per_class.size());
    out.ap50 = s50 / n;
    out.ap75 = s75 / n;
    out.map = sall / n;
  }
  return out;
}

DetectionScores detection_ap(const std::vector<InstanceBox>& preds, const std::vector<InstanceBox>& gts) {
  return detection_ap(std::vector<DetectionImage>{{preds, gts}});
}

// ---------------------------------------------------------------------------
// Length histogram

std::size_t LengthHistogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

std::size_t LengthHistogram::mode_bin() const {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

LengthHistogram length_histogram(const std::vector<Drawing>& drawings, int bins_per_decade) {
  if (bins_per_decade < 1) throw Error("bins per decade must be positive");
  constexpr int kDecades = 5;  // 1 mm .. 100 m
  LengthHistogram h;
  const int bins = kDecades * bins_per_decade;
  for (int k = 0; k <= bins; ++k) h.edges.push_back(std::pow(10.0, static_cast<double>(k) / bins_per_decade));
  h.counts.assign(static_cast<std::size_t>(bins) + 2, 0);
  std::size_t total = 0;
  for (const auto& d : drawings)
    for (const auto& r : d.records) {
      double len = arc_length(r.entity);
      auto it = std::upper_bound(h.edges.begin(), h.edges.end(), len);
      ++h.counts[static_cast<std::size_t>(it - h.edges.begin())];
      ++total;
    }
  if (total == 0) throw EmptyDataset();
  return h;
}

}  // namespace pancad
