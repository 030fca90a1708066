#pragma once

// Evaluation: log-length symbol IoU, unique symbol matching, panoptic
// quality, (length-weighted) semantic F1, COCO-style detection AP and the
// entity length histogram. Lengths are millimeters, logarithms natural.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pancad/drawing.hpp"

namespace pancad {

/// log(1 + L(e)) per entity.
std::vector<double> entity_log_lengths(const Drawing& d);

/// Log-length mass of shared entities over the mass of the union. Entity
/// lists must be ascending.
double symbol_iou(const Symbol& a, const Symbol& b, const std::vector<double>& weights);
double symbol_iou(const Symbol& a, const Symbol& b, const Drawing& d);

struct MatchPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> tp;      // sorted by pred index
  std::vector<std::size_t> fp;    // unmatched prediction indices
  std::vector<std::size_t> fn;    // unmatched ground-truth indices
};

/// A pair matches when labels agree and IoU > 0.5. Admissible pairs are
/// taken by descending IoU so the result stays one-to-one even when the
/// inputs are not partitions.
MatchResult match_symbols(const std::vector<Symbol>& preds, const std::vector<Symbol>& gts,
                          const std::vector<double>& weights);
MatchResult match_symbols(const std::vector<Symbol>& preds, const std::vector<Symbol>& gts, const Drawing& d);

struct QualityCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double iou_sum = 0.0;

  void merge(const QualityCounts& o);
};

struct Quality {
  double pq = 0.0;
  double sq = 0.0;
  double rq = 0.0;
  QualityCounts counts;
};

Quality quality_from_counts(const QualityCounts& c);

struct PanopticScores {
  std::map<int, Quality> per_class;  // classes with any TP, FP or FN
  Quality pooled;
  Quality macro;  // mean over classes present in ground truth
};

/// Per-class tallies of one drawing (or a merged dataset).
class PanopticAccumulator {
 public:
  void add(const MatchResult& m, const std::vector<Symbol>& preds, const std::vector<Symbol>& gts);
  /// Associative merge; merge in a fixed order to keep floating sums stable.
  void merge(const PanopticAccumulator& o);
  PanopticScores scores() const;
  const std::map<int, QualityCounts>& counts() const { return counts_; }

 private:
  std::map<int, QualityCounts> counts_;
  std::map<int, bool> in_gt_;
};

PanopticScores panoptic_scores(const MatchResult& m, const std::vector<Symbol>& preds, const std::vector<Symbol>& gts);

/// Groups, matches and tallies one predicted drawing against its ground truth.
PanopticAccumulator evaluate_panoptic(const Drawing& pred, const Drawing& gt,
                                      StuffGrouping stuff = StuffGrouping::kPerClass);

struct F1Counts {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  void merge(const F1Counts& o);
};

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

F1Score f1_from_counts(const F1Counts& c);

struct SemanticCounts {
  std::map<int, F1Counts> unweighted;
  std::map<int, F1Counts> weighted;
  void merge(const SemanticCounts& o);
};

struct SemanticScores {
  std::map<int, F1Score> per_class;
  std::map<int, F1Score> per_class_weighted;
  F1Score total;           // micro over classes
  F1Score total_weighted;  // micro, log-length mass
};

/// Per-class TP/FP/FN over entities; background is never a class.
/// Throws LengthMismatch.
SemanticCounts semantic_counts(const std::vector<int>& pred, const std::vector<int>& gt,
                               const std::vector<double>& weights);
SemanticScores semantic_scores(const SemanticCounts& counts);
SemanticScores semantic_scores(const std::vector<int>& pred, const std::vector<int>& gt, const Drawing& d);

inline constexpr std::array<double, 10> kCocoThresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                                           0.75, 0.80, 0.85, 0.90, 0.95};

/// Predicted and ground-truth boxes of one drawing.
struct DetectionImage {
  std::vector<InstanceBox> preds;
  std::vector<InstanceBox> gts;
};

struct DetectionScores {
  /// class -> AP at each threshold of kCocoThresholds; only classes with GT.
  std::map<int, std::array<double, kCocoThresholds.size()>> per_class;
  double ap50 = 0.0;
  double ap75 = 0.0;
  double map = 0.0;

  double class_map(int label) const;
};

/// Average precision by 101-point interpolation of a precision/recall
/// sequence ordered by descending score.
double interpolated_ap(const std::vector<double>& precision, const std::vector<double>& recall);

DetectionScores detection_ap(const std::vector<DetectionImage>& images);
DetectionScores detection_ap(const std::vector<InstanceBox>& preds, const std::vector<InstanceBox>& gts);

struct LengthHistogram {
  std::vector<double> edges;          // bin edges in mm, ascending
  std::vector<std::size_t> counts;    // counts[0]: below edges[0]; counts.back(): at or above edges.back()
  std::size_t total() const;
  std::size_t mode_bin() const;
};

/// Logarithmic bins from 1 mm to 100 m, `bins_per_decade` per decade, with
/// underflow and overflow bins.
LengthHistogram length_histogram(const std::vector<Drawing>& drawings, int bins_per_decade = 4);

}  // namespace pancad
