#pragma once

// Graph-convolution entity classifier: node features, three convolution
// layers with ReLU, a cosine classifier trained with an additive-margin
// softmax, analytic gradients and an Adam + cosine-annealing loop.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pancad/drawing.hpp"
#include "pancad/graph.hpp"
#include "pancad/raster.hpp"

namespace pancad {

using Matrix = Eigen::MatrixXd;
using Adjacency = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr int kLayerCount = 3;

struct FeatureConfig {
  double scale_ppm = 0.05;  // pyramid resolution, pixels per mm
  int levels = 4;
  double line_width_px = 3.0;
  bool include_type = true;

  std::size_t dimension() const;
};

/// Rows are [log(1+length), center x, center y, one-hot type (optional),
/// image-aligned pyramid features]. Centers are normalized by the extent.
Matrix assemble_node_features(const Drawing& d, const FeaturePyramid& pyramid, bool include_type = true);

/// Builds the pyramid at `cfg.scale_ppm` and assembles the features.
Matrix node_features(const Drawing& d, const FeatureConfig& cfg);

Adjacency adjacency_matrix(const EntityGraph& g);

struct GcnParams {
  std::array<Matrix, kLayerCount> w_self;      // out x in, applied to the node itself
  std::array<Matrix, kLayerCount> w_neighbor;  // out x in, applied to the neighbor sum
  Matrix classifier;                           // classes x hidden, unit rows

  /// He-style uniform init scaled by fan-in; classifier rows normalized.
  static GcnParams init(std::size_t input_dim, const std::vector<int>& hidden, std::size_t classes,
                        std::uint64_t seed);
  static GcnParams zeros_like(const GcnParams& p);

  std::size_t input_dim() const { return static_cast<std::size_t>(w_self[0].cols()); }
  std::size_t class_count() const { return static_cast<std::size_t>(classifier.rows()); }

  /// All parameter matrices in a fixed order; classifier last.
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::size_t parameter_count() const;

  void normalize_classifier();
  bool operator==(const GcnParams& o) const;
};

struct ForwardCache {
  std::array<Matrix, kLayerCount + 1> activations;  // [0] is the input
  std::array<Matrix, kLayerCount + 1> aggregated;   // A * activations[l], for l < kLayerCount
  std::array<Matrix, kLayerCount> preactivations;
  Matrix embedding;        // unit-normalized final activations
  Eigen::VectorXd norms;   // norms of the final activations
  Matrix class_rows;       // unit-normalized classifier
  Matrix cosine;           // nodes x classes
};

/// Cosine logits per node. Throws DimensionMismatch.
Matrix gcn_forward(const Matrix& x, const Adjacency& adj, const GcnParams& params, ForwardCache* cache = nullptr);

enum class WeightMode { kFrequency, kInverseFrequency, kUniform };

/// Per-class loss weights from labeled entity counts; they sum to one over
/// classes present. Background labels are ignored. Throws EmptyDataset.
std::vector<double> compute_class_weights(const std::vector<std::vector<int>>& labels, std::size_t class_count,
                                          WeightMode mode = WeightMode::kFrequency);

struct LossResult {
  double loss = 0.0;
  GcnParams grad;
};

/// Mean over labeled nodes of w[y] * cross-entropy of the margin softmax,
/// with target logit s*(cos - m) and others s*cos. Background (-1) nodes
/// are masked out.
LossResult loss_and_grad(const Matrix& x, const Adjacency& adj, const std::vector<int>& labels, const GcnParams& params,
                         const std::vector<double>& weights, double margin, double scale);

double cosine_lr(double t, double total, double lr_max, double lr_min);

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update; classifier rows renormalized afterwards.
void adam_step(GcnParams& params, const GcnParams& grads, AdamState& state, double lr, const AdamConfig& cfg = {});

struct TrainConfig {
  double lr_max = 1e-4;
  double lr_min = 0.0;
  int iterations = 40000;
  AdamConfig adam;
  double margin = 0.35;
  double scale = 30.0;
  double lambda = 3.0;
  std::uint64_t seed = 0;
  std::vector<int> hidden = {64, 64, 64};
  WeightMode weights = WeightMode::kFrequency;

  void validate() const;
};

/// A drawing prepared for training or inference.
struct GraphSample {
  std::string id;
  Matrix features;
  Adjacency adjacency;
  std::vector<int> labels;
};

GraphSample prepare_sample(const Drawing& d, const GraphConfig& graph_cfg, const FeatureConfig& feature_cfg);

struct TraceRow {
  int iteration = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  GcnParams params;
  std::vector<double> class_weights;
  std::vector<TraceRow> trace;
};

/// External per-iteration loss added to the total (the detection loss);
/// zero when absent.
using AuxiliaryLoss = std::function<double(int iteration)>;

/// One drawing per step, visiting drawings in a seeded per-epoch shuffle.
/// Deterministic for a given (dataset, cfg). Throws EmptyDataset.
TrainResult train_gcn(const std::vector<GraphSample>& dataset, std::size_t class_count, const TrainConfig& cfg,
                      const AuxiliaryLoss& auxiliary = {});

std::string trace_to_csv(const std::vector<TraceRow>& trace);

/// Trained parameters with everything needed to run inference.
struct GcnModel {
  LabelCatalog catalog;
  GraphConfig graph;
  FeatureConfig features;
  TrainConfig train;
  GcnParams params;
};

std::vector<int> predict_labels(const GcnParams& params, const GraphSample& sample);

/// Builds the graph and features of `d` and returns argmax cosine labels.
std::vector<int> infer_entity_labels(const Drawing& d, const GcnModel& model);

/// Fraction of labeled entities whose prediction matches.
double entity_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

std::string model_to_json(const GcnModel& model);
GcnModel model_from_json(std::string_view text);
void save_model(const GcnModel& model, const std::filesystem::path& path);
GcnModel load_model(const std::filesystem::path& path);

}  // namespace pancad
