#include "pancad/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pancad/errors.hpp"
#include "pancad/random.hpp"

namespace pancad {

using nlohmann::json;

std::size_t FeatureConfig::dimension() const {
  return 1 + 2 + (include_type ? 3 : 0) + static_cast<std::size_t>(levels) * kPyramidChannels;
}

Matrix assemble_node_features(const Drawing& d, const FeaturePyramid& pyramid, bool include_type) {
  const std::size_t n = d.size();
  const std::size_t dim = 3 + (include_type ? 3 : 0) + pyramid.feature_size();
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  const double w = d.extent.width();
  const double h = d.extent.height();
  for (std::size_t i = 0; i < n; ++i) {
    const Entity& e = d.records[i].entity;
    auto row = static_cast<Eigen::Index>(i);
    Eigen::Index col = 0;
    x(row, col++) = std::log1p(arc_length(e));
    Point2 c = entity_bbox(e).center();
    x(row, col++) = w > 0.0 ? std::clamp((c.x - d.extent.xmin) / w, 0.0, 1.0) : 0.5;
    x(row, col++) = h > 0.0 ? std::clamp((c.y - d.extent.ymin) / h, 0.0, 1.0) : 0.5;
    if (include_type) {
      x(row, col + static_cast<int>(entity_type(e))) = 1.0;
      col += 3;
    }
    auto f = fetch_aligned_feature(pyramid, anchor_point(e));
    for (double v : f) x(row, col++) = v;
  }
  return x;
}

Matrix node_features(const Drawing& d, const FeatureConfig& cfg) {
  auto pyramid = build_feature_pyramid(d, cfg.scale_ppm, cfg.levels, cfg.line_width_px);
  return assemble_node_features(d, pyramid, cfg.include_type);
}

Adjacency adjacency_matrix(const EntityGraph& g) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.edges().size() * 2);
  for (auto [i, j] : g.edges()) {
    t.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
    t.emplace_back(static_cast<int>(j), static_cast<int>(i), 1.0);
  }
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Adjacency a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = uniform_real(rng, -bound, bound);
  return m;
}

}  // namespace

GcnParams GcnParams::init(std::size_t input_dim, const std::vector<int>& hidden, std::size_t classes,
                          std::uint64_t seed) {
  if (hidden.size() != kLayerCount) throw Error("exactly three hidden widths are required");
  Rng rng(mix_seed(seed, 0x6763));
  GcnParams p;
  auto in = static_cast<Eigen::Index>(input_dim);
  for (int l = 0; l < kLayerCount; ++l) {
    auto out = static_cast<Eigen::Index>(hidden[static_cast<std::size_t>(l)]);
    if (out < 1) throw Error("hidden widths must be positive");
    // Self and neighbor terms both feed the same unit.
    double bound = std::sqrt(6.0 / (2.0 * static_cast<double>(in)));
    p.w_self[l] = uniform_matrix(out, in, bound, rng);
    p.w_neighbor[l] = uniform_matrix(out, in, bound, rng);
    in = out;
  }
  p.classifier = uniform_matrix(static_cast<Eigen::Index>(classes), in, 1.0, rng);
  p.normalize_classifier();
  return p;
}

GcnParams GcnParams::zeros_like(const GcnParams& p) {
  GcnParams z;
  for (int l = 0; l < kLayerCount; ++l) {
    z.w_self[l] = Matrix::Zero(p.w_self[l].rows(), p.w_self[l].cols());
    z.w_neighbor[l] = Matrix::Zero(p.w_neighbor[l].rows(), p.w_neighbor[l].cols());
  }
  z.classifier = Matrix::Zero(p.classifier.rows(), p.classifier.cols());
  return z;
}

std::vector<Matrix*> GcnParams::tensors() {
  std::vector<Matrix*> out;
  for (int l = 0; l < kLayerCount; ++l) {
    out.push_back(&w_self[l]);
    out.push_back(&w_neighbor[l]);
  }
  out.push_back(&classifier);
  return out;
}

std::vector<const Matrix*> GcnParams::tensors() const {
  std::vector<const Matrix*> out;
  for (int l = 0; l < kLayerCount; ++l) {
    out.push_back(&w_self[l]);
    out.push_back(&w_neighbor[l]);
  }
  out.push_back(&classifier);
  return out;
}

std::size_t GcnParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

void GcnParams::normalize_classifier() {
  for (Eigen::Index r = 0; r < classifier.rows(); ++r) {
    double norm = classifier.row(r).norm();
    if (norm > 0.0) classifier.row(r) /= norm;
  }
}

bool GcnParams::operator==(const GcnParams& o) const {
  auto a = tensors();
  auto b = o.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k]->rows() != b[k]->rows() || a[k]->cols() != b[k]->cols()) return false;
    if (*a[k] != *b[k]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

void check_shapes(const Matrix& x, const Adjacency& adj, const GcnParams& p) {
  if (adj.rows() != x.rows() || adj.cols() != x.rows())
    throw DimensionMismatch("adjacency is " + std::to_string(adj.rows()) + "x" + std::to_string(adj.cols()) +
                            " but there are " + std::to_string(x.rows()) + " nodes");
  Eigen::Index in = x.cols();
  for (int l = 0; l < kLayerCount; ++l) {
    if (p.w_self[l].cols() != in || p.w_neighbor[l].cols() != in || p.w_self[l].rows() != p.w_neighbor[l].rows())
      throw DimensionMismatch("layer " + std::to_string(l) + " weights do not match input width " +
                              std::to_string(in));
    in = p.w_self[l].rows();
  }
  if (p.classifier.cols() != in) throw DimensionMismatch("classifier width does not match the last layer");
}

}  // namespace

Matrix gcn_forward(const Matrix& x, const Adjacency& adj, const GcnParams& params, ForwardCache* cache) {
  check_shapes(x, adj, params);
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;

  c.activations[0] = x;
  for (int l = 0; l < kLayerCount; ++l) {
    const Matrix& h = c.activations[l];
    c.aggregated[l] = adj * h;
    c.preactivations[l] = h * params.w_self[l].transpose() + c.aggregated[l] * params.w_neighbor[l].transpose();
    c.activations[l + 1] = c.preactivations[l].cwiseMax(0.0);
  }
  const Matrix& top = c.activations[kLayerCount];
  c.norms = top.rowwise().norm();
  c.embedding = top;
  for (Eigen::Index i = 0; i < top.rows(); ++i) {
    if (c.norms(i) > 0.0)
      c.embedding.row(i) /= c.norms(i);
    else
      c.embedding.row(i).setZero();
  }
  c.class_rows = params.classifier;
  for (Eigen::Index r = 0; r < c.class_rows.rows(); ++r) {
    double norm = c.class_rows.row(r).norm();
    if (norm > 0.0) c.class_rows.row(r) /= norm;
  }
  c.cosine = c.embedding * c.class_rows.transpose();
  return c.cosine;
}

std::vector<double> compute_class_weights(const std::vector<std::vector<int>>& labels, std::size_t class_count,
                                          WeightMode mode) {
  std::vector<double> counts(class_count, 0.0);
  double total = 0.0;
  for (const auto& ls : labels)
    for (int l : ls) {
      if (l == kBackground) continue;
      if (l < 0 || static_cast<std::size_t>(l) >= class_count) throw UnknownClass("#" + std::to_string(l));
      counts[static_cast<std::size_t>(l)] += 1.0;
      total += 1.0;
    }
  if (total == 0.0) throw EmptyDataset();

  std::vector<double> w(class_count, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < class_count; ++j) {
    if (counts[j] == 0.0) continue;
    switch (mode) {
      case WeightMode::kFrequency: w[j] = counts[j] / total; break;
      case WeightMode::kInverseFrequency: w[j] = total / counts[j]; break;
      case WeightMode::kUniform: w[j] = 1.0; break;
    }
    sum += w[j];
  }
  for (auto& v : w) v /= sum;
  return w;
}

LossResult loss_and_grad(const Matrix& x, const Adjacency& adj, const std::vector<int>& labels, const GcnParams& params,
                         const std::vector<double>& weights, double margin, double scale) {
  if (labels.size() != static_cast<std::size_t>(x.rows()))
    throw DimensionMismatch("label count does not match node count");
  if (weights.size() != params.class_count()) throw DimensionMismatch("weight count does not match class count");

  ForwardCache c;
  gcn_forward(x, adj, params, &c);
  const Eigen::Index n = x.rows();
  const Eigen::Index k = c.cosine.cols();

  std::size_t contributing = 0;
  for (int l : labels)
    if (l != kBackground) ++contributing;

  LossResult result;
  result.grad = GcnParams::zeros_like(params);
  if (contributing == 0) return result;
  const double inv_n = 1.0 / static_cast<double>(contributing);

  // d loss / d cosine
  Matrix dcos = Matrix::Zero(n, k);
  double loss = 0.0;
  Eigen::VectorXd z(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    int y = labels[static_cast<std::size_t>(i)];
    if (y == kBackground) continue;
    if (y < 0 || y >= k) throw UnknownClass("#" + std::to_string(y));
    z = scale * c.cosine.row(i).transpose();
    z(y) -= scale * margin;
    double zmax = z.maxCoeff();
    Eigen::VectorXd e = (z.array() - zmax).exp();
    double w = weights[static_cast<std::size_t>(y)];
    // Sum over the other classes keeps full precision once the target dominates.
    double others = e.sum() - e(y);
    double denom = e(y) + others;
    if (z(y) == zmax)
      loss += w * std::log1p(others);
    else
      loss += w * (std::log(denom) + zmax - z(y));
    Eigen::VectorXd p = e / denom;
    p(y) = -others / denom;
    dcos.row(i) = (w * inv_n * scale) * p.transpose();
  }
  result.loss = loss * inv_n;

  // Cosine classifier: cos = E * Chat^T with Chat rows = c_j / |c_j|.
  Matrix dembed = dcos * c.class_rows;
  Matrix dchat = dcos.transpose() * c.embedding;
  for (Eigen::Index r = 0; r < params.classifier.rows(); ++r) {
    double norm = params.classifier.row(r).norm();
    if (norm == 0.0) continue;
    auto u = c.class_rows.row(r);
    result.grad.classifier.row(r) = (dchat.row(r) - dchat.row(r).dot(u) * u) / norm;
  }

  // Row normalization of the last activations.
  Matrix dh = Matrix::Zero(n, c.embedding.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (c.norms(i) == 0.0) continue;
    auto e = c.embedding.row(i);
    dh.row(i) = (dembed.row(i) - dembed.row(i).dot(e) * e) / c.norms(i);
  }

  for (int l = kLayerCount - 1; l >= 0; --l) {
    Matrix dp = dh.cwiseProduct((c.preactivations[l].array() > 0.0).cast<double>().matrix());
    result.grad.w_self[l] = dp.transpose() * c.activations[l];
    result.grad.w_neighbor[l] = dp.transpose() * c.aggregated[l];
    if (l > 0) {
      Matrix back = dp * params.w_neighbor[l];
      dh = dp * params.w_self[l] + Matrix(adj.transpose() * back);
    }
  }
  return result;
}

double cosine_lr(double t, double total, double lr_max, double lr_min) {
  if (total <= 0.0) return lr_min;
  t = std::clamp(t, 0.0, total);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(kPi * t / total));
}

void adam_step(GcnParams& params, const GcnParams& grads, AdamState& state, double lr, const AdamConfig& cfg) {
  auto p = params.tensors();
  auto g = grads.tensors();
  if (state.m.empty()) {
    for (const auto* t : p) {
      state.m.push_back(Matrix::Zero(t->rows(), t->cols()));
      state.v.push_back(Matrix::Zero(t->rows(), t->cols()));
    }
  }
  if (state.m.size() != p.size()) throw DimensionMismatch("optimizer state does not match parameters");
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k]->rows() != p[k]->rows() || g[k]->cols() != p[k]->cols() || state.m[k].rows() != p[k]->rows() ||
        state.m[k].cols() != p[k]->cols())
      throw DimensionMismatch("gradient shape does not match parameter shape");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < p.size(); ++k) {
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * *g[k];
    state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g[k]->cwiseProduct(*g[k]);
    auto mhat = state.m[k].array() / bc1;
    auto vhat = state.v[k].array() / bc2;
    p[k]->array() -= lr * mhat / (vhat.sqrt() + cfg.epsilon);
  }
  params.normalize_classifier();
}

void TrainConfig::validate() const {
  if (!(lr_max >= 0.0) || !(lr_min >= 0.0) || lr_min > lr_max) throw Error("learning rates must satisfy 0 <= min <= max");
  if (iterations < 0) throw Error("iterations must be nonnegative");
  if (!(margin >= 0.0 && margin < 1.0)) throw Error("margin must lie in [0, 1)");
  if (!(scale > 0.0)) throw Error("loss scale must be positive");
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (hidden.size() != kLayerCount) throw Error("exactly three hidden widths are required");
}

GraphSample prepare_sample(const Drawing& d, const GraphConfig& graph_cfg, const FeatureConfig& feature_cfg) {
  GraphSample s;
  s.id = d.id;
  s.features = node_features(d, feature_cfg);
  s.adjacency = adjacency_matrix(build_graph(d, graph_cfg));
  s.labels.reserve(d.size());
  for (const auto& r : d.records) s.labels.push_back(r.label);
  return s;
}

TrainResult train_gcn(const std::vector<GraphSample>& dataset, std::size_t class_count, const TrainConfig& cfg,
                      const AuxiliaryLoss& auxiliary) {
  cfg.validate();
  if (dataset.empty()) throw EmptyDataset();
  std::vector<std::vector<int>> all_labels;
  for (const auto& s : dataset) all_labels.push_back(s.labels);

  TrainResult result;
  result.class_weights = compute_class_weights(all_labels, class_count, cfg.weights);
  const auto input_dim = static_cast<std::size_t>(dataset.front().features.cols());
  for (const auto& s : dataset)
    if (static_cast<std::size_t>(s.features.cols()) != input_dim)
      throw DimensionMismatch("samples disagree on feature width");
  result.params = GcnParams::init(input_dim, cfg.hidden, class_count, cfg.seed);

  Rng order_rng(mix_seed(cfg.seed, 0x6f72646572));
  std::vector<std::size_t> order(dataset.size());
  std::size_t cursor = order.size();
  AdamState state;
  result.trace.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    if (cursor == order.size()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(order_rng, i)]);
      cursor = 0;
    }
    const GraphSample& s = dataset[order[cursor++]];
    double lr = cosine_lr(it, cfg.iterations, cfg.lr_max, cfg.lr_min);
    LossResult lg = loss_and_grad(s.features, s.adjacency, s.labels, result.params, result.class_weights, cfg.margin,
                                  cfg.scale);
    for (auto* t : lg.grad.tensors()) *t *= cfg.lambda;
    double total = cfg.lambda * lg.loss + (auxiliary ? auxiliary(it) : 0.0);
    adam_step(result.params, lg.grad, state, lr, cfg.adam);
    result.trace.push_back({it, lr, total});
  }
  return result;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,lr,loss\n";
  for (const auto& r : trace) out << r.iteration << ',' << r.lr << ',' << r.loss << '\n';
  return out.str();
}

std::vector<int> predict_labels(const GcnParams& params, const GraphSample& sample) {
  Matrix cos = gcn_forward(sample.features, sample.adjacency, params);
  std::vector<int> out(static_cast<std::size_t>(cos.rows()));
  for (Eigen::Index i = 0; i < cos.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < cos.cols(); ++j)
      if (cos(i, j) > cos(i, best)) best = j;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> infer_entity_labels(const Drawing& d, const GcnModel& model) {
  if (d.catalog.names() != model.catalog.names())
    throw Error("drawing '" + d.id + "' uses a different class catalog than the model");
  if (d.size() == 0) return {};
  return predict_labels(model.params, prepare_sample(d, model.graph, model.features));
}

double entity_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw LengthMismatch("prediction and truth lengths differ");
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == kBackground) continue;
    ++total;
    if (predicted[i] == truth[i]) ++correct;
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

json matrix_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data[static_cast<std::size_t>(r * m.cols() + c)] = m(r, c);
  j["data"] = std::move(data);
  return j;
}

Matrix json_matrix(const json& j) {
  auto rows = j.at("rows").get<Eigen::Index>();
  auto cols = j.at("cols").get<Eigen::Index>();
  auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols))
    throw ParseError(0, "matrix data does not match its shape");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  return m;
}

const char* weight_mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::kFrequency: return "frequency";
    case WeightMode::kInverseFrequency: return "inverse";
    case WeightMode::kUniform: return "uniform";
  }
  return "frequency";
}

WeightMode weight_mode_from(const std::string& s) {
  if (s == "frequency") return WeightMode::kFrequency;
  if (s == "inverse") return WeightMode::kInverseFrequency;
  if (s == "uniform") return WeightMode::kUniform;
  throw ParseError(0, "unknown weight mode '" + s + "'");
}

}  // namespace

std::string model_to_json(const GcnModel& model) {
  json j;
  j["format"] = "pancad-gcn";
  j["version"] = 1;
  j["classes"] = model.catalog.names();
  json stuff = json::array();
  for (int c : model.catalog.stuff_classes()) stuff.push_back(model.catalog.name(c));
  j["stuff"] = std::move(stuff);
  j["graph"] = {{"epsilon", model.graph.epsilon},
                {"eta", model.graph.eta},
                {"k_max", model.graph.k_max},
                {"seed", model.graph.seed},
                {"parallel_angle_tol", model.graph.parallel_angle_tol}};
  j["features"] = {{"scale_ppm", model.features.scale_ppm},
                   {"levels", model.features.levels},
                   {"line_width_px", model.features.line_width_px},
                   {"include_type", model.features.include_type}};
  const auto& t = model.train;
  j["train"] = {{"lr_max", t.lr_max},   {"lr_min", t.lr_min},         {"iterations", t.iterations},
                {"beta1", t.adam.beta1}, {"beta2", t.adam.beta2},       {"adam_epsilon", t.adam.epsilon},
                {"margin", t.margin},    {"scale", t.scale},            {"lambda", t.lambda},
                {"seed", t.seed},        {"hidden", t.hidden},          {"weights", weight_mode_name(t.weights)}};
  json layers = json::array();
  for (int l = 0; l < kLayerCount; ++l)
    layers.push_back({{"w_self", matrix_json(model.params.w_self[l])},
                      {"w_neighbor", matrix_json(model.params.w_neighbor[l])}});
  j["layers"] = std::move(layers);
  j["classifier"] = matrix_json(model.params.classifier);
  return j.dump() + "\n";
}

GcnModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "pancad-gcn") throw ParseError(0, "not a pancad model file");
    if (j.at("version").get<int>() != 1) throw ParseError(0, "unsupported model version");
    GcnModel m;
    auto names = j.at("classes").get<std::vector<std::string>>();
    auto stuff_names = j.at("stuff").get<std::vector<std::string>>();
    std::vector<bool> stuff(names.size(), false);
    for (const auto& s : stuff_names) {
      auto it = std::find(names.begin(), names.end(), s);
      if (it == names.end()) throw UnknownClass(s);
      stuff[static_cast<std::size_t>(it - names.begin())] = true;
    }
    m.catalog = LabelCatalog(std::move(names), std::move(stuff));
    const auto& g = j.at("graph");
    m.graph.epsilon = g.at("epsilon").get<double>();
    m.graph.eta = g.at("eta").get<double>();
    m.graph.k_max = g.at("k_max").get<int>();
    m.graph.seed = g.at("seed").get<std::uint64_t>();
    m.graph.parallel_angle_tol = g.at("parallel_angle_tol").get<double>();
    const auto& f = j.at("features");
    m.features.scale_ppm = f.at("scale_ppm").get<double>();
    m.features.levels = f.at("levels").get<int>();
    m.features.line_width_px = f.at("line_width_px").get<double>();
    m.features.include_type = f.at("include_type").get<bool>();
    const auto& t = j.at("train");
    m.train.lr_max = t.at("lr_max").get<double>();
    m.train.lr_min = t.at("lr_min").get<double>();
    m.train.iterations = t.at("iterations").get<int>();
    m.train.adam.beta1 = t.at("beta1").get<double>();
    m.train.adam.beta2 = t.at("beta2").get<double>();
    m.train.adam.epsilon = t.at("adam_epsilon").get<double>();
    m.train.margin = t.at("margin").get<double>();
    m.train.scale = t.at("scale").get<double>();
    m.train.lambda = t.at("lambda").get<double>();
    m.train.seed = t.at("seed").get<std::uint64_t>();
    m.train.hidden = t.at("hidden").get<std::vector<int>>();
    m.train.weights = weight_mode_from(t.at("weights").get<std::string>());
    const auto& layers = j.at("layers");
    if (layers.size() != kLayerCount) throw ParseError(0, "model must have three layers");
    for (int l = 0; l < kLayerCount; ++l) {
      m.params.w_self[l] = json_matrix(layers[static_cast<std::size_t>(l)].at("w_self"));
      m.params.w_neighbor[l] = json_matrix(layers[static_cast<std::size_t>(l)].at("w_neighbor"));
    }
    m.params.classifier = json_matrix(j.at("classifier"));
    if (m.params.class_count() != m.catalog.size()) throw ParseError(0, "classifier rows do not match class count");
    if (m.params.input_dim() != m.features.dimension())
      throw ParseError(0, "input width does not match the feature configuration");
    return m;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(0, e.what());
  }
}

void save_model(const GcnModel& model, const std::filesystem::path& path) { write_text_file(path, model_to_json(model)); }

GcnModel load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace pancad
