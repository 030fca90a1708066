#include "pancad/cli.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>
#include <sstream>

#include "CLI11.hpp"
#include "pancad/drawing.hpp"
#include "pancad/dxf.hpp"
#include "pancad/errors.hpp"
#include "pancad/gcn.hpp"
#include "pancad/graph.hpp"
#include "pancad/metrics.hpp"
#include "pancad/panoptic.hpp"
#include "pancad/parallel.hpp"
#include "pancad/raster.hpp"
#include "pancad/synth.hpp"

namespace pancad {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void init_logging() {
  auto logger = spdlog::get("pancad");
  if (!logger) {
    logger = spdlog::stderr_color_mt("pancad");
    spdlog::set_default_logger(logger);
  }
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("PANCAD_LOG")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

// Flags shared by every subcommand. They live on the top-level app so a
// config file can set them without sections.
struct Common {
  std::uint64_t seed = 0;
  int threads = 1;
  double epsilon = 100.0;
  double eta = 0.2;
  int kmax = 3;
  double scale_ppm = 0.0;
  int iters = 2000;
  double lr = 1e-4;
  double margin = 0.35;
  double loss_scale = 30.0;
  double lambda = 3.0;
  std::string classes;
  CLI::App* app = nullptr;

  bool given(const std::string& flag) const { return app->get_option(flag)->count() > 0; }
};

LabelCatalog catalog_from(const Common& c, const LabelCatalog& fallback) {
  if (!c.given("--classes")) return fallback;
  if (c.classes == "full") return LabelCatalog::full();
  if (c.classes == "synthetic") return LabelCatalog::synthetic();
  std::vector<std::string> names;
  std::stringstream ss(c.classes);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) names.push_back(item);
  if (names.empty()) throw Error("--classes lists no class");
  return LabelCatalog::from_names(names);
}

GraphConfig graph_config(const Common& c) {
  GraphConfig g;
  g.epsilon = c.epsilon;
  g.eta = c.eta;
  g.k_max = c.kmax;
  g.seed = c.seed;
  g.threads = c.threads;
  g.validate();
  return g;
}

json graph_json(const GraphConfig& g) {
  return {{"epsilon", g.epsilon}, {"eta", g.eta}, {"k_max", g.k_max}, {"seed", g.seed},
          {"parallel_angle_tol", g.parallel_angle_tol}};
}

json feature_json(const FeatureConfig& f) {
  return {{"scale_ppm", f.scale_ppm}, {"levels", f.levels}, {"line_width_px", f.line_width_px},
          {"include_type", f.include_type}};
}

const char* weight_mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::kFrequency: return "frequency";
    case WeightMode::kInverseFrequency: return "inverse";
    case WeightMode::kUniform: return "uniform";
  }
  return "frequency";
}

json train_json(const TrainConfig& t) {
  return {{"lr_max", t.lr_max},   {"lr_min", t.lr_min}, {"iterations", t.iterations},
          {"beta1", t.adam.beta1}, {"beta2", t.adam.beta2}, {"adam_epsilon", t.adam.epsilon},
          {"margin", t.margin},   {"scale", t.scale},   {"lambda", t.lambda},
          {"seed", t.seed},       {"hidden", t.hidden}, {"weights", weight_mode_name(t.weights)}};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Run record written beside the outputs. Paths are stored relative to the
// manifest (outputs) or by name and content hash (inputs) so reruns in
// another directory produce the same bytes apart from the timestamp.
class Manifest {
 public:
  Manifest(const std::string& command, const Common& c) {
    j_["tool"] = "pancad";
    j_["versions"] = {{"pancad", kVersion},
                      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                    std::to_string(EIGEN_MINOR_VERSION)},
                      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                            std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    j_["command"] = command;
    j_["seed"] = c.seed;
    j_["configs"] = json::object();
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }

  void input(const fs::path& p) {
    j_["inputs"].push_back({{"name", p.filename().string()}, {"fnv1a64", hex64(fnv1a(read_text_file(p)))}});
  }
  void output(const fs::path& p, const fs::path& base) {
    j_["outputs"].push_back(fs::relative(p, base).generic_string());
  }
  void config(const std::string& key, json value) { j_["configs"][key] = std::move(value); }
  void set(const std::string& key, json value) { j_[key] = std::move(value); }

  void write(const fs::path& path) {
    j_["timestamp"] = utc_timestamp();
    write_text_file(path, j_.dump(2) + "\n");
  }

 private:
  json j_;
};

fs::path manifest_path_for(const fs::path& out, bool directory) {
  return directory ? out / "manifest.json" : fs::path(out.string() + ".manifest.json");
}

fs::path manifest_base(const fs::path& out, bool directory) {
  return directory ? out : (out.has_parent_path() ? out.parent_path() : fs::path("."));
}

// A file, or every *.jsonl file of a directory in name order.
std::vector<fs::path> collect_drawings(const fs::path& p) {
  if (fs::is_regular_file(p)) return {p};
  if (!fs::is_directory(p)) throw Error("input not found: " + p.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(p))
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no .jsonl drawings in " + p.string());
  return files;
}

// Output path of one input: inside `out` when the input was a directory.
fs::path output_for(const fs::path& input, const fs::path& out, bool directory, const std::string& extension) {
  if (!directory) return out;
  fs::path name = input.filename();
  name.replace_extension(extension);
  return out / name;
}

// Companion file of a drawing: the same name in `dir`, or `p` itself when it
// is a file.
fs::path companion(const fs::path& drawing, const fs::path& p, const std::string& extension) {
  if (!fs::is_directory(p)) {
    if (!fs::is_regular_file(p)) throw Error("input not found: " + p.string());
    return p;
  }
  fs::path name = drawing.filename();
  name.replace_extension(extension);
  fs::path f = p / name;
  if (!fs::is_regular_file(f)) throw Error("missing " + f.string());
  return f;
}

std::vector<Drawing> load_all(const std::vector<fs::path>& files, int threads) {
  std::vector<Drawing> out(files.size());
  parallel_for(files.size(), threads, [&](std::size_t i) { out[i] = load_drawing(files[i]); });
  return out;
}

// gen -------------------------------------------------------------------------

struct GenArgs {
  fs::path out;
  int count = 1;
  bool dxf = false;
  int rooms_x = 3;
  int rooms_y = 3;
  bool allow_overlap = false;
  bool no_rotate = false;
};

int cmd_gen(const Common& c, const GenArgs& a, std::ostream& out) {
  if (a.count < 1) throw Error("--count must be at least 1");
  SynthConfig base;
  base.rooms_x = a.rooms_x;
  base.rooms_y = a.rooms_y;
  base.overlap_free = !a.allow_overlap;
  base.rotate = !a.no_rotate;
  base.classes = catalog_from(c, LabelCatalog::synthetic());
  base.validate();

  fs::create_directories(a.out);
  std::vector<fs::path> written(static_cast<std::size_t>(a.count));
  parallel_for(written.size(), c.threads, [&](std::size_t k) {
    SynthConfig cfg = base;
    cfg.seed = mix_seed(c.seed, k);
    Drawing d = generate_floorplan(cfg);
    char name[32];
    std::snprintf(name, sizeof name, "drawing_%04zu", k);
    written[k] = a.out / (std::string(name) + ".jsonl");
    save_drawing(d, written[k]);
    if (a.dxf) write_text_file(a.out / (std::string(name) + ".dxf"), write_dxf(d));
  });

  Manifest m("gen", c);
  m.config("synth", {{"count", a.count},
                     {"rooms_x", base.rooms_x},
                     {"rooms_y", base.rooms_y},
                     {"room_min", base.room_min},
                     {"room_max", base.room_max},
                     {"wall_thickness", base.wall_thickness},
                     {"door_density", base.door_density},
                     {"window_density", base.window_density},
                     {"parking_density", base.parking_density},
                     {"furniture_density", base.furniture_density},
                     {"overlap_free", base.overlap_free},
                     {"rotate", base.rotate},
                     {"classes", base.classes.names()},
                     {"block_mm", SynthConfig::kBlockSize}});
  for (std::size_t k = 0; k < written.size(); ++k) {
    m.output(written[k], a.out);
    if (a.dxf) m.output(fs::path(written[k]).replace_extension(".dxf"), a.out);
  }
  m.write(a.out / "manifest.json");
  out << "wrote " << a.count << " drawing(s) to " << a.out.string() << "\n";
  return 0;
}

// parse-dxf -------------------------------------------------------------------

int cmd_parse_dxf(const Common& c, const fs::path& in, const fs::path& out_path, std::ostream& out) {
  if (!fs::is_regular_file(in)) throw Error("input not found: " + in.string());
  const LabelCatalog catalog = catalog_from(c, LabelCatalog::full());
  DxfParseResult r = parse_dxf_subset(read_text_file(in), in.stem().string(), catalog);
  save_drawing(r.drawing, out_path);
  if (r.skipped > 0) spdlog::warn("skipped {} degenerate or unsupported entities", r.skipped);

  Manifest m("parse-dxf", c);
  m.input(in);
  m.output(out_path, manifest_base(out_path, false));
  m.set("entities", r.drawing.size());
  m.set("skipped", r.skipped);
  m.config("classes", catalog.names());
  m.write(manifest_path_for(out_path, false));
  out << "parsed " << r.drawing.size() << " entities (" << r.skipped << " skipped)\n";
  return 0;
}

// graph -----------------------------------------------------------------------

int cmd_graph(const Common& c, const fs::path& in, const fs::path& out_path, std::ostream& out) {
  const auto files = collect_drawings(in);
  const bool dir = fs::is_directory(in);
  const GraphConfig g = graph_config(c);
  if (dir) fs::create_directories(out_path);

  std::vector<fs::path> outputs(files.size());
  std::size_t edges = 0;
  // The graph builder itself is multithreaded; drawings run in order.
  for (std::size_t i = 0; i < files.size(); ++i) {
    Drawing d = load_drawing(files[i]);
    EntityGraph graph = build_graph(d, g);
    edges += graph.edges().size();
    outputs[i] = output_for(files[i], out_path, dir, ".graph.json");
    write_text_file(outputs[i], graph.to_json());
  }

  Manifest m("graph", c);
  for (const auto& f : files) m.input(f);
  for (const auto& o : outputs) m.output(o, manifest_base(out_path, dir));
  m.config("graph", graph_json(g));
  m.write(manifest_path_for(out_path, dir));
  out << "built " << files.size() << " graph(s), " << edges << " edges\n";
  return 0;
}

// rasterize -------------------------------------------------------------------

int cmd_rasterize(const Common& c, const fs::path& in, const fs::path& out_path, double line_width,
                  std::ostream& out) {
  const auto files = collect_drawings(in);
  const bool dir = fs::is_directory(in);
  const double scale = c.given("--scale-ppm") ? c.scale_ppm : 1.0;
  if (!(scale > 0.0)) throw Error("--scale-ppm must be positive");
  if (dir) fs::create_directories(out_path);

  std::vector<fs::path> outputs(files.size());
  parallel_for(files.size(), c.threads, [&](std::size_t i) {
    Drawing d = load_drawing(files[i]);
    LabelMask mask = render_label_mask(d, scale, line_width);
    outputs[i] = output_for(files[i], out_path, dir, ".pgm");
    write_text_file(outputs[i], mask.to_pgm());
  });

  Manifest m("rasterize", c);
  for (const auto& f : files) m.input(f);
  for (const auto& o : outputs) m.output(o, manifest_base(out_path, dir));
  m.config("raster", {{"scale_ppm", scale}, {"line_width_px", line_width}});
  m.write(manifest_path_for(out_path, dir));
  out << "rendered " << files.size() << " mask(s)\n";
  return 0;
}

// train -----------------------------------------------------------------------

struct TrainArgs {
  fs::path data;
  fs::path out;
  fs::path trace;
  std::string weights = "frequency";
};

WeightMode parse_weight_mode(const std::string& s) {
  if (s == "frequency") return WeightMode::kFrequency;
  if (s == "inverse") return WeightMode::kInverseFrequency;
  if (s == "uniform") return WeightMode::kUniform;
  throw Error("unknown weight mode '" + s + "'");
}

int cmd_train(const Common& c, const TrainArgs& a, std::ostream& out) {
  const auto files = collect_drawings(a.data);
  GcnModel model;
  model.graph = graph_config(c);
  if (c.given("--scale-ppm")) model.features.scale_ppm = c.scale_ppm;
  model.train.lr_max = c.lr;
  model.train.iterations = c.iters;
  model.train.margin = c.margin;
  model.train.scale = c.loss_scale;
  model.train.lambda = c.lambda;
  model.train.seed = c.seed;
  model.train.weights = parse_weight_mode(a.weights);
  model.train.validate();

  const auto drawings = load_all(files, c.threads);
  model.catalog = drawings.front().catalog;
  for (const auto& d : drawings)
    if (!(d.catalog == model.catalog)) throw Error("training drawings use different class catalogs");

  // Graphs are built single-threaded per drawing; drawings are spread over workers.
  GraphConfig per_drawing = model.graph;
  per_drawing.threads = 1;
  std::vector<GraphSample> samples(drawings.size());
  parallel_for(drawings.size(), c.threads,
               [&](std::size_t i) { samples[i] = prepare_sample(drawings[i], per_drawing, model.features); });

  spdlog::info("training on {} drawings for {} iterations", samples.size(), model.train.iterations);
  TrainResult result = train_gcn(samples, model.catalog.size(), model.train);
  model.params = std::move(result.params);
  save_model(model, a.out);
  fs::path trace = a.trace.empty() ? fs::path(a.out).replace_extension(".trace.csv") : a.trace;
  write_text_file(trace, trace_to_csv(result.trace));

  Manifest m("train", c);
  for (const auto& f : files) m.input(f);
  const fs::path base = manifest_base(a.out, false);
  m.output(a.out, base);
  m.output(trace, base);
  m.config("graph", graph_json(model.graph));
  m.config("features", feature_json(model.features));
  m.config("train", train_json(model.train));
  m.config("classes", model.catalog.names());
  m.set("class_weights", result.class_weights);
  m.set("final_loss", result.trace.empty() ? 0.0 : result.trace.back().loss);
  m.write(manifest_path_for(a.out, false));
  out << "trained on " << samples.size() << " drawings, final loss "
      << (result.trace.empty() ? 0.0 : result.trace.back().loss) << "\n";
  return 0;
}

// infer -----------------------------------------------------------------------

int cmd_infer(const Common& c, const fs::path& model_path, const fs::path& in, const fs::path& out_path,
              std::ostream& out) {
  if (!fs::is_regular_file(model_path)) throw Error("model not found: " + model_path.string());
  const auto files = collect_drawings(in);
  const bool dir = fs::is_directory(in);
  const GcnModel model = load_model(model_path);
  if (dir) fs::create_directories(out_path);

  std::vector<fs::path> outputs(files.size());
  std::vector<double> accuracy(files.size(), 0.0);
  std::vector<std::size_t> labeled(files.size(), 0);
  parallel_for(files.size(), c.threads, [&](std::size_t i) {
    Drawing d = load_drawing(files[i]);
    std::vector<int> labels = infer_entity_labels(d, model);
    std::vector<int> truth;
    for (const auto& r : d.records) truth.push_back(r.label);
    for (int t : truth)
      if (t != kBackground) ++labeled[i];
    if (labeled[i] > 0) accuracy[i] = entity_accuracy(labels, truth);
    outputs[i] = output_for(files[i], out_path, dir, ".jsonl");
    save_drawing(apply_labels(d, labels), outputs[i]);
  });

  double correct = 0.0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    correct += accuracy[i] * static_cast<double>(labeled[i]);
    total += labeled[i];
  }
  Manifest m("infer", c);
  m.input(model_path);
  for (const auto& f : files) m.input(f);
  for (const auto& o : outputs) m.output(o, manifest_base(out_path, dir));
  if (total > 0) m.set("entity_accuracy", correct / static_cast<double>(total));
  m.write(manifest_path_for(out_path, dir));
  out << "labeled " << files.size() << " drawing(s)";
  if (total > 0) out << ", entity accuracy " << correct / static_cast<double>(total);
  out << "\n";
  return 0;
}

// assemble --------------------------------------------------------------------

struct AssembleArgs {
  fs::path in;
  fs::path out;
  fs::path boxes;
  fs::path gt_boxes;
  bool demote = false;
  double min_inside = 0.5;
};

int cmd_assemble(const Common& c, const AssembleArgs& a, std::ostream& out) {
  if (a.boxes.empty() == a.gt_boxes.empty()) throw Error("give exactly one of --boxes and --gt-boxes");
  const auto files = collect_drawings(a.in);
  const bool dir = fs::is_directory(a.in);
  std::vector<fs::path> box_files(files.size());
  for (std::size_t i = 0; i < files.size(); ++i)
    box_files[i] = a.boxes.empty() ? companion(files[i], a.gt_boxes, ".jsonl") : companion(files[i], a.boxes, ".json");
  if (dir) fs::create_directories(a.out);

  AssembleConfig cfg;
  cfg.min_inside_fraction = a.min_inside;
  cfg.unboxed = a.demote ? UnboxedThings::kDemote : UnboxedThings::kKeepLabel;
  std::vector<fs::path> outputs(files.size());
  parallel_for(files.size(), c.threads, [&](std::size_t i) {
    Drawing d = load_drawing(files[i]);
    std::vector<InstanceBox> boxes =
        a.boxes.empty() ? gt_instance_boxes(load_drawing(box_files[i])) : load_boxes(box_files[i], d.catalog);
    std::vector<int> labels;
    for (const auto& r : d.records) labels.push_back(r.label);
    outputs[i] = output_for(files[i], a.out, dir, ".jsonl");
    save_drawing(apply_prediction(d, assemble_panoptic(d, labels, boxes, cfg)), outputs[i]);
  });

  Manifest m("assemble", c);
  for (std::size_t i = 0; i < files.size(); ++i) {
    m.input(files[i]);
    m.input(box_files[i]);
  }
  for (const auto& o : outputs) m.output(o, manifest_base(a.out, dir));
  m.config("assemble", {{"samples", cfg.samples},
                        {"min_inside_fraction", cfg.min_inside_fraction},
                        {"unboxed", a.demote ? "demote" : "keep"},
                        {"boxes", a.boxes.empty() ? "ground truth" : "file"}});
  m.write(manifest_path_for(a.out, dir));
  out << "assembled " << files.size() << " drawing(s)\n";
  return 0;
}

// eval ------------------------------------------------------------------------

struct EvalArgs {
  std::string kind;
  fs::path gt;
  fs::path pred;
  fs::path boxes;
  fs::path out;
  bool stuff_components = false;
};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Plain-text table with the report columns; unused metrics print "-".
std::string report_table(const json& report) {
  const std::vector<std::pair<std::string, std::string>> cols = {
      {"wF1", "wF1"}, {"mAP", "mAP"}, {"PQ", "PQ"}, {"SQ", "SQ"}, {"RQ", "RQ"}};
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-24s", "class");
  os << buf;
  for (const auto& col : cols) {
    std::snprintf(buf, sizeof buf, "%9s", col.first.c_str());
    os << buf;
  }
  os << "\n";
  auto row = [&](const std::string& name, const json& values) {
    std::snprintf(buf, sizeof buf, "%-24s", name.c_str());
    os << buf;
    for (const auto& col : cols) {
      std::string cell = values.contains(col.second) ? fixed4(values[col.second].get<double>()) : "-";
      std::snprintf(buf, sizeof buf, "%9s", cell.c_str());
      os << buf;
    }
    os << "\n";
  };
  for (const auto& entry : report["per_class"]) row(entry["class"].get<std::string>(), entry);
  row("overall", report["overall"]);
  return os.str();
}

json eval_semantic(const std::vector<Drawing>& gts, const std::vector<Drawing>& preds, int threads) {
  std::vector<SemanticCounts> counts(gts.size());
  parallel_for(gts.size(), threads, [&](std::size_t i) {
    if (gts[i].size() != preds[i].size()) throw LengthMismatch("entity counts differ for " + gts[i].id);
    std::vector<int> p, g;
    for (const auto& r : preds[i].records) p.push_back(r.label);
    for (const auto& r : gts[i].records) g.push_back(r.label);
    counts[i] = semantic_counts(p, g, entity_log_lengths(gts[i]));
  });
  SemanticCounts total;
  for (const auto& c : counts) total.merge(c);
  SemanticScores s = semantic_scores(total);

  const LabelCatalog& catalog = gts.front().catalog;
  json report;
  report["per_class"] = json::array();
  for (const auto& [label, f] : s.per_class) {
    const F1Score& w = s.per_class_weighted.at(label);
    report["per_class"].push_back({{"class", catalog.label_name(label)},
                                   {"F1", f.f1},
                                   {"precision", f.precision},
                                   {"recall", f.recall},
                                   {"wF1", w.f1},
                                   {"wPrecision", w.precision},
                                   {"wRecall", w.recall}});
  }
  report["overall"] = {{"F1", s.total.f1},
                       {"precision", s.total.precision},
                       {"recall", s.total.recall},
                       {"wF1", s.total_weighted.f1},
                       {"wPrecision", s.total_weighted.precision},
                       {"wRecall", s.total_weighted.recall}};
  return report;
}

json eval_instance(const std::vector<Drawing>& gts, const std::vector<std::vector<InstanceBox>>& preds) {
  std::vector<DetectionImage> images(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) images[i] = {preds[i], gt_instance_boxes(gts[i])};
  DetectionScores s = detection_ap(images);
  const LabelCatalog& catalog = gts.front().catalog;
  json report;
  report["per_class"] = json::array();
  for (const auto& [label, aps] : s.per_class)
    report["per_class"].push_back({{"class", catalog.label_name(label)},
                                   {"AP50", aps[0]},
                                   {"AP75", aps[5]},
                                   {"mAP", s.class_map(label)}});
  report["overall"] = {{"AP50", s.ap50}, {"AP75", s.ap75}, {"mAP", s.map}};
  return report;
}

json quality_json(const Quality& q) {
  return {{"PQ", q.pq},
          {"SQ", q.sq},
          {"RQ", q.rq},
          {"tp", q.counts.tp},
          {"fp", q.counts.fp},
          {"fn", q.counts.fn}};
}

json eval_panoptic(const std::vector<Drawing>& gts, const std::vector<Drawing>& preds, StuffGrouping stuff,
                   int threads) {
  std::vector<PanopticAccumulator> parts(gts.size());
  parallel_for(gts.size(), threads, [&](std::size_t i) { parts[i] = evaluate_panoptic(preds[i], gts[i], stuff); });
  PanopticAccumulator total;
  for (const auto& p : parts) total.merge(p);
  PanopticScores s = total.scores();
  const LabelCatalog& catalog = gts.front().catalog;
  json report;
  report["per_class"] = json::array();
  for (const auto& [label, q] : s.per_class) {
    json entry = quality_json(q);
    entry["class"] = catalog.label_name(label);
    entry["kind"] = catalog.is_stuff(label) ? "stuff" : "thing";
    report["per_class"].push_back(entry);
  }
  report["overall"] = quality_json(s.macro);
  report["pooled"] = quality_json(s.pooled);
  return report;
}

int cmd_eval(const Common& c, const EvalArgs& a, std::ostream& out) {
  const auto gt_files = collect_drawings(a.gt);
  std::vector<fs::path> pred_files, box_files;
  for (const auto& g : gt_files) {
    if (!a.pred.empty()) pred_files.push_back(companion(g, a.pred, ".jsonl"));
    if (!a.boxes.empty()) box_files.push_back(companion(g, a.boxes, ".json"));
  }
  if (a.kind != "instance" && pred_files.empty()) throw Error("eval " + a.kind + " needs --pred");
  if (a.kind == "instance" && pred_files.empty() && box_files.empty()) throw Error("eval instance needs --boxes or --pred");

  const auto gts = load_all(gt_files, c.threads);
  const auto preds = load_all(pred_files, c.threads);
  for (const auto& p : preds)
    if (!(p.catalog == gts.front().catalog)) throw Error("prediction uses a different class catalog");

  json report;
  if (a.kind == "semantic") {
    report = eval_semantic(gts, preds, c.threads);
  } else if (a.kind == "instance") {
    std::vector<std::vector<InstanceBox>> boxes(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i)
      boxes[i] = box_files.empty() ? gt_instance_boxes(preds[i]) : load_boxes(box_files[i], gts[i].catalog);
    report = eval_instance(gts, boxes);
  } else {
    report = eval_panoptic(gts, preds, a.stuff_components ? StuffGrouping::kPerComponent : StuffGrouping::kPerClass,
                           c.threads);
  }
  json full;
  full["metric"] = a.kind;
  full["drawings"] = gts.size();
  full["units"] = {{"length", "mm"}, {"log", "natural"}};
  if (a.kind == "panoptic") full["stuff_grouping"] = a.stuff_components ? "component" : "class";
  full["per_class"] = report["per_class"];
  full["overall"] = report["overall"];
  if (report.contains("pooled")) full["pooled"] = report["pooled"];

  const std::string table = report_table(full);
  out << table;
  if (!a.out.empty()) {
    write_text_file(a.out, full.dump(2) + "\n");
    fs::path txt = fs::path(a.out).replace_extension(".txt");
    write_text_file(txt, table);
    Manifest m("eval " + a.kind, c);
    for (const auto& f : gt_files) m.input(f);
    for (const auto& f : pred_files) m.input(f);
    for (const auto& f : box_files) m.input(f);
    const fs::path base = manifest_base(a.out, false);
    m.output(a.out, base);
    m.output(txt, base);
    m.write(manifest_path_for(a.out, false));
  }
  return 0;
}

// stats -----------------------------------------------------------------------

int cmd_stats(const Common& c, const fs::path& in, const fs::path& out_path, std::ostream& out) {
  const auto files = collect_drawings(in);
  const auto drawings = load_all(files, c.threads);
  LengthHistogram h = length_histogram(drawings);

  std::map<std::string, std::size_t> class_entities, kinds;
  std::map<std::string, std::size_t> class_symbols;
  for (const auto& d : drawings) {
    for (const auto& r : d.records) {
      ++class_entities[d.catalog.label_name(r.label)];
      ++kinds[kind_name(r.entity)];
    }
    for (const auto& s : group_symbols(d)) ++class_symbols[d.catalog.label_name(s.label)];
  }
  json report;
  report["drawings"] = drawings.size();
  report["units"] = {{"length", "mm"}, {"log", "natural"}};
  report["histogram"] = {{"edges_mm", h.edges}, {"counts", h.counts}, {"mode_bin", h.mode_bin()}};
  report["entities_per_class"] = class_entities;
  report["symbols_per_class"] = class_symbols;
  report["entities_per_kind"] = kinds;
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return 0;
  }
  write_text_file(out_path, text);
  Manifest m("stats", c);
  for (const auto& f : files) m.input(f);
  m.output(out_path, manifest_base(out_path, false));
  m.write(manifest_path_for(out_path, false));
  out << "entities: " << h.total() << " in " << drawings.size() << " drawing(s)\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  init_logging();
  CLI::App app{"Panoptic symbol spotting on vector floor plans", "pancad"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "key = value file; command-line flags win");

  Common c;
  c.app = &app;
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--threads", c.threads, "Worker threads (results do not depend on it)")->check(CLI::Range(1, 256));
  app.add_option("--epsilon", c.epsilon, "Graph distance threshold in mm");
  app.add_option("--eta", c.eta, "Parallel-distance scale");
  app.add_option("--kmax", c.kmax, "Maximum node degree");
  app.add_option("--scale-ppm", c.scale_ppm, "Pixels per mm (rasterize: mask, train: feature pyramid)");
  app.add_option("--iters", c.iters, "Training iterations");
  app.add_option("--lr", c.lr, "Peak learning rate");
  app.add_option("--margin", c.margin, "AM-softmax margin");
  app.add_option("--loss-scale", c.loss_scale, "AM-softmax scale");
  app.add_option("--lambda", c.lambda, "Weight of the GCN loss in the total loss");
  app.add_option("--classes", c.classes, "synthetic, full, or a comma-separated class list");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic labeled drawings");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--count", gen.count, "Number of drawings");
  gen_cmd->add_option("--rooms-x", gen.rooms_x, "Rooms along x");
  gen_cmd->add_option("--rooms-y", gen.rooms_y, "Rooms along y");
  gen_cmd->add_flag("--dxf", gen.dxf, "Also export each drawing as DXF");
  gen_cmd->add_flag("--allow-overlap", gen.allow_overlap, "Skip furniture and door overlap checks");
  gen_cmd->add_flag("--no-rotate", gen.no_rotate, "Keep the building axis-aligned to the block");

  fs::path dxf_in, dxf_out;
  auto* dxf_cmd = app.add_subcommand("parse-dxf", "Convert a DXF file to a drawing");
  dxf_cmd->add_option("--in", dxf_in, "DXF file")->required();
  dxf_cmd->add_option("--out", dxf_out, "Drawing file (.jsonl)")->required();

  fs::path graph_in, graph_out;
  auto* graph_cmd = app.add_subcommand("graph", "Build entity graphs");
  graph_cmd->add_option("--in", graph_in, "Drawing file or directory")->required();
  graph_cmd->add_option("--out", graph_out, "Graph file or directory")->required();

  fs::path raster_in, raster_out;
  double line_width = 5.0;
  auto* raster_cmd = app.add_subcommand("rasterize", "Render label masks as PGM");
  raster_cmd->add_option("--in", raster_in, "Drawing file or directory")->required();
  raster_cmd->add_option("--out", raster_out, "PGM file or directory")->required();
  raster_cmd->add_option("--line-width", line_width, "Stroke width in pixels");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the entity classifier");
  train_cmd->add_option("--data", train.data, "Drawing file or directory")->required();
  train_cmd->add_option("--out", train.out, "Model checkpoint (.json)")->required();
  train_cmd->add_option("--trace", train.trace, "Loss trace CSV (default beside the model)");
  train_cmd->add_option("--weights", train.weights, "Class weights: frequency, inverse or uniform")
      ->check(CLI::IsMember({"frequency", "inverse", "uniform"}));

  fs::path model_path, infer_in, infer_out;
  auto* infer_cmd = app.add_subcommand("infer", "Predict entity labels");
  infer_cmd->add_option("--model", model_path, "Model checkpoint")->required();
  infer_cmd->add_option("--in", infer_in, "Drawing file or directory")->required();
  infer_cmd->add_option("--out", infer_out, "Output file or directory")->required();

  AssembleArgs assemble;
  auto* assemble_cmd = app.add_subcommand("assemble", "Combine entity labels and instance boxes");
  assemble_cmd->add_option("--in", assemble.in, "Labeled drawing file or directory")->required();
  assemble_cmd->add_option("--out", assemble.out, "Output file or directory")->required();
  assemble_cmd->add_option("--boxes", assemble.boxes, "Box file or directory of <name>.json");
  assemble_cmd->add_option("--gt-boxes", assemble.gt_boxes, "Take boxes from these ground-truth drawings");
  assemble_cmd->add_flag("--demote", assemble.demote, "Unboxed thing entities become background");
  assemble_cmd->add_option("--min-inside", assemble.min_inside, "Fraction of samples inside a box to claim");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions");
  eval_cmd->add_option("kind", eval.kind, "semantic, instance or panoptic")
      ->required()
      ->check(CLI::IsMember({"semantic", "instance", "panoptic"}));
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth drawing file or directory")->required();
  eval_cmd->add_option("--pred", eval.pred, "Predicted drawing file or directory");
  eval_cmd->add_option("--boxes", eval.boxes, "Predicted boxes (instance)");
  eval_cmd->add_option("--out", eval.out, "Report JSON; a .txt table is written beside it");
  eval_cmd->add_flag("--stuff-components", eval.stuff_components, "One stuff symbol per connected component");

  fs::path stats_in, stats_out;
  auto* stats_cmd = app.add_subcommand("stats", "Length histogram and class counts");
  stats_cmd->add_option("--in", stats_in, "Drawing file or directory")->required();
  stats_cmd->add_option("--out", stats_out, "Report JSON (stdout when absent)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(c, gen, out);
    if (dxf_cmd->parsed()) return cmd_parse_dxf(c, dxf_in, dxf_out, out);
    if (graph_cmd->parsed()) return cmd_graph(c, graph_in, graph_out, out);
    if (raster_cmd->parsed()) return cmd_rasterize(c, raster_in, raster_out, line_width, out);
    if (train_cmd->parsed()) return cmd_train(c, train, out);
    if (infer_cmd->parsed()) return cmd_infer(c, model_path, infer_in, infer_out, out);
    if (assemble_cmd->parsed()) return cmd_assemble(c, assemble, out);
    if (eval_cmd->parsed()) return cmd_eval(c, eval, out);
    if (stats_cmd->parsed()) return cmd_stats(c, stats_in, stats_out, out);
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace pancad
