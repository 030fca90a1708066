// Python bindings. Drawings cross the boundary as JSON-lines text, the same
// format the CLI reads and writes.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "pancad/cli.hpp"
#include "pancad/drawing.hpp"
#include "pancad/dxf.hpp"
#include "pancad/errors.hpp"
#include "pancad/gcn.hpp"
#include "pancad/graph.hpp"
#include "pancad/metrics.hpp"
#include "pancad/panoptic.hpp"
#include "pancad/raster.hpp"
#include "pancad/synth.hpp"

namespace py = pybind11;
using namespace pancad;

namespace {

LabelCatalog catalog_from(const std::optional<std::vector<std::string>>& classes) {
  if (!classes) return LabelCatalog::synthetic();
  if (classes->size() == 1 && (*classes)[0] == "full") return LabelCatalog::full();
  return LabelCatalog::from_names(*classes);
}

std::string generate(std::uint64_t seed, int rooms_x, int rooms_y, std::optional<std::vector<std::string>> classes,
                     bool rotate) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.rooms_x = rooms_x;
  cfg.rooms_y = rooms_y;
  cfg.classes = catalog_from(classes);
  cfg.rotate = rotate;
  return drawing_to_jsonl(generate_floorplan(cfg));
}

py::tuple parse_dxf(const std::string& text, const std::string& id,
                    std::optional<std::vector<std::string>> classes) {
  auto r = parse_dxf_subset(text, id, classes ? catalog_from(classes) : LabelCatalog::full());
  return py::make_tuple(drawing_to_jsonl(r.drawing), r.skipped);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> graph_edges(const std::string& drawing, double epsilon,
                                                                 double eta, int k_max, std::uint64_t seed) {
  GraphConfig cfg;
  cfg.epsilon = epsilon;
  cfg.eta = eta;
  cfg.k_max = k_max;
  cfg.seed = seed;
  return build_graph(drawing_from_jsonl(drawing), cfg).edges();
}

std::vector<int> labels_of(const Drawing& d) {
  std::vector<int> out;
  for (const auto& r : d.records) out.push_back(r.label);
  return out;
}

WeightMode weight_mode(const std::string& name) {
  if (name == "frequency") return WeightMode::kFrequency;
  if (name == "inverse") return WeightMode::kInverseFrequency;
  if (name == "uniform") return WeightMode::kUniform;
  throw Error("unknown weight mode '" + name + "'");
}

py::tuple train(const std::vector<std::string>& drawings, int iterations, double lr, const std::string& weights,
                std::uint64_t seed) {
  if (drawings.empty()) throw EmptyDataset();
  GcnModel model;
  model.train.iterations = iterations;
  model.train.lr_max = lr;
  model.train.weights = weight_mode(weights);
  model.train.seed = seed;
  model.graph.seed = seed;
  model.train.validate();
  std::vector<GraphSample> samples;
  for (const auto& text : drawings) {
    Drawing d = drawing_from_jsonl(text);
    if (samples.empty()) model.catalog = d.catalog;
    if (!(d.catalog == model.catalog)) throw Error("training drawings use different class catalogs");
    samples.push_back(prepare_sample(d, model.graph, model.features));
  }
  TrainResult result;
  {
    py::gil_scoped_release release;
    result = train_gcn(samples, model.catalog.size(), model.train);
  }
  model.params = std::move(result.params);
  std::vector<double> losses;
  for (const auto& row : result.trace) losses.push_back(row.loss);
  return py::make_tuple(model_to_json(model), losses);
}

std::string assemble(const std::string& drawing, const std::vector<int>& labels, const std::string& boxes,
                     bool demote, double min_inside) {
  Drawing d = drawing_from_jsonl(drawing);
  AssembleConfig cfg;
  cfg.unboxed = demote ? UnboxedThings::kDemote : UnboxedThings::kKeepLabel;
  cfg.min_inside_fraction = min_inside;
  auto p = assemble_panoptic(d, labels, boxes_from_json(boxes, d.catalog), cfg);
  return drawing_to_jsonl(apply_prediction(d, p));
}

py::dict quality_dict(const Quality& q) {
  py::dict out;
  out["PQ"] = q.pq;
  out["SQ"] = q.sq;
  out["RQ"] = q.rq;
  out["tp"] = q.counts.tp;
  out["fp"] = q.counts.fp;
  out["fn"] = q.counts.fn;
  return out;
}

py::dict evaluate_panoptic_py(const std::vector<std::string>& preds, const std::vector<std::string>& gts,
                              bool stuff_components) {
  if (preds.size() != gts.size()) throw LengthMismatch("prediction and ground-truth counts differ");
  PanopticAccumulator acc;
  LabelCatalog catalog;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    Drawing gt = drawing_from_jsonl(gts[i]);
    catalog = gt.catalog;
    acc.merge(evaluate_panoptic(drawing_from_jsonl(preds[i]), gt,
                                stuff_components ? StuffGrouping::kPerComponent : StuffGrouping::kPerClass));
  }
  auto s = acc.scores();
  py::dict per_class;
  for (const auto& [label, q] : s.per_class) per_class[py::str(catalog.label_name(label))] = quality_dict(q);
  py::dict out;
  out["overall"] = quality_dict(s.macro);
  out["pooled"] = quality_dict(s.pooled);
  out["per_class"] = per_class;
  return out;
}

py::dict evaluate_semantic_py(const std::vector<std::string>& preds, const std::vector<std::string>& gts) {
  if (preds.size() != gts.size()) throw LengthMismatch("prediction and ground-truth counts differ");
  SemanticCounts counts;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    Drawing gt = drawing_from_jsonl(gts[i]);
    counts.merge(semantic_counts(labels_of(drawing_from_jsonl(preds[i])), labels_of(gt), entity_log_lengths(gt)));
  }
  auto s = semantic_scores(counts);
  py::dict out;
  out["F1"] = s.total.f1;
  out["wF1"] = s.total_weighted.f1;
  out["precision"] = s.total.precision;
  out["recall"] = s.total.recall;
  return out;
}

py::dict evaluate_instance_py(const std::vector<std::string>& pred_boxes, const std::vector<std::string>& gts) {
  if (pred_boxes.size() != gts.size()) throw LengthMismatch("box file and ground-truth counts differ");
  std::vector<DetectionImage> images;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    Drawing gt = drawing_from_jsonl(gts[i]);
    images.push_back({boxes_from_json(pred_boxes[i], gt.catalog), gt_instance_boxes(gt)});
  }
  auto s = detection_ap(images);
  py::dict out;
  out["AP50"] = s.ap50;
  out["AP75"] = s.ap75;
  out["mAP"] = s.map;
  return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_pancad, m) {
  m.doc() = "Panoptic symbol spotting on vector floor plans";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "PancadError", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  m.def("generate", &generate, py::arg("seed") = 0, py::arg("rooms_x") = 3, py::arg("rooms_y") = 3,
        py::arg("classes") = py::none(), py::arg("rotate") = true,
        "Synthetic labeled floor plan as JSON-lines text");
  m.def("parse_dxf", &parse_dxf, py::arg("text"), py::arg("id") = "dxf", py::arg("classes") = py::none(),
        "Parse an ASCII DXF; returns (drawing, skipped)");
  m.def(
      "to_dxf", [](const std::string& drawing) { return write_dxf(drawing_from_jsonl(drawing)); },
      py::arg("drawing"));
  m.def("graph_edges", &graph_edges, py::arg("drawing"), py::arg("epsilon") = 100.0, py::arg("eta") = 0.2,
        py::arg("k_max") = 3, py::arg("seed") = 0, "Edges of the entity graph as (i, j) pairs");
  m.def(
      "gt_boxes",
      [](const std::string& drawing) {
        Drawing d = drawing_from_jsonl(drawing);
        return boxes_to_json(gt_instance_boxes(d), d.catalog);
      },
      py::arg("drawing"), "Ground-truth instance boxes as a JSON array");
  m.def(
      "render_mask_pgm",
      [](const std::string& drawing, double scale, double line_width) {
        return py::bytes(render_label_mask(drawing_from_jsonl(drawing), scale, line_width).to_pgm());
      },
      py::arg("drawing"), py::arg("scale") = 0.05, py::arg("line_width") = 5.0);
  m.def("train", &train, py::arg("drawings"), py::arg("iterations") = 2000, py::arg("lr") = 1e-4,
        py::arg("weights") = "frequency", py::arg("seed") = 0, "Returns (model JSON, per-iteration losses)");
  m.def(
      "infer", [](const std::string& model, const std::string& drawing) {
        return infer_entity_labels(drawing_from_jsonl(drawing), model_from_json(model));
      },
      py::arg("model"), py::arg("drawing"), "Predicted label per entity (-1 for background)");
  m.def("assemble", &assemble, py::arg("drawing"), py::arg("labels"), py::arg("boxes"), py::arg("demote") = false,
        py::arg("min_inside") = 0.5, "Drawing with predicted labels and instances");
  m.def("evaluate_panoptic", &evaluate_panoptic_py, py::arg("preds"), py::arg("gts"),
        py::arg("stuff_components") = false);
  m.def("evaluate_semantic", &evaluate_semantic_py, py::arg("preds"), py::arg("gts"));
  m.def("evaluate_instance", &evaluate_instance_py, py::arg("boxes"), py::arg("gts"));
  m.def("run_cli", &run_cli, py::arg("args"), "Run a CLI command in process; returns (code, stdout, stderr)");
}
