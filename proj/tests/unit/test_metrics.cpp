#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pancad/errors.hpp"
#include "pancad/metrics.hpp"
#include "pancad/synth.hpp"

using namespace pancad;

namespace {

Symbol sym(int label, std::vector<std::size_t> e) { return {label, 0, std::move(e)}; }

const double kE = std::exp(1.0);

// Four entities whose log weights are exactly 1.
Drawing unit_weight_drawing() {
  Drawing d;
  d.id = "m";
  d.catalog = LabelCatalog::synthetic();
  for (int i = 0; i < 4; ++i) d.records.push_back({make_segment({0, 10.0 * i}, {kE - 1, 10.0 * i}), 1, i + 1});
  d.extent = compute_extent(d.records);
  return d;
}

}  // namespace

TEST_CASE("symbol IoU hand cases") {
  Drawing d = unit_weight_drawing();
  auto w = entity_log_lengths(d);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(symbol_iou(sym(1, {0, 1}), sym(1, {0, 1}), d) == 1.0);
  CHECK(symbol_iou(sym(1, {0}), sym(1, {1}), d) == 0.0);
  CHECK(symbol_iou(sym(1, {0}), sym(1, {0, 1}), {1.0, 1.0}) == 0.5);
  CHECK(symbol_iou(sym(1, {0}), sym(1, {0, 1}), d) == doctest::Approx(0.5));
}

TEST_CASE("matching rules") {
  std::vector<double> w = {1, 1, 1, 1};
  auto same = match_symbols({sym(1, {0, 1}), sym(2, {2})}, {sym(1, {0, 1}), sym(2, {2})}, w);
  CHECK(same.tp.size() == 2);
  CHECK(same.tp[0].iou == 1.0);
  CHECK(same.fp.empty());
  CHECK(same.fn.empty());

  auto boundary = match_symbols({sym(1, {0})}, {sym(1, {0, 1})}, w);
  CHECK(boundary.tp.empty());
  CHECK(boundary.fp.size() == 1);
  CHECK(boundary.fn.size() == 1);

  auto label = match_symbols({sym(1, {0, 1})}, {sym(2, {0, 1})}, w);
  CHECK(label.tp.empty());
  CHECK(label.fp == std::vector<std::size_t>{0});
  CHECK(label.fn == std::vector<std::size_t>{0});
}

TEST_CASE("matching agrees with exhaustive search") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 6 + uniform_index(rng, 10);
    std::vector<double> w(n);
    for (auto& v : w) v = uniform_real(rng, 0.1, 3.0);
    // Each side partitions a random subset of the entities, as a labeling does.
    auto random_symbols = [&] {
      std::size_t count = 1 + uniform_index(rng, 8);
      std::vector<Symbol> s(count);
      for (auto& x : s) x.label = static_cast<int>(uniform_index(rng, 2));
      for (std::size_t e = 0; e < n; ++e) {
        std::size_t k = uniform_index(rng, count + 1);
        if (k < count) s[k].entities.push_back(e);
      }
      std::erase_if(s, [](const Symbol& x) { return x.entities.empty(); });
      return s;
    };
    auto preds = random_symbols(), gts = random_symbols();
    auto m = match_symbols(preds, gts, w);
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& p : m.tp) got.insert({p.pred, p.gt});
    CHECK(got == oracle::brute_force_matching(preds, gts, w));
    CHECK(m.tp.size() + m.fp.size() == preds.size());
    CHECK(m.tp.size() + m.fn.size() == gts.size());
  }
}

TEST_CASE("panoptic quality formulas") {
  QualityCounts c;
  c.tp = 1;
  c.fp = 1;
  c.fn = 1;
  c.iou_sum = 0.8;
  auto q = quality_from_counts(c);
  CHECK(q.rq == doctest::Approx(0.5));
  CHECK(q.sq == doctest::Approx(0.8));
  CHECK(q.pq == doctest::Approx(0.4));

  QualityCounts empty;
  empty.fn = 3;
  auto e = quality_from_counts(empty);
  CHECK(e.rq == 0.0);
  CHECK(e.sq == 0.0);
  CHECK(e.pq == 0.0);
}

TEST_CASE("perfect and empty predictions on a generated drawing") {
  SynthConfig cfg;
  cfg.seed = 21;
  Drawing d = generate_floorplan(cfg);
  auto perfect = evaluate_panoptic(d, d).scores();
  CHECK(perfect.macro.pq == 1.0);
  CHECK(perfect.macro.sq == 1.0);
  CHECK(perfect.macro.rq == 1.0);
  CHECK(perfect.pooled.pq == 1.0);
  for (const auto& [label, q] : perfect.per_class) CHECK(q.pq == 1.0);

  Drawing none = d;
  for (auto& r : none.records) r = {r.entity, kBackground, 0};
  auto empty = evaluate_panoptic(none, d).scores();
  CHECK(empty.macro.pq == 0.0);
  CHECK(empty.macro.rq == 0.0);
  CHECK(empty.pooled.counts.tp == 0);
}

TEST_CASE("accumulator merge is order independent for counts") {
  SynthConfig a, b;
  a.seed = 1;
  b.seed = 2;
  Drawing da = generate_floorplan(a), db = generate_floorplan(b);
  auto pa = corrupt_prediction(da, {0.2, 0, 0}, 1), pb = corrupt_prediction(db, {0.2, 0, 0}, 2);
  Drawing qa = da, qb = db;
  for (std::size_t i = 0; i < da.size(); ++i) qa.records[i].label = pa.labels[i];
  for (std::size_t i = 0; i < db.size(); ++i) qb.records[i].label = pb.labels[i];
  auto ea = evaluate_panoptic(qa, da), eb = evaluate_panoptic(qb, db);
  PanopticAccumulator ab = ea, ba = eb;
  ab.merge(eb);
  ba.merge(ea);
  for (const auto& [label, c] : ab.counts()) {
    CHECK(c.tp == ba.counts().at(label).tp);
    CHECK(c.fp == ba.counts().at(label).fp);
    CHECK(c.fn == ba.counts().at(label).fn);
    CHECK(c.iou_sum == doctest::Approx(ba.counts().at(label).iou_sum));
  }
}

TEST_CASE("semantic F1") {
  Drawing d;
  d.id = "s";
  d.catalog = LabelCatalog::synthetic();
  // Log weights 1 and 2.
  d.records = {{make_segment({0, 0}, {kE - 1, 0}), 0, 0}, {make_segment({0, 5}, {kE * kE - 1, 5}), 1, 0}};
  d.extent = compute_extent(d.records);

  auto all = semantic_scores({0, 1}, {0, 1}, d);
  CHECK(all.total.f1 == 1.0);
  CHECK(all.total_weighted.f1 == 1.0);

  auto half = semantic_scores({2, 1}, {0, 1}, d);
  CHECK(half.total_weighted.f1 == doctest::Approx(2.0 / 3.0));

  auto wrong = semantic_scores({1, 0}, {0, 1}, d);
  CHECK(wrong.total.f1 == 0.0);
  CHECK(wrong.total_weighted.f1 == 0.0);

  CHECK_THROWS_AS(semantic_scores({0}, {0, 1}, d), LengthMismatch);
}

TEST_CASE("detection AP examples") {
  const int door = 1;
  std::vector<InstanceBox> gt = {{door, {0, 0, 10, 10}, 1}};
  auto exact = detection_ap({{door, {0, 0, 10, 10}, 1.0}}, gt);
  for (const auto& [label, aps] : exact.per_class)
    for (double ap : aps) CHECK(ap == 1.0);
  CHECK(exact.map == 1.0);

  // IoU 0.6: box shifted by 2.5 along x -> 7.5*10 / (100+100-75) = 0.6.
  auto shifted = detection_ap({{door, {2.5, 0, 12.5, 10}, 1.0}}, gt);
  CHECK(box_iou({2.5, 0, 12.5, 10}, {0, 0, 10, 10}) == doctest::Approx(0.6));
  CHECK(shifted.ap50 == 1.0);
  CHECK(shifted.ap75 == 0.0);

  auto spurious = detection_ap({{door, {0, 0, 10, 10}, 0.9}, {door, {50, 50, 60, 60}, 0.8}}, gt);
  CHECK(spurious.ap50 == doctest::Approx(1.0));
}

TEST_CASE("detection AP matches a hand PR curve") {
  const int c = 2;
  std::vector<InstanceBox> gt = {{c, {0, 0, 10, 10}, 1}, {c, {20, 0, 30, 10}, 1}, {c, {40, 0, 50, 10}, 1},
                                 {c, {60, 0, 70, 10}, 1}};
  // Outcomes by score: TP, FP, TP, TP, FP.
  std::vector<InstanceBox> pred = {{c, {0, 0, 10, 10}, 0.9},
                                   {c, {100, 100, 110, 110}, 0.8},
                                   {c, {20, 0, 30, 10}, 0.7},
                                   {c, {40, 0, 50, 10}, 0.6},
                                   {c, {200, 0, 210, 10}, 0.5}};
  double expected = oracle::ap_from_outcomes({true, false, true, true, false}, 4);
  CHECK(expected == doctest::Approx(63.5 / 101.0));
  auto s = detection_ap(pred, gt);
  CHECK(s.ap50 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(s.map == doctest::Approx(expected).epsilon(1e-12));
  CHECK(interpolated_ap({1.0, 0.5, 2.0 / 3, 0.75, 0.6}, {0.25, 0.25, 0.5, 0.75, 0.75}) ==
        doctest::Approx(expected));
}

TEST_CASE("length histogram") {
  Drawing d;
  d.id = "h";
  d.catalog = LabelCatalog::synthetic();
  d.records = {{make_segment({0, 0}, {50, 0}), 0, 0}};
  d.extent = compute_extent(d.records);
  auto h = length_histogram({d});
  std::size_t nonzero = 0;
  for (auto c : h.counts)
    if (c) ++nonzero;
  CHECK(nonzero == 1);
  CHECK(h.total() == 1);
  CHECK(h.edges.front() == doctest::Approx(1.0));
  CHECK(h.edges.back() == doctest::Approx(1e5));
  CHECK(h.counts.size() == h.edges.size() + 1);

  std::vector<Drawing> set;
  std::size_t entities = 0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    SynthConfig cfg;
    cfg.seed = s;
    set.push_back(generate_floorplan(cfg));
    entities += set.back().size();
  }
  CHECK(length_histogram(set).total() == entities);
  CHECK_THROWS_AS(length_histogram({}), EmptyDataset);
}
