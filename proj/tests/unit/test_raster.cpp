#include <cmath>
#include <map>

#include "doctest.h"
#include "pancad/errors.hpp"
#include "pancad/raster.hpp"
#include "pancad/random.hpp"
#include "pancad/synth.hpp"

using namespace pancad;

namespace {

Drawing labeled(std::vector<EntityRecord> records, Box extent) {
  Drawing d;
  d.id = "r";
  d.catalog = LabelCatalog::synthetic();
  d.records = std::move(records);
  d.extent = extent;
  return d;
}

FeaturePyramid single_level(int w, int h, std::vector<float> values, int channels = 1) {
  FeatureLevel l;
  l.width = w;
  l.height = h;
  l.channels = channels;
  l.scale = 1.0;
  l.data = std::move(values);
  return FeaturePyramid({l});
}

}  // namespace

TEST_CASE("canvas size") {
  CHECK(canvas_size({0, 0, 100, 50}, 1.0) == std::pair<int, int>{101, 51});
  CHECK(canvas_size({0, 0, 20000, 20000}, 0.05) == std::pair<int, int>{1001, 1001});
}

TEST_CASE("empty drawing renders background") {
  auto m = render_label_mask(labeled({}, {0, 0, 50, 50}), 1.0);
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) REQUIRE(m.at(c, r) == kBackground);
  CHECK(m.materialized_pixels() == 0);
}

TEST_CASE("horizontal segment becomes a 5-pixel band") {
  auto m = render_label_mask(labeled({{make_segment({10, 20.5}, {40, 20.5}), 3, 0}}, {0, 0, 60, 40}), 1.0);
  // Pixel centers sit at half-integers; rows 18..22 lie within 2.5 of y=20.5.
  for (int r = 0; r < m.height(); ++r) {
    int expected = (r >= 18 && r <= 22) ? 3 : kBackground;
    CHECK(m.at(25, r) == expected);
  }
}

TEST_CASE("later records overwrite earlier ones") {
  Drawing d = labeled({{make_segment({0, 20}, {40, 20}), 0, 0}, {make_segment({20, 0}, {20, 40}), 1, 1}},
                      {0, 0, 40, 40});
  const double scale = 1.0, half = 2.5;
  auto m = render_label_mask(d, scale);
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) {
      Point2 p = m.pixel_center(c, r);
      int expected = kBackground;
      for (const auto& rec : d.records)
        if (point_entity_distance(p, rec.entity) <= half / scale) expected = rec.label;
      REQUIRE(m.at(c, r) == expected);
    }
  CHECK(m.at_point({20, 20}) == 1);
}

TEST_CASE("pixel cap") {
  Drawing d = labeled({{make_segment({0, 0}, {20000, 20000}), 0, 0}}, {0, 0, 20000, 20000});
  CHECK_THROWS_AS(render_label_mask(d, 1.0, 5.0, 1000), CanvasTooLarge);
  // A sparse 4e8-pixel canvas stays well below the default cap.
  auto m = render_label_mask(d, 1.0);
  CHECK(m.materialized_pixels() < 10'000'000);
  CHECK_THROWS_AS(build_feature_pyramid(d, 1.0), CanvasTooLarge);
}

TEST_CASE("PGM export") {
  auto m = render_label_mask(labeled({{make_segment({0, 0.5}, {3, 0.5}), 2, 0}}, {0, 0, 3, 2}), 1.0, 1.0);
  std::string pgm = m.to_pgm();
  const std::string header = "P5\n4 3\n255\n";
  REQUIRE(pgm.size() == header.size() + 12);
  CHECK(pgm.substr(0, header.size()) == header);
  // Bottom row (y in [0,1)) is written last and carries class 2 -> gray 3.
  CHECK(static_cast<unsigned char>(pgm[header.size() + 8]) == 3);
  CHECK(static_cast<unsigned char>(pgm[header.size()]) == 0);
}

TEST_CASE("voting") {
  LabelMask uniform(20, 20, 1.0, {0, 0});
  for (int r = 0; r < 20; ++r)
    for (int c = 0; c < 20; ++c) uniform.set(c, r, 3);
  Drawing d = labeled({{make_segment({2, 2}, {15, 9}), kBackground, 0}, {make_segment({100, 100}, {110, 100}), 0, 0}},
                      {0, 0, 20, 20});
  auto v = vote_entity_labels(uniform, d);
  CHECK(v[0] == 3);
  CHECK(v[1] == kBackground);

  // 10 samples along x = 0.5..9.5: six read class 2, four class 5.
  LabelMask split(10, 1, 1.0, {0, 0});
  for (int c = 0; c < 10; ++c) split.set(c, 0, c < 6 ? 2 : 5);
  Drawing line = labeled({{make_segment({0.5, 0.5}, {9.5, 0.5}), kBackground, 0}}, {0, 0, 10, 1});
  CHECK(vote_entity_labels(split, line, 10)[0] == 2);
  // A tie goes to the smaller class index.
  for (int c = 0; c < 10; ++c) split.set(c, 0, c < 5 ? 4 : 1);
  CHECK(vote_entity_labels(split, line, 10)[0] == 1);
}

TEST_CASE("voting matches a direct count on random masks") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    LabelMask m(30, 30, 0.5, {0, 0});
    for (int r = 0; r < 30; ++r)
      for (int c = 0; c < 30; ++c) m.set(c, r, static_cast<int>(uniform_index(rng, 4)) - 1);
    Point2 a{uniform_real(rng, 0, 60), uniform_real(rng, 0, 60)};
    Drawing d = labeled({{make_segment(a, {uniform_real(rng, 0, 60), uniform_real(rng, 0, 60) + 0.1}), 0, 0}},
                        {0, 0, 60, 60});
    std::map<int, int> counts;
    for (const auto& p : sample_points(d.records[0].entity, 32)) {
      int l = m.at_point(p);
      if (l != kBackground) ++counts[l];
    }
    int expected = kBackground, best = 0;
    for (auto [l, n] : counts)
      if (n > best) best = n, expected = l;
    CHECK(vote_entity_labels(m, d)[0] == expected);
  }
}

TEST_CASE("render and vote round trip on generated drawings") {
  std::size_t total = 0, correct = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    SynthConfig cfg;
    cfg.seed = seed;
    Drawing d = generate_floorplan(cfg);
    auto votes = vote_entity_labels(render_label_mask(d, 1.0), d);
    for (std::size_t i = 0; i < d.size(); ++i) {
      ++total;
      if (votes[i] == d.records[i].label) ++correct;
    }
  }
  CHECK(static_cast<double>(correct) >= 0.99 * static_cast<double>(total));
}

TEST_CASE("bilinear fetch") {
  auto p = single_level(2, 2, {0, 1, 2, 3});
  CHECK(fetch_aligned_feature(p, {1.0, 1.0})[0] == doctest::Approx(1.5));
  // Grid nodes return their stored value.
  CHECK(fetch_aligned_feature(p, {0.5, 0.5})[0] == doctest::Approx(0.0));
  CHECK(fetch_aligned_feature(p, {1.5, 1.5})[0] == doctest::Approx(3.0));
  CHECK(fetch_aligned_feature(p, {1.5, 0.5})[0] == doctest::Approx(1.0));
  // Clamped outside the grid.
  CHECK(fetch_aligned_feature(p, {-10, -10})[0] == doctest::Approx(0.0));

  auto constant = single_level(3, 2, std::vector<float>(6, 0.25f));
  Rng rng(1);
  for (int k = 0; k < 20; ++k)
    CHECK(fetch_aligned_feature(constant, {uniform_real(rng, -1, 4), uniform_real(rng, -1, 3)})[0] ==
          doctest::Approx(0.25));
}

TEST_CASE("bilinear fetch is Lipschitz") {
  Rng rng(9);
  std::vector<float> values(25);
  for (auto& v : values) v = static_cast<float>(uniform_real(rng, -1, 1));
  auto p = single_level(5, 5, values);
  double max_step = 0;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      if (c + 1 < 5) max_step = std::max(max_step, double(std::abs(values[r * 5 + c + 1] - values[r * 5 + c])));
      if (r + 1 < 5) max_step = std::max(max_step, double(std::abs(values[(r + 1) * 5 + c] - values[r * 5 + c])));
    }
  for (int k = 0; k < 200; ++k) {
    Point2 a{uniform_real(rng, 0, 5), uniform_real(rng, 0, 5)};
    Point2 b{a.x + uniform_real(rng, -0.1, 0.1), a.y + uniform_real(rng, -0.1, 0.1)};
    double diff = std::abs(fetch_aligned_feature(p, a)[0] - fetch_aligned_feature(p, b)[0]);
    CHECK(diff <= 2 * max_step * distance(a, b) + 1e-9);
  }
}

TEST_CASE("feature pyramid shapes and occupancy") {
  CHECK(build_feature_pyramid(labeled({}, {0, 0, 99, 49}), 1.0).level(0).data.size() == 100u * 50u * 8u);
  auto empty = build_feature_pyramid(labeled({}, {0, 0, 99, 49}), 1.0);
  for (std::size_t i = 0; i < empty.level(0).data.size(); i += 8) REQUIRE(empty.level(0).data[i] == 0.0f);

  Drawing d = labeled({{make_segment({10, 10}, {80, 35}), 0, 0}, {make_circle({50, 20}, 12), kBackground, 0}},
                      {0, 0, 99, 49});
  auto p = build_feature_pyramid(d, 1.0, 4, 5.0);
  REQUIRE(p.level_count() == 4);
  int w = 100, h = 50;
  for (std::size_t l = 0; l < 4; ++l) {
    CHECK(p.level(l).width == w);
    CHECK(p.level(l).height == h);
    CHECK(p.level(l).channels == kPyramidChannels);
    w = (w + 1) / 2;
    h = (h + 1) / 2;
  }
  CHECK(p.feature_size() == 32);
  // Occupancy equals "any entity drawn here", background entities included.
  Drawing all = d;
  for (auto& r : all.records) r.label = 0;
  auto mask = render_label_mask(all, 1.0, 5.0);
  for (int r = 0; r < 50; ++r)
    for (int c = 0; c < 100; ++c) REQUIRE(p.level(0).at(c, r, 0) == (mask.at(c, r) != kBackground ? 1.0f : 0.0f));
  // Rebuilding gives identical bytes.
  CHECK(build_feature_pyramid(d, 1.0, 4, 5.0).level(2).data == p.level(2).data);
}

TEST_CASE("mask rendering is deterministic") {
  SynthConfig cfg;
  cfg.seed = 12;
  Drawing d = generate_floorplan(cfg);
  CHECK(render_label_mask(d, 0.5).to_pgm() == render_label_mask(d, 0.5).to_pgm());
}
