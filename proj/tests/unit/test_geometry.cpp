#include <cmath>
#include <limits>

#include "doctest.h"
#include "pancad/errors.hpp"
#include "pancad/geometry.hpp"
#include "pancad/random.hpp"

using namespace pancad;

namespace {

void check_point(Point2 p, double x, double y, double tol = 1e-12) {
  CHECK(std::abs(p.x - x) <= tol);
  CHECK(std::abs(p.y - y) <= tol);
}

// Dense sampling of both segments; an upper bound that converges to the
// continuous distance.
double dense_distance(Point2 a0, Point2 a1, Point2 b0, Point2 b1, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    Point2 p = a0 + (double(i) / n) * (a1 - a0);
    for (int j = 0; j <= n; ++j) best = std::min(best, distance(p, b0 + (double(j) / n) * (b1 - b0)));
  }
  return best;
}

}  // namespace

TEST_CASE("arc length of each entity kind") {
  CHECK(arc_length(make_segment({0, 0}, {3, 4})) == doctest::Approx(5.0));
  CHECK(arc_length(make_circle({0, 0}, 10)) == doctest::Approx(62.83185307179586));
  CHECK(arc_length(make_arc({0, 0}, 2, 0, kPi / 2)) == doctest::Approx(kPi));
  CHECK(arc_length(make_polyline({{0, 0}, {1, 0}, {1, 1}})) == doctest::Approx(2.0));
}

TEST_CASE("arc sweep is counterclockwise and full when angles coincide") {
  auto a = std::get<Arc>(make_arc({0, 0}, 1, 3 * kPi / 2, kPi / 2));
  CHECK(a.sweep() == doctest::Approx(kPi));
  auto full = std::get<Arc>(make_arc({0, 0}, 1, 1.0, 1.0));
  CHECK(full.sweep() == doctest::Approx(kTwoPi));
  auto wrapped = std::get<Arc>(make_arc({0, 0}, 1, -kPi / 2, 5 * kPi / 2));
  CHECK(wrapped.start_angle == doctest::Approx(3 * kPi / 2));
  CHECK(wrapped.end_angle == doctest::Approx(kPi / 2));
}

TEST_CASE("degenerate entities are rejected") {
  CHECK_THROWS_AS(make_segment({1, 1}, {1, 1}), InvalidEntity);
  CHECK_THROWS_AS(make_circle({0, 0}, 0), InvalidEntity);
  CHECK_THROWS_AS(make_arc({0, 0}, -1, 0, 1), InvalidEntity);
  CHECK_THROWS_AS(make_polyline({{0, 0}}), InvalidEntity);
  CHECK_THROWS_AS(make_polyline({{0, 0}, {1, 0}, {1, 0}}), InvalidEntity);
  CHECK_THROWS_AS(make_segment({0, 0}, {std::nan(""), 1}), InvalidEntity);
}

TEST_CASE("sample points follow arc length") {
  auto seg = sample_points(make_segment({0, 0}, {10, 0}), 3);
  REQUIRE(seg.size() == 3);
  check_point(seg[0], 0, 0);
  check_point(seg[1], 5, 0);
  check_point(seg[2], 10, 0);

  auto circ = sample_points(make_circle({0, 0}, 1), 4);
  REQUIRE(circ.size() == 4);
  check_point(circ[0], 1, 0, 1e-12);
  check_point(circ[1], 0, 1, 1e-12);
  check_point(circ[2], -1, 0, 1e-12);
  check_point(circ[3], 0, -1, 1e-12);

  CHECK_THROWS(sample_points(make_segment({0, 0}, {1, 0}), 1));
}

TEST_CASE("polyline samples match a cumulative-length walk") {
  const std::vector<Point2> verts = {{0, 0}, {1, 0}, {1, 1}};
  const int n = 5;
  // Oracle: walk the vertex list, consuming the target length segment by segment.
  std::vector<Point2> expected;
  for (int k = 0; k < n; ++k) {
    double remaining = 2.0 * k / (n - 1);
    std::size_t i = 0;
    while (i + 2 < verts.size() && remaining > distance(verts[i], verts[i + 1])) {
      remaining -= distance(verts[i], verts[i + 1]);
      ++i;
    }
    double f = remaining / distance(verts[i], verts[i + 1]);
    expected.push_back(verts[i] + f * (verts[i + 1] - verts[i]));
  }
  auto got = sample_points(make_polyline(verts), n);
  REQUIRE(got.size() == expected.size());
  for (std::size_t k = 0; k < got.size(); ++k) check_point(got[k], expected[k].x, expected[k].y);
  check_point(got[1], 0.5, 0);
  check_point(got[3], 1, 0.5);
}

TEST_CASE("segment samples are equidistant") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Point2 a{uniform_real(rng, -1e4, 1e4), uniform_real(rng, -1e4, 1e4)};
    Point2 b{uniform_real(rng, -1e4, 1e4), uniform_real(rng, -1e4, 1e4)};
    auto pts = sample_points(make_segment(a, b), 17);
    double step = distance(a, b) / 16;
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(std::abs(distance(pts[i - 1], pts[i]) - step) < 1e-9);
  }
}

TEST_CASE("endpoint distance") {
  CHECK(entity_distance(make_segment({0, 0}, {5, 5}), make_segment({0, 0}, {-3, 2})) == 0.0);
  CHECK(entity_distance(make_segment({0, 0}, {10, 0}), make_segment({15, 0}, {25, 0})) == doctest::Approx(5.0));
  // Sampled circle: the sample (5,0) against the endpoint (10,0).
  CHECK(entity_distance(make_circle({0, 0}, 5), make_segment({10, 0}, {20, 0})) == doctest::Approx(5.0));
  CHECK(entity_distance(make_segment({10, 0}, {20, 0}), make_circle({0, 0}, 5)) == doctest::Approx(5.0));
  CHECK(entity_distance(make_circle({0, 0}, 1), make_circle({5, 0}, 1)) == doctest::Approx(3.0));
}

TEST_CASE("endpoint distance is symmetric") {
  Rng rng(3);
  auto random_entity = [&](int kind) -> Entity {
    Point2 c{uniform_real(rng, 0, 100), uniform_real(rng, 0, 100)};
    switch (kind) {
      case 0: return make_segment(c, {c.x + uniform_real(rng, 1, 50), c.y + uniform_real(rng, -50, 50)});
      case 1: return make_arc(c, uniform_real(rng, 1, 30), uniform_real(rng, 0, kTwoPi), uniform_real(rng, 0, kTwoPi));
      case 2: return make_circle(c, uniform_real(rng, 1, 30));
      default: return make_polyline({c, {c.x + 10, c.y}, {c.x + 10, c.y + uniform_real(rng, 1, 20)}});
    }
  };
  for (int trial = 0; trial < 200; ++trial) {
    Entity a = random_entity(trial % 4), b = random_entity((trial / 4) % 4);
    CHECK(entity_distance(a, b) == entity_distance(b, a));
  }
}

TEST_CASE("continuous segment distance") {
  auto seg = [](Point2 a, Point2 b) { return std::get<Segment>(make_segment(a, b)); };
  CHECK(segment_min_distance(seg({0, 0}, {10, 10}), seg({0, 10}, {10, 0})) == 0.0);
  CHECK(segment_min_distance(seg({0, 0}, {10, 0}), seg({2, 3}, {8, 3})) == doctest::Approx(3.0));
  double oracle = dense_distance({0, 0}, {1, 0}, {2, 1}, {3, 1}, 10000);
  CHECK(std::abs(segment_min_distance(seg({0, 0}, {1, 0}), seg({2, 1}, {3, 1})) - oracle) < 1e-3);
  CHECK(segment_min_distance(seg({0, 0}, {1, 0}), seg({2, 1}, {3, 1})) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("continuous distance never exceeds endpoint distance") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    auto p = [&] { return Point2{uniform_real(rng, -100, 100), uniform_real(rng, -100, 100)}; };
    Point2 a0 = p(), a1 = p(), b0 = p(), b1 = p();
    auto a = make_segment(a0, a1), b = make_segment(b0, b1);
    double exact = segment_min_distance(std::get<Segment>(a), std::get<Segment>(b));
    CHECK(exact <= entity_distance(a, b) + 1e-12);
    CHECK(exact <= dense_distance(a0, a1, b0, b1, 200) + 1e-9);
  }
}

TEST_CASE("parallel distance") {
  CHECK(parallel_distance(make_segment({0, 0}, {10, 0}), make_segment({5, 0}, {20, 0}), 0.2) == 0.0);
  CHECK(parallel_distance(make_segment({0, 0}, {1000, 0}), make_segment({200, 400}, {800, 400}), 0.2) ==
        doctest::Approx(80.0));
  CHECK(parallel_distance(make_segment({0, 0}, {1, 0}), make_segment({2, 1}, {3, 1}), 1.0) ==
        doctest::Approx(1.41421356237));
  // Opposite directions are still parallel.
  CHECK(is_parallel(make_segment({0, 0}, {1, 0}), make_segment({3, 1}, {2, 1})));
  CHECK_THROWS_AS(parallel_distance(make_segment({0, 0}, {1, 0}), make_segment({0, 0}, {0, 1}), 0.2), NotParallel);
  CHECK_THROWS_AS(parallel_distance(make_segment({0, 0}, {1, 0}), make_circle({0, 5}, 1), 0.2), NotParallel);
}

TEST_CASE("bounding boxes") {
  CHECK(entity_bbox(make_segment({0, 0}, {10, 5})) == Box{0, 0, 10, 5});
  CHECK(entity_bbox(make_polyline({{0, 0}, {2, 0}, {2, 7}})) == Box{0, 0, 2, 7});
  Box c = entity_bbox(make_circle({3, 3}, 2));
  CHECK(std::abs(c.xmin - 1) < 1e-2);
  CHECK(std::abs(c.ymin - 1) < 1e-2);
  CHECK(std::abs(c.xmax - 5) < 1e-2);
  CHECK(std::abs(c.ymax - 5) < 1e-2);
}

TEST_CASE("polyline approximations of an arc converge in length") {
  Arc arc = std::get<Arc>(make_arc({1, 2}, 7, 0.3, 2.1));
  double target = arc_length(arc);
  double prev_err = std::numeric_limits<double>::infinity();
  for (int n : {10, 100, 1000, 10000}) {
    std::vector<Point2> v;
    for (int i = 0; i <= n; ++i) v.push_back(arc.point_at(arc.start_angle + arc.sweep() * i / n));
    double err = std::abs(arc_length(make_polyline(v)) - target) / target;
    CHECK(err <= prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-6);
}

TEST_CASE("type classes and anchors") {
  CHECK(entity_type(make_segment({0, 0}, {1, 0})) == EntityType::kSegment);
  CHECK(entity_type(make_circle({0, 0}, 1)) == EntityType::kCircle);
  CHECK(entity_type(make_arc({0, 0}, 1, 0, 1)) == EntityType::kCurve);
  CHECK(entity_type(make_polyline({{0, 0}, {1, 0}})) == EntityType::kCurve);
  check_point(anchor_point(make_segment({0, 0}, {4, 2})), 2, 1);
  check_point(anchor_point(make_circle({3, 4}, 2)), 3, 4);
  check_point(anchor_point(make_arc({0, 0}, 1, 0, kPi)), 0, 1, 1e-12);
}

TEST_CASE("point to entity distance") {
  CHECK(point_entity_distance({5, 3}, make_segment({0, 0}, {10, 0})) == doctest::Approx(3.0));
  CHECK(point_entity_distance({0, 0}, make_circle({0, 0}, 4)) == doctest::Approx(4.0));
  // Outside the angular range the nearest point is an arc endpoint.
  CHECK(point_entity_distance({0, -2}, make_arc({0, 0}, 1, 0, kPi)) == doctest::Approx(std::sqrt(5.0)));
  CHECK(point_entity_distance({0, 3}, make_arc({0, 0}, 1, 0, kPi)) == doctest::Approx(2.0));
}
