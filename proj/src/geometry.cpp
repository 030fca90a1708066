#include "pancad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pancad/errors.hpp"

namespace pancad {

namespace {

constexpr int kCircleFallbackSamples = 32;
constexpr int kBoxSamples = 64;

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Cumulative lengths of polyline edges, starting at 0.
std::vector<double> cumulative_lengths(const std::vector<Point2>& v) {
  std::vector<double> cum(v.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) cum[i] = cum[i - 1] + distance(v[i - 1], v[i]);
  return cum;
}

Point2 polyline_at(const std::vector<Point2>& v, const std::vector<double>& cum, double target) {
  if (target <= 0.0) return v.front();
  if (target >= cum.back()) return v.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cum.begin());  // cum[i-1] <= target < cum[i]
  double edge = cum[i] - cum[i - 1];
  double u = (target - cum[i - 1]) / edge;
  return v[i - 1] + u * (v[i] - v[i - 1]);
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
  double d1 = cross(q2 - q1, p1 - q1);
  double d2 = cross(q2 - q1, p2 - q1);
  double d3 = cross(p2 - p1, q1 - p1);
  double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  // Collinear or touching cases are covered by the point-segment distances.
  return false;
}

}  // namespace

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Box Box::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, -inf, -inf};
}

double Box::area() const { return is_empty() ? 0.0 : width() * height(); }

void Box::expand(Point2 p) {
  xmin = std::min(xmin, p.x);
  ymin = std::min(ymin, p.y);
  xmax = std::max(xmax, p.x);
  ymax = std::max(ymax, p.y);
}

void Box::expand(const Box& o) {
  if (o.is_empty()) return;
  expand(Point2{o.xmin, o.ymin});
  expand(Point2{o.xmax, o.ymax});
}

bool Box::contains(const Box& o) const {
  return o.xmin >= xmin && o.ymin >= ymin && o.xmax <= xmax && o.ymax <= ymax;
}

double box_iou(const Box& a, const Box& b) {
  double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  double inter = iw * ih;
  double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double Arc::sweep() const {
  double s = end_angle - start_angle;
  if (s <= 0.0) s += kTwoPi;
  return s;
}

Point2 Arc::point_at(double angle) const {
  return {center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)};
}

Entity make_segment(Point2 s, Point2 t) {
  Entity e = Segment{s, t};
  validate(e);
  return e;
}

Entity make_arc(Point2 center, double radius, double start_angle, double end_angle) {
  if (!std::isfinite(start_angle) || !std::isfinite(end_angle)) throw InvalidEntity("arc angles must be finite");
  Entity e = Arc{center, radius, normalize_angle(start_angle), normalize_angle(end_angle)};
  validate(e);
  return e;
}

Entity make_circle(Point2 center, double radius) {
  Entity e = Circle{center, radius};
  validate(e);
  return e;
}

Entity make_polyline(std::vector<Point2> vertices) {
  Entity e = Polyline{std::move(vertices)};
  validate(e);
  return e;
}

void validate(const Entity& e) {
  std::visit(overloaded{
                 [](const Segment& s) {
                   if (!finite(s.s) || !finite(s.t)) throw InvalidEntity("segment endpoints must be finite");
                   if (s.s == s.t) throw InvalidEntity("segment has zero length");
                 },
                 [](const Arc& a) {
                   if (!finite(a.center)) throw InvalidEntity("arc center must be finite");
                   if (!(a.radius > 0.0) || !std::isfinite(a.radius)) throw InvalidEntity("arc radius must be positive");
                   if (!(a.start_angle >= 0.0 && a.start_angle < kTwoPi && a.end_angle >= 0.0 && a.end_angle < kTwoPi))
                     throw InvalidEntity("arc angles must be normalized to [0, 2pi)");
                 },
                 [](const Circle& c) {
                   if (!finite(c.center)) throw InvalidEntity("circle center must be finite");
                   if (!(c.radius > 0.0) || !std::isfinite(c.radius)) throw InvalidEntity("circle radius must be positive");
                 },
                 [](const Polyline& p) {
                   if (p.vertices.size() < 2) throw InvalidEntity("polyline needs at least 2 vertices");
                   for (std::size_t i = 0; i < p.vertices.size(); ++i) {
                     if (!finite(p.vertices[i])) throw InvalidEntity("polyline vertex must be finite");
                     if (i > 0 && p.vertices[i] == p.vertices[i - 1])
                       throw InvalidEntity("polyline has a zero-length edge");
                   }
                 },
             },
             e);
}

EntityType entity_type(const Entity& e) {
  if (std::holds_alternative<Segment>(e)) return EntityType::kSegment;
  if (std::holds_alternative<Circle>(e)) return EntityType::kCircle;
  return EntityType::kCurve;
}

const char* kind_name(const Entity& e) {
  static constexpr const char* kNames[] = {"segment", "arc", "circle", "polyline"};
  return kNames[e.index()];
}

double arc_length(const Entity& e) {
  return std::visit(overloaded{
                        [](const Segment& s) { return distance(s.s, s.t); },
                        [](const Arc& a) { return a.radius * a.sweep(); },
                        [](const Circle& c) { return kTwoPi * c.radius; },
                        [](const Polyline& p) { return cumulative_lengths(p.vertices).back(); },
                    },
                    e);
}

Point2 point_at_fraction(const Entity& e, double u) {
  u = std::clamp(u, 0.0, 1.0);
  return std::visit(overloaded{
                        [u](const Segment& s) { return s.s + u * (s.t - s.s); },
                        [u](const Arc& a) { return a.point_at(a.start_angle + u * a.sweep()); },
                        [u](const Circle& c) {
                          return Point2{c.center.x + c.radius * std::cos(u * kTwoPi),
                                        c.center.y + c.radius * std::sin(u * kTwoPi)};
                        },
                        [u](const Polyline& p) {
                          auto cum = cumulative_lengths(p.vertices);
                          return polyline_at(p.vertices, cum, u * cum.back());
                        },
                    },
                    e);
}

std::vector<Point2> sample_points(const Entity& e, int n) {
  if (n < 2) throw InvalidEntity("sample count must be at least 2");
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  if (const auto* c = std::get_if<Circle>(&e)) {
    for (int k = 0; k < n; ++k) {
      double a = kTwoPi * k / n;
      out.push_back({c->center.x + c->radius * std::cos(a), c->center.y + c->radius * std::sin(a)});
    }
    return out;
  }
  if (const auto* p = std::get_if<Polyline>(&e)) {
    auto cum = cumulative_lengths(p->vertices);
    for (int k = 0; k < n; ++k) {
      out.push_back(k == n - 1 ? p->vertices.back() : polyline_at(p->vertices, cum, cum.back() * k / (n - 1)));
    }
    return out;
  }
  for (int k = 0; k < n; ++k) {
    double u = static_cast<double>(k) / (n - 1);
    out.push_back(point_at_fraction(e, u));
  }
  // Exact endpoints, free of rounding in the parameterization.
  if (auto ends = endpoints(e)) {
    out.front() = ends->first;
    out.back() = ends->second;
  }
  return out;
}

std::optional<std::pair<Point2, Point2>> endpoints(const Entity& e) {
  return std::visit(overloaded{
                        [](const Segment& s) -> std::optional<std::pair<Point2, Point2>> {
                          return std::pair{s.s, s.t};
                        },
                        [](const Arc& a) -> std::optional<std::pair<Point2, Point2>> {
                          return std::pair{a.point_at(a.start_angle), a.point_at(a.start_angle + a.sweep())};
                        },
                        [](const Circle&) -> std::optional<std::pair<Point2, Point2>> { return std::nullopt; },
                        [](const Polyline& p) -> std::optional<std::pair<Point2, Point2>> {
                          return std::pair{p.vertices.front(), p.vertices.back()};
                        },
                    },
                    e);
}

namespace {

std::vector<Point2> distance_points(const Entity& e) {
  if (auto ends = endpoints(e)) return {ends->first, ends->second};
  return sample_points(e, kCircleFallbackSamples);
}

}  // namespace

double entity_distance(const Entity& a, const Entity& b) {
  auto pa = distance_points(a);
  auto pb = distance_points(b);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : pa)
    for (const auto& q : pb) best = std::min(best, distance(p, q));
  return best;
}

bool is_parallel(const Entity& a, const Entity& b, double angle_tol) {
  const auto* sa = std::get_if<Segment>(&a);
  const auto* sb = std::get_if<Segment>(&b);
  if (!sa || !sb) return false;
  Point2 da = sa->t - sa->s;
  Point2 db = sb->t - sb->s;
  // Angle between undirected lines, in [0, pi/2].
  double ang = std::atan2(std::abs(cross(da, db)), std::abs(da.x * db.x + da.y * db.y));
  return ang < angle_tol;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  Point2 ab = b - a;
  double len2 = ab.x * ab.x + ab.y * ab.y;
  if (len2 == 0.0) return distance(p, a);
  double u = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2, 0.0, 1.0);
  return distance(p, a + u * ab);
}

double segment_min_distance(const Segment& a, const Segment& b) {
  if (segments_intersect(a.s, a.t, b.s, b.t)) return 0.0;
  return std::min({point_segment_distance(a.s, b.s, b.t), point_segment_distance(a.t, b.s, b.t),
                   point_segment_distance(b.s, a.s, a.t), point_segment_distance(b.t, a.s, a.t)});
}

double point_entity_distance(Point2 p, const Entity& e) {
  return std::visit(overloaded{
                        [p](const Segment& s) { return point_segment_distance(p, s.s, s.t); },
                        [p](const Arc& a) {
                          double ang = normalize_angle(std::atan2(p.y - a.center.y, p.x - a.center.x));
                          double rel = normalize_angle(ang - a.start_angle);
                          if (rel <= a.sweep() || a.sweep() >= kTwoPi) return std::abs(distance(p, a.center) - a.radius);
                          auto ends = endpoints(Entity{a});
                          return std::min(distance(p, ends->first), distance(p, ends->second));
                        },
                        [p](const Circle& c) { return std::abs(distance(p, c.center) - c.radius); },
                        [p](const Polyline& pl) {
                          double best = std::numeric_limits<double>::infinity();
                          for (std::size_t i = 1; i < pl.vertices.size(); ++i)
                            best = std::min(best, point_segment_distance(p, pl.vertices[i - 1], pl.vertices[i]));
                          return best;
                        },
                    },
                    e);
}

double parallel_distance(const Entity& a, const Entity& b, double eta, double angle_tol) {
  if (!is_parallel(a, b, angle_tol)) throw NotParallel();
  return eta * segment_min_distance(std::get<Segment>(a), std::get<Segment>(b));
}

Box entity_bbox(const Entity& e) {
  Box box = Box::empty();
  if (const auto* s = std::get_if<Segment>(&e)) {
    box.expand(s->s);
    box.expand(s->t);
  } else if (const auto* p = std::get_if<Polyline>(&e)) {
    for (const auto& v : p->vertices) box.expand(v);
  } else {
    for (const auto& q : sample_points(e, kBoxSamples)) box.expand(q);
  }
  return box;
}

Point2 anchor_point(const Entity& e) {
  if (const auto* c = std::get_if<Circle>(&e)) return c->center;
  return point_at_fraction(e, 0.5);
}

}  // namespace pancad
