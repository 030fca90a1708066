#pragma once

// Geometry on graphical entities. All coordinates are millimeters, angles
// are radians measured counterclockwise.

#include <array>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace pancad {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double k, Point2 a) { return {k * a.x, k * a.y}; }

double distance(Point2 a, Point2 b);

/// Axis-aligned box. An empty box has xmin > xmax.
struct Box {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  static Box empty();
  bool is_empty() const { return xmin > xmax || ymin > ymax; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const;
  Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  void expand(Point2 p);
  void expand(const Box& other);
  bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  bool contains(const Box& other) const;

  friend bool operator==(const Box&, const Box&) = default;
};

double box_iou(const Box& a, const Box& b);

struct Segment {
  Point2 s;
  Point2 t;
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Arc {
  Point2 center;
  double radius = 0.0;
  double start_angle = 0.0;  // normalized to [0, 2pi)
  double end_angle = 0.0;    // normalized to [0, 2pi)
  friend bool operator==(const Arc&, const Arc&) = default;

  /// Counterclockwise sweep in (0, 2pi]; equal angles mean a full turn.
  double sweep() const;
  Point2 point_at(double angle) const;
};

struct Circle {
  Point2 center;
  double radius = 0.0;
  friend bool operator==(const Circle&, const Circle&) = default;
};

struct Polyline {
  std::vector<Point2> vertices;
  friend bool operator==(const Polyline&, const Polyline&) = default;
};

using Entity = std::variant<Segment, Arc, Circle, Polyline>;

/// Type class used by the one-hot type feature.
enum class EntityType { kSegment = 0, kCircle = 1, kCurve = 2 };

// Validating constructors; they throw InvalidEntity on degenerate input.
Entity make_segment(Point2 s, Point2 t);
Entity make_arc(Point2 center, double radius, double start_angle, double end_angle);
Entity make_circle(Point2 center, double radius);
Entity make_polyline(std::vector<Point2> vertices);

/// Throws InvalidEntity if `e` breaks an entity invariant.
void validate(const Entity& e);

double normalize_angle(double a);
EntityType entity_type(const Entity& e);
const char* kind_name(const Entity& e);

double arc_length(const Entity& e);

/// `n` points uniformly spaced by arc length, endpoints included. Circles get
/// `n` points at angular spacing 2pi/n starting at angle 0.
std::vector<Point2> sample_points(const Entity& e, int n);

/// Point at arc-length fraction `u` in [0, 1].
Point2 point_at_fraction(const Entity& e, double u);

/// Start and end points; circles have none.
std::optional<std::pair<Point2, Point2>> endpoints(const Entity& e);

/// Minimum distance over the endpoint pairs; circles fall back to 32 samples.
double entity_distance(const Entity& a, const Entity& b);

/// True when both are segments whose directions differ by less than `angle_tol`.
bool is_parallel(const Entity& a, const Entity& b, double angle_tol = 0.01);

double segment_min_distance(const Segment& a, const Segment& b);
double point_segment_distance(Point2 p, Point2 a, Point2 b);

/// Exact distance from a point to the entity's point set.
double point_entity_distance(Point2 p, const Entity& e);

/// eta times the continuous segment distance. Throws NotParallel.
double parallel_distance(const Entity& a, const Entity& b, double eta, double angle_tol = 0.01);

/// Segments and polylines are exact; arcs and circles use 64 samples.
Box entity_bbox(const Entity& e);

/// Location used for image-aligned feature lookup: arc-length midpoint for
/// open entities, center for circles.
Point2 anchor_point(const Entity& e);

}  // namespace pancad
