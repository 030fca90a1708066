#include "pancad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "pancad/errors.hpp"
#include "pancad/random.hpp"

namespace pancad {

namespace {

constexpr double kBorder = 300.0;        // free margin along the block edge
constexpr double kStallWidth = 2500.0;
constexpr double kStallDepth = 5000.0;
constexpr double kMinStallDepth = 4000.0;
constexpr double kParkingGap = 400.0;    // between building and parking
constexpr double kClearance = 100.0;     // between furniture and anything else

double round10(double v) { return std::round(v / 10.0) * 10.0; }

bool overlaps(const Box& a, const Box& b) {
  return a.xmin < b.xmax && b.xmin < a.xmax && a.ymin < b.ymax && b.ymin < a.ymax;
}

Box inflate(const Box& b, double r) { return {b.xmin - r, b.ymin - r, b.xmax + r, b.ymax + r}; }

// One straight wall between two grid nodes.
struct WallPiece {
  bool horizontal = true;
  bool exterior = false;
  double across = 0.0;    // centerline coordinate
  double along0 = 0.0;    // first free coordinate past the junction square
  double along1 = 0.0;
  double length() const { return along1 - along0; }
  Point2 at(double along, double acr) const { return horizontal ? Point2{along, acr} : Point2{acr, along}; }
};

struct Opening {
  double start = 0.0;
  double end = 0.0;
};

class PlanBuilder {
 public:
  explicit PlanBuilder(const SynthConfig& cfg) : cfg_(cfg), rng_(mix_seed(cfg.seed, 0x73796e7468)) {
    d_.id = "synth-" + std::to_string(cfg.seed);
    d_.catalog = cfg.classes;
    d_.extent = {0.0, 0.0, SynthConfig::kBlockSize, SynthConfig::kBlockSize};
    wall_ = label("wall");
    door_ = label("single door");
    window_ = label("window");
    parking_ = label("parking");
    table_ = label("table");
  }

  Drawing build() {
    layout_grid();
    plan_openings();
    emit_walls();
    emit_parking();
    emit_furniture();
    if (cfg_.rotate) rotate(static_cast<int>(uniform_index(rng_, 4)));
    check_coverage();
    return std::move(d_);
  }

 private:
  int label(const char* name) const { return d_.catalog.find(name).value_or(kBackground); }

  int next_instance(int l) {
    if (!d_.catalog.is_thing(l)) return 0;
    return ++instances_[l];
  }

  void add(Entity e, int l, int instance) { d_.records.push_back({std::move(e), l, instance}); }

  double uniform(double lo, double hi) { return uniform_real(rng_, lo, hi); }

  void layout_grid() {
    const double t = cfg_.wall_thickness;
    xs_.push_back(kBorder + t / 2 + round10(uniform(0.0, 200.0)));
    for (int i = 0; i < cfg_.rooms_x; ++i) xs_.push_back(xs_.back() + round10(uniform(cfg_.room_min, cfg_.room_max)));
    ys_.push_back(kBorder + t / 2 + round10(uniform(0.0, 200.0)));
    for (int j = 0; j < cfg_.rooms_y; ++j) ys_.push_back(ys_.back() + round10(uniform(cfg_.room_min, cfg_.room_max)));
    if (xs_.back() + t / 2 > SynthConfig::kBlockSize - kBorder || ys_.back() + t / 2 > SynthConfig::kBlockSize - kBorder)
      throw InfeasibleConfig("room grid does not fit the 20 m block");

    for (std::size_t j = 0; j < ys_.size(); ++j)
      for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
        pieces_.push_back({true, j == 0 || j + 1 == ys_.size(), ys_[j], xs_[i] + t / 2, xs_[i + 1] - t / 2});
    for (std::size_t i = 0; i < xs_.size(); ++i)
      for (std::size_t j = 0; j + 1 < ys_.size(); ++j)
        pieces_.push_back({false, i == 0 || i + 1 == xs_.size(), xs_[i], ys_[j] + t / 2, ys_[j + 1] - t / 2});
    openings_.resize(pieces_.size());
  }

  // Door swing boxes for overlap checks.
  bool try_door(std::size_t k, bool force) {
    const WallPiece& p = pieces_[k];
    const double t = cfg_.wall_thickness;
    const double width = uniform_index(rng_, 2) == 0 ? 800.0 : 900.0;
    if (p.length() < width + 200.0) return false;
    const double o1 = p.along0 + round10(uniform(100.0, p.length() - width - 100.0));
    const double o2 = o1 + width;

    // Try the four swing/hinge combinations starting from a random one.
    const auto first = static_cast<int>(uniform_index(rng_, 4));
    for (int attempt = 0; attempt < 4; ++attempt) {
      int combo = (first + attempt) % 4;
      double side = (combo & 1) ? 1.0 : -1.0;
      bool hinge_first = (combo & 2) != 0;
      double hinge_along = hinge_first ? o1 : o2;
      double toward = hinge_first ? 1.0 : -1.0;  // along-direction from hinge to the other jamb
      double face = p.across + side * t / 2;
      Point2 hinge = p.at(hinge_along, face);
      Point2 leaf_tip = p.at(hinge_along, face + side * width);
      Point2 jamb = p.at(hinge_along + toward * width, face);
      Box swing = Box::empty();
      swing.expand(hinge);
      swing.expand(leaf_tip);
      swing.expand(jamb);
      if (cfg_.overlap_free) {
        bool clash = false;
        for (const auto& b : keepout_)
          if (overlaps(inflate(swing, kClearance), b)) clash = true;
        if (clash) {
          if (!force) return false;
          continue;
        }
      }
      keepout_.push_back(swing);
      openings_[k] = Opening{o1, o2};
      doors_.push_back({hinge, leaf_tip, jamb, width});
      return true;
    }
    return false;
  }

  bool try_window(std::size_t k) {
    const WallPiece& p = pieces_[k];
    if (p.length() < 1400.0) return false;
    double width = round10(uniform(1000.0, std::min(1800.0, p.length() - 400.0)));
    double o1 = p.along0 + round10(uniform(200.0, p.length() - width - 200.0));
    openings_[k] = Opening{o1, o1 + width};
    windows_.push_back(k);
    return true;
  }

  void plan_openings() {
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      if (!pieces_[k].exterior && door_ != kBackground && bernoulli(rng_, cfg_.door_density)) try_door(k, false);
      if (pieces_[k].exterior && window_ != kBackground && bernoulli(rng_, cfg_.window_density)) try_window(k);
    }
    if (door_ != kBackground && doors_.empty()) {
      for (std::size_t k = 0; k < pieces_.size() && doors_.empty(); ++k)
        if (!pieces_[k].exterior && !openings_[k]) try_door(k, true);
      if (doors_.empty()) throw InfeasibleConfig("no interior wall can hold a door");
    }
    if (window_ != kBackground && windows_.empty()) {
      for (std::size_t k = 0; k < pieces_.size() && windows_.empty(); ++k)
        if (pieces_[k].exterior && !openings_[k]) try_window(k);
      if (windows_.empty()) throw InfeasibleConfig("no exterior wall can hold a window");
    }
  }

  void emit_walls() {
    const double t = cfg_.wall_thickness;
    auto seg = [&](Point2 a, Point2 b) { add(make_segment(a, b), wall_, 0); };

    for (std::size_t k = 0; k < pieces_.size(); ++k) {
      const WallPiece& p = pieces_[k];
      for (double side : {-1.0, 1.0}) {
        double face = p.across + side * t / 2;
        if (const auto& o = openings_[k]) {
          seg(p.at(p.along0, face), p.at(o->start, face));
          seg(p.at(o->end, face), p.at(p.along1, face));
        } else {
          seg(p.at(p.along0, face), p.at(p.along1, face));
        }
      }
      if (const auto& o = openings_[k]) {
        seg(p.at(o->start, p.across - t / 2), p.at(o->start, p.across + t / 2));
        seg(p.at(o->end, p.across - t / 2), p.at(o->end, p.across + t / 2));
      }
    }

    // Outer sides of the junction squares on the building boundary.
    const std::size_t nx = xs_.size(), ny = ys_.size();
    for (std::size_t j = 0; j < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) {
        double x = xs_[i], y = ys_[j];
        if (i == 0) seg({x - t / 2, y - t / 2}, {x - t / 2, y + t / 2});
        if (i + 1 == nx) seg({x + t / 2, y - t / 2}, {x + t / 2, y + t / 2});
        if (j == 0) seg({x - t / 2, y - t / 2}, {x + t / 2, y - t / 2});
        if (j + 1 == ny) seg({x - t / 2, y + t / 2}, {x + t / 2, y + t / 2});
      }

    for (const auto& dr : doors_) {
      int z = next_instance(door_);
      add(make_segment(dr.hinge, dr.leaf_tip), door_, z);
      double a_leaf = direction_angle(dr.leaf_tip - dr.hinge);
      double a_jamb = direction_angle(dr.jamb - dr.hinge);
      // Counterclockwise quarter turn from one to the other.
      bool jamb_first = std::abs(normalize_angle(a_leaf - a_jamb) - kPi / 2) < 1e-9;
      add(jamb_first ? make_arc(dr.hinge, dr.width, a_jamb, a_leaf) : make_arc(dr.hinge, dr.width, a_leaf, a_jamb),
          door_, z);
    }

    for (std::size_t k : windows_) {
      const WallPiece& p = pieces_[k];
      const auto& o = *openings_[k];
      int z = next_instance(window_);
      for (double f : {1.0 / 6.0, 0.5, 5.0 / 6.0}) {
        double acr = p.across - t / 2 + f * t;
        add(make_segment(p.at(o.start, acr), p.at(o.end, acr)), window_, z);
      }
    }
  }

  static double direction_angle(Point2 v) {
    // Axis-aligned directions map to exact quarter turns.
    if (v.y == 0.0) return v.x > 0 ? 0.0 : kPi;
    if (v.x == 0.0) return v.y > 0 ? kPi / 2 : 3 * kPi / 2;
    return normalize_angle(std::atan2(v.y, v.x));
  }

  // A row of stalls: a baseline plus dividers, in a local frame mapped by
  // `horizontal` (baseline along x) or not (baseline along y).
  void emit_parking_row(bool horizontal, double base, double start, double available_len, double depth) {
    int max_stalls = static_cast<int>(std::floor(available_len / kStallWidth));
    if (max_stalls < 1) return;
    int stalls = std::max(1, static_cast<int>(std::lround(cfg_.parking_density * max_stalls)));
    auto at = [&](double along, double acr) { return horizontal ? Point2{along, acr} : Point2{acr, along}; };
    double end = start + stalls * kStallWidth;
    add(make_segment(at(start, base), at(end, base)), parking_, 0);
    for (int k = 0; k <= stalls; ++k) {
      double a = start + k * kStallWidth;
      add(make_segment(at(a, base), at(a, base + depth)), parking_, 0);
    }
    ++parking_rows_;
  }

  void emit_parking() {
    if (parking_ == kBackground || cfg_.parking_density <= 0.0) {
      if (parking_ != kBackground) throw InfeasibleConfig("parking class requested with zero parking density");
      return;
    }
    const double t = cfg_.wall_thickness;
    const double block = SynthConfig::kBlockSize;
    double top_lo = ys_.back() + t / 2 + kParkingGap;
    double top_depth = std::min(kStallDepth, block - kBorder - top_lo);
    double right_lo = xs_.back() + t / 2 + kParkingGap;
    double right_depth = std::min(kStallDepth, block - kBorder - right_lo);
    bool top = top_depth >= kMinStallDepth;
    if (top) emit_parking_row(true, top_lo, kBorder, block - 2 * kBorder, round10(top_depth - 5.0));
    if (right_depth >= kMinStallDepth) {
      double limit = top ? top_lo - kParkingGap : block - kBorder;
      emit_parking_row(false, right_lo, kBorder, limit - kBorder, round10(right_depth - 5.0));
    }
    if (parking_rows_ == 0) throw InfeasibleConfig("no free strip for parking next to the building");
  }

  // Furniture ---------------------------------------------------------------

  struct Item {
    int label;
    std::vector<Entity> parts;  // in local coordinates centered at the origin
    Box box;                    // local bounds
  };

  Item make_table() {
    Item it{table_, {}, Box::empty()};
    if (bernoulli(rng_, 0.3)) {
      double r = round10(uniform(350.0, 550.0));
      it.parts.push_back(make_circle({0, 0}, r));
    } else {
      double w = round10(uniform(900.0, 1400.0)) / 2, h = round10(uniform(600.0, 900.0)) / 2;
      it.parts.push_back(make_polyline({{-w, -h}, {w, -h}, {w, h}, {-w, h}, {-w, -h}}));
    }
    for (const auto& e : it.parts) it.box.expand(entity_bbox(e));
    return it;
  }

  // Class-specific glyph: an outline whose proportions depend on the class
  // index, plus one of four inner details.
  Item make_glyph(int l) {
    Item it{l, {}, Box::empty()};
    double w = (500.0 + 40.0 * (l % 7)) / 2;
    double h = (400.0 + 50.0 * (l % 5)) / 2;
    it.parts.push_back(make_polyline({{-w, -h}, {w, -h}, {w, h}, {-w, h}, {-w, -h}}));
    double inset = 80.0;
    switch (l % 4) {
      case 0: it.parts.push_back(make_circle({0, 0}, std::min(w, h) / 2)); break;
      case 1: it.parts.push_back(make_segment({-w + inset, 0}, {w - inset, 0})); break;
      case 2:
        it.parts.push_back(make_polyline(
            {{-w + inset, -h + inset}, {w - inset, -h + inset}, {w - inset, h - inset}, {-w + inset, h - inset},
             {-w + inset, -h + inset}}));
        break;
      default:
        it.parts.push_back(make_circle({-w / 2, 0}, std::min(w / 2, h) / 2));
        it.parts.push_back(make_circle({w / 2, 0}, std::min(w / 2, h) / 2));
        break;
    }
    for (const auto& e : it.parts) it.box.expand(entity_bbox(e));
    return it;
  }

  static Entity translate(const Entity& e, Point2 o) {
    if (const auto* s = std::get_if<Segment>(&e)) return Segment{s->s + o, s->t + o};
    if (const auto* a = std::get_if<Arc>(&e)) return Arc{a->center + o, a->radius, a->start_angle, a->end_angle};
    if (const auto* c = std::get_if<Circle>(&e)) return Circle{c->center + o, c->radius};
    Polyline p = std::get<Polyline>(e);
    for (auto& v : p.vertices) v = v + o;
    return p;
  }

  bool place_in_room(const Item& it, std::size_t room) {
    const double t = cfg_.wall_thickness;
    std::size_t i = room % static_cast<std::size_t>(cfg_.rooms_x);
    std::size_t j = room / static_cast<std::size_t>(cfg_.rooms_x);
    double x0 = xs_[i] + t / 2 + kClearance - it.box.xmin;
    double x1 = xs_[i + 1] - t / 2 - kClearance - it.box.xmax;
    double y0 = ys_[j] + t / 2 + kClearance - it.box.ymin;
    double y1 = ys_[j + 1] - t / 2 - kClearance - it.box.ymax;
    if (x1 < x0 || y1 < y0) return false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Point2 o{round10(uniform(x0, x1)), round10(uniform(y0, y1))};
      o.x = std::clamp(o.x, x0, x1);
      o.y = std::clamp(o.y, y0, y1);
      Box placed{it.box.xmin + o.x, it.box.ymin + o.y, it.box.xmax + o.x, it.box.ymax + o.y};
      if (cfg_.overlap_free) {
        bool clash = false;
        for (const auto& b : keepout_)
          if (overlaps(inflate(placed, kClearance), b)) {
            clash = true;
            break;
          }
        if (clash) continue;
        keepout_.push_back(placed);
      }
      int z = next_instance(it.label);
      for (const auto& e : it.parts) add(translate(e, o), it.label, z);
      return true;
    }
    return false;
  }

  // Places a mandatory item, trying every room from a random start.
  void place_anywhere(const Item& it) {
    const std::size_t rooms = static_cast<std::size_t>(cfg_.rooms_x * cfg_.rooms_y);
    std::size_t start = uniform_index(rng_, rooms);
    for (std::size_t k = 0; k < rooms; ++k)
      if (place_in_room(it, (start + k) % rooms)) return;
    throw InfeasibleConfig("no room has space for a " + d_.catalog.label_name(it.label));
  }

  void emit_furniture() {
    const std::size_t rooms = static_cast<std::size_t>(cfg_.rooms_x * cfg_.rooms_y);
    bool any_table = false;
    if (table_ != kBackground) {
      for (std::size_t r = 0; r < rooms; ++r)
        if (bernoulli(rng_, cfg_.furniture_density) && place_in_room(make_table(), r)) any_table = true;
      if (!any_table) place_anywhere(make_table());
    }
    for (int l : d_.catalog.thing_classes()) {
      if (l == door_ || l == window_ || l == table_) continue;
      place_anywhere(make_glyph(l));
      if (bernoulli(rng_, cfg_.furniture_density)) {
        Item extra = make_glyph(l);
        place_in_room(extra, uniform_index(rng_, rooms));
      }
    }
  }

  void rotate(int quarter_turns) {
    if (quarter_turns == 0) return;
    const double c = SynthConfig::kBlockSize / 2;
    auto rot = [&](Point2 p) {
      for (int k = 0; k < quarter_turns; ++k) p = Point2{c - (p.y - c), c + (p.x - c)};
      return p;
    };
    const double dang = quarter_turns * kPi / 2;
    for (auto& r : d_.records) {
      Entity& e = r.entity;
      if (auto* s = std::get_if<Segment>(&e)) {
        *s = {rot(s->s), rot(s->t)};
      } else if (auto* a = std::get_if<Arc>(&e)) {
        a->center = rot(a->center);
        a->start_angle = normalize_angle(a->start_angle + dang);
        a->end_angle = normalize_angle(a->end_angle + dang);
      } else if (auto* ci = std::get_if<Circle>(&e)) {
        ci->center = rot(ci->center);
      } else {
        for (auto& v : std::get<Polyline>(e).vertices) v = rot(v);
      }
    }
  }

  void check_coverage() const {
    std::vector<bool> seen(d_.catalog.size(), false);
    for (const auto& r : d_.records)
      if (r.label != kBackground) seen[static_cast<std::size_t>(r.label)] = true;
    for (std::size_t c = 0; c < seen.size(); ++c)
      if (!seen[c]) throw InfeasibleConfig("class '" + d_.catalog.names()[c] + "' has no motif in this layout");
  }

  struct DoorPlan {
    Point2 hinge, leaf_tip, jamb;
    double width;
  };

  const SynthConfig& cfg_;
  Rng rng_;
  Drawing d_;
  int wall_, door_, window_, parking_, table_;
  std::vector<double> xs_, ys_;
  std::vector<WallPiece> pieces_;
  std::vector<std::optional<Opening>> openings_;
  std::vector<DoorPlan> doors_;
  std::vector<std::size_t> windows_;
  std::vector<Box> keepout_;
  std::map<int, int> instances_;
  int parking_rows_ = 0;
};

}  // namespace

void SynthConfig::validate() const {
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InfeasibleConfig(std::string(name) + " must lie in [0, 1]");
  };
  unit(door_density, "door density");
  unit(window_density, "window density");
  unit(parking_density, "parking density");
  unit(furniture_density, "furniture density");
  if (rooms_x < 1 || rooms_y < 1) throw InfeasibleConfig("room grid must be at least 1 x 1");
  if (!(wall_thickness > 0.0)) throw InfeasibleConfig("wall thickness must be positive");
  if (!(room_min > 0.0) || room_min > room_max) throw InfeasibleConfig("room size range is empty");
  if (room_min - wall_thickness < 1500.0) throw InfeasibleConfig("rooms are too small for doors and furniture");
  if (2 * kBorder + 200.0 + wall_thickness + std::max(rooms_x, rooms_y) * room_max > kBlockSize)
    throw InfeasibleConfig("room grid does not fit the 20 m block");
  if (classes.size() == 0) throw InfeasibleConfig("class catalog is empty");
}

Drawing generate_floorplan(const SynthConfig& cfg) {
  cfg.validate();
  PlanBuilder builder(cfg);
  Drawing d = builder.build();
  validate(d);
  return d;
}

CorruptedPrediction corrupt_prediction(const Drawing& d, const NoiseConfig& noise, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x6e6f697365));
  CorruptedPrediction out;
  out.labels.reserve(d.size());
  const auto classes = d.catalog.size();
  for (const auto& r : d.records) {
    int l = r.label;
    if (l != kBackground && classes >= 2 && bernoulli(rng, noise.flip_probability)) {
      auto k = static_cast<int>(uniform_index(rng, classes - 1));
      l = k >= r.label ? k + 1 : k;
    }
    out.labels.push_back(l);
  }
  for (auto b : gt_instance_boxes(d)) {
    if (bernoulli(rng, noise.drop_probability)) continue;
    if (noise.jitter_mm > 0.0) {
      double j = noise.jitter_mm;
      b.box.xmin += uniform_real(rng, -j, j);
      b.box.ymin += uniform_real(rng, -j, j);
      b.box.xmax += uniform_real(rng, -j, j);
      b.box.ymax += uniform_real(rng, -j, j);
      if (b.box.xmin > b.box.xmax) std::swap(b.box.xmin, b.box.xmax);
      if (b.box.ymin > b.box.ymax) std::swap(b.box.ymin, b.box.ymax);
    }
    b.score = 1.0 - 0.5 * uniform_real(rng);
    out.boxes.push_back(b);
  }
  return out;
}

}  // namespace pancad
