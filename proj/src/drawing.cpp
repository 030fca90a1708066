#include "pancad/drawing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pancad/errors.hpp"

namespace pancad {

using nlohmann::json;

namespace {

const std::vector<std::string>& full_class_names() {
  static const std::vector<std::string> names = {
      "single door",  "double door",         "sliding door",  "window",          "bay window",  "blind window",
      "opening symbol", "stairs",            "gas stove",     "refrigerator",    "washing machine", "sofa",
      "bed",          "chair",               "table",         "bedside cupboard", "TV cabinet",  "half-height cabinet",
      "high cabinet", "wardrobe",            "sink",          "bath",            "bath tub",    "squat toilet",
      "urinal",       "toilet",              "elevator",      "escalator",       "parking",     "wall",
  };
  return names;
}

bool default_stuff(std::string_view name) { return name == "wall" || name == "parking"; }

}  // namespace

LabelCatalog::LabelCatalog(std::vector<std::string> names, std::vector<bool> is_stuff)
    : names_(std::move(names)), stuff_(std::move(is_stuff)) {
  if (names_.size() != stuff_.size()) throw Error("catalog names and stuff flags differ in length");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty() || names_[i] == "background") throw Error("invalid class name '" + names_[i] + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (names_[i] == names_[j]) throw Error("duplicate class name '" + names_[i] + "'");
  }
}

LabelCatalog LabelCatalog::from_names(std::vector<std::string> names) {
  std::vector<bool> stuff;
  for (const auto& n : names) stuff.push_back(default_stuff(n));
  return LabelCatalog(std::move(names), std::move(stuff));
}

LabelCatalog LabelCatalog::full() { return from_names(full_class_names()); }

LabelCatalog LabelCatalog::synthetic() { return from_names({"wall", "single door", "window", "parking", "table"}); }

const std::string& LabelCatalog::name(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= names_.size())
    throw UnknownClass("#" + std::to_string(index));
  return names_[static_cast<std::size_t>(index)];
}

std::string LabelCatalog::label_name(int index) const { return index == kBackground ? "background" : name(index); }

std::optional<int> LabelCatalog::find(std::string_view name) const {
  if (name == "background") return kBackground;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

int LabelCatalog::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw UnknownClass(std::string(name));
}

bool LabelCatalog::is_stuff(int index) const {
  return index >= 0 && static_cast<std::size_t>(index) < stuff_.size() && stuff_[static_cast<std::size_t>(index)];
}

bool LabelCatalog::is_thing(int index) const {
  return index >= 0 && static_cast<std::size_t>(index) < stuff_.size() && !stuff_[static_cast<std::size_t>(index)];
}

std::vector<int> LabelCatalog::thing_classes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (!stuff_[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> LabelCatalog::stuff_classes() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (stuff_[i]) out.push_back(static_cast<int>(i));
  return out;
}

Box compute_extent(const std::vector<EntityRecord>& records) {
  Box box = Box::empty();
  for (const auto& r : records) box.expand(entity_bbox(r.entity));
  if (box.is_empty()) return Box{0, 0, 0, 0};
  return box;
}

void validate(const Drawing& d) {
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    validate(r.entity);
    if (r.label != kBackground && (r.label < 0 || static_cast<std::size_t>(r.label) >= d.catalog.size()))
      throw UnknownClass("#" + std::to_string(r.label));
    if (r.instance < 0) throw Error("entity " + std::to_string(i) + " has a negative instance index");
    Box b = entity_bbox(r.entity);
    double tol = 1e-9 * std::max({1.0, std::abs(d.extent.xmax), std::abs(d.extent.ymax), std::abs(d.extent.xmin),
                                  std::abs(d.extent.ymin)});
    if (b.xmin < d.extent.xmin - tol || b.ymin < d.extent.ymin - tol || b.xmax > d.extent.xmax + tol ||
        b.ymax > d.extent.ymax + tol)
      throw Error("entity " + std::to_string(i) + " lies outside the drawing extent");
  }
}

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Symbol> group_symbols(const Drawing& d, StuffGrouping stuff, double touch_tolerance) {
  // Key: (label, group). Things use the instance index; stuff uses 0, or the
  // component root when grouping by component.
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> groups;

  std::vector<std::size_t> comp(d.size(), 0);
  if (stuff == StuffGrouping::kPerComponent) {
    DisjointSet ds(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!d.catalog.is_stuff(d.records[i].label)) continue;
      for (std::size_t j = i + 1; j < d.size(); ++j) {
        if (d.records[j].label != d.records[i].label) continue;
        if (entity_distance(d.records[i].entity, d.records[j].entity) <= touch_tolerance) ds.unite(i, j);
      }
    }
    for (std::size_t i = 0; i < d.size(); ++i) comp[i] = ds.find(i);
  }

  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& r = d.records[i];
    if (r.label == kBackground) continue;
    if (d.catalog.is_stuff(r.label)) {
      groups[{r.label, comp[i]}].push_back(i);
    } else {
      if (r.instance == 0) continue;
      groups[{r.label, static_cast<std::size_t>(r.instance)}].push_back(i);
    }
  }

  std::vector<Symbol> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) {
    Symbol s;
    s.label = key.first;
    s.instance = d.catalog.is_stuff(key.first) ? 0 : static_cast<int>(key.second);
    s.entities = std::move(members);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<InstanceBox> gt_instance_boxes(const Drawing& d) {
  std::vector<InstanceBox> out;
  for (const auto& s : group_symbols(d)) {
    if (!d.catalog.is_thing(s.label)) continue;
    Box box = Box::empty();
    for (auto i : s.entities) box.expand(entity_bbox(d.records[i].entity));
    out.push_back({s.label, box, 1.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON-lines

namespace {

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 json_point(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument("point must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json entity_json(const Entity& e) {
  json j;
  j["kind"] = kind_name(e);
  if (const auto* s = std::get_if<Segment>(&e)) {
    j["s"] = point_json(s->s);
    j["t"] = point_json(s->t);
  } else if (const auto* a = std::get_if<Arc>(&e)) {
    j["center"] = point_json(a->center);
    j["radius"] = a->radius;
    j["start_angle"] = a->start_angle;
    j["end_angle"] = a->end_angle;
  } else if (const auto* c = std::get_if<Circle>(&e)) {
    j["center"] = point_json(c->center);
    j["radius"] = c->radius;
  } else {
    json v = json::array();
    for (const auto& p : std::get<Polyline>(e).vertices) v.push_back(point_json(p));
    j["vertices"] = std::move(v);
  }
  return j;
}

double number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Entity json_entity(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "segment") return make_segment(json_point(j.at("s")), json_point(j.at("t")));
  if (kind == "arc")
    return make_arc(json_point(j.at("center")), number(j, "radius"), number(j, "start_angle"), number(j, "end_angle"));
  if (kind == "circle") return make_circle(json_point(j.at("center")), number(j, "radius"));
  if (kind == "polyline") {
    std::vector<Point2> v;
    for (const auto& p : j.at("vertices")) v.push_back(json_point(p));
    return make_polyline(std::move(v));
  }
  throw std::invalid_argument("unknown entity kind '" + kind + "'");
}

json box_json(const Box& b) { return json::array({b.xmin, b.ymin, b.xmax, b.ymax}); }

Box json_box(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("box must be [xmin, ymin, xmax, ymax]");
  for (const auto& v : j)
    if (!v.is_number()) throw std::invalid_argument("box coordinates must be numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

std::string drawing_to_jsonl(const Drawing& d) {
  std::ostringstream out;
  json header;
  header["id"] = d.id;
  header["extent"] = box_json(d.extent);
  header["classes"] = d.catalog.names();
  json stuff = json::array();
  for (int c : d.catalog.stuff_classes()) stuff.push_back(d.catalog.name(c));
  header["stuff"] = std::move(stuff);
  out << header.dump() << '\n';
  for (const auto& r : d.records) {
    json j = entity_json(r.entity);
    j["label"] = d.catalog.label_name(r.label);
    j["instance"] = r.instance;
    out << j.dump() << '\n';
  }
  return out.str();
}

Drawing drawing_from_jsonl(std::string_view text) {
  Drawing d;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");

    try {
      if (!have_header) {
        d.id = j.at("id").get<std::string>();
        d.extent = json_box(j.at("extent"));
        auto names = j.at("classes").get<std::vector<std::string>>();
        if (j.contains("stuff")) {
          auto stuff_names = j.at("stuff").get<std::vector<std::string>>();
          std::vector<bool> stuff(names.size(), false);
          for (const auto& s : stuff_names) {
            auto it = std::find(names.begin(), names.end(), s);
            if (it == names.end()) throw UnknownClass(s);
            stuff[static_cast<std::size_t>(it - names.begin())] = true;
          }
          d.catalog = LabelCatalog(std::move(names), std::move(stuff));
        } else {
          d.catalog = LabelCatalog::from_names(std::move(names));
        }
        have_header = true;
        continue;
      }
      EntityRecord r;
      r.entity = json_entity(j);
      r.label = d.catalog.index_of(j.at("label").get<std::string>());
      r.instance = j.value("instance", 0);
      if (r.instance < 0) throw std::invalid_argument("instance must be nonnegative");
      d.records.push_back(std::move(r));
    } catch (const UnknownClass&) {
      throw;
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!have_header) throw ParseError(line_no, "missing header line");
  try {
    validate(d);
  } catch (const UnknownClass&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(line_no, e.what());
  }
  return d;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void save_drawing(const Drawing& d, const std::filesystem::path& path) { write_text_file(path, drawing_to_jsonl(d)); }

Drawing load_drawing(const std::filesystem::path& path) { return drawing_from_jsonl(read_text_file(path)); }

std::string boxes_to_json(const std::vector<InstanceBox>& boxes, const LabelCatalog& catalog) {
  json arr = json::array();
  for (const auto& b : boxes) {
    json j;
    j["class"] = catalog.name(b.label);
    j["bbox"] = box_json(b.box);
    j["score"] = b.score;
    arr.push_back(std::move(j));
  }
  return arr.dump(1) + "\n";
}

std::vector<InstanceBox> boxes_from_json(std::string_view text, const LabelCatalog& catalog) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, e.what());
  }
  if (!arr.is_array()) throw ParseError(0, "box file must be a JSON array");
  std::vector<InstanceBox> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& j = arr[i];
    try {
      InstanceBox b;
      const std::string name = j.at("class").get<std::string>();
      b.label = catalog.index_of(name);
      if (!catalog.is_thing(b.label)) throw UnknownClass(name);
      b.box = json_box(j.at("bbox"));
      b.score = j.value("score", 1.0);
      if (!(b.score >= 0.0 && b.score <= 1.0)) throw std::invalid_argument("score must lie in [0, 1]");
      out.push_back(b);
    } catch (const UnknownClass&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(i, std::string("box: ") + e.what());
    }
  }
  return out;
}

void save_boxes(const std::vector<InstanceBox>& boxes, const LabelCatalog& catalog, const std::filesystem::path& path) {
  write_text_file(path, boxes_to_json(boxes, catalog));
}

std::vector<InstanceBox> load_boxes(const std::filesystem::path& path, const LabelCatalog& catalog) {
  return boxes_from_json(read_text_file(path), catalog);
}

}  // namespace pancad
