#include "pancad/dxf.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "pancad/errors.hpp"

namespace pancad {

namespace {

struct GroupPair {
  int code = 0;
  std::string value;
  std::size_t line = 0;  // line of the group code
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<GroupPair> read_pairs(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  // A trailing newline does not start a new line.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  std::vector<GroupPair> pairs;
  for (std::size_t i = 0; i < lines.size(); i += 2) {
    std::string_view code_text = trim(lines[i]);
    if (i + 1 >= lines.size()) throw ParseError(i + 1, "dangling group code without a value");
    int code = 0;
    auto [ptr, ec] = std::from_chars(code_text.data(), code_text.data() + code_text.size(), code);
    if (ec != std::errc() || ptr != code_text.data() + code_text.size() || code_text.empty())
      throw ParseError(i + 1, "invalid group code '" + std::string(code_text) + "'");
    pairs.push_back({code, std::string(trim(lines[i + 1])), i + 1});
  }
  return pairs;
}

double to_number(const GroupPair& p) {
  const std::string& s = p.value;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw ParseError(p.line + 1, "non-numeric value '" + s + "' for group code " + std::to_string(p.code));
  return v;
}

struct RawEntity {
  std::string type;
  std::vector<GroupPair> fields;
};

double field(const RawEntity& e, int code, double fallback = 0.0) {
  for (const auto& f : e.fields)
    if (f.code == code) return to_number(f);
  return fallback;
}

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

// Returns false for unsupported types.
bool convert(const RawEntity& raw, Entity& out) {
  if (raw.type == "LINE") {
    out = make_segment({field(raw, 10), field(raw, 20)}, {field(raw, 11), field(raw, 21)});
    return true;
  }
  if (raw.type == "CIRCLE") {
    out = make_circle({field(raw, 10), field(raw, 20)}, field(raw, 40));
    return true;
  }
  if (raw.type == "ARC") {
    out = make_arc({field(raw, 10), field(raw, 20)}, field(raw, 40), deg2rad(field(raw, 50)), deg2rad(field(raw, 51)));
    return true;
  }
  if (raw.type == "LWPOLYLINE") {
    std::vector<Point2> v;
    bool closed = false;
    bool have_x = false;
    double x = 0.0;
    for (const auto& f : raw.fields) {
      if (f.code == 70) {
        closed = (static_cast<long>(to_number(f)) & 1) != 0;
      } else if (f.code == 10) {
        if (have_x) throw ParseError(f.line, "polyline vertex without y coordinate");
        x = to_number(f);
        have_x = true;
      } else if (f.code == 20) {
        if (!have_x) throw ParseError(f.line, "polyline y coordinate without x");
        v.push_back({x, to_number(f)});
        have_x = false;
      }
    }
    if (have_x) throw ParseError(raw.fields.back().line, "polyline vertex without y coordinate");
    if (closed && v.size() >= 2 && !(v.front() == v.back())) v.push_back(v.front());
    out = make_polyline(std::move(v));
    return true;
  }
  return false;
}

void put(std::ostringstream& out, int code, const std::string& value) { out << code << '\n' << value << '\n'; }

void put(std::ostringstream& out, int code, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  put(out, code, std::string(buf));
}

}  // namespace

DxfParseResult parse_dxf_subset(std::string_view text, const std::string& id, const LabelCatalog& catalog) {
  auto pairs = read_pairs(text);

  DxfParseResult result;
  result.drawing.id = id;
  result.drawing.catalog = catalog;

  std::size_t i = 0;
  // Locate "0 SECTION / 2 ENTITIES".
  bool found = false;
  for (; i + 1 < pairs.size(); ++i) {
    if (pairs[i].code == 0 && pairs[i].value == "SECTION" && pairs[i + 1].code == 2 &&
        pairs[i + 1].value == "ENTITIES") {
      i += 2;
      found = true;
      break;
    }
  }
  if (found) {
    std::vector<RawEntity> raw;
    for (; i < pairs.size(); ++i) {
      const auto& p = pairs[i];
      if (p.code == 0) {
        if (p.value == "ENDSEC") break;
        raw.push_back({p.value, {}});
      } else if (!raw.empty()) {
        raw.back().fields.push_back(p);
      }
    }
    for (const auto& r : raw) {
      Entity e;
      bool ok = false;
      try {
        ok = convert(r, e);
      } catch (const InvalidEntity&) {
        ok = false;
      }
      if (!ok) {
        ++result.skipped;
        continue;
      }
      result.drawing.records.push_back({std::move(e), kBackground, 0});
    }
  }
  result.drawing.extent = compute_extent(result.drawing.records);
  return result;
}

std::string write_dxf(const Drawing& d) {
  std::ostringstream out;
  put(out, 999, "pancad " + d.id);
  put(out, 0, "SECTION");
  put(out, 2, "ENTITIES");
  for (const auto& r : d.records) {
    const std::string layer = d.catalog.label_name(r.label);
    if (const auto* s = std::get_if<Segment>(&r.entity)) {
      put(out, 0, "LINE");
      put(out, 8, layer);
      put(out, 10, s->s.x);
      put(out, 20, s->s.y);
      put(out, 30, 0.0);
      put(out, 11, s->t.x);
      put(out, 21, s->t.y);
      put(out, 31, 0.0);
    } else if (const auto* a = std::get_if<Arc>(&r.entity)) {
      put(out, 0, "ARC");
      put(out, 8, layer);
      put(out, 10, a->center.x);
      put(out, 20, a->center.y);
      put(out, 30, 0.0);
      put(out, 40, a->radius);
      put(out, 50, rad2deg(a->start_angle));
      put(out, 51, rad2deg(a->end_angle));
    } else if (const auto* c = std::get_if<Circle>(&r.entity)) {
      put(out, 0, "CIRCLE");
      put(out, 8, layer);
      put(out, 10, c->center.x);
      put(out, 20, c->center.y);
      put(out, 30, 0.0);
      put(out, 40, c->radius);
    } else {
      const auto& v = std::get<Polyline>(r.entity).vertices;
      bool closed = v.size() >= 4 && v.front() == v.back();
      std::size_t n = closed ? v.size() - 1 : v.size();
      put(out, 0, "LWPOLYLINE");
      put(out, 8, layer);
      put(out, 90, std::to_string(n));
      put(out, 70, closed ? "1" : "0");
      for (std::size_t k = 0; k < n; ++k) {
        put(out, 10, v[k].x);
        put(out, 20, v[k].y);
      }
    }
  }
  put(out, 0, "ENDSEC");
  put(out, 0, "EOF");
  return out.str();
}

}  // namespace pancad
