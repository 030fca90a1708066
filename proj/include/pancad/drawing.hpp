#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pancad/geometry.hpp"

namespace pancad {

/// Class index of unlabeled entities.
inline constexpr int kBackground = -1;

/// Ordered class names partitioned into things and stuff.
class LabelCatalog {
 public:
  LabelCatalog() = default;
  LabelCatalog(std::vector<std::string> names, std::vector<bool> is_stuff);

  /// The 28 thing classes and the two stuff classes (parking, wall).
  static LabelCatalog full();
  /// Five-class subset used by the synthetic generator by default.
  static LabelCatalog synthetic();
  /// Builds a catalog from names; wall and parking are stuff, the rest things.
  static LabelCatalog from_names(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(int index) const;
  /// Name of a class index, or "background".
  std::string label_name(int index) const;
  /// Throws UnknownClass. "background" maps to kBackground.
  int index_of(std::string_view name) const;
  std::optional<int> find(std::string_view name) const;
  bool is_stuff(int index) const;
  bool is_thing(int index) const;
  std::vector<int> thing_classes() const;
  std::vector<int> stuff_classes() const;

  friend bool operator==(const LabelCatalog&, const LabelCatalog&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<bool> stuff_;
};

struct EntityRecord {
  Entity entity;
  int label = kBackground;
  int instance = 0;
  friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

struct Drawing {
  std::string id;
  LabelCatalog catalog;
  std::vector<EntityRecord> records;
  Box extent;

  std::size_t size() const { return records.size(); }
  friend bool operator==(const Drawing&, const Drawing&) = default;
};

/// Union of all entity boxes; a zero box at the origin when there are none.
Box compute_extent(const std::vector<EntityRecord>& records);

/// Throws InvalidEntity / UnknownClass when the drawing breaks an invariant.
void validate(const Drawing& d);

struct Symbol {
  int label = kBackground;
  int instance = 0;
  std::vector<std::size_t> entities;  // ascending
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

enum class StuffGrouping {
  kPerClass,      // one symbol per stuff class per drawing
  kPerComponent,  // one symbol per touching component of a stuff class
};

/// Groups non-background entities into symbols. Things group by (label,
/// instance); thing entities with instance 0 belong to no symbol. Output is
/// sorted by (label, instance, first entity).
std::vector<Symbol> group_symbols(const Drawing& d, StuffGrouping stuff = StuffGrouping::kPerClass,
                                  double touch_tolerance = 1e-6);

struct InstanceBox {
  int label = kBackground;
  Box box;
  double score = 1.0;
  friend bool operator==(const InstanceBox&, const InstanceBox&) = default;
};

/// One box per thing symbol, the union of member entity boxes.
std::vector<InstanceBox> gt_instance_boxes(const Drawing& d);

// JSON-lines drawing files.
std::string drawing_to_jsonl(const Drawing& d);
Drawing drawing_from_jsonl(std::string_view text);
void save_drawing(const Drawing& d, const std::filesystem::path& path);
Drawing load_drawing(const std::filesystem::path& path);

// COCO-flavored box files.
std::string boxes_to_json(const std::vector<InstanceBox>& boxes, const LabelCatalog& catalog);
std::vector<InstanceBox> boxes_from_json(std::string_view text, const LabelCatalog& catalog);
void save_boxes(const std::vector<InstanceBox>& boxes, const LabelCatalog& catalog, const std::filesystem::path& path);
std::vector<InstanceBox> load_boxes(const std::filesystem::path& path, const LabelCatalog& catalog);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pancad
