#include "asg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "asg/errors.hpp"
#include "asg/kernels.hpp"
#include "asg/prng.hpp"

namespace asg {

namespace {

constexpr double kWallThickness = 0.10;
constexpr double kShellThickness = 0.03;
constexpr double kDoorWidth = 0.85;
constexpr double kCeilingHeight = 2.7;
constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Catalog

struct FurnitureSpec {
  const char* label;
  double wx_lo, wx_hi;  // footprint x
  double wy_lo, wy_hi;  // footprint y
  double h_lo, h_hi;    // height
  bool against_wall;
  bool support;    // small items may rest on top
  bool container;  // rendered hollow, may hold items
};

const std::vector<FurnitureSpec>& furniture_catalog() {
  static const std::vector<FurnitureSpec> catalog = {
      {"table", 1.00, 1.40, 0.70, 0.90, 0.72, 0.78, false, true, false},
      {"desk", 1.10, 1.40, 0.60, 0.80, 0.73, 0.76, true, true, false},
      {"coffee_table", 0.80, 1.10, 0.50, 0.60, 0.40, 0.48, false, true, false},
      {"chair", 0.45, 0.55, 0.45, 0.55, 0.85, 0.95, false, false, false},
      {"armchair", 0.70, 0.90, 0.70, 0.90, 0.70, 0.80, false, false, false},
      {"stool", 0.35, 0.45, 0.35, 0.45, 0.45, 0.60, false, true, false},
      {"bench", 1.10, 1.40, 0.35, 0.45, 0.45, 0.50, false, true, false},
      {"sofa", 1.60, 2.10, 0.80, 0.95, 0.75, 0.85, false, true, false},
      {"bed", 1.90, 2.10, 1.40, 1.70, 0.50, 0.60, true, true, false},
      {"wardrobe", 1.00, 1.40, 0.55, 0.65, 1.80, 2.00, true, false, true},
      {"bookshelf", 0.80, 1.10, 0.30, 0.40, 1.60, 1.90, true, false, true},
      {"cabinet", 0.70, 1.00, 0.40, 0.50, 0.80, 1.00, true, true, true},
      {"dresser", 0.90, 1.20, 0.45, 0.55, 0.80, 0.90, true, true, false},
      {"nightstand", 0.40, 0.50, 0.40, 0.50, 0.50, 0.60, false, true, false},
      {"tv_stand", 1.20, 1.60, 0.40, 0.50, 0.45, 0.55, true, true, false},
      {"counter", 1.60, 2.20, 0.60, 0.65, 0.88, 0.92, true, true, false},
      {"stove", 0.58, 0.62, 0.58, 0.62, 0.88, 0.92, true, true, false},
      {"refrigerator", 0.65, 0.75, 0.65, 0.75, 1.70, 1.90, true, false, false},
      {"sink", 0.50, 0.60, 0.45, 0.55, 0.85, 0.90, true, true, false},
      {"dishwasher", 0.58, 0.62, 0.58, 0.62, 0.83, 0.87, true, true, false},
      {"washing_machine", 0.58, 0.62, 0.58, 0.62, 0.83, 0.87, true, true, false},
      {"toilet", 0.38, 0.42, 0.58, 0.62, 0.72, 0.78, true, false, false},
      {"bathtub", 1.50, 1.70, 0.70, 0.80, 0.55, 0.60, true, false, false},
      {"plant", 0.30, 0.50, 0.30, 0.50, 0.80, 1.40, false, false, false},
      {"basket", 0.30, 0.40, 0.30, 0.40, 0.25, 0.32, false, false, false},
      {"lamp", 0.25, 0.35, 0.25, 0.35, 1.40, 1.70, false, false, false},
      {"mirror", 0.50, 0.70, 0.08, 0.12, 1.20, 1.50, true, false, false},
      {"radiator", 0.80, 1.20, 0.08, 0.12, 0.50, 0.60, true, false, false},
  };
  return catalog;
}

struct ItemSpec {
  const char* label;
  double wx_lo, wx_hi;
  double wy_lo, wy_hi;
  double h_lo, h_hi;
};

const std::vector<ItemSpec>& item_catalog() {
  static const std::vector<ItemSpec> catalog = {
      {"cup", 0.08, 0.10, 0.08, 0.10, 0.09, 0.12},
      {"plate", 0.20, 0.26, 0.20, 0.26, 0.03, 0.04},
      {"bowl", 0.14, 0.18, 0.14, 0.18, 0.07, 0.10},
      {"pan", 0.24, 0.30, 0.24, 0.30, 0.07, 0.09},
      {"pot", 0.18, 0.22, 0.18, 0.22, 0.14, 0.18},
      {"bottle", 0.07, 0.09, 0.07, 0.09, 0.24, 0.30},
      {"vase", 0.12, 0.16, 0.12, 0.16, 0.25, 0.35},
      {"book", 0.15, 0.22, 0.11, 0.16, 0.03, 0.06},
      {"laptop", 0.30, 0.34, 0.21, 0.24, 0.03, 0.04},
      {"monitor", 0.50, 0.60, 0.18, 0.22, 0.35, 0.45},
      {"keyboard", 0.40, 0.44, 0.13, 0.15, 0.03, 0.04},
      {"microwave", 0.44, 0.50, 0.33, 0.37, 0.26, 0.30},
      {"toaster", 0.24, 0.28, 0.16, 0.20, 0.16, 0.20},
      {"tv", 0.90, 1.20, 0.08, 0.12, 0.55, 0.70},
      {"clock", 0.15, 0.20, 0.05, 0.07, 0.15, 0.20},
      {"picture_frame", 0.20, 0.30, 0.03, 0.04, 0.15, 0.25},
      {"pillow", 0.40, 0.50, 0.28, 0.35, 0.12, 0.15},
      {"towel", 0.28, 0.34, 0.18, 0.22, 0.04, 0.06},
      {"box", 0.25, 0.40, 0.25, 0.40, 0.20, 0.35},
      {"basket", 0.30, 0.40, 0.30, 0.40, 0.25, 0.32},
      {"toy", 0.10, 0.20, 0.10, 0.20, 0.08, 0.18},
      {"shoe", 0.24, 0.28, 0.09, 0.11, 0.09, 0.11},
      {"backpack", 0.28, 0.34, 0.14, 0.18, 0.38, 0.44},
  };
  return catalog;
}

const FurnitureSpec& furniture_by_label(const std::string& label) {
  for (const FurnitureSpec& f : furniture_catalog())
    if (label == f.label) return f;
  throw SceneError("unknown furniture label: " + label);
}

struct RoomTemplate {
  const char* room_type;
  // (label, count_lo, count_hi)
  std::vector<std::tuple<const char*, int, int>> furniture;
  std::vector<const char*> surface_items;
  std::vector<const char*> container_items;
};

const std::vector<RoomTemplate>& room_templates() {
  static const std::vector<RoomTemplate> templates = {
      {"kitchen",
       {{"counter", 1, 1}, {"stove", 1, 1}, {"refrigerator", 1, 1}, {"sink", 1, 1},
        {"dishwasher", 0, 1}, {"cabinet", 1, 2}, {"table", 0, 1}, {"chair", 2, 4},
        {"stool", 0, 2}},
       {"cup", "plate", "bowl", "pan", "pot", "bottle", "toaster", "microwave"},
       {"pot", "plate", "bowl", "bottle", "box"}},
      {"living_room",
       {{"sofa", 1, 1}, {"armchair", 0, 2}, {"coffee_table", 1, 1}, {"tv_stand", 1, 1},
        {"bookshelf", 0, 2}, {"lamp", 0, 2}, {"plant", 0, 2}, {"bench", 0, 1},
        {"radiator", 0, 1}},
       {"book", "vase", "cup", "clock", "picture_frame", "pillow", "tv"},
       {"book", "vase", "box", "toy"}},
      {"bedroom",
       {{"bed", 1, 1}, {"wardrobe", 1, 1}, {"nightstand", 1, 2}, {"dresser", 0, 1},
        {"lamp", 0, 1}, {"plant", 0, 1}, {"mirror", 0, 1}},
       {"book", "clock", "pillow", "toy", "bottle", "picture_frame"},
       {"box", "shoe", "toy", "backpack"}},
      {"office",
       {{"desk", 1, 1}, {"chair", 1, 2}, {"bookshelf", 1, 2}, {"cabinet", 0, 1},
        {"plant", 0, 1}, {"lamp", 0, 1}},
       {"monitor", "keyboard", "laptop", "book", "cup", "picture_frame"},
       {"book", "box", "backpack"}},
      {"bathroom",
       {{"toilet", 1, 1}, {"sink", 1, 1}, {"bathtub", 0, 1}, {"washing_machine", 0, 1},
        {"cabinet", 0, 1}, {"basket", 0, 1}, {"mirror", 0, 1}, {"radiator", 0, 1}},
       {"towel", "bottle"},
       {"towel", "bottle"}},
  };
  return templates;
}

const RoomTemplate& template_by_type(const std::string& type) {
  for (const RoomTemplate& t : room_templates())
    if (type == t.room_type) return t;
  throw SceneError("unknown room type: " + type);
}

bool is_container_label(const std::string& label) {
  for (const FurnitureSpec& f : furniture_catalog())
    if (label == f.label) return f.container;
  return false;
}

}  // namespace

const std::vector<std::string>& canonical_labels() {
  static const std::vector<std::string> labels = [] {
    std::vector<std::string> out;
    for (const FurnitureSpec& f : furniture_catalog()) out.emplace_back(f.label);
    for (const ItemSpec& it : item_catalog()) out.emplace_back(it.label);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }();
  return labels;
}

std::vector<std::string> load_vocabulary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open vocabulary file: " + path);
  std::vector<std::string> labels;
  std::string line;
  bool versioned = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# format_version", 0) == 0) {
      if (line != "# format_version: 1")
        throw SceneError("vocabulary file " + path + ": unsupported format_version");
      versioned = true;
      continue;
    }
    if (!line.empty() && line[0] != '#') labels.push_back(line);
  }
  if (!versioned) throw SceneError("vocabulary file " + path + ": missing format_version");
  if (labels.empty()) throw SceneError("empty vocabulary file: " + path);
  return labels;
}

NoiseModel NoiseModel::zero() {
  NoiseModel n;
  n.depth_noise_rel = 0.0;
  n.scale_error_rel = 0.0;
  n.pose_trans_std = 0.0;
  n.pose_rot_std = 0.0;
  n.label_confusion_prob = 0.0;
  n.detection_dropout_prob = 0.0;
  return n;
}

void NoiseModel::validate() const {
  const bool ok = depth_noise_rel >= 0 && scale_error_rel >= 0 && pose_trans_std >= 0 &&
                  pose_rot_std >= 0 && label_confusion_prob >= 0 &&
                  label_confusion_prob <= 1 && detection_dropout_prob >= 0 &&
                  detection_dropout_prob <= 1 && min_pixels >= 1;
  if (!ok) throw std::invalid_argument("NoiseModel: out of range");
}

void SceneSpec::validate() const {
  if (objects.empty()) throw SceneError("scene has no objects");
  const auto& vocab = canonical_labels();
  for (const SceneObject& o : objects) {
    if (!std::binary_search(vocab.begin(), vocab.end(), o.label))
      throw SceneError("label not in vocabulary: " + o.label);
    const auto corners = o.box.footprint_corners();
    for (const Vec2& c : corners) {
      if (c.x < bounds.lo.x - 1e-6 || c.x > bounds.hi.x + 1e-6 || c.y < bounds.lo.y - 1e-6 ||
          c.y > bounds.hi.y + 1e-6)
        throw SceneError("object outside bounds: " + o.label);
    }
    if (o.box.zmin() < bounds.lo.z - 1e-6 || o.box.zmax() > bounds.hi.z + 1e-6)
      throw SceneError("object outside vertical bounds: " + o.label);
  }
}

// ---------------------------------------------------------------------------
// Procedural generation

namespace {

struct RoomLayout {
  Rect2 rect;       // interior footprint
  std::string type;
};

double rect_area(const Rect2& r) { return (r.xmax - r.xmin) * (r.ymax - r.ymin); }

// Splits walls around door openings; door centers recorded for clearance.
void add_partition(std::vector<Aabb>& walls, std::vector<Vec2>& doors, bool vertical,
                   double at, double lo, double hi, double door_center) {
  const double half = kWallThickness / 2.0;
  const double d0 = door_center - kDoorWidth / 2.0;
  const double d1 = door_center + kDoorWidth / 2.0;
  if (vertical) {
    if (d0 > lo)
      walls.push_back({{at - half, lo, 0.0}, {at + half, d0, kCeilingHeight}});
    if (hi > d1)
      walls.push_back({{at - half, d1, 0.0}, {at + half, hi, kCeilingHeight}});
    doors.push_back({at, door_center});
  } else {
    if (d0 > lo)
      walls.push_back({{lo, at - half, 0.0}, {d0, at + half, kCeilingHeight}});
    if (hi > d1)
      walls.push_back({{d1, at - half, 0.0}, {hi, at + half, kCeilingHeight}});
    doors.push_back({door_center, at});
  }
}

struct Placer {
  SceneSpec& scene;
  Rng& rng;
  std::vector<Vec2>& doors;

  bool collides(const OrientedBox& box, std::int64_t allow_containment_in = -1) const {
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
      const OrientedBox& other = scene.objects[i].box;
      const double vert = std::min(box.zmax(), other.zmax()) - std::max(box.zmin(), other.zmin());
      if (vert <= 0.01) continue;
      if (footprint_intersection_area(box, other) < 1e-4) continue;
      if (allow_containment_in >= 0 && i == static_cast<std::size_t>(allow_containment_in) &&
          containment_fraction(box, other) > 0.9)
        continue;
      return true;
    }
    return false;
  }

  bool blocks_door(const OrientedBox& box) const {
    OrientedBox probe;
    for (const Vec2& d : doors) {
      probe.center = {d.x, d.y, box.center.z};
      probe.extents = {0.05, 0.05, box.extents.z};
      if (footprint_distance(box, probe) < 0.65) return true;
    }
    return false;
  }

  // Floor-standing furniture inside the room rectangle.
  bool place_furniture(const FurnitureSpec& spec, const Rect2& room, int tries = 60) {
    for (int t = 0; t < tries; ++t) {
      const double wx = rng.uniform(spec.wx_lo, spec.wx_hi);
      const double wy = rng.uniform(spec.wy_lo, spec.wy_hi);
      const double h = rng.uniform(spec.h_lo, spec.h_hi);
      OrientedBox box;
      box.extents = {wx, wy, h};
      double yaw;
      double cx, cy;
      const double inset = 0.06;
      if (spec.against_wall) {
        const int side = static_cast<int>(rng.uniform_int(0, 3));
        yaw = (side < 2) ? 0.0 : canonical_yaw(kPi / 2.0);
        const double ex = (side < 2) ? wx : wy;  // world-x size after yaw
        const double ey = (side < 2) ? wy : wx;
        switch (side) {
          case 0:  // against ymin wall
            cx = rng.uniform(room.xmin + ex / 2 + inset, room.xmax - ex / 2 - inset);
            cy = room.ymin + ey / 2 + inset;
            break;
          case 1:  // against ymax wall
            cx = rng.uniform(room.xmin + ex / 2 + inset, room.xmax - ex / 2 - inset);
            cy = room.ymax - ey / 2 - inset;
            break;
          case 2:  // against xmin wall
            cx = room.xmin + ex / 2 + inset;
            cy = rng.uniform(room.ymin + ey / 2 + inset, room.ymax - ey / 2 - inset);
            break;
          default:  // against xmax wall
            cx = room.xmax - ex / 2 - inset;
            cy = rng.uniform(room.ymin + ey / 2 + inset, room.ymax - ey / 2 - inset);
            break;
        }
      } else {
        yaw = canonical_yaw(rng.uniform(-kPi / 2.0, kPi / 2.0));
        const double reach = 0.5 * std::hypot(wx, wy) + inset;
        if (room.xmax - room.xmin < 2 * reach || room.ymax - room.ymin < 2 * reach)
          continue;
        cx = rng.uniform(room.xmin + reach, room.xmax - reach);
        cy = rng.uniform(room.ymin + reach, room.ymax - reach);
      }
      box.center = {cx, cy, h / 2.0};
      box.yaw = yaw;
      if (collides(box) || blocks_door(box)) continue;
      scene.objects.push_back({spec.label, box});
      return true;
    }
    return false;
  }

  // Small item resting on a support surface; returns success.
  bool place_on_support(const ItemSpec& item, const OrientedBox& support, int tries = 25) {
    const double wx = rng.uniform(item.wx_lo, item.wx_hi);
    const double wy = rng.uniform(item.wy_lo, item.wy_hi);
    const double h = rng.uniform(item.h_lo, item.h_hi);
    const double margin = 0.02;
    const double ux = support.extents.x / 2 - std::hypot(wx, wy) / 2 - margin;
    const double uy = support.extents.y / 2 - std::hypot(wx, wy) / 2 - margin;
    if (ux <= 0.0 || uy <= 0.0) return false;
    if (support.zmax() + h > kCeilingHeight - 0.05) return false;
    for (int t = 0; t < tries; ++t) {
      const double u = rng.uniform(-ux, ux);
      const double v = rng.uniform(-uy, uy);
      const double c = std::cos(support.yaw), s = std::sin(support.yaw);
      OrientedBox box;
      box.center = {support.center.x + c * u - s * v, support.center.y + s * u + c * v,
                    support.zmax() + h / 2.0};
      box.yaw = canonical_yaw(support.yaw + rng.uniform(-0.3, 0.3));
      box.extents = {wx, wy, h};
      if (collides(box)) continue;
      scene.objects.push_back({item.label, box});
      return true;
    }
    return false;
  }

  // Small item inside a hollow container.
  bool place_in_container(const ItemSpec& item, std::size_t container_index,
                          int tries = 25) {
    const OrientedBox& outer = scene.objects[container_index].box;
    const double wx = rng.uniform(item.wx_lo, item.wx_hi);
    const double wy = rng.uniform(item.wy_lo, item.wy_hi);
    const double h = rng.uniform(item.h_lo, item.h_hi);
    const double wall = kShellThickness + 0.015;
    const double ux = outer.extents.x / 2 - wall - std::hypot(wx, wy) / 2;
    const double uy = outer.extents.y / 2 - wall - std::hypot(wx, wy) / 2;
    if (ux <= 0.0 || uy <= 0.0 || h > outer.extents.z - 2 * wall - 0.02) return false;
    for (int t = 0; t < tries; ++t) {
      const double u = rng.uniform(-ux, ux);
      const double v = rng.uniform(-uy, uy);
      const double c = std::cos(outer.yaw), s = std::sin(outer.yaw);
      OrientedBox box;
      box.center = {outer.center.x + c * u - s * v, outer.center.y + s * u + c * v,
                    outer.zmin() + kShellThickness + 0.01 + h / 2.0};
      box.yaw = outer.yaw;
      box.extents = {wx, wy, h};
      if (collides(box, static_cast<std::int64_t>(container_index))) continue;
      scene.objects.push_back({item.label, box});
      return true;
    }
    return false;
  }
};

const ItemSpec& item_by_label(const std::string& label) {
  for (const ItemSpec& it : item_catalog())
    if (label == it.label) return it;
  throw SceneError("unknown item label: " + label);
}

SceneSpec generate_apartment(std::uint64_t seed) {
  Rng rng(mix_seed(0xA9A27ull, seed));
  SceneSpec scene;
  scene.name = "apartment_" + std::to_string(seed);
  scene.bounds = {{0, 0, 0}, {12.0, 10.0, kCeilingHeight}};

  // Perimeter walls, floor and ceiling.
  const Aabb& b = scene.bounds;
  scene.walls.push_back({{b.lo.x, b.lo.y, -kWallThickness}, {b.hi.x, b.hi.y, 0.0}});
  scene.walls.push_back({{b.lo.x, b.lo.y, b.hi.z}, {b.hi.x, b.hi.y, b.hi.z + kWallThickness}});
  scene.walls.push_back({{b.lo.x, b.lo.y, 0}, {b.lo.x + kWallThickness, b.hi.y, b.hi.z}});
  scene.walls.push_back({{b.hi.x - kWallThickness, b.lo.y, 0}, {b.hi.x, b.hi.y, b.hi.z}});
  scene.walls.push_back({{b.lo.x, b.lo.y, 0}, {b.hi.x, b.lo.y + kWallThickness, b.hi.z}});
  scene.walls.push_back({{b.lo.x, b.hi.y - kWallThickness, 0}, {b.hi.x, b.hi.y, b.hi.z}});

  // Room partition: one vertical split, the left strip always split, the right
  // strip split with probability ~0.7 (3 or 4 rooms).
  std::vector<Vec2> doors;
  const double xs = rng.uniform(5.0, 7.0);
  const double yl = rng.uniform(4.0, 6.0);
  const bool split_right = rng.uniform() < 0.7;
  const double yr = split_right ? rng.uniform(4.0, 6.0) : 0.0;

  // The vertical wall's door must clear the crossing partitions.
  const bool door_below = rng.uniform() < 0.5;
  double door_y;
  if (door_below) {
    const double top = std::min(yl, split_right ? yr : yl) - 1.0;
    door_y = rng.uniform(b.lo.y + 1.0, top);
  } else {
    const double bottom = std::max(yl, split_right ? yr : yl) + 1.0;
    door_y = rng.uniform(bottom, b.hi.y - 1.0);
  }
  add_partition(scene.walls, doors, true, xs, b.lo.y, b.hi.y, door_y);
  add_partition(scene.walls, doors, false, yl, b.lo.x, xs, rng.uniform(b.lo.x + 1.0, xs - 1.0));
  if (split_right)
    add_partition(scene.walls, doors, false, yr, xs, b.hi.x, rng.uniform(xs + 1.0, b.hi.x - 1.0));

  const double in = kWallThickness + 0.02;
  const double hw = kWallThickness / 2.0 + 0.02;
  std::vector<RoomLayout> rooms;
  rooms.push_back({{b.lo.x + in, b.lo.y + in, xs - hw, yl - hw}, ""});
  rooms.push_back({{b.lo.x + in, yl + hw, xs - hw, b.hi.y - in}, ""});
  if (split_right) {
    rooms.push_back({{xs + hw, b.lo.y + in, b.hi.x - in, yr - hw}, ""});
    rooms.push_back({{xs + hw, yr + hw, b.hi.x - in, b.hi.y - in}, ""});
  } else {
    rooms.push_back({{xs + hw, b.lo.y + in, b.hi.x - in, b.hi.y - in}, ""});
  }

  std::vector<std::string> types = {"kitchen", "living_room", "bedroom"};
  types.push_back(rng.uniform() < 0.5 ? "office" : "bathroom");
  // Deterministic shuffle.
  for (std::size_t i = types.size(); i > 1; --i)
    std::swap(types[i - 1], types[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
  for (std::size_t i = 0; i < rooms.size(); ++i) rooms[i].type = types[i % types.size()];
  for (const RoomLayout& r : rooms) scene.rooms.push_back({r.type, r.rect});

  Placer placer{scene, rng, doors};

  // Base furniture per room.
  struct SupportInfo {
    std::size_t object_index;
    const RoomTemplate* tmpl;
  };
  std::vector<SupportInfo> supports;
  std::vector<SupportInfo> containers;

  for (const RoomLayout& room : rooms) {
    const RoomTemplate& tmpl = template_by_type(room.type);
    for (const auto& [label, lo, hi] : tmpl.furniture) {
      const int count = static_cast<int>(rng.uniform_int(lo, hi));
      for (int k = 0; k < count; ++k) {
        const FurnitureSpec& spec = furniture_by_label(label);
        if (placer.place_furniture(spec, room.rect)) {
          const std::size_t idx = scene.objects.size() - 1;
          if (spec.support) supports.push_back({idx, &tmpl});
          if (spec.container) containers.push_back({idx, &tmpl});
        }
      }
    }
  }

  // Fill with small items until the dense-clutter target is reached.
  const int target = static_cast<int>(rng.uniform_int(105, 125));
  int budget = 3000;
  while (static_cast<int>(scene.objects.size()) < target && budget-- > 0) {
    const double pick = rng.uniform();
    if (pick < 0.78 && !supports.empty()) {
      const SupportInfo& sup = supports[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(supports.size()) - 1))];
      const auto& pool = sup.tmpl->surface_items;
      const ItemSpec& item = item_by_label(pool[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))]);
      placer.place_on_support(item, scene.objects[sup.object_index].box);
    } else if (pick < 0.90 && !containers.empty()) {
      const SupportInfo& con = containers[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(containers.size()) - 1))];
      const auto& pool = con.tmpl->container_items;
      const ItemSpec& item = item_by_label(pool[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))]);
      placer.place_in_container(item, con.object_index);
    } else {
      const RoomLayout& room = rooms[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(rooms.size()) - 1))];
      static const char* floor_fillers[] = {"plant", "basket", "box", "backpack", "toy"};
      const char* label = floor_fillers[rng.uniform_int(0, 4)];
      FurnitureSpec spec;
      if (std::string_view(label) == "plant") {
        spec = furniture_by_label("plant");
      } else {
        const ItemSpec& item = item_by_label(label);
        spec = {label, item.wx_lo, item.wx_hi, item.wy_lo, item.wy_hi,
                item.h_lo, item.h_hi, false, false, false};
      }
      placer.place_furniture(spec, room.rect, 15);
    }
  }

  if (static_cast<int>(scene.objects.size()) < 100)
    throw GenerationError("apartment generation fell short of the object target (seed " +
                          std::to_string(seed) + ")");
  scene.validate();
  return scene;
}

SceneSpec generate_furnished_room(std::uint64_t seed) {
  Rng rng(mix_seed(0xF0011ull, seed));
  SceneSpec scene;
  scene.name = "furnished_room_" + std::to_string(seed);
  scene.bounds = {{0, 0, 0}, {7.0, 6.0, kCeilingHeight}};

  const Aabb& b = scene.bounds;
  scene.walls.push_back({{b.lo.x, b.lo.y, -kWallThickness}, {b.hi.x, b.hi.y, 0.0}});
  scene.walls.push_back({{b.lo.x, b.lo.y, b.hi.z}, {b.hi.x, b.hi.y, b.hi.z + kWallThickness}});
  scene.walls.push_back({{b.lo.x, b.lo.y, 0}, {b.lo.x + kWallThickness, b.hi.y, b.hi.z}});
  scene.walls.push_back({{b.hi.x - kWallThickness, b.lo.y, 0}, {b.hi.x, b.hi.y, b.hi.z}});
  scene.walls.push_back({{b.lo.x, b.lo.y, 0}, {b.hi.x, b.lo.y + kWallThickness, b.hi.z}});
  scene.walls.push_back({{b.lo.x, b.hi.y - kWallThickness, 0}, {b.hi.x, b.hi.y, b.hi.z}});

  const double in = kWallThickness + 0.02;
  const Rect2 room{b.lo.x + in, b.lo.y + in, b.hi.x - in, b.hi.y - in};
  static const char* room_choices[] = {"living_room", "bedroom", "office"};
  const std::string type = room_choices[rng.uniform_int(0, 2)];
  scene.rooms.push_back({type, room});

  std::vector<Vec2> doors;  // none
  Placer placer{scene, rng, doors};

  const RoomTemplate& tmpl = template_by_type(type);
  for (const auto& [label, lo, hi] : tmpl.furniture) {
    const int count = static_cast<int>(rng.uniform_int(lo, hi));
    for (int k = 0; k < count; ++k)
      placer.place_furniture(furniture_by_label(label), room);
  }

  // Pad with freestanding furniture up to the target count.
  static const char* fillers[] = {"chair", "plant", "lamp", "armchair", "stool",
                                  "bookshelf", "cabinet", "bench", "coffee_table",
                                  "dresser"};
  const int target = static_cast<int>(rng.uniform_int(21, 26));
  int budget = 600;
  while (static_cast<int>(scene.objects.size()) < target && budget-- > 0) {
    const std::string label = fillers[rng.uniform_int(0, 9)];
    placer.place_furniture(furniture_by_label(label), room, 20);
  }

  if (static_cast<int>(scene.objects.size()) < 20)
    throw GenerationError("furnished_room generation fell short (seed " +
                          std::to_string(seed) + ")");
  scene.validate();
  return scene;
}

}  // namespace

SceneSpec generate_scene(SceneTemplate tmpl, std::uint64_t seed) {
  return tmpl == SceneTemplate::apartment ? generate_apartment(seed)
                                          : generate_furnished_room(seed);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct RenderPrimitives {
  kernels::BoxesSoA boxes;
  std::vector<std::int32_t> object_index;  // -1 for walls

  void add_box(const OrientedBox& box, std::int32_t idx) {
    boxes.push(box.center.x, box.center.y, box.center.z, box.yaw, box.extents.x / 2,
               box.extents.y / 2, box.extents.z / 2);
    object_index.push_back(idx);
  }
  void add_aabb(const Aabb& a, std::int32_t idx) {
    const Vec3 c = a.center();
    const Vec3 s = a.size();
    boxes.push(c.x, c.y, c.z, 0.0, s.x / 2, s.y / 2, s.z / 2);
    object_index.push_back(idx);
  }
};

// Hollow shell for container objects: five slabs, open toward the room
// interior so contents are observable.
void add_container_shell(RenderPrimitives& prims, const OrientedBox& box,
                         const Vec3& toward, std::int32_t idx) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double dx = toward.x - box.center.x, dy = toward.y - box.center.y;
  const double lx = c * dx + s * dy;
  const double ly = c * dy - s * dx;
  // Open local axis: the footprint side facing the room interior.
  int open_axis;  // 0:+x 1:-x 2:+y 3:-y (local)
  if (std::abs(lx) >= std::abs(ly))
    open_axis = lx >= 0 ? 0 : 1;
  else
    open_axis = ly >= 0 ? 2 : 3;

  const double w = kShellThickness;
  const double hx = box.extents.x / 2, hy = box.extents.y / 2, hz = box.extents.z / 2;
  auto local_slab = [&](double cx_l, double cy_l, double cz_l, double ex, double ey,
                        double ez) {
    OrientedBox slab;
    slab.center = {box.center.x + c * cx_l - s * cy_l, box.center.y + s * cx_l + c * cy_l,
                   box.center.z + cz_l};
    slab.yaw = box.yaw;
    slab.extents = {ex, ey, ez};
    prims.add_box(slab, idx);
  };
  local_slab(0, 0, -hz + w / 2, 2 * hx, 2 * hy, w);  // bottom
  local_slab(0, 0, hz - w / 2, 2 * hx, 2 * hy, w);   // top
  if (open_axis != 0) local_slab(hx - w / 2, 0, 0, w, 2 * hy, 2 * hz);
  if (open_axis != 1) local_slab(-hx + w / 2, 0, 0, w, 2 * hy, 2 * hz);
  if (open_axis != 2) local_slab(0, hy - w / 2, 0, 2 * hx, w, 2 * hz);
  if (open_axis != 3) local_slab(0, -hy + w / 2, 0, 2 * hx, w, 2 * hz);
}

Vec3 room_interior_point(const SceneSpec& scene, const OrientedBox& box) {
  for (const SceneRoom& r : scene.rooms) {
    if (box.center.x >= r.footprint.xmin && box.center.x <= r.footprint.xmax &&
        box.center.y >= r.footprint.ymin && box.center.y <= r.footprint.ymax)
      return {(r.footprint.xmin + r.footprint.xmax) / 2,
              (r.footprint.ymin + r.footprint.ymax) / 2, box.center.z};
  }
  return scene.bounds.center();
}

RenderPrimitives build_primitives(const SceneSpec& scene) {
  RenderPrimitives prims;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& obj = scene.objects[i];
    if (is_container_label(obj.label))
      add_container_shell(prims, obj.box, room_interior_point(scene, obj.box),
                          static_cast<std::int32_t>(i));
    else
      prims.add_box(obj.box, static_cast<std::int32_t>(i));
  }
  for (const Aabb& wall : scene.walls) prims.add_aabb(wall, -1);
  return prims;
}

// First-hit instance id and range per pixel; -2 marks a miss.
void cast_view(const RenderPrimitives& prims, const Pose& pose,
               const CameraModel& camera, std::vector<double>& range,
               std::vector<std::int32_t>& instance, std::vector<Vec3>& rays_cam) {
  rays_cam = camera.pixel_rays();
  const std::size_t n = rays_cam.size();
  range.assign(n, 0.0);
  instance.assign(n, -2);
  const double origin[3] = {pose.translation.x, pose.translation.y, pose.translation.z};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = pose.rotation.apply(rays_cam[i]);
    const double dir[3] = {d.x, d.y, d.z};
    const kernels::RayHit hit =
        kernels::ray_first_hit(origin, dir, prims.boxes, 1e-9, camera.max_range);
    if (hit.index >= 0) {
      range[i] = hit.t;
      instance[i] = prims.object_index[static_cast<std::size_t>(hit.index)];
    }
  }
}

}  // namespace

std::vector<RenderedView> render_batch(const SceneSpec& scene,
                                       const std::vector<Pose>& poses,
                                       const CameraModel& camera,
                                       const NoiseModel& noise,
                                       std::uint64_t experiment_seed,
                                       std::uint64_t step_seed, int embedding_dim) {
  noise.validate();
  camera.validate();
  if (poses.empty()) throw std::invalid_argument("render_batch: no poses");
  for (const Pose& p : poses)
    if (!scene.bounds.contains(p.translation))
      throw std::invalid_argument("render_batch: pose outside scene bounds");

  const RenderPrimitives prims = build_primitives(scene);
  const auto& vocab = canonical_labels();

  // One metric-scale perturbation per inference batch (shared across views).
  Rng batch_rng(mix_seed(experiment_seed, step_seed, 0xBA7C4ull));
  const double metric_scale = std::exp(batch_rng.gaussian(0.0, noise.scale_error_rel));

  std::vector<RenderedView> out;
  out.reserve(poses.size());

  for (std::size_t vi = 0; vi < poses.size(); ++vi) {
    Rng rng(mix_seed(experiment_seed, step_seed, 0x71E11ull, vi));
    const Pose& pose = poses[vi];

    RenderedView rv;
    rv.true_pose = pose;

    // Relative pose w.r.t. the batch reference; the reference frame itself is
    // exact by construction, later frames carry pose noise.
    if (vi == 0) {
      rv.view.relative_pose = Pose::identity();
    } else {
      Pose rel = poses[0].inverse().compose(pose);
      const double tn = noise.pose_trans_std;
      const double rn = noise.pose_rot_std;
      rel.translation.x += rng.gaussian(0.0, tn);
      rel.translation.y += rng.gaussian(0.0, tn);
      rel.translation.z += rng.gaussian(0.0, tn);
      const Mat3 wobble = Mat3::rot_z(rng.gaussian(0.0, rn)) *
                          Mat3::rot_y(rng.gaussian(0.0, rn)) *
                          Mat3::rot_x(rng.gaussian(0.0, rn));
      rel.rotation = wobble * rel.rotation;
      rv.view.relative_pose = rel;
    }

    std::vector<double> range;
    std::vector<std::int32_t> instance;
    std::vector<Vec3> rays_cam;
    cast_view(prims, pose, camera, range, instance, rays_cam);

    const std::size_t n = rays_cam.size();
    rv.view.ray_x.resize(n);
    rv.view.ray_y.resize(n);
    rv.view.ray_z.resize(n);
    rv.view.depth.assign(n, 0.0);
    rv.view.valid.assign(n, 0);
    rv.view.metric_scale = metric_scale;

    for (std::size_t i = 0; i < n; ++i) {
      rv.view.ray_x[i] = rays_cam[i].x;
      rv.view.ray_y[i] = rays_cam[i].y;
      rv.view.ray_z[i] = rays_cam[i].z;
      if (instance[i] != -2) {
        double d = range[i];
        if (noise.depth_noise_rel > 0.0)
          d *= std::exp(rng.gaussian(0.0, noise.depth_noise_rel));
        rv.view.depth[i] = d;
        rv.view.valid[i] = 1;
      }
    }

    // Group hit pixels into detections, ascending object index.
    std::map<std::int32_t, std::vector<std::size_t>> hits;
    for (std::size_t i = 0; i < n; ++i)
      if (instance[i] >= 0) hits[instance[i]].push_back(i);

    for (const auto& [obj_idx, pixels] : hits) {
      if (static_cast<int>(pixels.size()) < noise.min_pixels) continue;
      const bool dropped = rng.bernoulli(noise.detection_dropout_prob);
      const bool confused = rng.bernoulli(noise.label_confusion_prob);
      std::string label = scene.objects[static_cast<std::size_t>(obj_idx)].label;
      if (confused) {
        // Uniform over the other labels.
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(vocab.size()) - 2));
        std::size_t vocab_idx = 0;
        std::size_t counted = 0;
        for (std::size_t k = 0; k < vocab.size(); ++k) {
          if (vocab[k] == label) continue;
          if (counted == pick) {
            vocab_idx = k;
            break;
          }
          ++counted;
        }
        label = vocab[vocab_idx];
      }
      if (dropped) continue;

      Detection det;
      det.label = label;
      det.embedding = embed_label(label, embedding_dim, experiment_seed);
      det.points_camera.reserve(pixels.size());
      for (std::size_t pix : pixels)
        det.points_camera.push_back(rays_cam[pix] * rv.view.depth[pix]);
      det.source = DetectionSource::onboard;
      rv.detections.push_back(std::move(det));
    }

    out.push_back(std::move(rv));
  }
  return out;
}

RenderedView render_view(const SceneSpec& scene, const Pose& pose,
                         const CameraModel& camera, const NoiseModel& noise,
                         std::uint64_t experiment_seed, std::uint64_t step_seed,
                         int embedding_dim) {
  return render_batch(scene, {pose}, camera, noise, experiment_seed, step_seed,
                      embedding_dim)
      .front();
}

std::vector<int> visible_object_indices(const SceneSpec& scene, const Pose& pose,
                                        const CameraModel& camera, int min_pixels) {
  const RenderPrimitives prims = build_primitives(scene);
  std::vector<double> range;
  std::vector<std::int32_t> instance;
  std::vector<Vec3> rays_cam;
  cast_view(prims, pose, camera, range, instance, rays_cam);
  std::map<std::int32_t, int> counts;
  for (std::int32_t id : instance)
    if (id >= 0) counts[id]++;
  std::vector<int> out;
  for (const auto& [id, count] : counts)
    if (count >= min_pixels) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------
// Viewpoints

ViewpointSet navigable_viewpoints(const SceneSpec& scene, double spacing,
                                  int headings) {
  if (!(spacing > 0.0)) throw std::invalid_argument("navigable_viewpoints: spacing <= 0");
  if (headings < 1) throw std::invalid_argument("navigable_viewpoints: headings < 1");

  ViewpointSet set;
  set.spacing = spacing;
  set.headings = headings;

  const Aabb& b = scene.bounds;
  const double clearance = 0.20;

  std::vector<std::pair<double, double>> positions;
  for (double x = b.lo.x; x <= b.hi.x + 1e-9; x += spacing) {
    for (double y = b.lo.y; y <= b.hi.y + 1e-9; y += spacing) {
      bool blocked = false;
      // Wall collision at body height.
      for (const Aabb& w : scene.walls) {
        if (w.hi.z < 0.2 || w.lo.z > 1.6) continue;
        if (x >= w.lo.x - clearance && x <= w.hi.x + clearance &&
            y >= w.lo.y - clearance && y <= w.hi.y + clearance) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        // Floor-standing obstacle collision.
        OrientedBox probe;
        probe.center = {x, y, 0.5};
        probe.extents = {0.01, 0.01, 1.0};
        for (const SceneObject& obj : scene.objects) {
          if (obj.box.zmin() > 0.8) continue;  // items on furniture do not block
          if (footprint_distance(obj.box, probe) < clearance) {
            blocked = true;
            break;
          }
        }
      }
      if (!blocked) positions.emplace_back(x, y);
    }
  }

  if (positions.empty())
    throw SceneUnnavigableError("no navigable viewpoint position in scene " + scene.name);

  int id = 0;
  for (const auto& [x, y] : positions) {
    for (int h = 0; h < headings; ++h) {
      const double heading = 2.0 * kPi * h / headings;
      Viewpoint vp;
      vp.id = id++;
      vp.position = {x, y, kSensorHeight};
      vp.heading = heading;
      vp.pose = make_camera_pose(vp.position, heading, 0.0);
      set.viewpoints.push_back(vp);
    }
  }
  return set;
}

std::vector<Pose> external_camera_preset(const SceneSpec& scene, int count) {
  if (count < 1) throw std::invalid_argument("external_camera_preset: count < 1");
  std::vector<std::pair<double, Vec2>> room_centers;  // (-area, center) for sorting
  for (const SceneRoom& r : scene.rooms)
    room_centers.push_back({-rect_area(r.footprint),
                            {(r.footprint.xmin + r.footprint.xmax) / 2,
                             (r.footprint.ymin + r.footprint.ymax) / 2}});
  std::stable_sort(room_centers.begin(), room_centers.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  // Cameras ring the largest room and look back across its center: they share
  // the central objects from opposing angles (the source of multi-view
  // duplicate fragments) while each frustum also sweeps new area beyond.
  const Vec2 anchor = room_centers.front().second;
  auto clamp_inside = [&](Vec2 p) {
    p.x = std::clamp(p.x, scene.bounds.lo.x + 0.5, scene.bounds.hi.x - 0.5);
    p.y = std::clamp(p.y, scene.bounds.lo.y + 0.5, scene.bounds.hi.y - 0.5);
    return p;
  };

  std::vector<Pose> cams;
  const double ring_radius = 1.5;
  for (int i = 0; i < count; ++i) {
    const double angle = 2.0 * kPi * i / 3.0 + 0.4;
    const Vec2 at = clamp_inside(
        {anchor.x + ring_radius * std::cos(angle), anchor.y + ring_radius * std::sin(angle)});
    const double heading = std::atan2(anchor.y - at.y, anchor.x - at.x);
    cams.push_back(make_camera_pose({at.x, at.y, kExternalCamHeight}, heading,
                                    kExternalCamPitch));
  }
  return cams;
}

// ---------------------------------------------------------------------------
// JSON I/O

namespace {

nlohmann::ordered_json vec3_json(const Vec3& v) { return {v.x, v.y, v.z}; }

Vec3 vec3_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw SceneError(std::string("expected [x,y,z] array for ") + what);
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

OrientedBox box_from(const nlohmann::json& j) {
  OrientedBox box;
  box.center = vec3_from(j.at("center"), "box.center");
  box.yaw = j.at("yaw").get<double>();
  box.extents = vec3_from(j.at("extents"), "box.extents");
  if (!(box.extents.x > 0 && box.extents.y > 0 && box.extents.z > 0))
    throw SceneError("box extents must be positive");
  return box;
}

nlohmann::ordered_json box_json(const OrientedBox& b) {
  return {{"center", vec3_json(b.center)}, {"yaw", b.yaw}, {"extents", vec3_json(b.extents)}};
}

}  // namespace

nlohmann::ordered_json scene_to_json(const SceneSpec& scene) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["name"] = scene.name;
  j["bounds"] = {{"lo", vec3_json(scene.bounds.lo)}, {"hi", vec3_json(scene.bounds.hi)}};
  j["objects"] = nlohmann::ordered_json::array();
  for (const SceneObject& o : scene.objects)
    j["objects"].push_back({{"label", o.label}, {"box", box_json(o.box)}});
  j["rooms"] = nlohmann::ordered_json::array();
  for (const SceneRoom& r : scene.rooms)
    j["rooms"].push_back({{"room_type", r.room_type},
                          {"footprint", {{"lo", {r.footprint.xmin, r.footprint.ymin}},
                                         {"hi", {r.footprint.xmax, r.footprint.ymax}}}}});
  j["walls"] = nlohmann::ordered_json::array();
  for (const Aabb& w : scene.walls)
    j["walls"].push_back({{"lo", vec3_json(w.lo)}, {"hi", vec3_json(w.hi)}});
  return j;
}

SceneSpec scene_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
      throw SceneError("scene file: unsupported or missing format_version");
    SceneSpec s;
    s.name = j.value("name", "unnamed");
    s.bounds.lo = vec3_from(j.at("bounds").at("lo"), "bounds.lo");
    s.bounds.hi = vec3_from(j.at("bounds").at("hi"), "bounds.hi");
    for (const auto& o : j.at("objects"))
      s.objects.push_back({o.at("label").get<std::string>(), box_from(o.at("box"))});
    if (j.contains("rooms")) {
      for (const auto& r : j.at("rooms")) {
        SceneRoom room;
        room.room_type = r.at("room_type").get<std::string>();
        const auto& fp = r.at("footprint");
        room.footprint = {fp.at("lo")[0].get<double>(), fp.at("lo")[1].get<double>(),
                          fp.at("hi")[0].get<double>(), fp.at("hi")[1].get<double>()};
        s.rooms.push_back(room);
      }
    }
    if (j.contains("walls"))
      for (const auto& w : j.at("walls"))
        s.walls.push_back({vec3_from(w.at("lo"), "wall.lo"), vec3_from(w.at("hi"), "wall.hi")});
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SceneError(std::string("scene file: ") + e.what());
  }
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot open scene file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SceneError("scene file " + path + ": " + e.what());
  }
  return scene_from_json(j);
}

void save_scene(const SceneSpec& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SceneError("cannot write scene file: " + path);
  out << scene_to_json(scene).dump(2) << "\n";
}

}  // namespace asg
