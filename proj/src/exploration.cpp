#include "asg/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "asg/errors.hpp"
#include "asg/prng.hpp"

// httplib pulls in system socket headers; keep it out of the public header.
#include <httplib.h>

namespace asg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxSamples = 16;

const char* kBuiltinPriorsJson = R"JSON({
  "format_version": 1,
  "missing_label_weight": 0.001,
  "room_types": {
    "kitchen": {
      "prior": 0.20,
      "object_count": [4, 9],
      "labels": {
        "counter": 3.0, "stove": 5.0, "refrigerator": 4.0, "sink": 4.0,
        "dishwasher": 1.5, "cabinet": 2.0, "table": 1.5, "chair": 2.5,
        "stool": 1.0, "cup": 2.0, "plate": 2.0, "bowl": 1.5, "pan": 1.5,
        "pot": 1.5, "bottle": 1.5, "toaster": 1.0, "microwave": 1.0, "box": 0.5
      }
    },
    "living_room": {
      "prior": 0.25,
      "object_count": [4, 9],
      "labels": {
        "sofa": 4.0, "armchair": 2.0, "coffee_table": 3.0, "tv_stand": 2.5,
        "tv": 2.5, "bookshelf": 2.0, "lamp": 1.5, "plant": 1.5, "bench": 1.0,
        "radiator": 1.0, "book": 2.0, "vase": 1.5, "cup": 1.0, "clock": 1.0,
        "picture_frame": 1.5, "pillow": 1.5, "box": 0.5, "toy": 0.5
      }
    },
    "bedroom": {
      "prior": 0.25,
      "object_count": [3, 8],
      "labels": {
        "bed": 5.0, "wardrobe": 3.0, "nightstand": 2.5, "dresser": 2.0,
        "lamp": 1.5, "plant": 1.0, "mirror": 1.5, "book": 1.5, "clock": 1.5,
        "pillow": 2.0, "toy": 1.0, "bottle": 0.5, "shoe": 1.0, "backpack": 1.0,
        "box": 0.5, "picture_frame": 1.0
      }
    },
    "office": {
      "prior": 0.15,
      "object_count": [3, 8],
      "labels": {
        "desk": 5.0, "chair": 3.0, "bookshelf": 2.5, "cabinet": 2.0,
        "plant": 1.0, "lamp": 1.5, "monitor": 3.0, "keyboard": 2.5,
        "laptop": 2.0, "book": 2.0, "cup": 1.0, "picture_frame": 1.0,
        "backpack": 1.0, "box": 0.5
      }
    },
    "bathroom": {
      "prior": 0.15,
      "object_count": [2, 5],
      "labels": {
        "toilet": 5.0, "sink": 3.0, "bathtub": 2.5, "washing_machine": 2.0,
        "cabinet": 1.0, "basket": 1.5, "mirror": 2.0, "radiator": 1.0,
        "towel": 2.5, "bottle": 1.5
      }
    }
  },
  "label_sizes": {
    "table": {"lo": [1.00, 0.70, 0.72], "hi": [1.40, 0.90, 0.78]},
    "desk": {"lo": [1.10, 0.60, 0.73], "hi": [1.40, 0.80, 0.76]},
    "coffee_table": {"lo": [0.80, 0.50, 0.40], "hi": [1.10, 0.60, 0.48]},
    "chair": {"lo": [0.45, 0.45, 0.85], "hi": [0.55, 0.55, 0.95]},
    "armchair": {"lo": [0.70, 0.70, 0.70], "hi": [0.90, 0.90, 0.80]},
    "stool": {"lo": [0.35, 0.35, 0.45], "hi": [0.45, 0.45, 0.60]},
    "bench": {"lo": [1.10, 0.35, 0.45], "hi": [1.40, 0.45, 0.50]},
    "sofa": {"lo": [1.60, 0.80, 0.75], "hi": [2.10, 0.95, 0.85]},
    "bed": {"lo": [1.90, 1.40, 0.50], "hi": [2.10, 1.70, 0.60]},
    "wardrobe": {"lo": [1.00, 0.55, 1.80], "hi": [1.40, 0.65, 2.00]},
    "bookshelf": {"lo": [0.80, 0.30, 1.60], "hi": [1.10, 0.40, 1.90]},
    "cabinet": {"lo": [0.70, 0.40, 0.80], "hi": [1.00, 0.50, 1.00]},
    "dresser": {"lo": [0.90, 0.45, 0.80], "hi": [1.20, 0.55, 0.90]},
    "nightstand": {"lo": [0.40, 0.40, 0.50], "hi": [0.50, 0.50, 0.60]},
    "tv_stand": {"lo": [1.20, 0.40, 0.45], "hi": [1.60, 0.50, 0.55]},
    "counter": {"lo": [1.60, 0.60, 0.88], "hi": [2.20, 0.65, 0.92]},
    "stove": {"lo": [0.58, 0.58, 0.88], "hi": [0.62, 0.62, 0.92]},
    "refrigerator": {"lo": [0.65, 0.65, 1.70], "hi": [0.75, 0.75, 1.90]},
    "sink": {"lo": [0.50, 0.45, 0.85], "hi": [0.60, 0.55, 0.90]},
    "dishwasher": {"lo": [0.58, 0.58, 0.83], "hi": [0.62, 0.62, 0.87]},
    "washing_machine": {"lo": [0.58, 0.58, 0.83], "hi": [0.62, 0.62, 0.87]},
    "toilet": {"lo": [0.38, 0.58, 0.72], "hi": [0.42, 0.62, 0.78]},
    "bathtub": {"lo": [1.50, 0.70, 0.55], "hi": [1.70, 0.80, 0.60]},
    "plant": {"lo": [0.30, 0.30, 0.80], "hi": [0.50, 0.50, 1.40]},
    "lamp": {"lo": [0.25, 0.25, 1.40], "hi": [0.35, 0.35, 1.70]},
    "mirror": {"lo": [0.50, 0.08, 1.20], "hi": [0.70, 0.12, 1.50]},
    "radiator": {"lo": [0.80, 0.08, 0.50], "hi": [1.20, 0.12, 0.60]},
    "cup": {"lo": [0.08, 0.08, 0.09], "hi": [0.10, 0.10, 0.12]},
    "plate": {"lo": [0.20, 0.20, 0.03], "hi": [0.26, 0.26, 0.04]},
    "bowl": {"lo": [0.14, 0.14, 0.07], "hi": [0.18, 0.18, 0.10]},
    "pan": {"lo": [0.24, 0.24, 0.07], "hi": [0.30, 0.30, 0.09]},
    "pot": {"lo": [0.18, 0.18, 0.14], "hi": [0.22, 0.22, 0.18]},
    "bottle": {"lo": [0.07, 0.07, 0.24], "hi": [0.09, 0.09, 0.30]},
    "vase": {"lo": [0.12, 0.12, 0.25], "hi": [0.16, 0.16, 0.35]},
    "book": {"lo": [0.15, 0.11, 0.03], "hi": [0.22, 0.16, 0.06]},
    "laptop": {"lo": [0.30, 0.21, 0.03], "hi": [0.34, 0.24, 0.04]},
    "monitor": {"lo": [0.50, 0.18, 0.35], "hi": [0.60, 0.22, 0.45]},
    "keyboard": {"lo": [0.40, 0.13, 0.03], "hi": [0.44, 0.15, 0.04]},
    "microwave": {"lo": [0.44, 0.33, 0.26], "hi": [0.50, 0.37, 0.30]},
    "toaster": {"lo": [0.24, 0.16, 0.16], "hi": [0.28, 0.20, 0.20]},
    "tv": {"lo": [0.90, 0.08, 0.55], "hi": [1.20, 0.12, 0.70]},
    "clock": {"lo": [0.15, 0.05, 0.15], "hi": [0.20, 0.07, 0.20]},
    "picture_frame": {"lo": [0.20, 0.03, 0.15], "hi": [0.30, 0.04, 0.25]},
    "pillow": {"lo": [0.40, 0.28, 0.12], "hi": [0.50, 0.35, 0.15]},
    "towel": {"lo": [0.28, 0.18, 0.04], "hi": [0.34, 0.22, 0.06]},
    "box": {"lo": [0.25, 0.25, 0.20], "hi": [0.40, 0.40, 0.35]},
    "basket": {"lo": [0.30, 0.30, 0.25], "hi": [0.40, 0.40, 0.32]},
    "toy": {"lo": [0.10, 0.10, 0.08], "hi": [0.20, 0.20, 0.18]},
    "shoe": {"lo": [0.24, 0.09, 0.09], "hi": [0.28, 0.11, 0.11]},
    "backpack": {"lo": [0.28, 0.14, 0.38], "hi": [0.34, 0.18, 0.44]}
  }
})JSON";

int label_id(const std::string& label) {
  const auto& vocab = canonical_labels();
  const auto it = std::lower_bound(vocab.begin(), vocab.end(), label);
  if (it == vocab.end() || *it != label) return -1;
  return static_cast<int>(it - vocab.begin());
}

Priors parse_priors(const nlohmann::json& j, const std::string& origin) {
  try {
    if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
      throw ConfigError(origin + ": unsupported or missing format_version");
    Priors p;
    p.missing_label_weight = j.value("missing_label_weight", 1e-3);
    for (const auto& [room, spec] : j.at("room_types").items()) {
      RoomPrior rp;
      rp.prior = spec.at("prior").get<double>();
      rp.count_min = spec.at("object_count")[0].get<int>();
      rp.count_max = spec.at("object_count")[1].get<int>();
      for (const auto& [label, w] : spec.at("labels").items())
        rp.label_weights[label] = w.get<double>();
      p.room_types[room] = std::move(rp);
    }
    for (const auto& [label, sz] : j.at("label_sizes").items()) {
      const auto& lo = sz.at("lo");
      const auto& hi = sz.at("hi");
      p.label_sizes[label] = {{lo[0].get<double>(), lo[1].get<double>(), lo[2].get<double>()},
                              {hi[0].get<double>(), hi[1].get<double>(), hi[2].get<double>()}};
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

}  // namespace

Priors Priors::builtin() {
  static const Priors p = parse_priors(nlohmann::json::parse(kBuiltinPriorsJson),
                                       "builtin priors");
  return p;
}

Priors Priors::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open priors file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("priors file " + path + ": " + e.what());
  }
  return parse_priors(j, path);
}

void Priors::validate() const {
  if (room_types.empty()) throw ConfigError("priors: no room types");
  if (!(missing_label_weight > 0.0))
    throw ConfigError("priors: missing_label_weight must be positive");
  double total = 0.0;
  for (const auto& [room, rp] : room_types) {
    if (!(rp.prior > 0.0)) throw ConfigError("priors: non-positive prior for " + room);
    if (rp.count_min < 0 || rp.count_max < rp.count_min)
      throw ConfigError("priors: bad object_count range for " + room);
    if (rp.label_weights.empty()) throw ConfigError("priors: empty label table for " + room);
    for (const auto& [label, w] : rp.label_weights) {
      if (!(w > 0.0)) throw ConfigError("priors: non-positive weight for " + label);
      if (!label_sizes.count(label))
        throw ConfigError("priors: no size entry for " + label);
    }
    total += rp.prior;
  }
  if (std::abs(total - 1.0) > 0.01)
    throw ConfigError("priors: room priors should sum to 1");
}

double Priors::log_cooc(const std::string& label, const std::string& room) const {
  const RoomPrior& rp = room_types.at(room);
  const auto it = rp.label_weights.find(label);
  const double w = it != rp.label_weights.end() ? it->second : missing_label_weight;
  double z = 0.0;
  for (const auto& [_, lw] : rp.label_weights) z += lw;
  const std::size_t vocab_size = canonical_labels().size();
  z += missing_label_weight *
       static_cast<double>(vocab_size > rp.label_weights.size()
                               ? vocab_size - rp.label_weights.size()
                               : 0);
  return std::log(w / z);
}

std::map<std::string, double> Priors::room_posterior(
    const std::vector<std::string>& observed_labels) const {
  std::map<std::string, double> log_post;
  double max_log = -1e300;
  for (const auto& [room, rp] : room_types) {
    double lp = std::log(rp.prior);
    for (const std::string& label : observed_labels) lp += log_cooc(label, room);
    log_post[room] = lp;
    max_log = std::max(max_log, lp);
  }
  double z = 0.0;
  for (auto& [_, lp] : log_post) {
    lp = std::exp(lp - max_log);
    z += lp;
  }
  for (auto& [_, lp] : log_post) lp /= z;
  return log_post;
}

std::vector<UnknownComponent> unknown_components(const VoxelGrid& grid) {
  const std::int64_t n = grid.cell_count();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(n), 0);
  std::vector<UnknownComponent> out;
  std::vector<std::int32_t> stack;

  for (std::int32_t start = 0; start < n; ++start) {
    if (seen[static_cast<std::size_t>(start)] || grid.state(start) != CellState::unknown)
      continue;
    UnknownComponent comp;
    comp.bbox = {{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
    stack.assign(1, start);
    seen[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
      const std::int32_t lin = stack.back();
      stack.pop_back();
      comp.voxels.push_back(lin);
      const Vec3 c = grid.voxel_center(lin);
      const double h = grid.resolution() / 2.0;
      comp.bbox.lo = {std::min(comp.bbox.lo.x, c.x - h), std::min(comp.bbox.lo.y, c.y - h),
                      std::min(comp.bbox.lo.z, c.z - h)};
      comp.bbox.hi = {std::max(comp.bbox.hi.x, c.x + h), std::max(comp.bbox.hi.y, c.y + h),
                      std::max(comp.bbox.hi.z, c.z + h)};
      int ix, iy, iz;
      grid.unpack_index(lin, ix, iy, iz);
      const int offs[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
      for (const auto& o : offs) {
        const int jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
        if (!grid.index_in_bounds(jx, jy, jz)) continue;
        const std::int32_t nl = grid.linear_index(jx, jy, jz);
        if (seen[static_cast<std::size_t>(nl)] || grid.state(nl) != CellState::unknown)
          continue;
        seen[static_cast<std::size_t>(nl)] = 1;
        stack.push_back(nl);
      }
    }
    comp.voxel_count = static_cast<std::int64_t>(comp.voxels.size());
    std::sort(comp.voxels.begin(), comp.voxels.end());
    out.push_back(std::move(comp));
  }
  return out;
}

namespace {

// Voxels whose center lies inside the box; ascending linear index.
std::vector<std::int32_t> voxelize_box(const VoxelGrid& grid, const OrientedBox& box) {
  std::vector<std::int32_t> out;
  int x0, y0, z0, x1, y1, z1;
  const double r = 0.5 * std::hypot(box.extents.x, box.extents.y);
  grid.voxel_of({box.center.x - r, box.center.y - r, box.zmin()}, x0, y0, z0);
  grid.voxel_of({box.center.x + r, box.center.y + r, box.zmax()}, x1, y1, z1);
  for (int iz = z0; iz <= z1; ++iz)
    for (int iy = y0; iy <= y1; ++iy)
      for (int ix = x0; ix <= x1; ++ix) {
        const std::int32_t lin = grid.linear_index(ix, iy, iz);
        if (box.contains(grid.voxel_center(lin))) out.push_back(lin);
      }
  return out;
}

CompletionSample empty_sample(const VoxelGrid& grid) {
  CompletionSample s;
  s.occupancy = grid.cells();
  s.voxel_label.assign(s.occupancy.size(), -1);
  for (auto& c : s.occupancy)
    if (c == static_cast<std::uint8_t>(CellState::unknown))
      c = static_cast<std::uint8_t>(CellState::free);
  return s;
}

// Marks the box into the sample, restricted to voxels unknown in the real
// grid (preserves observed content by construction).
bool mark_hypothesis(CompletionSample& sample, const VoxelGrid& grid,
                     const OrientedBox& box, int lid, bool require_all_unknown) {
  const std::vector<std::int32_t> voxels = voxelize_box(grid, box);
  if (voxels.empty()) return false;
  if (require_all_unknown) {
    for (std::int32_t lin : voxels)
      if (grid.state(lin) != CellState::unknown) return false;
    // Also reject overlap with previously placed hypotheses.
    for (std::int32_t lin : voxels)
      if (sample.occupancy[static_cast<std::size_t>(lin)] ==
          static_cast<std::uint8_t>(CellState::occupied))
        return false;
  }
  bool any = false;
  for (std::int32_t lin : voxels) {
    if (grid.state(lin) != CellState::unknown) continue;
    sample.occupancy[static_cast<std::size_t>(lin)] =
        static_cast<std::uint8_t>(CellState::occupied);
    sample.voxel_label[static_cast<std::size_t>(lin)] = lid;
    any = true;
  }
  return any;
}

}  // namespace

std::vector<CompletionSample> sample_completions(const SceneGraph& graph,
                                                 const VoxelGrid& grid,
                                                 const Aabb& scene_bounds, int k,
                                                 std::uint64_t seed,
                                                 const Priors& priors) {
  if (k < 1) throw std::invalid_argument("sample_completions: k must be >= 1");
  priors.validate();

  const std::vector<UnknownComponent> components = unknown_components(grid);

  std::vector<std::string> observed;
  observed.reserve(graph.nodes.size());
  for (const auto& [_, node] : graph.nodes) observed.push_back(node.display_label());
  const std::map<std::string, double> posterior = priors.room_posterior(observed);

  std::vector<CompletionSample> samples;
  samples.reserve(static_cast<std::size_t>(k));
  for (int s = 0; s < k; ++s) {
    CompletionSample sample = empty_sample(grid);
    for (std::size_t c = 0; c < components.size(); ++c) {
      const UnknownComponent& comp = components[c];
      Rng rng(mix_seed(seed, c, static_cast<std::uint64_t>(s)));

      // Draw the component's room type from the posterior.
      double u = rng.uniform();
      std::string room = posterior.rbegin()->first;
      for (const auto& [name, p] : posterior) {
        if (u < p) {
          room = name;
          break;
        }
        u -= p;
      }
      const RoomPrior& rp = priors.room_types.at(room);

      double weight_total = 0.0;
      for (const auto& [_, w] : rp.label_weights) weight_total += w;

      const int count = static_cast<int>(rng.uniform_int(rp.count_min, rp.count_max));
      for (int obj = 0; obj < count; ++obj) {
        // Label from the room's co-occurrence table.
        double lu = rng.uniform() * weight_total;
        std::string label = rp.label_weights.rbegin()->first;
        for (const auto& [name, w] : rp.label_weights) {
          if (lu < w) {
            label = name;
            break;
          }
          lu -= w;
        }
        const auto& [lo, hi] = priors.label_sizes.at(label);
        const int lid = label_id(label);
        if (lid < 0) continue;

        bool placed = false;
        for (int attempt = 0; attempt < 40 && !placed; ++attempt) {
          OrientedBox box;
          box.extents = {rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y),
                         rng.uniform(lo.z, hi.z)};
          box.yaw = canonical_yaw(rng.uniform(-kPi / 2.0, kPi / 2.0));
          const double rx = 0.5 * std::hypot(box.extents.x, box.extents.y);
          const double x0 = std::max(comp.bbox.lo.x, scene_bounds.lo.x) + rx;
          const double x1 = std::min(comp.bbox.hi.x, scene_bounds.hi.x) - rx;
          const double y0 = std::max(comp.bbox.lo.y, scene_bounds.lo.y) + rx;
          const double y1 = std::min(comp.bbox.hi.y, scene_bounds.hi.y) - rx;
          if (x0 >= x1 || y0 >= y1) break;
          // Floor-snapped placement.
          box.center = {rng.uniform(x0, x1), rng.uniform(y0, y1),
                        grid.origin().z + box.extents.z / 2.0};
          if (mark_hypothesis(sample, grid, box, lid, /*require_all_unknown=*/true)) {
            sample.objects.push_back({label, box});
            placed = true;
          }
        }
      }
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

double info_gain(const Pose& candidate, const std::vector<CompletionSample>& samples,
                 const VoxelGrid& grid, const CameraModel& camera) {
  const int k = static_cast<int>(samples.size());
  if (k < 2) throw std::invalid_argument("info_gain: need at least 2 samples");
  if (k > kMaxSamples) throw std::invalid_argument("info_gain: too many samples");

  struct Entry {
    std::int16_t reach = 0;
    std::array<std::int32_t, kMaxSamples> labels;
  };
  std::unordered_map<std::int32_t, Entry> per_voxel;
  per_voxel.reserve(4096);

  for (int s = 0; s < k; ++s) {
    const CompletionSample& sample = samples[static_cast<std::size_t>(s)];
    traverse_frustum(grid, candidate, camera, sample.occupancy.data(),
                     [&](std::int32_t lin, CellState state) {
                       if (grid.state(lin) != CellState::unknown) return;
                       Entry& e = per_voxel[lin];
                       const int32_t label =
                           state == CellState::occupied
                               ? sample.voxel_label[static_cast<std::size_t>(lin)]
                               : -1;
                       e.labels[static_cast<std::size_t>(e.reach)] = label;
                       e.reach++;
                     });
  }

  // Mixture entropy over voxels reached under every sample.
  double bits = 0.0;
  for (const auto& [lin, e] : per_voxel) {
    if (e.reach != k) continue;
    double h = 0.0;
    for (int i = 0; i < k; ++i) {
      bool counted = false;
      for (int j = 0; j < i; ++j)
        if (e.labels[static_cast<std::size_t>(j)] == e.labels[static_cast<std::size_t>(i)]) {
          counted = true;
          break;
        }
      if (counted) continue;
      int c = 0;
      for (int j = 0; j < k; ++j)
        if (e.labels[static_cast<std::size_t>(j)] == e.labels[static_cast<std::size_t>(i)]) ++c;
      const double p = static_cast<double>(c) / static_cast<double>(k);
      h -= p * std::log2(p);
    }
    bits += h;
  }
  return bits;
}

std::vector<std::int32_t> compute_frontiers(const VoxelGrid& grid) {
  std::vector<std::int32_t> out;
  const std::int64_t n = grid.cell_count();
  for (std::int32_t lin = 0; lin < n; ++lin) {
    if (grid.state(lin) != CellState::free) continue;
    int ix, iy, iz;
    grid.unpack_index(lin, ix, iy, iz);
    const int offs[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (const auto& o : offs) {
      const int jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
      if (!grid.index_in_bounds(jx, jy, jz)) continue;
      if (grid.state(grid.linear_index(jx, jy, jz)) == CellState::unknown) {
        out.push_back(lin);
        break;
      }
    }
  }
  return out;
}

const char* planner_name(PlannerType p) {
  switch (p) {
    case PlannerType::frontier: return "frontier";
    case PlannerType::semantic: return "semantic";
    case PlannerType::random: return "random";
  }
  return "unknown";
}

std::optional<PlannerType> planner_from_name(const std::string& name) {
  for (PlannerType p : {PlannerType::frontier, PlannerType::semantic, PlannerType::random})
    if (name == planner_name(p)) return p;
  return std::nullopt;
}

void PlannerConfig::validate() const {
  if (planner == PlannerType::semantic && (num_samples < 2 || num_samples > kMaxSamples))
    throw std::invalid_argument("PlannerConfig: semantic planner needs 2..16 samples");
}

std::vector<const Viewpoint*> filter_candidates(const VoxelGrid& grid,
                                                const ViewpointSet& viewpoints,
                                                int current_viewpoint_id) {
  std::vector<const Viewpoint*> out;
  for (const Viewpoint& vp : viewpoints.viewpoints) {
    if (vp.id == current_viewpoint_id) continue;
    if (!grid.point_in_bounds(vp.position)) continue;
    int ix, iy, iz;
    grid.voxel_of(vp.position, ix, iy, iz);
    if (grid.state(grid.linear_index(ix, iy, iz)) != CellState::free) continue;
    out.push_back(&vp);
  }
  return out;
}

namespace {

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(std::min(hw, 8u), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& t : threads) t.join();
}

// Ordered reduction: score descending, then travel, then viewpoint id.
PlanResult pick_best(const std::vector<const Viewpoint*>& candidates,
                     std::vector<CandidateScore> scores) {
  PlanResult result;
  result.candidate_scores = std::move(scores);
  if (candidates.empty()) {
    result.status = PlanStatus::exploration_exhausted;
    return result;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.candidate_scores.size(); ++i) {
    const CandidateScore& a = result.candidate_scores[i];
    const CandidateScore& b = result.candidate_scores[best];
    if (a.score > b.score ||
        (a.score == b.score &&
         (a.travel < b.travel || (a.travel == b.travel && a.viewpoint_id < b.viewpoint_id))))
      best = i;
  }
  result.status = PlanStatus::ok;
  result.viewpoint_id = result.candidate_scores[best].viewpoint_id;
  result.score = result.candidate_scores[best].score;
  return result;
}

}  // namespace

PlanResult select_nbv_frontier(const VoxelGrid& grid, const ViewpointSet& viewpoints,
                               const CameraModel& camera, const PlannerConfig& config,
                               const Vec3& current_position, int current_viewpoint_id) {
  config.validate();
  const std::vector<std::int32_t> frontiers = compute_frontiers(grid);
  if (frontiers.empty()) {
    PlanResult r;
    r.status = PlanStatus::exploration_complete;
    return r;
  }
  std::vector<std::uint8_t> frontier_mask(static_cast<std::size_t>(grid.cell_count()), 0);
  for (std::int32_t lin : frontiers) frontier_mask[static_cast<std::size_t>(lin)] = 1;

  const std::vector<const Viewpoint*> candidates =
      filter_candidates(grid, viewpoints, current_viewpoint_id);
  std::vector<CandidateScore> scores(candidates.size());
  parallel_chunks(candidates.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Viewpoint& vp = *candidates[i];
      std::int64_t count = 0;
      traverse_frustum(grid, vp.pose, camera, nullptr,
                       [&](std::int32_t lin, CellState) {
                         count += frontier_mask[static_cast<std::size_t>(lin)];
                       });
      scores[i] = {vp.id, static_cast<double>(count),
                   (vp.position - current_position).norm()};
    }
  });
  return pick_best(candidates, std::move(scores));
}

PlanResult select_nbv_semantic(const SceneGraph& graph, const VoxelGrid& grid,
                               const ViewpointSet& viewpoints, const CameraModel& camera,
                               const PlannerConfig& config, std::uint64_t seed,
                               const Priors& priors, const Aabb& scene_bounds,
                               const Vec3& current_position, int current_viewpoint_id,
                               const std::vector<CompletionSample>* samples_override) {
  config.validate();
  std::vector<CompletionSample> local;
  const std::vector<CompletionSample>* samples = samples_override;
  if (samples == nullptr) {
    local = sample_completions(graph, grid, scene_bounds, config.num_samples, seed, priors);
    samples = &local;
  }
  if (static_cast<int>(samples->size()) < 2)
    throw std::invalid_argument("select_nbv_semantic: need at least 2 samples");

  const std::vector<const Viewpoint*> candidates =
      filter_candidates(grid, viewpoints, current_viewpoint_id);
  std::vector<CandidateScore> scores(candidates.size());
  parallel_chunks(candidates.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Viewpoint& vp = *candidates[i];
      scores[i] = {vp.id, info_gain(vp.pose, *samples, grid, camera),
                   (vp.position - current_position).norm()};
    }
  });
  return pick_best(candidates, std::move(scores));
}

PlanResult select_nbv_random(const VoxelGrid& grid, const ViewpointSet& viewpoints,
                             const PlannerConfig& config, std::uint64_t seed,
                             const Vec3& current_position, int current_viewpoint_id) {
  config.validate();
  const std::vector<const Viewpoint*> candidates =
      filter_candidates(grid, viewpoints, current_viewpoint_id);
  PlanResult result;
  if (candidates.empty()) {
    result.status = PlanStatus::exploration_exhausted;
    return result;
  }
  Rng rng(mix_seed(seed, 0x7A4D0ull));
  const Viewpoint& vp = *candidates[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
  result.status = PlanStatus::ok;
  result.viewpoint_id = vp.id;
  result.score = 0.0;
  result.candidate_scores.push_back({vp.id, 0.0, (vp.position - current_position).norm()});
  return result;
}

std::optional<std::vector<CompletionSample>> remote_sample_completions(
    const RemoteSamplerConfig& remote, const SceneGraph& graph, const VoxelGrid& grid,
    int k, std::uint64_t seed) {
  // Split the URL into host base and path.
  std::string base = remote.url;
  std::string path = "/sample";
  const std::size_t scheme = base.find("://");
  if (scheme != std::string::npos) {
    const std::size_t slash = base.find('/', scheme + 3);
    if (slash != std::string::npos) {
      path = base.substr(slash);
      base = base.substr(0, slash);
    }
  }

  nlohmann::ordered_json body;
  body["graph"] = graph_to_json(graph);
  body["unknown_components"] = nlohmann::ordered_json::array();
  for (const UnknownComponent& comp : unknown_components(grid)) {
    body["unknown_components"].push_back(
        {{"bbox",
          {{"lo", {comp.bbox.lo.x, comp.bbox.lo.y, comp.bbox.lo.z}},
           {"hi", {comp.bbox.hi.x, comp.bbox.hi.y, comp.bbox.hi.z}}}},
         {"voxel_count", comp.voxel_count}});
  }
  body["num_samples"] = k;
  body["seed"] = seed;

  try {
    httplib::Client client(base);
    const auto timeout_s = static_cast<time_t>(remote.timeout_seconds);
    const auto timeout_us = static_cast<time_t>(
        (remote.timeout_seconds - static_cast<double>(timeout_s)) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);

    const httplib::Result res = client.Post(path, body.dump(), "application/json");
    if (!res || res->status != 200) return std::nullopt;

    const nlohmann::json reply = nlohmann::json::parse(res->body);
    std::vector<CompletionSample> samples;
    for (const auto& js : reply.at("samples")) {
      CompletionSample sample = empty_sample(grid);
      for (const auto& jo : js.at("hypothesized_objects")) {
        HypothesizedObject obj;
        obj.label = jo.at("label").get<std::string>();
        const auto& jb = jo.at("box");
        obj.box.center = {jb.at("center")[0].get<double>(), jb.at("center")[1].get<double>(),
                          jb.at("center")[2].get<double>()};
        obj.box.yaw = jb.at("yaw").get<double>();
        obj.box.extents = {jb.at("extents")[0].get<double>(),
                           jb.at("extents")[1].get<double>(),
                           jb.at("extents")[2].get<double>()};
        const int lid = label_id(obj.label);
        if (lid < 0) continue;  // outside the canonical vocabulary
        // Clamp to unknown voxels: observed content is never contradicted.
        mark_hypothesis(sample, grid, obj.box, lid, /*require_all_unknown=*/false);
        sample.objects.push_back(std::move(obj));
      }
      samples.push_back(std::move(sample));
    }
    if (static_cast<int>(samples.size()) != k) return std::nullopt;
    return samples;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace asg
