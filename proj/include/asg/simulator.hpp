#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "asg/geometry.hpp"
#include "asg/scene_model.hpp"

namespace asg {

struct Aabb {
  Vec3 lo, hi;

  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.y >= lo.y && p.z >= lo.z && p.x <= hi.x &&
           p.y <= hi.y && p.z <= hi.z;
  }
  Vec3 center() const { return {(lo.x + hi.x) * 0.5, (lo.y + hi.y) * 0.5, (lo.z + hi.z) * 0.5}; }
  Vec3 size() const { return {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z}; }
};

struct Rect2 {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};

struct SceneObject {
  std::string label;
  OrientedBox box;
};

struct SceneRoom {
  std::string room_type;
  Rect2 footprint;
};

// Ground-truth synthetic scene: solid object boxes (hollow shells for
// container classes at render time), axis-aligned wall slabs, typed rooms.
struct SceneSpec {
  std::string name;
  Aabb bounds;
  std::vector<SceneObject> objects;
  std::vector<SceneRoom> rooms;
  std::vector<Aabb> walls;

  void validate() const;  // throws SceneError
};

enum class SceneTemplate { apartment, furnished_room };

// Simulated perception degradation; all-zero reproduces ground truth exactly.
struct NoiseModel {
  double depth_noise_rel = 0.02;
  double scale_error_rel = 0.05;
  double pose_trans_std = 0.02;      // meters, non-reference batch frames
  double pose_rot_std = 0.01;        // radians, non-reference batch frames
  double label_confusion_prob = 0.02;
  double detection_dropout_prob = 0.05;
  int min_pixels = 20;

  static NoiseModel zero();
  void validate() const;
};

struct Viewpoint {
  int id = -1;
  Vec3 position;
  double heading = 0.0;
  Pose pose;
};

struct ViewpointSet {
  std::vector<Viewpoint> viewpoints;
  double spacing = 0.5;
  int headings = 8;
};

constexpr double kSensorHeight = 1.2;        // meters
constexpr double kExternalCamHeight = 2.5;   // meters
constexpr double kExternalCamPitch = 1.0471975511965976;  // 60 degrees down

// Canonical label vocabulary (also shipped as assets/labels.txt).
const std::vector<std::string>& canonical_labels();
std::vector<std::string> load_vocabulary(const std::string& path);  // SceneError

// Seeded procedural scene; deterministic per (template, seed).
// apartment: 3-4 rooms, 100-130 objects with support stacks and containers.
// furnished_room: one room, 20-30 larger furniture pieces.
SceneSpec generate_scene(SceneTemplate tmpl, std::uint64_t seed);

SceneSpec scene_from_json(const nlohmann::json& j);        // SceneError
nlohmann::ordered_json scene_to_json(const SceneSpec& scene);
SceneSpec load_scene(const std::string& path);             // SceneError
void save_scene(const SceneSpec& scene, const std::string& path);

// One rendered frame: what the perception stack would extract from the RGB
// image taken at true_pose.
struct RenderedView {
  std::vector<Detection> detections;
  FactoredView view;
  Pose true_pose;
};

// Renders the given poses as one inference batch: the first pose is the batch
// reference (relative pose exactly identity), later poses carry pose noise,
// and one metric-scale perturbation is shared by the batch.
std::vector<RenderedView> render_batch(const SceneSpec& scene,
                                       const std::vector<Pose>& poses,
                                       const CameraModel& camera,
                                       const NoiseModel& noise,
                                       std::uint64_t experiment_seed,
                                       std::uint64_t step_seed, int embedding_dim);

RenderedView render_view(const SceneSpec& scene, const Pose& pose,
                         const CameraModel& camera, const NoiseModel& noise,
                         std::uint64_t experiment_seed, std::uint64_t step_seed,
                         int embedding_dim);

// Ground-truth visibility query used by tests and the evaluation examples:
// object indices with at least min_pixels first-hit pixels from the pose.
std::vector<int> visible_object_indices(const SceneSpec& scene, const Pose& pose,
                                        const CameraModel& camera, int min_pixels);

// Pose grid at sensor height pruned against walls and floor-standing objects;
// deterministic ordering by (x, y, heading). Throws SceneUnnavigableError when
// the result would be empty.
ViewpointSet navigable_viewpoints(const SceneSpec& scene, double spacing,
                                  int headings);

// Overhead external cameras for a scene: deterministic spread positions,
// looking down at the room interiors. count in [1, 3].
std::vector<Pose> external_camera_preset(const SceneSpec& scene, int count);

}  // namespace asg
