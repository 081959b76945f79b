#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "asg/errors.hpp"
#include "asg/prng.hpp"
#include "asg/simulator.hpp"

using namespace asg;

namespace {

// A hand-made scene: two solid boxes and the room shell, no containers.
SceneSpec tiny_scene() {
  SceneSpec s;
  s.name = "tiny";
  s.bounds = {{0, 0, 0}, {6, 4, 2.7}};
  const Aabb& b = s.bounds;
  s.walls.push_back({{b.lo.x, b.lo.y, -0.1}, {b.hi.x, b.hi.y, 0.0}});
  s.walls.push_back({{b.lo.x, b.lo.y, b.hi.z}, {b.hi.x, b.hi.y, b.hi.z + 0.1}});
  s.walls.push_back({{b.lo.x, b.lo.y, 0}, {b.lo.x + 0.1, b.hi.y, b.hi.z}});
  s.walls.push_back({{b.hi.x - 0.1, b.lo.y, 0}, {b.hi.x, b.hi.y, b.hi.z}});
  s.walls.push_back({{b.lo.x, b.lo.y, 0}, {b.hi.x, b.lo.y + 0.1, b.hi.z}});
  s.walls.push_back({{b.lo.x, b.hi.y - 0.1, 0}, {b.hi.x, b.hi.y, b.hi.z}});
  SceneObject table;
  table.label = "table";
  table.box.center = {3.0, 2.0, 0.375};
  table.box.yaw = 0.2;
  table.box.extents = {1.2, 0.8, 0.75};
  s.objects.push_back(table);
  SceneObject chair;
  chair.label = "chair";
  chair.box.center = {4.2, 1.2, 0.45};
  chair.box.yaw = -0.4;
  chair.box.extents = {0.5, 0.5, 0.9};
  s.objects.push_back(chair);
  s.rooms.push_back({"living_room", {0.1, 0.1, 5.9, 3.9}});
  return s;
}

bool on_some_surface(const SceneSpec& scene, const Vec3& p, double tol) {
  // Solid object boxes and wall slabs; containers are absent from tiny_scene.
  for (const SceneObject& o : scene.objects) {
    const double c = std::cos(o.box.yaw), s = std::sin(o.box.yaw);
    const double dx = p.x - o.box.center.x, dy = p.y - o.box.center.y;
    const double lx = c * dx + s * dy;
    const double ly = c * dy - s * dx;
    const double lz = p.z - o.box.center.z;
    const double fx = std::abs(lx) - o.box.extents.x / 2;
    const double fy = std::abs(ly) - o.box.extents.y / 2;
    const double fz = std::abs(lz) - o.box.extents.z / 2;
    if (std::abs(std::max({fx, fy, fz})) < tol) return true;
  }
  for (const Aabb& w : scene.walls) {
    const Vec3 c = w.center();
    const Vec3 h = w.size() * 0.5;
    const double fx = std::abs(p.x - c.x) - h.x;
    const double fy = std::abs(p.y - c.y) - h.y;
    const double fz = std::abs(p.z - c.z) - h.z;
    if (std::abs(std::max({fx, fy, fz})) < tol) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE_BEGIN("simulator");

TEST_CASE("generated scenes match the template object-count targets") {
  const SceneSpec apt = generate_scene(SceneTemplate::apartment, 3);
  CHECK(apt.objects.size() >= 100);
  CHECK(apt.objects.size() <= 130);
  CHECK(apt.rooms.size() >= 3);
  CHECK(apt.rooms.size() <= 4);

  const SceneSpec fur = generate_scene(SceneTemplate::furnished_room, 1);
  CHECK(fur.objects.size() >= 20);
  CHECK(fur.objects.size() <= 30);
  CHECK(fur.rooms.size() == 1);
}

TEST_CASE("generate_scene is deterministic") {
  const SceneSpec a = generate_scene(SceneTemplate::apartment, 3);
  const SceneSpec b = generate_scene(SceneTemplate::apartment, 3);
  REQUIRE(a.objects.size() == b.objects.size());
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    CHECK(a.objects[i].label == b.objects[i].label);
    CHECK(a.objects[i].box.center.x == b.objects[i].box.center.x);
    CHECK(a.objects[i].box.yaw == b.objects[i].box.yaw);
  }
}

TEST_CASE("generated objects do not interpenetrate beyond designed containment") {
  const SceneSpec apt = generate_scene(SceneTemplate::apartment, 5);
  int containment_pairs = 0;
  for (std::size_t i = 0; i < apt.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < apt.objects.size(); ++j) {
      const OrientedBox& a = apt.objects[i].box;
      const OrientedBox& b = apt.objects[j].box;
      const double vert = std::min(a.zmax(), b.zmax()) - std::max(a.zmin(), b.zmin());
      if (vert <= 0.01) continue;
      if (footprint_intersection_area(a, b) < 1e-4) continue;
      // Overlapping pair: must be a designed containment.
      const double frac = std::max(containment_fraction(a, b), containment_fraction(b, a));
      CHECK(frac > 0.9);
      ++containment_pairs;
    }
  }
  CHECK(containment_pairs > 0);  // apartments do ship containers with contents
}

TEST_CASE("noise-free rendering composes exactly onto ground-truth surfaces") {
  const SceneSpec scene = tiny_scene();
  CameraModel cam;
  const Pose pose = make_camera_pose({1.0, 2.0, 1.2}, 0.0, 0.0);
  const RenderedView rv =
      render_view(scene, pose, cam, NoiseModel::zero(), 7, 1, 64);

  REQUIRE(!rv.detections.empty());
  rv.view.validate();
  CHECK(rv.view.metric_scale == 1.0);
  CHECK(rv.view.relative_pose.is_identity(0.0));

  // Composed cloud in the camera frame, anchored by the true pose.
  FactoredView anchored = rv.view;
  anchored.relative_pose = rv.true_pose;
  const std::vector<Vec3> cloud = compose_backprojection(anchored);
  for (const Vec3& p : cloud) CHECK(on_some_surface(scene, p, 1e-9));

  // Detection points land on the detected object's surfaces too.
  for (const Detection& det : rv.detections) {
    CHECK(static_cast<int>(det.points_camera.size()) >= NoiseModel{}.min_pixels);
    const std::vector<Vec3> global = lift_points(rv.true_pose, 1.0, det.points_camera);
    for (const Vec3& p : global) CHECK(on_some_surface(scene, p, 1e-9));
  }
}

TEST_CASE("rendering is bit-deterministic given the seeds") {
  const SceneSpec scene = generate_scene(SceneTemplate::furnished_room, 2);
  CameraModel cam;
  NoiseModel noise;  // defaults: all channels active
  const Pose pose = make_camera_pose({3.0, 2.5, 1.2}, 1.0, 0.0);

  const RenderedView a = render_view(scene, pose, cam, noise, 11, 5, 64);
  const RenderedView b = render_view(scene, pose, cam, noise, 11, 5, 64);
  CHECK(a.view.depth == b.view.depth);
  CHECK(a.view.valid == b.view.valid);
  CHECK(a.view.metric_scale == b.view.metric_scale);
  REQUIRE(a.detections.size() == b.detections.size());
  for (std::size_t i = 0; i < a.detections.size(); ++i) {
    CHECK(a.detections[i].label == b.detections[i].label);
    CHECK(a.detections[i].points_camera.size() == b.detections[i].points_camera.size());
  }

  // A different step seed perturbs the noisy channels.
  const RenderedView c = render_view(scene, pose, cam, noise, 11, 6, 64);
  CHECK(a.view.metric_scale != c.view.metric_scale);
}

TEST_CASE("occluded objects produce no detection") {
  SceneSpec scene = tiny_scene();
  // A wall slab right in front of the table, hiding it from the camera.
  scene.walls.push_back({{2.0, 0.2, 0.0}, {2.1, 3.8, 2.7}});
  CameraModel cam;
  const Pose pose = make_camera_pose({0.8, 2.0, 1.2}, 0.0, 0.0);
  const RenderedView rv = render_view(scene, pose, cam, NoiseModel::zero(), 7, 1, 64);
  CHECK(rv.detections.empty());

  const auto visible = visible_object_indices(scene, pose, cam, 20);
  CHECK(visible.empty());
}

TEST_CASE("detections honor the min_pixels threshold") {
  const SceneSpec scene = generate_scene(SceneTemplate::apartment, 4);
  CameraModel cam;
  NoiseModel noise = NoiseModel::zero();
  noise.min_pixels = 30;
  const Pose pose = make_camera_pose({2.0, 2.0, 1.2}, 0.7, 0.0);
  const RenderedView rv = render_view(scene, pose, cam, noise, 3, 1, 64);
  for (const Detection& det : rv.detections)
    CHECK(det.points_camera.size() >= 30);
}

TEST_CASE("multi-view batches share one metric scale and anchor at the first view") {
  const SceneSpec scene = generate_scene(SceneTemplate::furnished_room, 3);
  CameraModel cam;
  NoiseModel noise;
  const std::vector<Pose> poses{make_camera_pose({2.0, 2.0, 1.2}, 0.0, 0.0),
                                make_camera_pose({4.0, 2.0, 1.2}, 3.1, 0.0),
                                make_camera_pose({3.0, 3.5, 2.5}, -1.5, 1.0)};
  const auto batch = render_batch(scene, poses, cam, noise, 17, 2, 64);
  REQUIRE(batch.size() == 3);
  CHECK(batch[0].view.relative_pose.is_identity(0.0));
  CHECK(batch[1].view.metric_scale == batch[0].view.metric_scale);
  CHECK(batch[2].view.metric_scale == batch[0].view.metric_scale);
  // Non-reference poses are perturbed but close to the true relative pose.
  const Pose rel_true = poses[0].inverse().compose(poses[1]);
  const Vec3 diff = batch[1].view.relative_pose.translation - rel_true.translation;
  CHECK(diff.norm() < 0.2);
  CHECK(diff.norm() > 0.0);
}

TEST_CASE("navigable viewpoints match a brute-force enumeration of the rule") {
  const SceneSpec scene = tiny_scene();
  const ViewpointSet set = navigable_viewpoints(scene, 0.5, 8);
  CHECK(!set.viewpoints.empty());

  // Independent enumeration of the pruning rule.
  std::set<std::pair<double, double>> expected;
  for (double x = 0.0; x <= 6.0 + 1e-9; x += 0.5) {
    for (double y = 0.0; y <= 4.0 + 1e-9; y += 0.5) {
      bool blocked = false;
      for (const Aabb& w : scene.walls) {
        if (w.hi.z < 0.2 || w.lo.z > 1.6) continue;
        if (x >= w.lo.x - 0.20 && x <= w.hi.x + 0.20 && y >= w.lo.y - 0.20 &&
            y <= w.hi.y + 0.20) {
          blocked = true;
          break;
        }
      }
      if (!blocked) {
        OrientedBox probe;
        probe.center = {x, y, 0.5};
        probe.extents = {0.01, 0.01, 1.0};
        for (const SceneObject& o : scene.objects) {
          if (o.box.zmin() > 0.8) continue;
          if (footprint_distance(o.box, probe) < 0.20) {
            blocked = true;
            break;
          }
        }
      }
      if (!blocked) expected.emplace(x, y);
    }
  }
  CHECK(set.viewpoints.size() == expected.size() * 8);

  // One heading per position collapses to the position count.
  const ViewpointSet one = navigable_viewpoints(scene, 0.5, 1);
  CHECK(one.viewpoints.size() == expected.size());

  // Ids are dense and ordered.
  for (std::size_t i = 0; i < set.viewpoints.size(); ++i)
    CHECK(set.viewpoints[i].id == static_cast<int>(i));
}

TEST_CASE("a fully blocked scene is unnavigable") {
  SceneSpec scene = tiny_scene();
  // Fill the whole interior with one giant obstacle.
  SceneObject slab;
  slab.label = "table";
  slab.box.center = {3.0, 2.0, 0.5};
  slab.box.extents = {5.9, 3.9, 1.0};
  scene.objects = {slab};
  CHECK_THROWS_AS(navigable_viewpoints(scene, 0.5, 4), SceneUnnavigableError);
}

TEST_CASE("external camera presets are deterministic overhead poses") {
  const SceneSpec scene = generate_scene(SceneTemplate::apartment, 3);
  for (int count = 1; count <= 3; ++count) {
    const std::vector<Pose> cams = external_camera_preset(scene, count);
    REQUIRE(static_cast<int>(cams.size()) == count);
    for (const Pose& p : cams) {
      CHECK(p.translation.z == doctest::Approx(2.5));
      CHECK(scene.bounds.contains(p.translation));
      // Looking downward.
      CHECK(p.rotation.apply(Vec3{0, 0, 1}).z < -0.5);
    }
  }
  // Nested: camera k of preset n equals camera k of preset n+1.
  const auto two = external_camera_preset(scene, 2);
  const auto three = external_camera_preset(scene, 3);
  CHECK((two[0].translation - three[0].translation).norm() == 0.0);
  CHECK((two[1].translation - three[1].translation).norm() == 0.0);
}

TEST_CASE("scene JSON round trip") {
  namespace fs = std::filesystem;
  const SceneSpec scene = generate_scene(SceneTemplate::furnished_room, 4);
  const std::string path = (fs::temp_directory_path() / "asg_scene_test.json").string();
  save_scene(scene, path);
  const SceneSpec loaded = load_scene(path);
  CHECK(loaded.name == scene.name);
  REQUIRE(loaded.objects.size() == scene.objects.size());
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    CHECK(loaded.objects[i].label == scene.objects[i].label);
    CHECK(loaded.objects[i].box.center.x ==
          doctest::Approx(scene.objects[i].box.center.x).epsilon(1e-12));
  }
  CHECK(loaded.walls.size() == scene.walls.size());
  CHECK(loaded.rooms.size() == scene.rooms.size());
  fs::remove(path);
}

TEST_CASE("scene validation rejects bad content") {
  SceneSpec scene = tiny_scene();
  scene.objects[0].label = "flying_saucer";
  CHECK_THROWS_AS(scene.validate(), SceneError);

  SceneSpec oob = tiny_scene();
  oob.objects[0].box.center.x = 50.0;
  CHECK_THROWS_AS(oob.validate(), SceneError);

  nlohmann::json j = scene_to_json(tiny_scene());
  j["format_version"] = 99;
  CHECK_THROWS_AS(scene_from_json(j), SceneError);
}

TEST_CASE("shipped vocabulary file matches the canonical label set") {
  const std::vector<std::string> file = load_vocabulary(ASG_SOURCE_DIR "/assets/labels.txt");
  CHECK(file == canonical_labels());
}

TEST_CASE("render rejects out-of-bounds poses") {
  const SceneSpec scene = tiny_scene();
  CameraModel cam;
  CHECK_THROWS_AS(
      render_view(scene, make_camera_pose({20, 2, 1.2}, 0, 0), cam, NoiseModel::zero(), 1, 1, 64),
      std::invalid_argument);
}

TEST_SUITE_END();
