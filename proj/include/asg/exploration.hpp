#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asg/scene_model.hpp"
#include "asg/simulator.hpp"
#include "asg/voxel_grid.hpp"

namespace asg {

// Room-type priors, label co-occurrence weights and per-room object count
// ranges driving the built-in completion sampler. Ships as a versioned JSON
// asset (assets/priors.json).
struct RoomPrior {
  double prior = 0.0;
  int count_min = 0;
  int count_max = 0;
  std::map<std::string, double> label_weights;
};

struct Priors {
  std::map<std::string, RoomPrior> room_types;
  std::map<std::string, std::pair<Vec3, Vec3>> label_sizes;  // extents lo/hi
  double missing_label_weight = 1e-3;

  static Priors builtin();
  static Priors load(const std::string& path);  // throws ConfigError
  void validate() const;                         // throws ConfigError

  // cooc(label | room) = max(weight, missing) normalized over the room's
  // observed-label alphabet union the full vocabulary.
  double log_cooc(const std::string& label, const std::string& room) const;
  // Naive-Bayes posterior over room types given observed node labels.
  std::map<std::string, double> room_posterior(
      const std::vector<std::string>& observed_labels) const;
};

struct HypothesizedObject {
  std::string label;
  OrientedBox box;
};

// One hypothesized completion of the unobserved scene. The derived occupancy
// agrees with the real grid on every non-unknown voxel; unknown voxels become
// free unless covered by a hypothesized object.
struct CompletionSample {
  std::vector<HypothesizedObject> objects;
  std::vector<std::uint8_t> occupancy;     // CellState per voxel
  std::vector<std::int32_t> voxel_label;   // canonical label id, -1 = free
};

struct UnknownComponent {
  Aabb bbox;
  std::int64_t voxel_count = 0;
  std::vector<std::int32_t> voxels;
};

// 6-connected components of unknown space, in scan order.
std::vector<UnknownComponent> unknown_components(const VoxelGrid& grid);

// Deterministic prior-based sampler standing in for an LLM: per component a
// room type is drawn from the naive-Bayes posterior, then objects are drawn
// and rejection-placed into unknown voxels, floor-snapped. Draws are keyed on
// (seed, component index, sample index).
std::vector<CompletionSample> sample_completions(const SceneGraph& graph,
                                                 const VoxelGrid& grid,
                                                 const Aabb& scene_bounds, int k,
                                                 std::uint64_t seed,
                                                 const Priors& priors);

// Eq.-style mutual-information estimate in bits: per-sample rendering is
// deterministic, so the gain reduces to the entropy of the per-voxel label
// mixture across samples. A voxel contributes only if it is unknown in the
// real grid and reached under every sample.
double info_gain(const Pose& candidate, const std::vector<CompletionSample>& samples,
                 const VoxelGrid& grid, const CameraModel& camera);

// Known-free voxels 6-adjacent to at least one unknown voxel, ascending.
std::vector<std::int32_t> compute_frontiers(const VoxelGrid& grid);

enum class PlannerType { frontier, semantic, random };

const char* planner_name(PlannerType p);
std::optional<PlannerType> planner_from_name(const std::string& name);

struct PlannerConfig {
  PlannerType planner = PlannerType::semantic;
  int num_samples = 8;  // >= 2 for the semantic planner

  void validate() const;
};

enum class PlanStatus { ok, exploration_complete, exploration_exhausted };

struct CandidateScore {
  int viewpoint_id = -1;
  double score = 0.0;
  double travel = 0.0;
};

struct PlanResult {
  PlanStatus status = PlanStatus::exploration_exhausted;
  int viewpoint_id = -1;
  double score = 0.0;
  std::vector<CandidateScore> candidate_scores;  // candidate order
};

// Candidate filter shared by the planners: viewpoints whose position voxel is
// known-free, excluding the current viewpoint id.
std::vector<const Viewpoint*> filter_candidates(const VoxelGrid& grid,
                                                const ViewpointSet& viewpoints,
                                                int current_viewpoint_id);

PlanResult select_nbv_frontier(const VoxelGrid& grid, const ViewpointSet& viewpoints,
                               const CameraModel& camera, const PlannerConfig& config,
                               const Vec3& current_position, int current_viewpoint_id);

// Samples are drawn once and shared across candidates; pass `samples_override`
// to plan against externally provided samples (remote sampler).
PlanResult select_nbv_semantic(const SceneGraph& graph, const VoxelGrid& grid,
                               const ViewpointSet& viewpoints, const CameraModel& camera,
                               const PlannerConfig& config, std::uint64_t seed,
                               const Priors& priors, const Aabb& scene_bounds,
                               const Vec3& current_position, int current_viewpoint_id,
                               const std::vector<CompletionSample>* samples_override = nullptr);

PlanResult select_nbv_random(const VoxelGrid& grid, const ViewpointSet& viewpoints,
                             const PlannerConfig& config, std::uint64_t seed,
                             const Vec3& current_position, int current_viewpoint_id);

// Remote completion-sampler protocol: POST {graph, unknown_components,
// num_samples, seed} to the configured URL, expect {samples: [...]}. Returns
// nullopt on any failure (non-200, timeout, malformed body); callers fall back
// to the built-in sampler.
struct RemoteSamplerConfig {
  std::string url;                // e.g. http://host:port/sample
  double timeout_seconds = 30.0;
};

std::optional<std::vector<CompletionSample>> remote_sample_completions(
    const RemoteSamplerConfig& remote, const SceneGraph& graph, const VoxelGrid& grid,
    int k, std::uint64_t seed);

}  // namespace asg
