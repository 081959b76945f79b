#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "asg/association.hpp"
#include "asg/evaluation.hpp"
#include "asg/exploration.hpp"
#include "asg/relations.hpp"
#include "asg/simulator.hpp"
#include "asg/voxel_grid.hpp"

namespace asg {

// The factored path composes geometry from the rendered FactoredView; the
// ground-truth path consumes true depths and poses directly (the comparison
// baseline). With an all-zero noise model both produce identical bytes.
enum class GeometryMode { factored, ground_truth };

struct ExternalCameraSpec {
  Vec3 position;
  double heading = 0.0;
  double pitch_down = 0.0;
};

struct SceneSource {
  std::optional<std::string> file;
  SceneTemplate tmpl = SceneTemplate::apartment;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  SceneSource scene;
  std::uint64_t experiment_seed = 1;
  int steps = 30;
  int num_start_poses = 10;
  PlannerConfig planner;
  NoiseModel noise;
  CameraModel camera;
  AssociationThresholds association;
  RelationThresholds relations;
  MatchThresholds match;
  double viewpoint_spacing = 0.5;
  int viewpoint_headings = 8;
  double voxel_resolution = 0.10;
  int embedding_dim = kDefaultEmbeddingDim;
  GeometryMode geometry_mode = GeometryMode::factored;
  // Either a preset name ("overhead1".."overhead3") or explicit poses.
  std::string external_preset;
  std::vector<ExternalCameraSpec> external_cameras;
  std::optional<RemoteSamplerConfig> remote_sampler;
  std::string priors_path;  // empty -> built-in table
  int consolidate_every = 5;
  bool record_timing = false;  // wall_ms column stays 0 when false
  std::string out_dir;

  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json(const nlohmann::json& j);  // throws ConfigError
nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);       // throws ConfigError

struct CandidateLogRow {
  int step = 0;
  int viewpoint_id = -1;
  double score = 0.0;
  double travel = 0.0;
};

struct RunResult {
  std::vector<StepRecord> records;
  SceneGraph final_graph;
  SceneSpec scene;
  std::vector<CandidateLogRow> candidate_log;
  PlanStatus final_status = PlanStatus::ok;
  int start_viewpoint_id = -1;
};

// One deterministic perception-action run from the start pose selected by
// (experiment_seed, start_pose_index). When out_dir is non-empty, writes
// steps.csv, graph_final.json, config_echo.json and candidates.csv into it.
RunResult run_experiment(const ExperimentConfig& config, int start_pose_index = 0,
                         const std::string& out_dir = "");

// Resolve the configured external cameras against a scene.
std::vector<Pose> resolve_external_cameras(const ExperimentConfig& config,
                                           const SceneSpec& scene);

// Per-(step, planner) aggregate across runs; early-terminated runs carry their
// last record forward.
struct AggregateRow {
  int step = 0;
  std::string planner;
  int n_runs = 0;
  double nodes_mean = 0.0, nodes_std = 0.0;
  double precision_mean = 0.0, precision_std = 0.0;
  double recall_mean = 0.0, recall_std = 0.0;
  double f1_mean = 0.0, f1_std = 0.0;
};

std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<StepRecord>>& runs);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

// Loads a graph export (graph_to_json schema); node embeddings are rebuilt
// from the label votes under the experiment seed.
SceneGraph graph_from_json(const nlohmann::json& j, int embedding_dim,
                           std::uint64_t experiment_seed);

}  // namespace asg
