#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asg/scene_model.hpp"
#include "asg/simulator.hpp"

namespace asg {

struct MatchThresholds {
  double min_semantic = 0.85;      // cosine
  double max_centroid_dist = 0.50;  // meters

  void validate() const;  // throws std::invalid_argument
};

struct NodeMatch {
  int pred_id = -1;
  int gt_index = -1;
  double cosine = 0.0;
  double centroid_dist = 0.0;
};

// Greedy one-to-one matching over pairs passing both the semantic and the
// localization gate: descending cosine, ties by ascending centroid distance,
// then ascending pred id, then ascending gt index.
std::vector<NodeMatch> match_nodes(const SceneGraph& pred, const SceneSpec& gt,
                                   const MatchThresholds& th,
                                   std::uint64_t experiment_seed, int embedding_dim);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// precision = matches/n_pred (0 when n_pred = 0), recall = matches/n_gt,
// f1 = harmonic mean. n_gt must be positive.
Metrics compute_metrics(std::size_t match_count, std::size_t n_pred, std::size_t n_gt);

struct StepRecord {
  int step = 0;
  std::string planner;
  int nodes_pred = 0;
  int nodes_gt = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int selected_viewpoint = -1;
  double selected_score = 0.0;
  double travel_m = 0.0;
  std::int64_t wall_ms = 0;
};

// Fixed CSV schema, UTF-8, LF line endings:
// step,planner,nodes_pred,nodes_gt,precision,recall,f1,selected_viewpoint,
// selected_score,travel_m,wall_ms
std::string steps_csv_header();
std::string step_record_csv(const StepRecord& r);
void write_steps_csv(const std::string& path, const std::vector<StepRecord>& records);
std::vector<StepRecord> read_steps_csv(const std::string& path);  // throws ConfigError

}  // namespace asg
