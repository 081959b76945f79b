#pragma once

#include <vector>

#include "asg/scene_model.hpp"

namespace asg {

struct AssociationThresholds {
  double min_cosine = 0.75;
  double min_iou = 0.20;
  double consolidate_iou = 0.40;
  double downsample_leaf = 0.05;  // meters

  void validate() const;  // throws std::invalid_argument
};

// Per-detection assignment outcome: the merged node id, or "new node".
struct Assignment {
  bool created = false;
  int node_id = -1;
};

// Transforms each detection into the global frame (applying the batch metric
// scale), then merges it into the best gated node or creates a new one.
// Detections are processed in input order; graph.step is left untouched.
std::vector<Assignment> associate_detections(SceneGraph& graph,
                                             const std::vector<Detection>& detections,
                                             const Pose& camera_global_pose,
                                             double metric_scale,
                                             const AssociationThresholds& th);

// Greedy duplicate fusion: repeatedly merges the highest-IoU qualifying node
// pair until none remains. The surviving node keeps the smaller id; edges
// touching removed nodes are dropped (relations re-derives them).
void consolidate_nodes(SceneGraph& graph, const AssociationThresholds& th);

}  // namespace asg
