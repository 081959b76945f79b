#include "asg/association.hpp"

#include <stdexcept>

namespace asg {

void AssociationThresholds::validate() const {
  const bool ok = min_cosine > 0 && min_cosine <= 1 && min_iou > 0 && min_iou <= 1 &&
                  consolidate_iou > 0 && consolidate_iou <= 1 && downsample_leaf > 0;
  if (!ok) throw std::invalid_argument("AssociationThresholds: out of range");
}

namespace {

void merge_into(ObjectNode& node, const std::string& label,
                const SemanticEmbedding& embedding, std::vector<Vec3> global_points,
                const AssociationThresholds& th) {
  node.points.insert(node.points.end(), global_points.begin(), global_points.end());
  node.points = voxel_downsample(node.points, th.downsample_leaf);
  for (std::size_t i = 0; i < node.embedding_sum.values.size(); ++i)
    node.embedding_sum.values[i] += embedding.values[i];
  node.label_votes[label] += 1;
  node.detection_count += 1;
  node.box = fit_oriented_box(node.points);
}

}  // namespace

std::vector<Assignment> associate_detections(SceneGraph& graph,
                                             const std::vector<Detection>& detections,
                                             const Pose& camera_global_pose,
                                             double metric_scale,
                                             const AssociationThresholds& th) {
  th.validate();
  std::vector<Assignment> assignments;
  assignments.reserve(detections.size());

  for (const Detection& det : detections) {
    det.validate();
    std::vector<Vec3> global_points =
        lift_points(camera_global_pose, metric_scale, det.points_camera);
    const OrientedBox candidate_box = fit_oriented_box(global_points);

    // Dual gate: geometric overlap and semantic agreement; best cosine wins.
    int best_id = -1;
    double best_cosine = -2.0;
    for (const auto& [id, node] : graph.nodes) {
      if (box_iou(candidate_box, node.box) < th.min_iou) continue;
      const double cos = cosine_similarity(det.embedding, node.embedding());
      if (cos < th.min_cosine) continue;
      if (cos > best_cosine) {
        best_cosine = cos;
        best_id = id;
      }
    }

    if (best_id >= 0) {
      merge_into(graph.nodes.at(best_id), det.label, det.embedding,
                 std::move(global_points), th);
      assignments.push_back({false, best_id});
    } else {
      ObjectNode node;
      node.label_votes[det.label] = 1;
      node.embedding_sum = det.embedding;
      node.points = voxel_downsample(global_points, th.downsample_leaf);
      node.box = fit_oriented_box(node.points);
      node.detection_count = 1;
      const int id = graph.add_node(std::move(node));
      assignments.push_back({true, id});
    }
  }
  return assignments;
}

void consolidate_nodes(SceneGraph& graph, const AssociationThresholds& th) {
  th.validate();
  while (true) {
    int keep_id = -1, drop_id = -1;
    double best_iou = 0.0;
    for (auto ia = graph.nodes.begin(); ia != graph.nodes.end(); ++ia) {
      for (auto ib = std::next(ia); ib != graph.nodes.end(); ++ib) {
        const double iou = box_iou(ia->second.box, ib->second.box);
        if (iou < th.consolidate_iou || iou <= best_iou) continue;
        if (cosine_similarity(ia->second.embedding(), ib->second.embedding()) <
            th.min_cosine)
          continue;
        best_iou = iou;
        keep_id = ia->first;
        drop_id = ib->first;
      }
    }
    if (keep_id < 0) return;

    ObjectNode& keep = graph.nodes.at(keep_id);
    const ObjectNode& drop = graph.nodes.at(drop_id);
    keep.points.insert(keep.points.end(), drop.points.begin(), drop.points.end());
    keep.points = voxel_downsample(keep.points, th.downsample_leaf);
    for (std::size_t i = 0; i < keep.embedding_sum.values.size(); ++i)
      keep.embedding_sum.values[i] += drop.embedding_sum.values[i];
    for (const auto& [label, count] : drop.label_votes) keep.label_votes[label] += count;
    keep.detection_count += drop.detection_count;
    keep.box = fit_oriented_box(keep.points);
    graph.remove_node(drop_id);
  }
}

}  // namespace asg
