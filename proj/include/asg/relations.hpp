#pragma once

#include <optional>

#include "asg/scene_model.hpp"

namespace asg {

struct RelationThresholds {
  double contact_gap = 0.05;              // meters
  double max_vertical_gap = 0.50;         // meters
  double min_footprint_overlap = 0.30;    // fraction
  double inside_fraction = 0.80;          // fraction
  double near_distance = 0.30;            // meters
  double min_height_interval_overlap = 0.25;  // fraction
  double on_top_containment_cap = 0.50;   // fraction

  void validate() const;  // throws std::invalid_argument
};

// Fixed-priority predicate evaluation for the ordered pair (a, b): the first
// matching rule wins, at most one predicate per ordered pair.
//   1. on_top_of  - vertical contact, footprint overlap, not contained in b
//   2. supports   - rule 1 for the swapped pair
//   3. under      - vertical adjacency below b
//   4. over       - rule 3 for the swapped pair
//   5. inside     - volumetric containment in b
//   6. next_to    - horizontal proximity at similar height
std::optional<RelationPredicate> evaluate_pair(const ObjectNode& a,
                                               const ObjectNode& b,
                                               const RelationThresholds& th);

// Replaces the graph's edge set with the predicate evaluation of every ordered
// node pair. Deterministic in the node ids, independent of iteration order.
SceneGraph infer_edges(SceneGraph graph, const RelationThresholds& th);

}  // namespace asg
