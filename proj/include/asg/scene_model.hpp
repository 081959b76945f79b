#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "asg/geometry.hpp"

namespace asg {

// Unit-norm semantic descriptor. Stands in for a learned embedding; produced
// deterministically from (experiment_seed, label).
struct SemanticEmbedding {
  std::vector<double> values;

  int dim() const { return static_cast<int>(values.size()); }
  double norm() const;
  void renormalize();
};

constexpr int kDefaultEmbeddingDim = 64;

// Deterministic unit vector keyed on (experiment_seed, label). Distinct labels
// give near-orthogonal vectors at dim 64.
SemanticEmbedding embed_label(const std::string& label, int dim,
                              std::uint64_t experiment_seed);

double cosine_similarity(const SemanticEmbedding& a, const SemanticEmbedding& b);

enum class RelationPredicate : std::uint8_t {
  on_top_of,
  supports,
  under,
  over,
  inside,
  next_to,
};

const char* predicate_name(RelationPredicate p);
std::optional<RelationPredicate> predicate_from_name(const std::string& name);

struct RelationEdge {
  int source_id = -1;
  int target_id = -1;
  RelationPredicate predicate = RelationPredicate::next_to;

  bool operator<(const RelationEdge& o) const {
    if (source_id != o.source_id) return source_id < o.source_id;
    if (target_id != o.target_id) return target_id < o.target_id;
    return predicate < o.predicate;
  }
  bool operator==(const RelationEdge& o) const = default;
};

enum class DetectionSource : std::uint8_t { onboard, external };

struct Detection {
  std::string label;
  SemanticEmbedding embedding;
  std::vector<Vec3> points_camera;  // camera frame, z > 0
  DetectionSource source = DetectionSource::onboard;
  int external_index = -1;

  void validate() const;  // throws std::invalid_argument
};

// Merged multi-view object instance. The embedding accumulator keeps the
// unnormalized sum of detection embeddings; the exposed embedding is the
// renormalized running mean (same direction).
struct ObjectNode {
  int id = -1;
  std::map<std::string, int> label_votes;
  SemanticEmbedding embedding_sum;
  std::vector<Vec3> points;
  OrientedBox box;
  int detection_count = 0;

  SemanticEmbedding embedding() const;
  // Argmax of label_votes, ties broken lexicographically.
  std::string display_label() const;
};

struct SceneGraph {
  std::map<int, ObjectNode> nodes;
  std::set<RelationEdge> edges;
  int step = 0;
  int next_node_id = 0;

  // Inserts a node under a fresh id and returns it.
  int add_node(ObjectNode node);
  // Removes the node and any edges touching it.
  void remove_node(int id);
  // Throws std::invalid_argument on endpoint violations or ordered-pair
  // duplicates.
  void add_edge(const RelationEdge& edge);
  void check_invariants() const;  // throws std::logic_error on violation
};

// Export schema used by the harness and the remote-sampler protocol.
nlohmann::ordered_json graph_to_json(const SceneGraph& graph);

}  // namespace asg
