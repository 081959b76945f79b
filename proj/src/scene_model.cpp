#include "asg/scene_model.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "asg/kernels.hpp"
#include "asg/prng.hpp"

namespace asg {

double SemanticEmbedding::norm() const {
  return std::sqrt(kernels::dot(values.data(), values.data(), values.size()));
}

void SemanticEmbedding::renormalize() {
  const double n = norm();
  if (!(n > 0.0))
    throw std::invalid_argument("SemanticEmbedding: cannot normalize zero vector");
  for (double& v : values) v /= n;
}

SemanticEmbedding embed_label(const std::string& label, int dim,
                              std::uint64_t experiment_seed) {
  if (label.empty()) throw std::invalid_argument("embed_label: empty label");
  if (dim < 8) throw std::invalid_argument("embed_label: dim must be >= 8");
  Rng rng(mix_seed(experiment_seed, hash_string(label), 0xE3BEDull));
  SemanticEmbedding e;
  e.values.resize(static_cast<std::size_t>(dim));
  for (double& v : e.values) v = rng.gaussian();
  e.renormalize();
  return e;
}

double cosine_similarity(const SemanticEmbedding& a, const SemanticEmbedding& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("cosine_similarity: dimension mismatch");
  return kernels::dot(a.values.data(), b.values.data(), a.values.size());
}

const char* predicate_name(RelationPredicate p) {
  switch (p) {
    case RelationPredicate::on_top_of: return "on_top_of";
    case RelationPredicate::supports: return "supports";
    case RelationPredicate::under: return "under";
    case RelationPredicate::over: return "over";
    case RelationPredicate::inside: return "inside";
    case RelationPredicate::next_to: return "next_to";
  }
  return "unknown";
}

std::optional<RelationPredicate> predicate_from_name(const std::string& name) {
  for (RelationPredicate p :
       {RelationPredicate::on_top_of, RelationPredicate::supports,
        RelationPredicate::under, RelationPredicate::over, RelationPredicate::inside,
        RelationPredicate::next_to}) {
    if (name == predicate_name(p)) return p;
  }
  return std::nullopt;
}

void Detection::validate() const {
  if (label.empty()) throw std::invalid_argument("Detection: empty label");
  if (points_camera.empty())
    throw std::invalid_argument("Detection: empty point set");
  for (const Vec3& p : points_camera)
    if (!(p.z > 0.0))
      throw std::invalid_argument("Detection: camera-frame point with z <= 0");
}

SemanticEmbedding ObjectNode::embedding() const {
  SemanticEmbedding e = embedding_sum;
  e.renormalize();
  return e;
}

std::string ObjectNode::display_label() const {
  std::string best;
  int best_count = -1;
  for (const auto& [label, count] : label_votes) {
    if (count > best_count) {  // map order is lexicographic, first wins ties
      best = label;
      best_count = count;
    }
  }
  return best;
}

int SceneGraph::add_node(ObjectNode node) {
  node.id = next_node_id++;
  const int id = node.id;
  nodes.emplace(id, std::move(node));
  return id;
}

void SceneGraph::remove_node(int id) {
  nodes.erase(id);
  for (auto it = edges.begin(); it != edges.end();) {
    if (it->source_id == id || it->target_id == id)
      it = edges.erase(it);
    else
      ++it;
  }
}

void SceneGraph::add_edge(const RelationEdge& edge) {
  if (edge.source_id == edge.target_id)
    throw std::invalid_argument("SceneGraph: self edge");
  if (!nodes.count(edge.source_id) || !nodes.count(edge.target_id))
    throw std::invalid_argument("SceneGraph: edge endpoint not in graph");
  for (const RelationEdge& e : edges)
    if (e.source_id == edge.source_id && e.target_id == edge.target_id)
      throw std::invalid_argument("SceneGraph: duplicate ordered pair");
  edges.insert(edge);
}

void SceneGraph::check_invariants() const {
  std::set<std::pair<int, int>> pairs;
  for (const RelationEdge& e : edges) {
    if (e.source_id == e.target_id) throw std::logic_error("graph: self edge");
    if (!nodes.count(e.source_id) || !nodes.count(e.target_id))
      throw std::logic_error("graph: dangling edge endpoint");
    if (!pairs.emplace(e.source_id, e.target_id).second)
      throw std::logic_error("graph: duplicate ordered pair");
  }
  for (const auto& [id, node] : nodes) {
    if (node.id != id) throw std::logic_error("graph: node id mismatch");
    if (node.points.empty()) throw std::logic_error("graph: node without points");
    int votes = 0;
    for (const auto& [_, c] : node.label_votes) votes += c;
    if (votes != node.detection_count)
      throw std::logic_error("graph: detection_count != vote total");
  }
}

nlohmann::ordered_json graph_to_json(const SceneGraph& graph) {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& [id, node] : graph.nodes) {
    nlohmann::ordered_json n;
    n["id"] = id;
    n["label"] = node.display_label();
    n["label_votes"] = nlohmann::ordered_json::object();
    for (const auto& [label, count] : node.label_votes) n["label_votes"][label] = count;
    Vec3 centroid;
    for (const Vec3& p : node.points) centroid = centroid + p;
    const double inv = node.points.empty() ? 0.0 : 1.0 / static_cast<double>(node.points.size());
    n["centroid"] = {centroid.x * inv, centroid.y * inv, centroid.z * inv};
    n["box"] = {{"center", {node.box.center.x, node.box.center.y, node.box.center.z}},
                {"yaw", node.box.yaw},
                {"extents", {node.box.extents.x, node.box.extents.y, node.box.extents.z}}};
    n["detection_count"] = node.detection_count;
    j["nodes"].push_back(std::move(n));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const RelationEdge& e : graph.edges) {
    j["edges"].push_back({{"source", e.source_id},
                          {"target", e.target_id},
                          {"predicate", predicate_name(e.predicate)}});
  }
  j["step"] = graph.step;
  return j;
}

}  // namespace asg
