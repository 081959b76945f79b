#include "asg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "asg/errors.hpp"

namespace asg {

void MatchThresholds::validate() const {
  if (!(min_semantic > 0.0 && min_semantic <= 1.0))
    throw std::invalid_argument("MatchThresholds: min_semantic out of (0,1]");
  if (!(max_centroid_dist > 0.0))
    throw std::invalid_argument("MatchThresholds: max_centroid_dist must be positive");
}

std::vector<NodeMatch> match_nodes(const SceneGraph& pred, const SceneSpec& gt,
                                   const MatchThresholds& th,
                                   std::uint64_t experiment_seed, int embedding_dim) {
  th.validate();

  // Ground-truth label embeddings under the same experiment seed.
  std::map<std::string, SemanticEmbedding> gt_embeddings;
  for (const SceneObject& obj : gt.objects)
    if (!gt_embeddings.count(obj.label))
      gt_embeddings[obj.label] = embed_label(obj.label, embedding_dim, experiment_seed);

  std::vector<NodeMatch> candidates;
  for (const auto& [pred_id, node] : pred.nodes) {
    const SemanticEmbedding node_emb = node.embedding();
    for (std::size_t g = 0; g < gt.objects.size(); ++g) {
      const SceneObject& obj = gt.objects[g];
      const double cos = cosine_similarity(node_emb, gt_embeddings.at(obj.label));
      if (cos < th.min_semantic) continue;
      const double dist = (node.box.center - obj.box.center).norm();
      if (dist > th.max_centroid_dist) continue;
      candidates.push_back({pred_id, static_cast<int>(g), cos, dist});
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const NodeMatch& a, const NodeMatch& b) {
              if (a.cosine != b.cosine) return a.cosine > b.cosine;
              if (a.centroid_dist != b.centroid_dist)
                return a.centroid_dist < b.centroid_dist;
              if (a.pred_id != b.pred_id) return a.pred_id < b.pred_id;
              return a.gt_index < b.gt_index;
            });

  std::vector<NodeMatch> matching;
  std::map<int, bool> pred_used;
  std::vector<std::uint8_t> gt_used(gt.objects.size(), 0);
  for (const NodeMatch& c : candidates) {
    if (pred_used.count(c.pred_id) || gt_used[static_cast<std::size_t>(c.gt_index)])
      continue;
    pred_used[c.pred_id] = true;
    gt_used[static_cast<std::size_t>(c.gt_index)] = 1;
    matching.push_back(c);
  }
  return matching;
}

Metrics compute_metrics(std::size_t match_count, std::size_t n_pred, std::size_t n_gt) {
  if (n_gt == 0) throw std::invalid_argument("compute_metrics: n_gt must be positive");
  if (match_count > std::min(n_pred, n_gt))
    throw std::invalid_argument("compute_metrics: matching larger than one side");
  Metrics m;
  m.precision = n_pred == 0 ? 0.0
                            : static_cast<double>(match_count) / static_cast<double>(n_pred);
  m.recall = static_cast<double>(match_count) / static_cast<double>(n_gt);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

std::string steps_csv_header() {
  return "step,planner,nodes_pred,nodes_gt,precision,recall,f1,selected_viewpoint,"
         "selected_score,travel_m,wall_ms";
}

std::string step_record_csv(const StepRecord& r) {
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%d,%s,%d,%d,%.6f,%.6f,%.6f,%d,%.6f,%.3f,%lld",
                r.step, r.planner.c_str(), r.nodes_pred, r.nodes_gt, r.precision,
                r.recall, r.f1, r.selected_viewpoint, r.selected_score, r.travel_m,
                static_cast<long long>(r.wall_ms));
  return buf;
}

void write_steps_csv(const std::string& path, const std::vector<StepRecord>& records) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw ConfigError("cannot write csv: " + path);
  out << steps_csv_header() << "\n";
  for (const StepRecord& r : records) out << step_record_csv(r) << "\n";
}

std::vector<StepRecord> read_steps_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != steps_csv_header())
    throw ConfigError("unexpected csv header in " + path);
  std::vector<StepRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    StepRecord r;
    auto next = [&]() {
      if (!std::getline(ss, field, ',')) throw ConfigError("short csv row in " + path);
      return field;
    };
    r.step = std::stoi(next());
    r.planner = next();
    r.nodes_pred = std::stoi(next());
    r.nodes_gt = std::stoi(next());
    r.precision = std::stod(next());
    r.recall = std::stod(next());
    r.f1 = std::stod(next());
    r.selected_viewpoint = std::stoi(next());
    r.selected_score = std::stod(next());
    r.travel_m = std::stod(next());
    r.wall_ms = std::stoll(next());
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace asg
