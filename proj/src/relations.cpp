#include "asg/relations.hpp"

#include <stdexcept>

namespace asg {

void RelationThresholds::validate() const {
  const bool ok = contact_gap > 0 && max_vertical_gap > 0 &&
                  min_footprint_overlap > 0 && min_footprint_overlap <= 1 &&
                  inside_fraction > 0 && inside_fraction <= 1 && near_distance > 0 &&
                  min_height_interval_overlap > 0 && min_height_interval_overlap <= 1 &&
                  on_top_containment_cap > 0 && on_top_containment_cap <= 1;
  if (!ok) throw std::invalid_argument("RelationThresholds: out of range");
}

namespace {

bool rests_on(const OrientedBox& top, const OrientedBox& base,
              const RelationThresholds& th) {
  const double gap = top.zmin() - base.zmax();
  return gap >= -th.contact_gap && gap <= th.contact_gap &&
         footprint_overlap(top, base) >= th.min_footprint_overlap &&
         containment_fraction(top, base) <= th.on_top_containment_cap;
}

bool vertically_below(const OrientedBox& low, const OrientedBox& high,
                      const RelationThresholds& th) {
  if (!(low.zmax() < high.zmin())) return false;
  const double gap = high.zmin() - low.zmax();
  return gap > th.contact_gap && gap <= th.max_vertical_gap &&
         footprint_overlap(low, high) >= th.min_footprint_overlap;
}

bool contained_in(const OrientedBox& inner, const OrientedBox& outer,
                  const RelationThresholds& th) {
  return containment_fraction(inner, outer) >= th.inside_fraction &&
         inner.volume() <= outer.volume();
}

bool adjacent_to(const OrientedBox& a, const OrientedBox& b,
                 const RelationThresholds& th) {
  if (footprint_distance(a, b) > th.near_distance) return false;
  const double overlap = std::min(a.zmax(), b.zmax()) - std::max(a.zmin(), b.zmin());
  const double min_height = std::min(a.extents.z, b.extents.z);
  return overlap / min_height >= th.min_height_interval_overlap;
}

}  // namespace

std::optional<RelationPredicate> evaluate_pair(const ObjectNode& a,
                                               const ObjectNode& b,
                                               const RelationThresholds& th) {
  if (a.id == b.id) throw std::invalid_argument("evaluate_pair: identical nodes");
  const OrientedBox& A = a.box;
  const OrientedBox& B = b.box;
  if (rests_on(A, B, th)) return RelationPredicate::on_top_of;
  if (rests_on(B, A, th)) return RelationPredicate::supports;
  if (vertically_below(A, B, th)) return RelationPredicate::under;
  if (vertically_below(B, A, th)) return RelationPredicate::over;
  if (contained_in(A, B, th)) return RelationPredicate::inside;
  if (adjacent_to(A, B, th)) return RelationPredicate::next_to;
  return std::nullopt;
}

SceneGraph infer_edges(SceneGraph graph, const RelationThresholds& th) {
  th.validate();
  graph.edges.clear();
  for (const auto& [ida, a] : graph.nodes) {
    for (const auto& [idb, b] : graph.nodes) {
      if (ida == idb) continue;
      if (const auto pred = evaluate_pair(a, b, th))
        graph.edges.insert({ida, idb, *pred});
    }
  }
  return graph;
}

}  // namespace asg
