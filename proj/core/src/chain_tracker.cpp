#include "dog/chain_tracker.hpp"

#include <algorithm>
#include <json.hpp>

#include "dog/error.hpp"
#include "dog/text.hpp"

namespace dog {

std::vector<Triplet> QuerySubgraph::triplets() const {
  std::vector<Triplet> out;
  out.reserve(indices_.size());
  for (std::size_t idx : indices_) out.push_back(source_->at(idx));
  return out;
}

bool QuerySubgraph::contains(const Triplet& t) const {
  auto idx = source_->index_of(t);
  return idx && contains_index(*idx);
}

void QuerySubgraph::visit(const EntityLabel& entity) {
  if (!visited_.insert(entity).second) return;
  bool added = false;
  for (std::size_t idx : source_->incident(entity)) {
    if (!member_[idx]) {
      member_[idx] = true;
      indices_.push_back(idx);
      added = true;
    }
  }
  if (added) std::sort(indices_.begin(), indices_.end());
}

QuerySubgraph init_subgraph(GraphPtr graph, std::span<const EntityLabel> query_entities,
                            std::vector<std::string>* warnings) {
  if (!graph) throw DataError("null graph");
  if (query_entities.empty()) throw DataError("at least one query entity is required");
  QuerySubgraph sg;
  sg.source_ = std::move(graph);
  sg.member_.assign(sg.source_->size(), false);
  for (const auto& raw : query_entities) {
    EntityLabel e = text::normalize_label(raw);
    if (std::find(sg.query_.begin(), sg.query_.end(), e) == sg.query_.end()) sg.query_.push_back(e);
    if (warnings && sg.source_->incident(e).empty())
      warnings->push_back("query entity has no incident triplets: " + e);
    sg.visit(e);
  }
  return sg;
}

QuerySubgraph expand(const QuerySubgraph& subgraph, const Triplet& chosen) {
  if (!subgraph.contains(chosen))
    throw ContractViolation("expanding with a triplet outside the subgraph: " + to_string(chosen));
  QuerySubgraph next = subgraph;
  next.visit(chosen.head);
  next.visit(chosen.tail);
  return next;
}

bool ValidationReport::step_violates(std::size_t step) const {
  return std::any_of(violations.begin(), violations.end(),
                     [step](const StepViolation& v) { return v.step == step; });
}

std::size_t ValidationReport::violating_steps() const {
  std::set<std::size_t> steps;
  for (const auto& v : violations) steps.insert(v.step);
  return steps.size();
}

ValidationReport validate_chain(std::span<const Triplet> chain, const KnowledgeGraph& graph,
                                std::span<const EntityLabel> query_entities) {
  ValidationReport report;
  std::set<EntityLabel> visited;
  for (const auto& e : query_entities) visited.insert(text::normalize_label(e));
  std::set<Triplet> seen;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Triplet& t = chain[i];
    const std::size_t step = i + 1;
    if (!graph.contains(t)) report.violations.push_back({step, Property::kExistsInGraph});
    if (!visited.contains(t.head) && !visited.contains(t.tail))
      report.violations.push_back({step, Property::kConnectedToVisited});
    if (!seen.insert(t).second) report.repeated_steps.push_back(step);
    visited.insert(t.head);
    visited.insert(t.tail);
  }
  report.well_formed = report.violations.empty();
  return report;
}

std::string to_string(Property p) {
  return p == Property::kExistsInGraph ? "PROPERTY_1" : "PROPERTY_2";
}

Property property_from_string(std::string_view s) {
  if (s == "PROPERTY_1") return Property::kExistsInGraph;
  if (s == "PROPERTY_2") return Property::kConnectedToVisited;
  throw DataError("unknown property tag: " + std::string(s));
}

std::string report_to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["well_formed"] = report.well_formed;
  j["violations"] = nlohmann::json::array();
  for (const auto& v : report.violations)
    j["violations"].push_back({{"step", v.step}, {"property", to_string(v.property)}});
  j["repeated_steps"] = report.repeated_steps;
  return j.dump();
}

}  // namespace dog
