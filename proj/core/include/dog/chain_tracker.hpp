#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dog/kg_store.hpp"

namespace dog {

using Chain = std::vector<Triplet>;

// The query-centric subgraph: every source triplet incident to a visited
// entity. Value type; each beam candidate owns its copy while the source
// graph is shared read-only.
class QuerySubgraph {
 public:
  const KnowledgeGraph& source() const noexcept { return *source_; }
  const GraphPtr& source_ptr() const noexcept { return source_; }

  // Source indices of member triplets, ascending.
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::vector<Triplet> triplets() const;
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  bool contains(const Triplet& t) const;
  bool contains_index(std::size_t idx) const { return idx < member_.size() && member_[idx]; }

  const std::set<EntityLabel>& visited_entities() const noexcept { return visited_; }
  const std::vector<EntityLabel>& query_entities() const noexcept { return query_; }

  friend bool operator==(const QuerySubgraph& a, const QuerySubgraph& b) {
    return a.source_ == b.source_ && a.indices_ == b.indices_ && a.visited_ == b.visited_;
  }

 private:
  friend QuerySubgraph init_subgraph(GraphPtr, std::span<const EntityLabel>, std::vector<std::string>*);
  friend QuerySubgraph expand(const QuerySubgraph&, const Triplet&);

  void visit(const EntityLabel& entity);

  GraphPtr source_;
  std::vector<bool> member_;
  std::vector<std::size_t> indices_;
  std::set<EntityLabel> visited_;
  std::vector<EntityLabel> query_;
};

// Seeds the subgraph with every triplet incident to any query entity. Query
// entities without incident triplets are kept as visited and reported through
// `warnings` (if given) rather than failing. Throws dog::DataError when
// `query_entities` is empty or `graph` is null.
QuerySubgraph init_subgraph(GraphPtr graph, std::span<const EntityLabel> query_entities,
                            std::vector<std::string>* warnings = nullptr);

// Adds every source triplet incident to chosen.head or chosen.tail and marks
// both visited. Throws dog::ContractViolation if `chosen` is not a member.
QuerySubgraph expand(const QuerySubgraph& subgraph, const Triplet& chosen);

enum class Property { kExistsInGraph = 1, kConnectedToVisited = 2 };

struct StepViolation {
  std::size_t step = 0;  // 1-based
  Property property = Property::kExistsInGraph;

  friend bool operator==(const StepViolation&, const StepViolation&) = default;
};

struct ValidationReport {
  bool well_formed = true;
  std::vector<StepViolation> violations;
  // 1-based steps repeating an earlier triplet. Informational only.
  std::vector<std::size_t> repeated_steps;

  bool step_violates(std::size_t step) const;
  std::size_t violating_steps() const;
};

// Checks both well-formedness properties step by step. Property 2 looks at
// the query entities plus endpoints of all earlier steps, valid or not.
ValidationReport validate_chain(std::span<const Triplet> chain, const KnowledgeGraph& graph,
                                std::span<const EntityLabel> query_entities);

// "PROPERTY_1" / "PROPERTY_2"
std::string to_string(Property p);
Property property_from_string(std::string_view s);

std::string report_to_json(const ValidationReport& report);

}  // namespace dog
