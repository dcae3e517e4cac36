#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dog {

using EntityLabel = std::string;

struct Triplet {
  std::string head;
  std::string relation;
  std::string tail;

  friend bool operator==(const Triplet&, const Triplet&) = default;
  friend auto operator<=>(const Triplet&, const Triplet&) = default;
};

struct TripletHash {
  std::size_t operator()(const Triplet& t) const noexcept;
};

// Builds a triplet from raw fields: NFC-normalizes and trims each field, then
// checks the field invariants (non-empty, no tab/newline, no " -> " token
// boundary). Throws dog::DataError naming the offending field.
Triplet make_triplet(std::string_view head, std::string_view relation, std::string_view tail);

// Throws dog::DataError if `t` is not already in normalized, valid form.
void check_triplet(const Triplet& t);

// Human-readable "(h, r, t)".
std::string to_string(const Triplet& t);

struct ScoredTriplet {
  Triplet triplet;
  double score = 0.0;
};

// Immutable, deduplicated triplet store with an entity incidence index.
// Iteration order is insertion order of first occurrence.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Triplets are validated; duplicates are dropped keeping the first.
  static KnowledgeGraph from_triplets(std::span<const Triplet> triplets);
  static KnowledgeGraph from_triplets(std::initializer_list<Triplet> triplets);

  std::size_t size() const noexcept { return triplets_.size(); }
  bool empty() const noexcept { return triplets_.empty(); }
  const std::vector<Triplet>& triplets() const noexcept { return triplets_; }
  const Triplet& at(std::size_t index) const { return triplets_.at(index); }

  // Triplet indices incident to `entity` in ascending order. A self-loop
  // appears once per role, i.e. twice. Unknown entities yield an empty span.
  std::span<const std::size_t> incident(std::string_view entity) const;

  bool has_entity(std::string_view entity) const;
  std::optional<std::size_t> index_of(const Triplet& t) const;
  bool contains(const Triplet& t) const { return index_of(t).has_value(); }

  // Entities in order of first appearance.
  const std::vector<EntityLabel>& entities() const noexcept { return entities_; }

 private:
  void add(Triplet t);

  std::vector<Triplet> triplets_;
  std::vector<EntityLabel> entities_;
  std::unordered_map<std::string, std::vector<std::size_t>> incidence_;
  std::unordered_map<Triplet, std::size_t, TripletHash> index_;
};

using GraphPtr = std::shared_ptr<const KnowledgeGraph>;

// Reads the TSV triple format: one "head\trelation\ttail" per line, blank
// lines and lines starting with '#' skipped. Throws dog::ParseError with the
// 1-based line number on malformed lines.
KnowledgeGraph load_graph(std::istream& in);
KnowledgeGraph load_graph_file(const std::string& path);

void write_graph(std::ostream& out, const KnowledgeGraph& graph);

// All triplets with `entity` as head or tail, in insertion order.
std::vector<Triplet> neighbors(const KnowledgeGraph& graph, std::string_view entity);

// "[ h1 -> r1 -> t1 | h2 -> r2 -> t2 ]". Throws dog::DataError on an empty graph.
std::string linearize(const KnowledgeGraph& graph);

// Inverse of linearize for graphs whose fields respect the Triplet invariants.
KnowledgeGraph parse_linearized(std::string_view text);

using SimilarityScorer = std::function<double(const Triplet&, std::string_view question)>;

// Greedy connected top-k selection: walk triplets by descending similarity
// (ties by insertion order) and add each one together with the triplets on a
// shortest undirected path from the query entities to its nearer endpoint.
// Stops once the result holds at least k triplets; the last path may overshoot.
// Triplets unreachable from every query entity are skipped.
KnowledgeGraph select_topk_connected(const KnowledgeGraph& graph,
                                     std::span<const EntityLabel> query_entities,
                                     const SimilarityScorer& scorer,
                                     std::string_view question,
                                     std::size_t k);

// Bag-of-words Jaccard overlap between "(h, r, t)" and the question, after
// answer normalization and splitting relations on '.' and '_'. Stand-in for an
// embedding model when none is injected.
double lexical_similarity(const Triplet& t, std::string_view question);

}  // namespace dog
