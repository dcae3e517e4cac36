#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dog/chain_tracker.hpp"
#include "dog/kg_store.hpp"

namespace dog {

// Answers announced after the last "the answer is": every "* "-marked item,
// with list glue (", and", "and", ",") and trailing periods removed. The
// answer region ends at the first line break after the marker.
std::vector<std::string> extract_answers(std::string_view text);

// 1 iff the first prediction equals any gold answer under normalize_answer.
int hits_at_1(std::span<const std::string> predicted, std::span<const std::string> gold);

// F1 between the deduplicated predicted triplets and the gold set, fields
// compared under normalize_answer. 0 for an empty prediction or gold set.
double triplet_f1(std::span<const Triplet> predicted, std::span<const Triplet> gold);

// Fraction of chain steps flagged by validate_chain; 0 for an empty chain.
double ill_triplet_rate(std::span<const Triplet> chain, const KnowledgeGraph& graph,
                        std::span<const EntityLabel> query_entities);

}  // namespace dog
