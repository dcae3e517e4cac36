#pragma once

// Deterministic random fixtures shared by unit and acceptance tests.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dog/dog.hpp"

namespace dog::testing {

using Rng = std::mt19937_64;

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words{"1.", "2.", "3.", "This", "tells", "us", "so",
                                              "Therefore,", "the", "answer", "is", "*"};
  return words;
}

// Triplets over a small entity pool; some entity names span two tokens and
// share a first token so the trie branches inside a field.
std::vector<Triplet> random_triplets(Rng& rng, std::size_t count, std::size_t entity_pool = 10,
                                     std::size_t relation_pool = 4);

struct Fixture {
  GraphPtr graph;
  std::vector<EntityLabel> query;
  std::shared_ptr<const Tokenizer> tokenizer;
  TokenSeq prompt;
};

// Graph of `count` random triplets, a query entity taken from the graph, a
// reference tokenizer covering graph, prompt and filler words.
Fixture random_fixture(Rng& rng, std::size_t count, std::size_t entity_pool = 10, std::size_t relation_pool = 4);

Fixture make_fixture(std::vector<Triplet> triplets, std::vector<EntityLabel> query);

// Random table scorer: uniform default, a global rule favouring t_bos, and
// random per-suffix overrides, some of which make eos win after a triplet.
TableScorer random_table_scorer(Rng& rng, const Fixture& fx, std::size_t rules = 24);

// Random logits with t_bos and eos boosted so chains start and terminate.
RandomScorer marker_biased_random_scorer(const Fixture& fx, std::uint64_t seed);

// Table scorer that walks the gold chain: numbers each step ("1. < ... >"),
// then writes "Therefore, the answer is * {answer}." and stops.
TableScorer gold_path_scorer(const Tokenizer& tokenizer, const TokenSeq& prompt, const Chain& gold,
                             const std::string& answer, double strength = 10.0);

// Twenty small QA instances with known gold chains of one to three hops.
std::vector<QaInstance> toy_dataset(std::uint64_t seed, std::size_t n = 20);

}  // namespace dog::testing
