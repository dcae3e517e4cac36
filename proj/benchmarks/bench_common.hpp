#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "dog/dog.hpp"

namespace bench {

struct Setup {
  dog::GraphPtr graph;
  std::vector<dog::EntityLabel> query;
  std::shared_ptr<const dog::Tokenizer> tokenizer;
  dog::TokenSeq prompt;
};

// Random graph with `n` triplets over about n/3 entities, queried from the
// head of its first triplet.
inline Setup make_setup(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  const std::size_t entities = std::max<std::size_t>(4, n / 3);
  std::vector<dog::Triplet> ts;
  for (std::size_t i = 0; i < n; ++i) {
    ts.push_back(dog::make_triplet("ent " + std::to_string(rng() % entities), "rel.r" + std::to_string(rng() % 12),
                                   "ent " + std::to_string(rng() % entities)));
  }
  Setup s;
  s.graph = std::make_shared<const dog::KnowledgeGraph>(dog::KnowledgeGraph::from_triplets(ts));
  s.query = {s.graph->at(0).head};
  std::vector<std::string> texts{"Question : which one ? Answer :"};
  for (const auto& t : s.graph->triplets()) texts.push_back(dog::triplet_surface(t));
  s.tokenizer = std::make_shared<const dog::WhitespaceTokenizer>(
      std::make_shared<const dog::Vocabulary>(dog::build_vocabulary(texts)));
  s.prompt = s.tokenizer->encode(texts.front());
  return s;
}

}  // namespace bench
