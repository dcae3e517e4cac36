#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dog/kg_store.hpp"
#include "dog/token_space.hpp"

namespace dog {

// Token ids permitted at the next position, ascending and unique.
using ValidSet = std::vector<TokenId>;

// Trie over token-id sequences. Every suffix of every inserted sequence is a
// root path, so a lookup answers "which tokens can follow this run of tokens
// anywhere inside some inserted sequence". Queries that start with t_bos
// (which only ever occurs at position 0) reduce to ordinary prefix lookups.
class TokenTrie {
 public:
  using NodeId = std::uint32_t;
  static constexpr NodeId kRoot = 0;
  static constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

  TokenTrie();

  void insert_suffixes(std::span<const TokenId> seq);

  // kNoNode when `node` has no child labelled `token` (or node is kNoNode).
  NodeId child(NodeId node, TokenId token) const;
  NodeId walk(std::span<const TokenId> prefix, NodeId from = kRoot) const;
  ValidSet children(NodeId node) const;
  bool is_leaf(NodeId node) const { return nodes_.at(node).children.empty(); }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.front().children.empty(); }

  // Nested-map rendering with ascending keys, e.g. "{5: {6: {}}, 6: {}}".
  std::string dump() const;

 private:
  struct Node {
    std::map<TokenId, NodeId> children;
  };
  void dump_node(NodeId node, std::string& out) const;

  std::vector<Node> nodes_;
};

TokenTrie build_trie(std::span<const TokenSeq> sequences);

// Serializes each triplet with serialize_triplet and inserts all suffixes.
TokenTrie build_trie(std::span<const Triplet> subgraph, const Tokenizer& tokenizer);

// Child keys of the node reached by walking `prefix` from the root; empty
// when the walk falls off the trie.
ValidSet find_valid_tokens(const TokenTrie& trie, std::span<const TokenId> prefix);

// Keeps logits of ids in `valid` bit-for-bit and sets the rest to -inf.
// Throws dog::DeadEndError on an empty set and dog::ContractViolation on
// ids outside the logit vector.
std::vector<double> mask_logits(std::span<const double> logits, const ValidSet& valid);

// Numerically stable log-softmax; -inf entries map to -inf (probability 0).
std::vector<double> log_softmax(std::span<const double> logits);
std::vector<double> softmax(std::span<const double> logits);

}  // namespace dog
