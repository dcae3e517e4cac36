#include "dog/trie.hpp"

#include <algorithm>
#include <cmath>

#include "dog/error.hpp"

namespace dog {

TokenTrie::TokenTrie() : nodes_(1) {}

void TokenTrie::insert_suffixes(std::span<const TokenId> seq) {
  for (std::size_t start = 0; start < seq.size(); ++start) {
    NodeId node = kRoot;
    for (std::size_t i = start; i < seq.size(); ++i) {
      auto [it, inserted] = nodes_[node].children.try_emplace(seq[i], static_cast<NodeId>(nodes_.size()));
      const NodeId next = it->second;
      if (inserted) nodes_.emplace_back();
      node = next;
    }
  }
}

TokenTrie::NodeId TokenTrie::child(NodeId node, TokenId token) const {
  if (node == kNoNode) return kNoNode;
  const auto& kids = nodes_.at(node).children;
  auto it = kids.find(token);
  return it == kids.end() ? kNoNode : it->second;
}

TokenTrie::NodeId TokenTrie::walk(std::span<const TokenId> prefix, NodeId from) const {
  NodeId node = from;
  for (TokenId t : prefix) {
    node = child(node, t);
    if (node == kNoNode) break;
  }
  return node;
}

ValidSet TokenTrie::children(NodeId node) const {
  ValidSet out;
  if (node == kNoNode) return out;
  const auto& kids = nodes_.at(node).children;
  out.reserve(kids.size());
  for (const auto& [tok, _] : kids) out.push_back(tok);
  return out;
}

std::string TokenTrie::dump() const {
  std::string out;
  dump_node(kRoot, out);
  return out;
}

void TokenTrie::dump_node(NodeId node, std::string& out) const {
  out += '{';
  bool first = true;
  for (const auto& [tok, next] : nodes_[node].children) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(tok);
    out += ": ";
    dump_node(next, out);
  }
  out += '}';
}

TokenTrie build_trie(std::span<const TokenSeq> sequences) {
  TokenTrie trie;
  for (const auto& seq : sequences) trie.insert_suffixes(seq);
  return trie;
}

TokenTrie build_trie(std::span<const Triplet> subgraph, const Tokenizer& tokenizer) {
  TokenTrie trie;
  for (const auto& t : subgraph) trie.insert_suffixes(serialize_triplet(tokenizer, t));
  return trie;
}

ValidSet find_valid_tokens(const TokenTrie& trie, std::span<const TokenId> prefix) {
  return trie.children(trie.walk(prefix));
}

std::vector<double> mask_logits(std::span<const double> logits, const ValidSet& valid) {
  if (valid.empty()) throw DeadEndError("no valid token to keep");
  std::vector<double> out(logits.size(), -std::numeric_limits<double>::infinity());
  for (TokenId id : valid) {
    if (id < 0 || static_cast<std::size_t>(id) >= logits.size())
      throw ContractViolation("valid token id outside logit vector: " + std::to_string(id));
    out[static_cast<std::size_t>(id)] = logits[static_cast<std::size_t>(id)];
  }
  return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : logits) hi = std::max(hi, x);
  std::vector<double> out(logits.size(), -std::numeric_limits<double>::infinity());
  if (!std::isfinite(hi)) return out;
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - hi);
  const double log_z = hi + std::log(sum);
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto out = log_softmax(logits);
  for (double& x : out) x = std::exp(x);
  return out;
}

}  // namespace dog
