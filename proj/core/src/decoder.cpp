#include "dog/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <unordered_map>

#include "dog/error.hpp"

namespace dog {

namespace {

struct TokenSeqHash {
  std::size_t operator()(const TokenSeq& s) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (TokenId t : s) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(t));
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Serialized token sequences for the triplets of one source graph, computed
// on first use. Serialization errors surface only when a triplet is needed.
class TripletCodec {
 public:
  TripletCodec(const KnowledgeGraph& graph, const Tokenizer& tokenizer)
      : graph_(graph), tokenizer_(tokenizer), seqs_(graph.size()) {}

  const TokenSeq& tokens(std::size_t idx) {
    auto& slot = seqs_[idx];
    if (!slot) {
      slot = serialize_triplet(tokenizer_, graph_.at(idx));
      by_tokens_.emplace(*slot, idx);
    }
    return *slot;
  }

  TokenTrie trie_for(const QuerySubgraph& sg) {
    TokenTrie trie;
    for (std::size_t idx : sg.indices()) trie.insert_suffixes(tokens(idx));
    return trie;
  }

  std::size_t index_of(const TokenSeq& seq) const { return by_tokens_.at(seq); }

 private:
  const KnowledgeGraph& graph_;
  const Tokenizer& tokenizer_;
  std::vector<std::optional<TokenSeq>> seqs_;
  std::unordered_map<TokenSeq, std::size_t, TokenSeqHash> by_tokens_;
};

struct PartialBeam {
  TokenSeq tokens;
  TokenTrie::NodeId node;
  double score;
};

std::vector<TripletHypothesis> beam_search_triplets(const LmScorer& scorer,
                                                    std::span<const TokenId> context,
                                                    const QuerySubgraph& subgraph,
                                                    TripletCodec& codec, const Vocabulary& vocab,
                                                    std::size_t beam_size, bool length_normalize,
                                                    const DecodeHooks* hooks) {
  if (beam_size == 0) throw ConfigError("beam size must be at least 1");
  if (context.empty() || context.back() != vocab.t_bos_id())
    throw ContractViolation("constrained generation must start right after t_bos");
  if (subgraph.empty()) throw DeadEndError("query-centric subgraph is empty");

  const TokenTrie trie = codec.trie_for(subgraph);
  const TokenId t_bos = vocab.t_bos_id();
  const TokenId t_eos = vocab.t_eos_id();

  std::vector<PartialBeam> live{{TokenSeq{t_bos}, trie.child(TokenTrie::kRoot, t_bos), 0.0}};
  std::vector<PartialBeam> finished;
  TokenSeq scratch(context.begin(), context.end());
  const std::size_t base = scratch.size();

  while (!live.empty()) {
    std::vector<PartialBeam> expansions;
    for (const auto& beam : live) {
      const ValidSet valid = trie.children(beam.node);
      if (hooks && hooks->on_valid_set) hooks->on_valid_set(beam.tokens, valid);
      if (valid.empty()) continue;  // unreachable: every trie path ends with t_eos
      scratch.resize(base);
      scratch.insert(scratch.end(), beam.tokens.begin() + 1, beam.tokens.end());
      const std::vector<double> logits = scorer.next_logits(scratch);
      if (logits.size() != vocab.size())
        throw ContractViolation("scorer returned " + std::to_string(logits.size()) +
                                " logits for a vocabulary of " + std::to_string(vocab.size()));
      const std::vector<double> logp = log_softmax(mask_logits(logits, valid));
      for (TokenId tok : valid) {
        PartialBeam next{beam.tokens, trie.child(beam.node, tok),
                         beam.score + logp[static_cast<std::size_t>(tok)]};
        next.tokens.push_back(tok);
        expansions.push_back(std::move(next));
      }
    }
    std::stable_sort(expansions.begin(), expansions.end(),
                     [](const PartialBeam& a, const PartialBeam& b) { return a.score > b.score; });

    live.clear();
    for (std::size_t rank = 0; rank < expansions.size() && live.size() < beam_size; ++rank) {
      auto& e = expansions[rank];
      if (e.tokens.back() == t_eos) {
        if (rank < beam_size) finished.push_back(std::move(e));
      } else {
        live.push_back(std::move(e));
      }
    }

    if (finished.size() >= beam_size) {
      std::stable_sort(finished.begin(), finished.end(),
                       [](const PartialBeam& a, const PartialBeam& b) { return a.score > b.score; });
      finished.resize(beam_size);
      // Log-probabilities only decrease, so a live beam scoring no better
      // than the worst kept hypothesis can never displace it.
      if (live.empty() || live.front().score <= finished.back().score) break;
    }
  }

  std::stable_sort(finished.begin(), finished.end(),
                   [](const PartialBeam& a, const PartialBeam& b) { return a.score > b.score; });
  if (finished.size() > beam_size) finished.resize(beam_size);

  std::vector<TripletHypothesis> out;
  out.reserve(finished.size());
  for (auto& f : finished) {
    const std::size_t idx = codec.index_of(f.tokens);
    double score = f.score;
    if (length_normalize) score /= static_cast<double>(f.tokens.size() - 1);
    out.push_back({subgraph.source().at(idx), std::move(f.tokens), score});
  }
  if (length_normalize) {
    std::stable_sort(out.begin(), out.end(),
                     [](const TripletHypothesis& a, const TripletHypothesis& b) { return a.score > b.score; });
  }
  return out;
}

void close_candidate(BeamCandidate& c, const UnconstrainedSpan& span, const Vocabulary& vocab) {
  c.context.insert(c.context.end(), span.tokens.begin(), span.tokens.end());
  if (span.terminator == Terminator::kTripletBegin) c.context.pop_back();
  if (span.terminator != Terminator::kBudget) c.context.push_back(vocab.eos_id());
  c.finished = true;
}

// One triplet-level step for a single live candidate.
struct Expansion {
  std::vector<BeamCandidate> successors;
  bool dead_end = false;
};

Expansion expand_candidate(const LmScorer& scorer, const BeamCandidate& cand, TripletCodec& codec,
                           const Tokenizer& tokenizer, const DecodeConfig& config,
                           const DecodeHooks* hooks) {
  const Vocabulary& vocab = tokenizer.vocab();
  Expansion out;
  const UnconstrainedSpan span =
      run_unconstrained(scorer, cand.context, vocab, config.max_unconstrained_tokens);
  if (span.terminator != Terminator::kTripletBegin) {
    BeamCandidate done = cand;
    close_candidate(done, span, vocab);
    out.successors.push_back(std::move(done));
    return out;
  }
  if (cand.subgraph.empty()) {
    BeamCandidate done = cand;
    close_candidate(done, span, vocab);
    out.successors.push_back(std::move(done));
    out.dead_end = true;
    return out;
  }

  TokenSeq ctx = cand.context;
  ctx.insert(ctx.end(), span.tokens.begin(), span.tokens.end());
  auto hyps = beam_search_triplets(scorer, ctx, cand.subgraph, codec, vocab, config.beam_size,
                                   config.length_normalize, hooks);
  for (auto& h : hyps) {
    BeamCandidate next;
    next.context = ctx;
    next.context.insert(next.context.end(), h.tokens.begin() + 1, h.tokens.end());
    next.prompt_length = cand.prompt_length;
    next.subgraph = expand(cand.subgraph, h.triplet);
    if (hooks && hooks->on_expand) hooks->on_expand(cand.subgraph, h.triplet, next.subgraph);
    next.chain = cand.chain;
    next.chain.push_back(h.triplet);
    next.step_scores = cand.step_scores;
    next.step_scores.push_back(h.score);
    next.chain_score = cand.chain_score + h.score;
    out.successors.push_back(std::move(next));
  }
  return out;
}

void truncate_pool(std::vector<BeamCandidate>& pool, std::size_t beam_size) {
  // Merge identical contexts, keeping the better (or earlier) one in place.
  std::unordered_map<TokenSeq, std::size_t, TokenSeqHash> seen;
  std::vector<BeamCandidate> merged;
  merged.reserve(pool.size());
  for (auto& c : pool) {
    auto [it, inserted] = seen.try_emplace(c.context, merged.size());
    if (inserted) {
      merged.push_back(std::move(c));
    } else if (c.chain_score > merged[it->second].chain_score) {
      merged[it->second] = std::move(c);
    }
  }
  std::stable_sort(merged.begin(), merged.end(), [](const BeamCandidate& a, const BeamCandidate& b) {
    return a.chain_score > b.chain_score;
  });
  if (merged.size() > beam_size) merged.resize(beam_size);
  pool = std::move(merged);
}

}  // namespace

void DecodeConfig::validate() const {
  if (beam_size == 0) throw ConfigError("beam_size must be at least 1");
  if (max_steps == 0) throw ConfigError("max_steps must be at least 1");
  if (max_unconstrained_tokens == 0) throw ConfigError("max_unconstrained_tokens must be at least 1");
}

std::vector<TripletHypothesis> generate_triplet(const LmScorer& scorer, std::span<const TokenId> context,
                                                const QuerySubgraph& subgraph, const Tokenizer& tokenizer,
                                                std::size_t beam_size, bool length_normalize,
                                                const DecodeHooks* hooks) {
  TripletCodec codec(subgraph.source(), tokenizer);
  return beam_search_triplets(scorer, context, subgraph, codec, tokenizer.vocab(), beam_size,
                              length_normalize, hooks);
}

UnconstrainedSpan run_unconstrained(const LmScorer& scorer, std::span<const TokenId> context,
                                    const Vocabulary& vocab, std::size_t budget) {
  UnconstrainedSpan span;
  TokenSeq ctx(context.begin(), context.end());
  for (std::size_t i = 0; i < budget; ++i) {
    const std::vector<double> logits = scorer.next_logits(ctx);
    if (logits.size() != vocab.size())
      throw ContractViolation("scorer returned " + std::to_string(logits.size()) +
                              " logits for a vocabulary of " + std::to_string(vocab.size()));
    const auto best = static_cast<TokenId>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    if (best == vocab.eos_id()) {
      span.terminator = Terminator::kEndOfSequence;
      return span;
    }
    span.tokens.push_back(best);
    ctx.push_back(best);
    if (best == vocab.t_bos_id()) {
      span.terminator = Terminator::kTripletBegin;
      return span;
    }
  }
  span.terminator = Terminator::kBudget;
  return span;
}

std::vector<BeamCandidate> dog_decode(const LmScorer& scorer, std::span<const TokenId> prompt,
                                      GraphPtr graph, std::span<const EntityLabel> query_entities,
                                      const Tokenizer& tokenizer, const DecodeConfig& config,
                                      const DecodeHooks* hooks) {
  config.validate();
  if (prompt.empty()) throw DataError("prompt is empty");
  if (scorer.vocab_size() != tokenizer.vocab().size())
    throw ContractViolation("scorer and tokenizer disagree on vocabulary size");

  BeamCandidate root;
  root.context.assign(prompt.begin(), prompt.end());
  root.prompt_length = prompt.size();
  root.subgraph = init_subgraph(graph, query_entities);
  TripletCodec codec(*graph, tokenizer);

  const bool parallel = config.parallel && scorer.concurrent_safe() && hooks == nullptr;

  std::vector<BeamCandidate> pool{std::move(root)};
  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    std::vector<Expansion> expansions(pool.size());
    if (parallel) {
      // Each worker gets its own codec; the shared one is not synchronized.
      std::vector<std::future<Expansion>> jobs;
      for (const auto& cand : pool) {
        if (cand.finished) {
          jobs.push_back({});
          continue;
        }
        jobs.push_back(std::async(std::launch::async, [&, &c = cand] {
          TripletCodec local(*graph, tokenizer);
          return expand_candidate(scorer, c, local, tokenizer, config, nullptr);
        }));
      }
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (jobs[i].valid()) expansions[i] = jobs[i].get();
    } else {
      for (std::size_t i = 0; i < pool.size(); ++i)
        if (!pool[i].finished) expansions[i] = expand_candidate(scorer, pool[i], codec, tokenizer, config, hooks);
    }

    std::vector<BeamCandidate> next;
    bool all_dead = true;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].finished) {
        all_dead = false;
        next.push_back(std::move(pool[i]));
        continue;
      }
      all_dead = all_dead && expansions[i].dead_end;
      for (auto& s : expansions[i].successors) next.push_back(std::move(s));
    }
    if (step == 1 && all_dead) throw NoChainError("no triplet can be generated: query-centric subgraph is empty");

    truncate_pool(next, config.beam_size);
    pool = std::move(next);
    if (hooks && hooks->on_pool) hooks->on_pool(step, pool);
    if (std::all_of(pool.begin(), pool.end(), [](const BeamCandidate& c) { return c.finished; })) break;
  }

  for (auto& c : pool) {
    if (c.finished) continue;
    close_candidate(c, run_unconstrained(scorer, c.context, tokenizer.vocab(), config.max_unconstrained_tokens),
                    tokenizer.vocab());
  }
  std::stable_sort(pool.begin(), pool.end(), [](const BeamCandidate& a, const BeamCandidate& b) {
    return a.chain_score > b.chain_score;
  });
  return pool;
}

DecoderState::DecoderState(GraphPtr graph, std::span<const EntityLabel> query_entities,
                           std::shared_ptr<const Tokenizer> tokenizer)
    : tokenizer_(std::move(tokenizer)), subgraph_(init_subgraph(std::move(graph), query_entities)) {
  if (!tokenizer_) throw DataError("null tokenizer");
  trie_ = build_trie(subgraph_.triplets(), *tokenizer_);
}

ValidSet DecoderState::allowed() const {
  if (phase_ != Phase::kConstrained) return {};
  return trie_.children(node_);
}

PhaseReport DecoderState::feed(TokenId token) {
  const Vocabulary& vocab = tokenizer_->vocab();
  if (closed_) throw ContractViolation("token fed to a closed decoder state");
  if (!vocab.valid_id(token)) throw ContractViolation("token id out of range: " + std::to_string(token));

  PhaseReport report;
  if (phase_ == Phase::kUnconstrained) {
    if (token == vocab.eos_id()) {
      closed_ = true;
      report.closed = true;
      return report;
    }
    generated_.push_back(token);
    if (token == vocab.t_bos_id()) {
      phase_ = Phase::kConstrained;
      step_prefix_ = {token};
      node_ = trie_.child(TokenTrie::kRoot, token);
      report.phase = phase_;
      report.allowed = allowed();
      return report;
    }
    report.phase = phase_;
    return report;
  }

  const ValidSet valid = allowed();
  if (!std::binary_search(valid.begin(), valid.end(), token))
    throw ContractViolation("token " + std::to_string(token) + " is not allowed in the constrained phase");
  generated_.push_back(token);
  step_prefix_.push_back(token);
  node_ = trie_.child(node_, token);
  if (token == vocab.t_eos_id()) {
    Triplet t = parse_triplet(*tokenizer_, step_prefix_);
    subgraph_ = expand(subgraph_, t);
    trie_ = build_trie(subgraph_.triplets(), *tokenizer_);
    chain_.push_back(t);
    report.triplet_completed = std::move(t);
    phase_ = Phase::kUnconstrained;
    step_prefix_.clear();
    node_ = TokenTrie::kNoNode;
    report.phase = phase_;
    return report;
  }
  report.phase = phase_;
  report.allowed = allowed();
  return report;
}

}  // namespace dog
