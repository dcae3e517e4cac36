#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dog/chain_tracker.hpp"
#include "dog/kg_store.hpp"
#include "dog/scorer.hpp"
#include "dog/token_space.hpp"
#include "dog/trie.hpp"

namespace dog {

enum class Phase { kUnconstrained, kConstrained };

// Why an unconstrained span stopped.
enum class Terminator { kTripletBegin, kEndOfSequence, kBudget };

struct DecodeConfig {
  std::size_t beam_size = 1;
  std::size_t max_steps = 4;
  std::size_t max_unconstrained_tokens = 128;
  std::uint64_t seed = 0;
  // Divide each triplet score by its token count. Off: triplet score is the
  // plain log-probability of the triplet.
  bool length_normalize = false;
  // Expand candidates on worker threads when the scorer allows it and no
  // hooks are installed.
  bool parallel = false;

  // Throws dog::ConfigError.
  void validate() const;
};

struct TripletHypothesis {
  Triplet triplet;
  TokenSeq tokens;  // t_bos ... t_eos
  double score = 0.0;
};

struct UnconstrainedSpan {
  TokenSeq tokens;  // ends with t_bos iff terminator == kTripletBegin; never holds eos
  Terminator terminator = Terminator::kEndOfSequence;
};

struct BeamCandidate {
  TokenSeq context;  // prompt + everything generated
  std::size_t prompt_length = 0;
  QuerySubgraph subgraph;
  double chain_score = 0.0;
  Chain chain;
  std::vector<double> step_scores;
  bool finished = false;

  std::span<const TokenId> generated() const {
    return std::span<const TokenId>(context).subspan(prompt_length);
  }
};

// Observation points, mostly for tests and golden traces. Hooks are invoked
// on the calling thread; installing any hook disables parallel expansion.
struct DecodeHooks {
  // Every constrained lookup: the in-progress triplet tokens (starting with
  // t_bos) and the permitted next tokens.
  std::function<void(std::span<const TokenId> step_prefix, const ValidSet& valid)> on_valid_set;
  std::function<void(const QuerySubgraph& before, const Triplet& chosen, const QuerySubgraph& after)>
      on_expand;
  // Pool after truncation at each triplet-level step (1-based).
  std::function<void(std::size_t step, std::span<const BeamCandidate> pool)> on_pool;
};

// Token-level beam search of width `beam_size` restricted to the subgraph
// trie. `context` must end with t_bos. Returns up to beam_size distinct
// triplets, best first, each scored as the sum of masked log-softmax values
// over its tokens after t_bos (t_eos included). Throws dog::DeadEndError on
// an empty subgraph.
std::vector<TripletHypothesis> generate_triplet(const LmScorer& scorer, std::span<const TokenId> context,
                                                const QuerySubgraph& subgraph, const Tokenizer& tokenizer,
                                                std::size_t beam_size, bool length_normalize = false,
                                                const DecodeHooks* hooks = nullptr);

// Greedy argmax generation without a mask. Stops on t_bos (kept as the last
// token), on eos (not kept) or after `budget` tokens. Ties go to the lowest id.
UnconstrainedSpan run_unconstrained(const LmScorer& scorer, std::span<const TokenId> context,
                                    const Vocabulary& vocab, std::size_t budget);

// Triplet-level beam search. Each round, every live candidate first writes
// its unconstrained span; if that span opens a triplet, generate_triplet
// proposes up to beam_size successors, each extending the context, the
// subgraph and the chain score. Finished candidates keep competing with
// frozen scores. The pool keeps the beam_size best by chain score (stable on
// generation order, identical contexts merged). Returned best first.
//
// Throws dog::ConfigError, dog::NoChainError when every candidate dead-ends
// in the first round.
std::vector<BeamCandidate> dog_decode(const LmScorer& scorer, std::span<const TokenId> prompt,
                                      GraphPtr graph, std::span<const EntityLabel> query_entities,
                                      const Tokenizer& tokenizer, const DecodeConfig& config,
                                      const DecodeHooks* hooks = nullptr);

struct PhaseReport {
  Phase phase = Phase::kUnconstrained;
  std::optional<Triplet> triplet_completed;
  // Set while constrained: tokens allowed next.
  std::optional<ValidSet> allowed;
  bool closed = false;
};

// Single-stream phase machine driven one token at a time by an external
// sampler. Mirrors the per-token behaviour of dog_decode: t_bos switches to
// the constrained phase, t_eos completes a triplet and expands the subgraph,
// eos closes the stream. Not thread-safe.
class DecoderState {
 public:
  DecoderState(GraphPtr graph, std::span<const EntityLabel> query_entities,
               std::shared_ptr<const Tokenizer> tokenizer);

  // Throws dog::ContractViolation for a token outside the allowed set while
  // constrained, or any token after close.
  PhaseReport feed(TokenId token);

  Phase phase() const noexcept { return phase_; }
  bool closed() const noexcept { return closed_; }
  const TokenSeq& step_prefix() const noexcept { return step_prefix_; }
  const TokenSeq& generated() const noexcept { return generated_; }
  const QuerySubgraph& subgraph() const noexcept { return subgraph_; }
  const TokenTrie& trie() const noexcept { return trie_; }
  const Chain& chain() const noexcept { return chain_; }
  // Allowed set at the current position; empty when unconstrained.
  ValidSet allowed() const;

 private:
  std::shared_ptr<const Tokenizer> tokenizer_;
  QuerySubgraph subgraph_;
  TokenTrie trie_;
  Phase phase_ = Phase::kUnconstrained;
  TokenSeq step_prefix_;
  TokenTrie::NodeId node_ = TokenTrie::kNoNode;
  TokenSeq generated_;
  Chain chain_;
  bool closed_ = false;
};

}  // namespace dog
