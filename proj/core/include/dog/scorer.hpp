#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dog/token_space.hpp"

namespace dog {

// Source of next-token logits. The only seam through which a language model,
// real or mock, reaches the decoder. Implementations must return exactly
// vocab_size() finite values and be deterministic for identical contexts.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  virtual std::size_t vocab_size() const = 0;
  virtual std::vector<double> next_logits(std::span<const TokenId> context) const = 0;
  // True if next_logits may be called from several threads at once.
  virtual bool concurrent_safe() const noexcept { return false; }
};

// Uniform default logit with overrides keyed on context suffixes. All rules
// whose suffix matches the end of the context apply, shortest suffix first,
// so longer (more specific) suffixes win; equal lengths apply in file order.
//
// JSON form, token strings resolved through a vocabulary:
//   {"default": 0.0,
//    "rules": [{"suffix": ["A", "->"], "logits": {"r1": 4.0, "r3": -1.0}}]}
class TableScorer final : public LmScorer {
 public:
  struct Rule {
    TokenSeq suffix;
    std::vector<std::pair<TokenId, double>> logits;
  };

  TableScorer(std::size_t vocab_size, double default_logit, std::vector<Rule> rules);

  static TableScorer from_json(std::string_view json, const Vocabulary& vocab);
  static TableScorer load(const std::string& path, const Vocabulary& vocab);
  std::string to_json(const Vocabulary& vocab) const;

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<double> next_logits(std::span<const TokenId> context) const override;
  bool concurrent_safe() const noexcept override { return true; }

  double default_logit() const noexcept { return default_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }

 private:
  std::size_t vocab_size_;
  double default_;
  std::vector<Rule> rules_;
  std::vector<std::size_t> empty_suffix_rules_;
  std::unordered_map<TokenId, std::vector<std::size_t>> by_last_token_;
};

// Replays a fixed continuation: the token at offset (context length - prompt
// length) of the script gets `high`, everything else `low`. Past the end of
// the script, eos is favoured.
class ScriptedScorer final : public LmScorer {
 public:
  ScriptedScorer(std::size_t vocab_size, TokenSeq script, std::size_t prompt_length, TokenId eos_id,
                 double high = 10.0, double low = 0.0);

  // Script file: plain text encoded with `tokenizer`.
  static ScriptedScorer load(const std::string& path, const Tokenizer& tokenizer,
                             std::size_t prompt_length);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<double> next_logits(std::span<const TokenId> context) const override;
  bool concurrent_safe() const noexcept override { return true; }

 private:
  std::size_t vocab_size_;
  TokenSeq script_;
  std::size_t prompt_length_;
  TokenId eos_;
  double high_;
  double low_;
};

// Pseudo-random logits in [-scale, scale], a pure function of (seed, context).
// Optional additive boosts let tests steer how often markers are emitted.
class RandomScorer final : public LmScorer {
 public:
  RandomScorer(std::size_t vocab_size, std::uint64_t seed, double scale = 3.0,
               std::vector<std::pair<TokenId, double>> boosts = {});

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<double> next_logits(std::span<const TokenId> context) const override;
  bool concurrent_safe() const noexcept override { return true; }

 private:
  std::size_t vocab_size_;
  std::uint64_t seed_;
  double scale_;
  std::vector<std::pair<TokenId, double>> boosts_;
};

}  // namespace dog
