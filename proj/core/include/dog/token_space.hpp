#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dog/kg_store.hpp"

namespace dog {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Surface forms of the phase markers used by the reference tokenizer.
inline constexpr std::string_view kTripletBegin = "<";
inline constexpr std::string_view kTripletEnd = ">";
inline constexpr std::string_view kEndOfSequence = "<eos>";

// Bidirectional token-string <-> id map plus the three marker ids that drive
// the constrained/unconstrained phase machine.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> tokens, TokenId t_bos_id, TokenId t_eos_id, TokenId eos_id);

  std::size_t size() const noexcept { return tokens_.size(); }
  TokenId t_bos_id() const noexcept { return t_bos_; }
  TokenId t_eos_id() const noexcept { return t_eos_; }
  TokenId eos_id() const noexcept { return eos_; }

  bool contains(std::string_view token) const;
  bool valid_id(TokenId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }
  // Throws dog::EncodeError for unknown strings, std::out_of_range for bad ids.
  TokenId id_of(std::string_view token) const;
  const std::string& string_of(TokenId id) const;

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  TokenId t_bos_;
  TokenId t_eos_;
  TokenId eos_;
};

// Vocabulary file for the reference tokenizer: one token per line, line
// number (0-based) is the id, first three lines are "<", ">", "<eos>".
// A newline token is written as "<0x0A>".
Vocabulary load_vocabulary(std::istream& in);
Vocabulary load_vocabulary_file(const std::string& path);
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);

// Reference vocabulary covering every whitespace-delimited symbol (and line
// break) occurring in `texts`, reserved markers first, then first-appearance order.
Vocabulary build_vocabulary(std::span<const std::string> texts);

// Adapter contract between the engine and a concrete tokenizer.
// decode(encode(s)) == s must hold for every s that encode accepts.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual const Vocabulary& vocab() const = 0;
  virtual TokenSeq encode(std::string_view text) const = 0;
  virtual std::string decode(std::span<const TokenId> ids) const = 0;
};

// One id per space-delimited symbol; '\n' is a symbol of its own. Only
// canonical text (single spaces, no leading/trailing spaces on a line, no
// tabs) is accepted, which keeps encode/decode lossless. Thread-safe.
class WhitespaceTokenizer final : public Tokenizer {
 public:
  explicit WhitespaceTokenizer(std::shared_ptr<const Vocabulary> vocab);

  const Vocabulary& vocab() const override { return *vocab_; }
  TokenSeq encode(std::string_view text) const override;
  std::string decode(std::span<const TokenId> ids) const override;

 private:
  std::shared_ptr<const Vocabulary> vocab_;
};

// Encodes "< {head} -> {relation} -> {tail} >". The result starts with
// t_bos, ends with t_eos, and contains no other marker id; a field whose
// encoding would contain a marker throws dog::EncodeError.
TokenSeq serialize_triplet(const Tokenizer& tokenizer, const Triplet& t);

// Inverse of serialize_triplet. Throws dog::DataError when the sequence is
// not marker-delimited or the interior does not split into three fields.
Triplet parse_triplet(const Tokenizer& tokenizer, std::span<const TokenId> seq);

// "< {head} -> {relation} -> {tail} >"
std::string triplet_surface(const Triplet& t);

}  // namespace dog
