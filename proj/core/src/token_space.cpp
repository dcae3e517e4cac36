#include "dog/token_space.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "dog/error.hpp"
#include "dog/text.hpp"

namespace dog {

namespace {

constexpr std::string_view kNewline = "\n";
constexpr std::string_view kNewlineEscape = "<0x0A>";

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenId t_bos_id, TokenId t_eos_id,
                       TokenId eos_id)
    : tokens_(std::move(tokens)), t_bos_(t_bos_id), t_eos_(t_eos_id), eos_(eos_id) {
  if (tokens_.empty()) throw DataError("vocabulary is empty");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw DataError("empty token string at id " + std::to_string(i));
    if (!ids_.emplace(tokens_[i], static_cast<TokenId>(i)).second)
      throw DataError("duplicate token string: " + tokens_[i]);
  }
  for (TokenId id : {t_bos_, t_eos_, eos_}) {
    if (!valid_id(id)) throw DataError("marker id out of range: " + std::to_string(id));
  }
  if (t_bos_ == t_eos_ || t_bos_ == eos_ || t_eos_ == eos_)
    throw DataError("t_bos, t_eos and eos ids must be distinct");
}

bool Vocabulary::contains(std::string_view token) const { return ids_.contains(std::string(token)); }

TokenId Vocabulary::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) throw EncodeError("token not in vocabulary: " + std::string(token));
  return it->second;
}

const std::string& Vocabulary::string_of(TokenId id) const {
  if (!valid_id(id)) throw std::out_of_range("token id out of range: " + std::to_string(id));
  return tokens_[static_cast<std::size_t>(id)];
}

Vocabulary load_vocabulary(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError(lineno, "empty token line");
    tokens.push_back(line == kNewlineEscape ? std::string(kNewline) : line);
  }
  if (tokens.size() < 3 || tokens[0] != kTripletBegin || tokens[1] != kTripletEnd ||
      tokens[2] != kEndOfSequence)
    throw DataError("vocabulary must start with \"<\", \">\", \"<eos>\"");
  return Vocabulary(std::move(tokens), 0, 1, 2);
}

Vocabulary load_vocabulary_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file: " + path);
  return load_vocabulary(in);
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  for (const auto& t : vocab.tokens()) out << (t == kNewline ? kNewlineEscape : std::string_view(t)) << '\n';
}

Vocabulary build_vocabulary(std::span<const std::string> texts) {
  std::vector<std::string> tokens{std::string(kTripletBegin), std::string(kTripletEnd),
                                  std::string(kEndOfSequence)};
  std::unordered_map<std::string, bool> seen;
  for (const auto& t : tokens) seen.emplace(t, true);
  auto add = [&](std::string sym) {
    if (seen.emplace(sym, true).second) tokens.push_back(std::move(sym));
  };
  for (const auto& text : texts) {
    if (text.find('\n') != std::string::npos) add(std::string(kNewline));
    for (auto& sym : text::split_whitespace(text)) add(std::move(sym));
  }
  return Vocabulary(std::move(tokens), 0, 1, 2);
}

WhitespaceTokenizer::WhitespaceTokenizer(std::shared_ptr<const Vocabulary> vocab)
    : vocab_(std::move(vocab)) {
  if (!vocab_) throw std::invalid_argument("null vocabulary");
}

TokenSeq WhitespaceTokenizer::encode(std::string_view input) const {
  TokenSeq out;
  if (input.find_first_of("\t\r\f\v") != std::string_view::npos)
    throw EncodeError("text contains tab or carriage return");
  std::string_view rest = input;
  bool first_line = true;
  for (;;) {
    auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    if (!first_line) out.push_back(vocab_->id_of(kNewline));
    first_line = false;
    if (!line.empty()) {
      std::string_view words = line;
      for (;;) {
        auto sp = words.find(' ');
        std::string_view word = words.substr(0, sp);
        if (word.empty()) throw EncodeError("non-canonical spacing in text");
        out.push_back(vocab_->id_of(word));
        if (sp == std::string_view::npos) break;
        words.remove_prefix(sp + 1);
      }
    }
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  return out;
}

std::string WhitespaceTokenizer::decode(std::span<const TokenId> ids) const {
  std::string out;
  bool at_line_start = true;
  for (TokenId id : ids) {
    const std::string& s = vocab_->string_of(id);
    if (s == kNewline) {
      out += '\n';
      at_line_start = true;
      continue;
    }
    if (!at_line_start) out += ' ';
    out += s;
    at_line_start = false;
  }
  return out;
}

std::string triplet_surface(const Triplet& t) {
  std::string s;
  s.reserve(t.head.size() + t.relation.size() + t.tail.size() + 12);
  s += kTripletBegin;
  s += ' ';
  s += t.head;
  s += " -> ";
  s += t.relation;
  s += " -> ";
  s += t.tail;
  s += ' ';
  s += kTripletEnd;
  return s;
}

TokenSeq serialize_triplet(const Tokenizer& tokenizer, const Triplet& t) {
  const Vocabulary& v = tokenizer.vocab();
  TokenSeq seq = tokenizer.encode(triplet_surface(t));
  if (seq.size() < 2 || seq.front() != v.t_bos_id() || seq.back() != v.t_eos_id())
    throw EncodeError("tokenizer did not map triplet markers to t_bos/t_eos: " + to_string(t));
  for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
    const TokenId id = seq[i];
    if (id == v.t_bos_id() || id == v.t_eos_id() || id == v.eos_id())
      throw EncodeError("triplet field encodes to a marker token: " + to_string(t));
  }
  return seq;
}

Triplet parse_triplet(const Tokenizer& tokenizer, std::span<const TokenId> seq) {
  const Vocabulary& v = tokenizer.vocab();
  if (seq.size() < 2 || seq.front() != v.t_bos_id() || seq.back() != v.t_eos_id())
    throw DataError("triplet tokens must start with t_bos and end with t_eos");
  const std::string interior = tokenizer.decode(seq.subspan(1, seq.size() - 2));
  std::vector<std::string_view> parts;
  std::string_view rest = text::trim_view(interior);
  for (;;) {
    auto pos = rest.find(" -> ");
    parts.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 4);
  }
  if (parts.size() != 3)
    throw DataError("triplet has " + std::to_string(parts.size()) + " fields, expected 3");
  return make_triplet(parts[0], parts[1], parts[2]);
}

}  // namespace dog
