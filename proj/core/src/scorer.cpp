#include "dog/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dog/error.hpp"

namespace dog {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TableScorer::TableScorer(std::size_t vocab_size, double default_logit, std::vector<Rule> rules)
    : vocab_size_(vocab_size), default_(default_logit), rules_(std::move(rules)) {
  if (!std::isfinite(default_)) throw DataError("table scorer default logit must be finite");
  // Stable order by suffix length; application order then gives longer suffixes the last word.
  std::stable_sort(rules_.begin(), rules_.end(),
                   [](const Rule& a, const Rule& b) { return a.suffix.size() < b.suffix.size(); });
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    for (const auto& [id, value] : rules_[i].logits) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_)
        throw DataError("table scorer rule references token id out of range");
      if (!std::isfinite(value)) throw DataError("table scorer logits must be finite");
    }
    if (rules_[i].suffix.empty())
      empty_suffix_rules_.push_back(i);
    else
      by_last_token_[rules_[i].suffix.back()].push_back(i);
  }
}

TableScorer TableScorer::from_json(std::string_view json, const Vocabulary& vocab) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("table scorer JSON: ") + e.what());
  }
  try {
    const double def = j.value("default", 0.0);
    std::vector<Rule> rules;
    for (const auto& r : j.value("rules", nlohmann::json::array())) {
      Rule rule;
      for (const auto& tok : r.at("suffix")) rule.suffix.push_back(vocab.id_of(tok.get<std::string>()));
      for (const auto& [tok, value] : r.at("logits").items())
        rule.logits.emplace_back(vocab.id_of(tok), value.get<double>());
      rules.push_back(std::move(rule));
    }
    return TableScorer(vocab.size(), def, std::move(rules));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("table scorer JSON: ") + e.what());
  } catch (const EncodeError& e) {
    throw DataError(std::string("table scorer JSON: ") + e.what());
  }
}

TableScorer TableScorer::load(const std::string& path, const Vocabulary& vocab) {
  return from_json(read_file(path), vocab);
}

std::string TableScorer::to_json(const Vocabulary& vocab) const {
  nlohmann::json j;
  j["default"] = default_;
  j["rules"] = nlohmann::json::array();
  for (const auto& r : rules_) {
    nlohmann::json jr;
    jr["suffix"] = nlohmann::json::array();
    for (TokenId id : r.suffix) jr["suffix"].push_back(vocab.string_of(id));
    jr["logits"] = nlohmann::json::object();
    for (const auto& [id, v] : r.logits) jr["logits"][vocab.string_of(id)] = v;
    j["rules"].push_back(std::move(jr));
  }
  return j.dump(2);
}

std::vector<double> TableScorer::next_logits(std::span<const TokenId> context) const {
  std::vector<double> out(vocab_size_, default_);
  std::vector<std::size_t> matched = empty_suffix_rules_;
  if (!context.empty()) {
    auto it = by_last_token_.find(context.back());
    if (it != by_last_token_.end()) {
      for (std::size_t ri : it->second) {
        const auto& suf = rules_[ri].suffix;
        if (suf.size() <= context.size() &&
            std::equal(suf.begin(), suf.end(), context.end() - static_cast<std::ptrdiff_t>(suf.size())))
          matched.push_back(ri);
      }
    }
  }
  // Rule indices are already ordered by suffix length, then file order.
  std::sort(matched.begin(), matched.end());
  for (std::size_t ri : matched)
    for (const auto& [id, v] : rules_[ri].logits) out[static_cast<std::size_t>(id)] = v;
  return out;
}

ScriptedScorer::ScriptedScorer(std::size_t vocab_size, TokenSeq script, std::size_t prompt_length,
                               TokenId eos_id, double high, double low)
    : vocab_size_(vocab_size),
      script_(std::move(script)),
      prompt_length_(prompt_length),
      eos_(eos_id),
      high_(high),
      low_(low) {
  for (TokenId id : script_)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_)
      throw DataError("scripted token id out of range");
  if (eos_ < 0 || static_cast<std::size_t>(eos_) >= vocab_size_) throw DataError("eos id out of range");
}

ScriptedScorer ScriptedScorer::load(const std::string& path, const Tokenizer& tokenizer,
                                    std::size_t prompt_length) {
  std::string text = read_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return ScriptedScorer(tokenizer.vocab().size(), tokenizer.encode(text), prompt_length,
                        tokenizer.vocab().eos_id());
}

std::vector<double> ScriptedScorer::next_logits(std::span<const TokenId> context) const {
  std::vector<double> out(vocab_size_, low_);
  const std::size_t pos = context.size() > prompt_length_ ? context.size() - prompt_length_ : 0;
  const TokenId want = pos < script_.size() ? script_[pos] : eos_;
  out[static_cast<std::size_t>(want)] = high_;
  return out;
}

RandomScorer::RandomScorer(std::size_t vocab_size, std::uint64_t seed, double scale,
                           std::vector<std::pair<TokenId, double>> boosts)
    : vocab_size_(vocab_size), seed_(seed), scale_(scale), boosts_(std::move(boosts)) {
  for (const auto& [id, _] : boosts_)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_size_)
      throw DataError("boosted token id out of range");
}

std::vector<double> RandomScorer::next_logits(std::span<const TokenId> context) const {
  std::uint64_t state = seed_ ^ 0x243f6a8885a308d3ULL;
  for (TokenId id : context) {
    state ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(id));
    state = splitmix64(state);
  }
  state ^= context.size();
  std::vector<double> out(vocab_size_);
  for (double& x : out) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x = (2.0 * u - 1.0) * scale_;
  }
  for (const auto& [id, b] : boosts_) out[static_cast<std::size_t>(id)] += b;
  return out;
}

}  // namespace dog
