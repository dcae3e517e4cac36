#include "dog/metrics.hpp"

#include <set>
#include <tuple>

#include "dog/text.hpp"

namespace dog {

namespace {

constexpr std::string_view kAnswerMarker = "the answer is";

std::string_view strip_item(std::string_view s) {
  for (;;) {
    const std::size_t before = s.size();
    s = text::trim_view(s);
    while (!s.empty() && (s.back() == '.' || s.back() == ',')) s.remove_suffix(1);
    s = text::trim_view(s);
    if (s.ends_with(" and")) s.remove_suffix(4);
    if (s == "and") s = {};
    if (s.size() == before) return s;
  }
}

}  // namespace

std::vector<std::string> extract_answers(std::string_view text) {
  const std::size_t pos = text.rfind(kAnswerMarker);
  if (pos == std::string_view::npos) return {};
  std::string_view rest = text.substr(pos + kAnswerMarker.size());
  if (auto nl = rest.find('\n'); nl != std::string_view::npos) rest = rest.substr(0, nl);

  std::vector<std::string> out;
  std::size_t star = rest.find('*');
  while (star != std::string_view::npos) {
    const std::size_t next = rest.find('*', star + 1);
    std::string_view item = rest.substr(star + 1, next == std::string_view::npos ? std::string_view::npos
                                                                                 : next - star - 1);
    item = strip_item(item);
    if (!item.empty()) out.emplace_back(item);
    star = next;
  }
  return out;
}

int hits_at_1(std::span<const std::string> predicted, std::span<const std::string> gold) {
  if (predicted.empty()) return 0;
  const std::string top = text::normalize_answer(predicted.front());
  if (top.empty()) return 0;
  for (const auto& g : gold)
    if (text::normalize_answer(g) == top) return 1;
  return 0;
}

double triplet_f1(std::span<const Triplet> predicted, std::span<const Triplet> gold) {
  using Key = std::tuple<std::string, std::string, std::string>;
  auto key = [](const Triplet& t) {
    return Key{text::normalize_answer(t.head), text::normalize_answer(t.relation),
               text::normalize_answer(t.tail)};
  };
  std::set<Key> pred;
  std::set<Key> ref;
  for (const auto& t : predicted) pred.insert(key(t));
  for (const auto& t : gold) ref.insert(key(t));
  if (pred.empty() || ref.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& k : pred) hit += ref.count(k);
  if (hit == 0) return 0.0;
  const double precision = static_cast<double>(hit) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(hit) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

double ill_triplet_rate(std::span<const Triplet> chain, const KnowledgeGraph& graph,
                        std::span<const EntityLabel> query_entities) {
  if (chain.empty()) return 0.0;
  const ValidationReport report = validate_chain(chain, graph, query_entities);
  return static_cast<double>(report.violating_steps()) / static_cast<double>(chain.size());
}

}  // namespace dog
