#include "dog/kg_store.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <unordered_set>

#include "dog/error.hpp"
#include "dog/text.hpp"

namespace dog {

namespace {

constexpr std::string_view kArrow = " -> ";
constexpr std::string_view kBar = " | ";

void check_field(const std::string& value, const char* name) {
  if (value.empty()) throw DataError(std::string("empty ") + name);
  if (value.find_first_of("\t\n\r") != std::string::npos)
    throw DataError(std::string(name) + " contains a tab or newline: " + value);
  // Pad with spaces so "->" at either end counts as a delimiter too.
  const std::string padded = " " + value + " ";
  if (padded.find(kArrow) != std::string::npos)
    throw DataError(std::string(name) + " contains the \" -> \" delimiter: " + value);
  if (padded.find(kBar) != std::string::npos)
    throw DataError(std::string(name) + " contains the \" | \" delimiter: " + value);
}

std::size_t hash_combine(std::size_t seed, std::size_t v) noexcept {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::size_t TripletHash::operator()(const Triplet& t) const noexcept {
  std::hash<std::string> h;
  return hash_combine(hash_combine(h(t.head), h(t.relation)), h(t.tail));
}

Triplet make_triplet(std::string_view head, std::string_view relation, std::string_view tail) {
  Triplet t{text::normalize_label(head), text::normalize_label(relation),
            text::normalize_label(tail)};
  check_triplet(t);
  return t;
}

void check_triplet(const Triplet& t) {
  check_field(t.head, "head");
  check_field(t.relation, "relation");
  check_field(t.tail, "tail");
  if (text::normalize_label(t.head) != t.head || text::normalize_label(t.relation) != t.relation ||
      text::normalize_label(t.tail) != t.tail)
    throw DataError("triplet is not normalized: " + to_string(t));
}

std::string to_string(const Triplet& t) {
  return "(" + t.head + ", " + t.relation + ", " + t.tail + ")";
}

KnowledgeGraph KnowledgeGraph::from_triplets(std::span<const Triplet> triplets) {
  KnowledgeGraph g;
  for (const auto& t : triplets) {
    check_triplet(t);
    g.add(t);
  }
  return g;
}

KnowledgeGraph KnowledgeGraph::from_triplets(std::initializer_list<Triplet> triplets) {
  return from_triplets(std::span<const Triplet>(triplets.begin(), triplets.size()));
}

void KnowledgeGraph::add(Triplet t) {
  if (index_.contains(t)) return;
  const std::size_t idx = triplets_.size();
  for (const std::string* e : {&t.head, &t.tail}) {
    auto [it, inserted] = incidence_.try_emplace(*e);
    if (inserted) entities_.push_back(*e);
    it->second.push_back(idx);
  }
  index_.emplace(t, idx);
  triplets_.push_back(std::move(t));
}

std::span<const std::size_t> KnowledgeGraph::incident(std::string_view entity) const {
  auto it = incidence_.find(std::string(entity));
  if (it == incidence_.end()) return {};
  return it->second;
}

bool KnowledgeGraph::has_entity(std::string_view entity) const {
  return incidence_.contains(std::string(entity));
}

std::optional<std::size_t> KnowledgeGraph::index_of(const Triplet& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph load_graph(std::istream& in) {
  std::vector<Triplet> triplets;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim_view(line).empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    for (;;) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 3)
      throw ParseError(lineno, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    try {
      triplets.push_back(make_triplet(fields[0], fields[1], fields[2]));
    } catch (const DataError& e) {
      throw ParseError(lineno, e.what());
    } catch (const EncodeError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return KnowledgeGraph::from_triplets(triplets);
}

KnowledgeGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph file: " + path);
  return load_graph(in);
}

void write_graph(std::ostream& out, const KnowledgeGraph& graph) {
  for (const auto& t : graph.triplets()) out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
}

std::vector<Triplet> neighbors(const KnowledgeGraph& graph, std::string_view entity) {
  std::vector<Triplet> out;
  for (std::size_t idx : graph.incident(text::normalize_label(entity))) out.push_back(graph.at(idx));
  return out;
}

std::string linearize(const KnowledgeGraph& graph) {
  if (graph.empty()) throw DataError("cannot linearize an empty graph");
  std::string out = "[ ";
  bool first = true;
  for (const auto& t : graph.triplets()) {
    if (!first) out += kBar;
    first = false;
    out += t.head;
    out += kArrow;
    out += t.relation;
    out += kArrow;
    out += t.tail;
  }
  out += " ]";
  return out;
}

KnowledgeGraph parse_linearized(std::string_view text) {
  if (text.size() < 4 || !text.starts_with("[ ") || !text.ends_with(" ]"))
    throw DataError("linearized graph must be wrapped in \"[ \" and \" ]\"");
  std::string_view body = text.substr(2, text.size() - 4);
  std::vector<Triplet> triplets;
  auto split = [](std::string_view s, std::string_view delim) {
    std::vector<std::string_view> parts;
    for (;;) {
      auto pos = s.find(delim);
      parts.push_back(s.substr(0, pos));
      if (pos == std::string_view::npos) break;
      s.remove_prefix(pos + delim.size());
    }
    return parts;
  };
  for (auto item : split(body, kBar)) {
    auto fields = split(item, kArrow);
    if (fields.size() != 3) throw DataError("linearized triplet does not have 3 fields");
    triplets.push_back(make_triplet(fields[0], fields[1], fields[2]));
  }
  return KnowledgeGraph::from_triplets(triplets);
}

KnowledgeGraph select_topk_connected(const KnowledgeGraph& graph,
                                     std::span<const EntityLabel> query_entities,
                                     const SimilarityScorer& scorer,
                                     std::string_view question,
                                     std::size_t k) {
  if (k == 0) throw DataError("k must be at least 1");
  if (query_entities.empty()) throw DataError("at least one query entity is required");

  std::vector<std::string> sources;
  for (const auto& e : query_entities) {
    std::string n = text::normalize_label(e);
    if (!graph.has_entity(n)) throw DataError("query entity not in graph: " + n);
    sources.push_back(std::move(n));
  }

  // Multi-source BFS distances over the undirected incidence structure.
  constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();
  std::unordered_map<std::string, std::size_t> dist;
  std::deque<std::string> queue;
  for (const auto& s : sources) {
    if (dist.try_emplace(s, 0).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    std::string e = std::move(queue.front());
    queue.pop_front();
    const std::size_t d = dist.at(e);
    for (std::size_t idx : graph.incident(e)) {
      const Triplet& t = graph.at(idx);
      const std::string& other = t.head == e ? t.tail : t.head;
      if (dist.try_emplace(other, d + 1).second) queue.push_back(other);
    }
  }
  auto distance = [&](const std::string& e) {
    auto it = dist.find(e);
    return it == dist.end() ? kUnreached : it->second;
  };

  // Parent edge per entity: lowest-index triplet leading one layer closer.
  std::unordered_map<std::string, std::size_t> parent;
  for (const auto& [entity, d] : dist) {
    if (d == 0) continue;
    for (std::size_t idx : graph.incident(entity)) {
      const Triplet& t = graph.at(idx);
      const std::string& other = t.head == entity ? t.tail : t.head;
      if (distance(other) + 1 == d) {
        parent.emplace(entity, idx);
        break;  // incident() is ascending
      }
    }
  }

  std::vector<double> scores(graph.size());
  for (std::size_t i = 0; i < graph.size(); ++i) scores[i] = scorer(graph.at(i), question);
  std::vector<std::size_t> order(graph.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<bool> taken(graph.size(), false);
  std::size_t count = 0;
  auto take = [&](std::size_t idx) {
    if (!taken[idx]) {
      taken[idx] = true;
      ++count;
    }
  };
  for (std::size_t idx : order) {
    if (count >= k) break;
    if (taken[idx]) continue;
    const Triplet& t = graph.at(idx);
    const std::size_t dh = distance(t.head);
    const std::size_t dt = distance(t.tail);
    if (dh == kUnreached && dt == kUnreached) continue;
    std::string cursor = dh <= dt ? t.head : t.tail;
    while (distance(cursor) > 0) {
      const std::size_t p = parent.at(cursor);
      take(p);
      const Triplet& pt = graph.at(p);
      cursor = pt.head == cursor ? pt.tail : pt.head;
    }
    take(idx);
  }

  std::vector<Triplet> kept;
  kept.reserve(count);
  for (std::size_t i = 0; i < graph.size(); ++i)
    if (taken[i]) kept.push_back(graph.at(i));
  return KnowledgeGraph::from_triplets(kept);
}

double lexical_similarity(const Triplet& t, std::string_view question) {
  auto bag = [](std::string_view s) {
    std::string folded = text::normalize_answer(s);
    for (char& c : folded) {
      if (c == '.' || c == '_' || c == ',' || c == '?' || c == '!' || c == '(' || c == ')') c = ' ';
    }
    auto words = text::split_whitespace(folded);
    return std::set<std::string>(words.begin(), words.end());
  };
  const auto a = bag("(" + t.head + ", " + t.relation + ", " + t.tail + ")");
  const auto b = bag(question);
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.count(w);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace dog
