#include "generators.hpp"

#include <algorithm>
#include <set>

namespace dog::testing {

namespace {

std::string entity_name(std::size_t i) {
  // e.g. "e3", "big e3": two-token names share their first token.
  return (i % 3 == 2) ? "big e" + std::to_string(i) : "e" + std::to_string(i);
}

std::vector<std::string> fixture_texts(const KnowledgeGraph& g) {
  std::vector<std::string> texts{"Question : find the chain . Answer :"};
  for (const auto& w : filler_words()) texts.push_back(w);
  for (const auto& t : g.triplets()) texts.push_back(triplet_surface(t));
  return texts;
}

}  // namespace

std::vector<Triplet> random_triplets(Rng& rng, std::size_t count, std::size_t entity_pool,
                                     std::size_t relation_pool) {
  std::uniform_int_distribution<std::size_t> ent(0, entity_pool - 1);
  std::uniform_int_distribution<std::size_t> rel(0, relation_pool - 1);
  std::set<Triplet> seen;
  std::vector<Triplet> out;
  std::size_t guard = 0;
  while (out.size() < count && guard++ < count * 50) {
    Triplet t = make_triplet(entity_name(ent(rng)), "r" + std::to_string(rel(rng)), entity_name(ent(rng)));
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

Fixture make_fixture(std::vector<Triplet> triplets, std::vector<EntityLabel> query) {
  Fixture fx;
  fx.graph = std::make_shared<const KnowledgeGraph>(KnowledgeGraph::from_triplets(triplets));
  fx.query = std::move(query);
  auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(fixture_texts(*fx.graph)));
  fx.tokenizer = std::make_shared<const WhitespaceTokenizer>(std::move(vocab));
  fx.prompt = fx.tokenizer->encode("Question : find the chain . Answer :");
  return fx;
}

Fixture random_fixture(Rng& rng, std::size_t count, std::size_t entity_pool, std::size_t relation_pool) {
  auto triplets = random_triplets(rng, count, entity_pool, relation_pool);
  std::uniform_int_distribution<std::size_t> pick(0, triplets.size() - 1);
  const Triplet& seed = triplets[pick(rng)];
  std::vector<EntityLabel> query{(rng() & 1) ? seed.head : seed.tail};
  return make_fixture(std::move(triplets), std::move(query));
}

TableScorer random_table_scorer(Rng& rng, const Fixture& fx, std::size_t rules) {
  const Vocabulary& v = fx.tokenizer->vocab();
  const auto n = static_cast<TokenId>(v.size());
  std::uniform_int_distribution<TokenId> tok(0, n - 1);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::vector<TableScorer::Rule> out;
  out.push_back({{}, {{v.t_bos_id(), 4.0}}});
  for (std::size_t i = 0; i < rules; ++i) {
    TableScorer::Rule r;
    r.suffix.push_back(tok(rng));
    for (int k = 0; k < 6; ++k) r.logits.emplace_back(tok(rng), val(rng));
    // Keep unconstrained generation anchored on markers.
    r.logits.emplace_back(v.t_bos_id(), 4.0);
    out.push_back(std::move(r));
  }
  // After some triplet endings, stop instead of opening another triplet.
  for (TokenId last = 0; last < n; ++last) {
    if (rng() % 3 != 0) continue;
    out.push_back({{last, v.t_eos_id()}, {{v.eos_id(), 6.0}}});
  }
  return TableScorer(v.size(), 0.0, std::move(out));
}

RandomScorer marker_biased_random_scorer(const Fixture& fx, std::uint64_t seed) {
  const Vocabulary& v = fx.tokenizer->vocab();
  return RandomScorer(v.size(), seed, 3.0, {{v.t_bos_id(), 2.5}, {v.eos_id(), 1.0}});
}

TableScorer gold_path_scorer(const Tokenizer& tokenizer, const TokenSeq& prompt, const Chain& gold,
                             const std::string& answer, double strength) {
  const Vocabulary& v = tokenizer.vocab();
  std::vector<TableScorer::Rule> rules;
  auto favour = [&](TokenSeq suffix, TokenId next) {
    rules.push_back({std::move(suffix), {{next, strength}}});
  };
  // Whole scripted continuation, expressed as "after this exact history, emit that".
  std::string script;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!script.empty()) script += ' ';
    script += std::to_string(i + 1) + ". " + triplet_surface(gold[i]);
  }
  script += " Therefore, the answer is * " + answer + ".";
  const TokenSeq cont = tokenizer.encode(script);
  TokenSeq history = prompt;
  for (TokenId next : cont) {
    favour(history, next);
    history.push_back(next);
  }
  favour(history, v.eos_id());
  return TableScorer(v.size(), 0.0, std::move(rules));
}

std::vector<QaInstance> toy_dataset(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<QaInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto triplets = random_triplets(rng, 12 + rng() % 10, 10, 4);
    const KnowledgeGraph g = KnowledgeGraph::from_triplets(triplets);
    // Walk 1-3 hops from a random entity along outgoing-or-incoming edges.
    const std::string start = g.at(rng() % g.size()).head;
    Chain chain;
    std::set<std::string> visited{start};
    std::string cursor = start;
    const std::size_t hops = 1 + rng() % 3;
    for (std::size_t h = 0; h < hops; ++h) {
      std::vector<Triplet> options;
      for (const auto& t : neighbors(g, cursor))
        if (std::find(chain.begin(), chain.end(), t) == chain.end()) options.push_back(t);
      if (options.empty()) break;
      const Triplet t = options[rng() % options.size()];
      chain.push_back(t);
      cursor = t.head == cursor ? t.tail : t.head;
    }
    QaInstance inst;
    inst.id = "toy-" + std::to_string(i);
    inst.question = "Which entity is reached from " + start + " ?";
    inst.query_entities = {start};
    inst.answers = {cursor};
    inst.graph = std::make_shared<const KnowledgeGraph>(g);
    inst.gold_chain = chain;
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace dog::testing
