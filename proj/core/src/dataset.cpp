#include "dog/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "dog/error.hpp"
#include "dog/metrics.hpp"
#include "dog/prompt.hpp"
#include "dog/text.hpp"

namespace dog {

namespace {

using nlohmann::json;

std::vector<Triplet> triplets_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw DataError(std::string(what) + " must be an array of [head, relation, tail]");
  std::vector<Triplet> out;
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 3)
      throw DataError(std::string(what) + " entries must be [head, relation, tail]");
    out.push_back(make_triplet(item[0].get<std::string>(), item[1].get<std::string>(),
                               item[2].get<std::string>()));
  }
  return out;
}

json triplets_to_json(std::span<const Triplet> ts) {
  json arr = json::array();
  for (const auto& t : ts) arr.push_back({t.head, t.relation, t.tail});
  return arr;
}

std::vector<std::string> strings_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw DataError(std::string(what) + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : arr) out.push_back(s.get<std::string>());
  return out;
}

}  // namespace

QaInstance parse_instance(std::string_view json_line, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  try {
    QaInstance inst;
    inst.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
    inst.question = text::trim(j.at("question").get<std::string>());
    if (inst.question.empty()) throw DataError("empty question");
    for (auto& e : strings_from_json(j.at("query_entities"), "query_entities"))
      inst.query_entities.push_back(text::normalize_label(e));
    if (inst.query_entities.empty()) throw DataError("no query entities");
    inst.answers = strings_from_json(j.at("answers"), "answers");
    if (inst.answers.empty()) throw DataError("no gold answers");

    const json& g = j.at("graph");
    if (g.is_string()) {
      std::filesystem::path p(g.get<std::string>());
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      inst.graph = std::make_shared<const KnowledgeGraph>(load_graph_file(p.string()));
    } else {
      inst.graph = std::make_shared<const KnowledgeGraph>(
          KnowledgeGraph::from_triplets(triplets_from_json(g, "graph")));
    }
    if (j.contains("gold_chain") && !j.at("gold_chain").is_null())
      inst.gold_chain = triplets_from_json(j.at("gold_chain"), "gold_chain");
    return inst;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed instance: ") + e.what());
  } catch (const EncodeError& e) {
    throw DataError(std::string("malformed instance: ") + e.what());
  }
}

std::vector<DatasetEntry> load_dataset(std::istream& in, const std::string& base_dir) {
  std::vector<DatasetEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim_view(line).empty()) continue;
    DatasetEntry entry;
    entry.line = lineno;
    try {
      auto j = json::parse(line);
      if (j.is_object() && j.contains("id"))
        entry.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    } catch (const json::exception&) {
    }
    if (entry.id.empty()) entry.id = "line-" + std::to_string(lineno);
    try {
      entry.instance = parse_instance(line, base_dir);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  if (out.empty()) throw DataError("dataset is empty");
  return out;
}

std::vector<DatasetEntry> load_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path);
  const auto dir = std::filesystem::path(path).parent_path();
  return load_dataset(in, dir.empty() ? "." : dir.string());
}

std::string instance_to_json(const QaInstance& inst) {
  json j;
  j["id"] = inst.id;
  j["question"] = inst.question;
  j["query_entities"] = inst.query_entities;
  j["answers"] = inst.answers;
  j["graph"] = inst.graph ? triplets_to_json(inst.graph->triplets()) : json::array();
  if (inst.gold_chain) j["gold_chain"] = triplets_to_json(*inst.gold_chain);
  return j.dump();
}

std::string trace_to_json(const DecodeTrace& trace) {
  json j;
  j["schema"] = kTraceSchema;
  j["instance_id"] = trace.instance_id;
  j["candidates"] = json::array();
  for (const auto& c : trace.candidates) {
    j["candidates"].push_back({{"chain", triplets_to_json(c.chain)},
                               {"chain_score", c.chain_score},
                               {"step_scores", c.step_scores},
                               {"text", c.text},
                               {"predicted_answers", c.predicted_answers},
                               {"finished", c.finished}});
  }
  j["answers"] = trace.answers;
  json m = json::object();
  if (trace.metrics.hits_at_1) m["hits_at_1"] = *trace.metrics.hits_at_1;
  if (trace.metrics.triplet_f1) m["triplet_f1"] = *trace.metrics.triplet_f1;
  if (trace.metrics.ill_triplet_rate) m["ill_triplet_rate"] = *trace.metrics.ill_triplet_rate;
  j["metrics"] = std::move(m);
  j["warnings"] = trace.warnings;
  if (trace.error) j["error"] = *trace.error;
  return j.dump();
}

DecodeTrace trace_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != kTraceSchema)
      throw DataError("unsupported trace schema: " + j.at("schema").get<std::string>());
    DecodeTrace t;
    t.instance_id = j.at("instance_id").get<std::string>();
    for (const auto& c : j.at("candidates")) {
      TraceCandidate tc;
      tc.chain = triplets_from_json(c.at("chain"), "chain");
      tc.chain_score = c.at("chain_score").get<double>();
      tc.step_scores = c.value("step_scores", std::vector<double>{});
      tc.text = c.at("text").get<std::string>();
      tc.predicted_answers = strings_from_json(c.at("predicted_answers"), "predicted_answers");
      tc.finished = c.value("finished", true);
      t.candidates.push_back(std::move(tc));
    }
    t.answers = strings_from_json(j.value("answers", json::array()), "answers");
    const json m = j.value("metrics", json::object());
    if (m.contains("hits_at_1")) t.metrics.hits_at_1 = m["hits_at_1"].get<int>();
    if (m.contains("triplet_f1")) t.metrics.triplet_f1 = m["triplet_f1"].get<double>();
    if (m.contains("ill_triplet_rate")) t.metrics.ill_triplet_rate = m["ill_triplet_rate"].get<double>();
    t.warnings = strings_from_json(j.value("warnings", json::array()), "warnings");
    if (j.contains("error")) t.error = j["error"].get<std::string>();
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed trace: ") + e.what());
  }
}

std::string AggregateReport::to_json() const {
  json j;
  j["instances"] = instances;
  j["decoded"] = decoded;
  j["failed"] = failed;
  j["with_gold_chain"] = with_gold_chain;
  j["hits_at_1"] = hits_at_1;
  j["triplet_f1"] = triplet_f1 ? json(*triplet_f1) : json(nullptr);
  j["ill_triplet_rate"] = ill_triplet_rate;
  return j.dump();
}

std::string AggregateReport::to_table() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "metric            value\n";
  os << "instances         " << instances << '\n';
  os << "decoded           " << decoded << '\n';
  os << "failed            " << failed << '\n';
  os << "hits@1            " << hits_at_1 << '\n';
  os << "triplet_f1        ";
  if (triplet_f1)
    os << *triplet_f1 << " (" << with_gold_chain << " with gold chain)\n";
  else
    os << "n/a\n";
  os << "ill_triplet_rate  " << ill_triplet_rate << '\n';
  return os.str();
}

DecodeTrace make_trace(const QaInstance& instance, std::span<const BeamCandidate> candidates,
                       const Tokenizer& tokenizer) {
  DecodeTrace trace;
  trace.instance_id = instance.id;
  const TokenId eos = tokenizer.vocab().eos_id();
  for (const auto& c : candidates) {
    TraceCandidate tc;
    tc.chain = c.chain;
    tc.chain_score = c.chain_score;
    tc.step_scores = c.step_scores;
    auto gen = c.generated();
    if (!gen.empty() && gen.back() == eos) gen = gen.first(gen.size() - 1);
    tc.text = tokenizer.decode(gen);
    tc.predicted_answers = extract_answers(tc.text);
    tc.finished = c.finished;
    if (trace.answers.empty()) trace.answers = tc.predicted_answers;
    trace.candidates.push_back(std::move(tc));
  }
  trace.metrics.hits_at_1 = hits_at_1(trace.answers, instance.answers);
  const Chain empty;
  const Chain& top = trace.candidates.empty() ? empty : trace.candidates.front().chain;
  if (instance.gold_chain) trace.metrics.triplet_f1 = triplet_f1(top, *instance.gold_chain);
  trace.metrics.ill_triplet_rate = ill_triplet_rate(top, *instance.graph, instance.query_entities);
  return trace;
}

AggregateReport evaluate_traces(std::span<const DecodeTrace> traces, std::span<const DatasetEntry> entries) {
  std::map<std::string, const QaInstance*> by_id;
  for (const auto& e : entries)
    if (e.instance) by_id.emplace(e.instance->id, &*e.instance);

  AggregateReport r;
  double hits = 0.0;
  double f1 = 0.0;
  double ill = 0.0;
  for (const auto& t : traces) {
    ++r.instances;
    auto it = by_id.find(t.instance_id);
    if (t.error || it == by_id.end()) {
      ++r.failed;
      continue;
    }
    const QaInstance& inst = *it->second;
    ++r.decoded;
    hits += hits_at_1(t.answers, inst.answers);
    const Chain empty;
    const Chain& top = t.candidates.empty() ? empty : t.candidates.front().chain;
    if (inst.gold_chain) {
      ++r.with_gold_chain;
      f1 += triplet_f1(top, *inst.gold_chain);
    }
    ill += ill_triplet_rate(top, *inst.graph, inst.query_entities);
  }
  if (r.decoded > 0) {
    r.hits_at_1 = hits / static_cast<double>(r.decoded);
    r.ill_triplet_rate = ill / static_cast<double>(r.decoded);
  }
  if (r.with_gold_chain > 0) r.triplet_f1 = f1 / static_cast<double>(r.with_gold_chain);
  return r;
}

std::shared_ptr<const Tokenizer> make_reference_tokenizer(const QaInstance& instance, const std::string& prompt,
                                                          std::span<const std::string> extra_texts) {
  std::vector<std::string> texts{prompt};
  for (const auto& t : instance.graph->triplets()) texts.push_back(triplet_surface(t));
  texts.insert(texts.end(), extra_texts.begin(), extra_texts.end());
  auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(texts));
  return std::make_shared<const WhitespaceTokenizer>(std::move(vocab));
}

AggregateReport run_dataset(std::span<const DatasetEntry> entries, const RunOptions& options,
                            const TokenizerFactory& make_tokenizer, const ScorerFactory& make_scorer,
                            const std::function<void(const DecodeTrace&)>& sink) {
  if (entries.empty()) throw DataError("dataset is empty");
  options.config.validate();
  const std::string& tmpl =
      options.prompt_template.empty() ? default_prompt_template() : options.prompt_template;

  std::vector<DecodeTrace> traces;
  traces.reserve(entries.size());
  for (const auto& entry : entries) {
    DecodeTrace trace;
    trace.instance_id = entry.instance ? entry.instance->id : entry.id;
    if (!entry.instance) {
      trace.error = entry.error;
    } else {
      const QaInstance& inst = *entry.instance;
      try {
        const std::string prompt = build_prompt(*inst.graph, inst.question, tmpl);
        const auto tokenizer = make_tokenizer(inst, prompt);
        const TokenSeq prompt_ids = tokenizer->encode(prompt);
        const auto scorer = make_scorer({inst, *tokenizer, prompt_ids.size(), options.config.seed});
        std::vector<std::string> warnings;
        (void)init_subgraph(inst.graph, inst.query_entities, &warnings);
        const auto candidates =
            dog_decode(*scorer, prompt_ids, inst.graph, inst.query_entities, *tokenizer, options.config);
        trace = make_trace(inst, candidates, *tokenizer);
        trace.warnings = std::move(warnings);
      } catch (const Error& e) {
        trace.error = e.what();
      }
    }
    if (sink) sink(trace);
    traces.push_back(std::move(trace));
  }
  return evaluate_traces(traces, entries);
}

}  // namespace dog
