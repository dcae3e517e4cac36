#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dog/dog.hpp"

namespace {

using json = nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kAllFailed = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dog::DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Output stream that is stdout unless a path is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw dog::DataError("cannot write " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct ScorerSpec {
  enum Kind { kTable, kScripted, kRandom } kind = kRandom;
  std::string path;
  std::string content;  // raw file text, also feeds the vocabulary
};

ScorerSpec parse_scorer_spec(const std::string& spec) {
  ScorerSpec s;
  if (spec == "random") return s;
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw dog::ConfigError("--scorer expects table:PATH, scripted:PATH or random");
  const std::string kind = spec.substr(0, colon);
  s.path = spec.substr(colon + 1);
  if (kind == "table") {
    s.kind = ScorerSpec::kTable;
  } else if (kind == "scripted") {
    s.kind = ScorerSpec::kScripted;
  } else {
    throw dog::ConfigError("unknown scorer kind '" + kind + "'");
  }
  if (s.path.empty()) throw dog::ConfigError("--scorer " + kind + ": missing path");
  s.content = read_file(s.path);
  return s;
}

// Token strings a scorer file refers to, so the auto-built vocabulary covers them.
std::vector<std::string> scorer_texts(const ScorerSpec& s) {
  std::vector<std::string> out;
  if (s.kind == ScorerSpec::kScripted) {
    out.push_back(s.content);
  } else if (s.kind == ScorerSpec::kTable) {
    json j;
    try {
      j = json::parse(s.content);
      for (const auto& rule : j.at("rules")) {
        for (const auto& tok : rule.at("suffix")) out.push_back(tok.get<std::string>());
        for (const auto& [tok, _] : rule.at("logits").items()) out.push_back(tok);
      }
    } catch (const json::exception& e) {
      throw dog::DataError(s.path + ": " + e.what());
    }
  }
  // The whitespace tokenizer treats each line as text; drop a trailing newline of the script.
  for (auto& t : out) {
    while (!t.empty() && (t.back() == '\n' || t.back() == '\r')) t.pop_back();
  }
  return out;
}

struct DecodeArgs {
  std::string graph;
  std::string dataset;
  std::string question;
  std::vector<std::string> query_entities;
  std::vector<std::string> answers;
  std::string id = "cli";
  std::size_t beam_size = 1;
  std::size_t max_steps = 4;
  std::size_t max_unconstrained_tokens = 128;
  std::string scorer = "random";
  std::uint64_t seed = 0;
  std::string out;
  std::string template_path;
  std::string vocab_path;
  bool parallel = false;
  bool summary_json = false;
};

int run_decode(const DecodeArgs& a) {
  std::vector<dog::DatasetEntry> entries;
  if (!a.dataset.empty()) {
    entries = dog::load_dataset_file(a.dataset);
  } else {
    if (a.question.empty() || a.query_entities.empty())
      throw dog::ConfigError("--graph needs --question and at least one --query-entity");
    dog::QaInstance inst;
    inst.id = a.id;
    inst.question = a.question;
    for (const auto& e : a.query_entities) inst.query_entities.push_back(dog::text::normalize_label(e));
    inst.answers = a.answers;
    inst.graph = std::make_shared<const dog::KnowledgeGraph>(dog::load_graph_file(a.graph));
    entries.push_back({1, inst.id, std::move(inst), ""});
  }

  const ScorerSpec spec = parse_scorer_spec(a.scorer);
  const std::vector<std::string> extra = scorer_texts(spec);

  std::shared_ptr<const dog::Vocabulary> fixed_vocab;
  if (!a.vocab_path.empty())
    fixed_vocab = std::make_shared<const dog::Vocabulary>(dog::load_vocabulary_file(a.vocab_path));

  dog::TokenizerFactory make_tokenizer = [&](const dog::QaInstance& inst, const std::string& prompt)
      -> std::shared_ptr<const dog::Tokenizer> {
    if (fixed_vocab) return std::make_shared<const dog::WhitespaceTokenizer>(fixed_vocab);
    return dog::make_reference_tokenizer(inst, prompt, extra);
  };

  // Table files are resolved once per instance since token ids depend on the vocabulary.
  dog::ScorerFactory make_scorer = [&](const dog::ScorerRequest& r) -> std::unique_ptr<dog::LmScorer> {
    const auto& v = r.tokenizer.vocab();
    switch (spec.kind) {
      case ScorerSpec::kTable:
        return std::make_unique<dog::TableScorer>(dog::TableScorer::from_json(spec.content, v));
      case ScorerSpec::kScripted: {
        std::string script = spec.content;
        while (!script.empty() && (script.back() == '\n' || script.back() == '\r')) script.pop_back();
        return std::make_unique<dog::ScriptedScorer>(v.size(), r.tokenizer.encode(script), r.prompt_length,
                                                     v.eos_id());
      }
      case ScorerSpec::kRandom:
        return std::make_unique<dog::RandomScorer>(
            v.size(), r.seed, 3.0, std::vector<std::pair<dog::TokenId, double>>{{v.t_bos_id(), 2.0}});
    }
    return nullptr;
  };

  dog::RunOptions opts;
  opts.config.beam_size = a.beam_size;
  opts.config.max_steps = a.max_steps;
  opts.config.max_unconstrained_tokens = a.max_unconstrained_tokens;
  opts.config.seed = a.seed;
  opts.config.parallel = a.parallel;
  if (!a.template_path.empty()) opts.prompt_template = read_file(a.template_path);
  opts.config.validate();

  Output out(a.out);
  std::size_t errors = 0;
  const auto report = dog::run_dataset(entries, opts, make_tokenizer, make_scorer, [&](const dog::DecodeTrace& t) {
    out.get() << dog::trace_to_json(t) << '\n';
    if (t.error) {
      ++errors;
      std::cerr << "dog: " << t.instance_id << ": " << *t.error << '\n';
    }
  });
  out.get().flush();
  if (a.summary_json)
    std::cerr << report.to_json() << '\n';
  else
    std::cerr << report.to_table();
  return errors == entries.size() ? kAllFailed : kOk;
}

std::vector<dog::Triplet> read_chain(const std::string& path) {
  // TSV like graph files, but order and repeats matter, so no dedup.
  std::istringstream in(read_file(path));
  std::vector<dog::Triplet> chain;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (dog::text::trim_view(line).empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1)
      fields.push_back(line.substr(start, tab - start));
    fields.push_back(line.substr(start));
    if (fields.size() != 3)
      throw dog::ParseError(lineno, "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    try {
      chain.push_back(dog::make_triplet(fields[0], fields[1], fields[2]));
    } catch (const dog::DataError& e) {
      throw dog::ParseError(lineno, e.what());
    }
  }
  return chain;
}

int run_validate(const std::string& graph_path, const std::string& chain_path,
                 const std::vector<std::string>& query) {
  const auto graph = dog::load_graph_file(graph_path);
  const auto chain = read_chain(chain_path);
  std::vector<dog::EntityLabel> q;
  for (const auto& e : query) q.push_back(dog::text::normalize_label(e));
  std::cout << dog::report_to_json(dog::validate_chain(chain, graph, q)) << '\n';
  return kOk;
}

int run_eval(const std::string& traces_path, const std::string& dataset_path, bool as_json) {
  const auto entries = dog::load_dataset_file(dataset_path);
  std::istringstream in(read_file(traces_path));
  std::vector<dog::DecodeTrace> traces;
  std::string line;
  while (std::getline(in, line)) {
    if (dog::text::trim_view(line).empty()) continue;
    traces.push_back(dog::trace_from_json(line));
  }
  const auto report = dog::evaluate_traces(traces, entries);
  std::cout << (as_json ? report.to_json() + "\n" : report.to_table());
  return kOk;
}

int run_select(const std::string& graph_path, const std::string& question, const std::vector<std::string>& query,
               std::size_t k, const std::string& out_path) {
  const auto graph = dog::load_graph_file(graph_path);
  std::vector<dog::EntityLabel> q;
  for (const auto& e : query) q.push_back(dog::text::normalize_label(e));
  const auto selected = dog::select_topk_connected(graph, q, dog::lexical_similarity, question, k);
  Output out(out_path);
  dog::write_graph(out.get(), selected);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-constrained chain decoding and KGQA evaluation"};
  app.name("dog");
  app.require_subcommand(1);

  DecodeArgs d;
  auto* decode = app.add_subcommand("decode", "Decode reasoning chains for one question or a dataset");
  auto* src = decode->add_option_group("input");
  src->add_option("--graph", d.graph, "TSV graph file")->check(CLI::ExistingFile);
  src->add_option("--dataset", d.dataset, "JSONL dataset")->check(CLI::ExistingFile);
  src->require_option(1);
  decode->add_option("--question", d.question, "Question text (with --graph)");
  decode->add_option("--query-entity", d.query_entities, "Query entity (repeatable, with --graph)");
  decode->add_option("--answer", d.answers, "Gold answer for scoring (repeatable, with --graph)");
  decode->add_option("--id", d.id, "Instance id (with --graph)");
  decode->add_option("--beam-size", d.beam_size)->capture_default_str();
  decode->add_option("--max-steps", d.max_steps)->capture_default_str();
  decode->add_option("--max-unconstrained-tokens", d.max_unconstrained_tokens)->capture_default_str();
  decode->add_option("--scorer", d.scorer, "table:PATH | scripted:PATH | random")->capture_default_str();
  decode->add_option("--seed", d.seed)->capture_default_str();
  decode->add_option("--out", d.out, "Trace output (JSONL); stdout if omitted");
  decode->add_option("--template", d.template_path, "Prompt template file")->check(CLI::ExistingFile);
  decode->add_option("--vocab", d.vocab_path, "Vocabulary file; built from the inputs if omitted")
      ->check(CLI::ExistingFile);
  decode->add_flag("--parallel", d.parallel, "Expand beam candidates on worker threads");
  decode->add_flag("--summary-json", d.summary_json, "Print the aggregate as JSON on stderr");

  std::string graph_path, chain_path, traces_path, dataset_path, question, out_path;
  std::vector<std::string> query;
  std::size_t k = 120;
  bool as_json = false;

  auto* validate = app.add_subcommand("validate", "Check a chain against a graph");
  validate->add_option("--graph", graph_path)->required()->check(CLI::ExistingFile);
  validate->add_option("--chain", chain_path, "TSV chain, one step per line")->required()->check(CLI::ExistingFile);
  validate->add_option("--query-entity", query)->required();

  auto* eval = app.add_subcommand("eval", "Score traces against a dataset");
  eval->add_option("--traces", traces_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  eval->add_flag("--json", as_json);

  auto* select = app.add_subcommand("select-topk", "Keep a connected top-k subgraph");
  select->add_option("--graph", graph_path)->required()->check(CLI::ExistingFile);
  select->add_option("--question", question)->required();
  select->add_option("--query-entity", query)->required();
  select->add_option("-k,--k", k)->capture_default_str()->check(CLI::PositiveNumber);
  select->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*decode) return run_decode(d);
    if (*validate) return run_validate(graph_path, chain_path, query);
    if (*eval) return run_eval(traces_path, dataset_path, as_json);
    if (*select) return run_select(graph_path, question, query, k, out_path);
  } catch (const dog::ConfigError& e) {
    std::cerr << "dog: " << e.what() << '\n';
    return kUsage;
  } catch (const dog::TemplateError& e) {
    std::cerr << "dog: " << e.what() << '\n';
    return kUsage;
  } catch (const dog::Error& e) {
    std::cerr << "dog: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
