#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dog/dog.hpp"
#include "generators.hpp"

using namespace dog;

namespace {

const char* kToyLine =
    R"({"id": "q1", "question": "What does A reach?", "query_entities": ["A"], "answers": ["C"],)"
    R"( "graph": [["A","r1","B"],["B","r2","C"],["A","r3","D"]], "gold_chain": [["A","r1","B"],["B","r2","C"]]})";

std::vector<DatasetEntry> entries_of(const std::vector<QaInstance>& instances) {
  std::vector<DatasetEntry> out;
  std::size_t line = 0;
  for (const auto& inst : instances) out.push_back({++line, inst.id, inst, ""});
  return out;
}

}  // namespace

TEST_CASE("parse_instance reads inline graphs and gold chains") {
  auto inst = parse_instance(kToyLine);
  CHECK(inst.id == "q1");
  CHECK(inst.graph->size() == 3);
  REQUIRE(inst.gold_chain.has_value());
  CHECK(inst.gold_chain->size() == 2);
  CHECK(inst.answers == std::vector<std::string>{"C"});
}

TEST_CASE("parse_instance rejects defective records") {
  CHECK_THROWS_AS(parse_instance("{"), DataError);
  CHECK_THROWS_AS(parse_instance(R"({"id":"x","question":"q","query_entities":[],"answers":["a"],"graph":[]})"),
                  DataError);
  CHECK_THROWS_AS(
      parse_instance(R"({"id":"x","question":"q","query_entities":["A"],"answers":["a"],"graph":[["A","r"]]})"),
      DataError);
  CHECK_THROWS_AS(parse_instance(R"({"id":"x","question":" ","query_entities":["A"],"answers":["a"],"graph":[]})"),
                  DataError);
}

TEST_CASE("parse_instance resolves graph files against the base directory") {
  const auto dir = std::filesystem::temp_directory_path() / "dog_dataset_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "g.tsv") << "A\tr1\tB\nB\tr2\tC\n";
  auto inst = parse_instance(
      R"({"id":"f","question":"q","query_entities":["A"],"answers":["C"],"graph":"g.tsv"})", dir.string());
  CHECK(inst.graph->size() == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_dataset isolates bad lines") {
  std::istringstream in(std::string(kToyLine) + "\n" +
                        R"({"id":"bad","question":"q","query_entities":["A"],"answers":["a"],"graph":[["A","r"]]})" +
                        "\n\nnot json\n");
  auto entries = load_dataset(in);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].instance.has_value());
  CHECK_FALSE(entries[1].instance.has_value());
  CHECK(entries[1].id == "bad");
  CHECK_FALSE(entries[1].error.empty());
  CHECK(entries[2].line == 4);
  CHECK(entries[2].id == "line-4");

  std::istringstream empty("\n\n");
  CHECK_THROWS_AS(load_dataset(empty), DataError);
}

TEST_CASE("instance JSON round trip") {
  auto inst = parse_instance(kToyLine);
  auto back = parse_instance(instance_to_json(inst));
  CHECK(back.id == inst.id);
  CHECK(back.graph->triplets() == inst.graph->triplets());
  CHECK(back.gold_chain == inst.gold_chain);
  CHECK(back.query_entities == inst.query_entities);
}

TEST_CASE("trace JSON round trip is lossless") {
  DecodeTrace t;
  t.instance_id = "q\"1";
  t.candidates.push_back({{{"A", "r1", "B"}}, -0.1234567890123, {-0.1234567890123}, "< A -> r1 -> B >\nok",
                          {"B"}, true});
  t.candidates.push_back({{}, 0.0, {}, "", {}, false});
  t.answers = {"B"};
  t.metrics.hits_at_1 = 0;
  t.metrics.triplet_f1 = 1.0 / 3.0;
  t.warnings = {"query entity Z has no incident triplets"};
  const std::string json = trace_to_json(t);
  CHECK(json.find("\"schema\":\"dog_trace_v1\"") != std::string::npos);
  CHECK(json.find('\n') == std::string::npos);
  CHECK(trace_from_json(json) == t);

  DecodeTrace err;
  err.instance_id = "x";
  err.error = "boom";
  CHECK(trace_from_json(trace_to_json(err)) == err);
  CHECK_THROWS_AS(trace_from_json(R"({"schema":"other"})"), DataError);
}

TEST_CASE("gold path scorer reaches the answer on the toy data") {
  auto data = testing::toy_dataset(42, 20);
  auto entries = entries_of(data);
  auto script_for = [](const QaInstance& inst) {
    std::vector<std::string> extra;
    for (const auto& w : testing::filler_words()) extra.push_back(w);
    extra.push_back(inst.answers[0] + ".");
    return extra;
  };
  TokenizerFactory tok = [&](const QaInstance& inst, const std::string& prompt) {
    return make_reference_tokenizer(inst, prompt, script_for(inst));
  };
  ScorerFactory scorer = [](const ScorerRequest& r) -> std::unique_ptr<LmScorer> {
    const TokenSeq prompt = r.tokenizer.encode(
        build_prompt(*r.instance.graph, r.instance.question, default_prompt_template()));
    return std::make_unique<TableScorer>(
        testing::gold_path_scorer(r.tokenizer, prompt, *r.instance.gold_chain, r.instance.answers[0]));
  };
  RunOptions opts;
  opts.config.max_steps = 3;
  std::vector<DecodeTrace> traces;
  auto report = run_dataset(entries, opts, tok, scorer, [&](const DecodeTrace& t) { traces.push_back(t); });
  CHECK(report.instances == 20);
  CHECK(report.decoded == 20);
  CHECK(report.hits_at_1 == 1.0);
  REQUIRE(report.triplet_f1.has_value());
  CHECK(*report.triplet_f1 == 1.0);
  CHECK(report.ill_triplet_rate == 0.0);
  CHECK(traces.size() == 20);

  auto again = evaluate_traces(traces, entries);
  CHECK(again.hits_at_1 == report.hits_at_1);
  CHECK(again.triplet_f1 == report.triplet_f1);
}

TEST_CASE("a broken instance is reported and the rest still aggregate") {
  auto data = testing::toy_dataset(7, 20);
  auto entries = entries_of(data);
  entries[3].instance.reset();
  entries[3].error = "line 1: expected 3 tab-separated fields";
  TokenizerFactory tok = [](const QaInstance& inst, const std::string& prompt) {
    std::vector<std::string> extra(testing::filler_words());
    return make_reference_tokenizer(inst, prompt, extra);
  };
  ScorerFactory scorer = [](const ScorerRequest& r) -> std::unique_ptr<LmScorer> {
    const auto& v = r.tokenizer.vocab();
    return std::make_unique<RandomScorer>(v.size(), r.seed, 3.0,
                                          std::vector<std::pair<TokenId, double>>{{v.t_bos_id(), 4.0}});
  };
  RunOptions opts;
  opts.config.max_unconstrained_tokens = 8;
  std::vector<DecodeTrace> traces;
  auto report = run_dataset(entries, opts, tok, scorer, [&](const DecodeTrace& t) { traces.push_back(t); });
  CHECK(report.instances == 20);
  CHECK(report.failed == 1);
  CHECK(report.decoded == 19);
  REQUIRE(traces[3].error.has_value());
  CHECK(traces[3].error->find("line 1") != std::string::npos);
  CHECK(report.ill_triplet_rate == 0.0);
  CHECK_THROWS_AS(run_dataset(std::span<const DatasetEntry>{}, opts, tok, scorer, {}), DataError);
}
