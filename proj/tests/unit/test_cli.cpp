#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "dog/dog.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DOG_CLI_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dog_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return (path / name).string();
  }
};

const char* kGraph = "A\tr1\tB\nB\tr2\tC\nA\tr3\tD\n";

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("decode").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("--help").code == 0);
}

TEST_CASE("decode with a scripted scorer writes a trace") {
  TempDir tmp;
  const auto graph = tmp.write("g.tsv", kGraph);
  const auto script = tmp.write("s.txt", "1. < A -> r1 -> B > 2. < B -> r2 -> C > Therefore, the answer is * C.\n");
  const auto out = (tmp.path / "t.jsonl").string();
  auto r = run("decode --graph " + graph + " --question 'What does A reach ?' --query-entity A --answer C" +
               " --scorer scripted:" + script + " --max-steps 3 --out " + out);
  REQUIRE(r.code == 0);
  const auto trace = dog::trace_from_json(slurp(out));
  REQUIRE(trace.candidates.size() == 1);
  CHECK(trace.candidates[0].chain == dog::Chain{{"A", "r1", "B"}, {"B", "r2", "C"}});
  CHECK(trace.answers == std::vector<std::string>{"C"});
  CHECK(trace.metrics.hits_at_1 == 1);
}

TEST_CASE("decode with a table scorer over a dataset, then eval") {
  TempDir tmp;
  tmp.write("g.tsv", kGraph);
  const auto data = tmp.write(
      "d.jsonl",
      R"({"id":"q1","question":"What does A reach ?","query_entities":["A"],"answers":["C"],"graph":"g.tsv","gold_chain":[["A","r1","B"],["B","r2","C"]]})"
      "\n"
      R"({"id":"q2","question":"broken","query_entities":["A"],"answers":["C"],"graph":"missing.tsv"})"
      "\n");
  const auto table = tmp.write("t.json", R"({"default":0.0,"rules":[
      {"suffix":["question."],"logits":{"<":5.0}},
      {"suffix":["A","->"],"logits":{"r1":3.0}},
      {"suffix":["B",">"],"logits":{"<":5.0}},
      {"suffix":["C",">"],"logits":{"<eos>":5.0}}]})");
  const auto out = (tmp.path / "t.jsonl").string();
  auto r = run("decode --dataset " + data + " --scorer table:" + table + " --beam-size 2 --max-steps 2 --out " + out);
  REQUIRE(r.code == 0);
  std::istringstream lines(slurp(out));
  std::string l1, l2;
  std::getline(lines, l1);
  std::getline(lines, l2);
  auto t1 = dog::trace_from_json(l1);
  auto t2 = dog::trace_from_json(l2);
  CHECK_FALSE(t1.error.has_value());
  CHECK(t1.candidates.size() <= 2);
  CHECK(t1.metrics.ill_triplet_rate == 0.0);
  CHECK(t2.error.has_value());

  auto e = run("eval --traces " + out + " --dataset " + data);
  CHECK(e.code == 0);
  CHECK(e.out.find("hits@1") != std::string::npos);
  CHECK(e.out.find("failed            1") != std::string::npos);
  auto j = run("eval --json --traces " + out + " --dataset " + data);
  CHECK(j.out.find("\"decoded\":1") != std::string::npos);
}

TEST_CASE("decode fails with 3 when nothing decodes") {
  TempDir tmp;
  const auto graph = tmp.write("g.tsv", kGraph);
  auto r = run("decode --graph " + graph + " --question q --query-entity Nobody --scorer random");
  CHECK(r.code == 3);
}

TEST_CASE("data errors exit with 2") {
  TempDir tmp;
  const auto graph = tmp.write("bad.tsv", "A\tr1\n");
  CHECK(run("decode --graph " + graph + " --question q --query-entity A").code == 2);
  const auto good = tmp.write("g.tsv", kGraph);
  CHECK(run("decode --graph " + good + " --question q --query-entity A --scorer table:" +
            tmp.write("t.json", "{not json")).code == 2);
  CHECK(run("decode --graph " + good + " --question q --query-entity A --beam-size 0").code == 1);
}

TEST_CASE("validate reports violations") {
  TempDir tmp;
  const auto graph = tmp.write("g.tsv", kGraph);
  const auto chain = tmp.write("c.tsv", "B\tr2\tC\n");
  auto r = run("validate --graph " + graph + " --chain " + chain + " --query-entity A");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"well_formed\":false") != std::string::npos);
  CHECK(r.out.find("PROPERTY_2") != std::string::npos);
  const auto ok = tmp.write("ok.tsv", "A\tr1\tB\nB\tr2\tC\n");
  CHECK(run("validate --graph " + graph + " --chain " + ok + " --query-entity A").out.find("\"well_formed\":true") !=
        std::string::npos);
}

TEST_CASE("select-topk writes a connected TSV subgraph") {
  TempDir tmp;
  const auto graph = tmp.write("g.tsv", std::string(kGraph) + "X\tr9\tY\n");
  auto r = run("select-topk --graph " + graph + " --question 'what is r2' --query-entity A -k 1");
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  auto g = dog::load_graph(in);
  CHECK(g.triplets() == std::vector<dog::Triplet>{{"A", "r1", "B"}, {"B", "r2", "C"}});
  CHECK(run("select-topk --graph " + graph + " --question q --query-entity Nope").code == 2);
}
