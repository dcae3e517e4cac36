#include <doctest.h>

#include "dog/dog.hpp"

using namespace dog;

using Strings = std::vector<std::string>;

TEST_CASE("extract_answers reads the starred list") {
  CHECK(extract_answers("Grand Bahama is in Bahamas. Therefore, the answer is * Bahamas.") == Strings{"Bahamas"});
  CHECK(extract_answers("He was a playwright, and poet. Therefore, the answer is * playwright, and * poet.") ==
        Strings{"playwright", "poet"});
  CHECK(extract_answers("no marker here").empty());
  CHECK(extract_answers("the answer is * a, * b and * c.") == Strings{"a", "b", "c"});
  CHECK(extract_answers("the answer is nothing starred").empty());
}

TEST_CASE("extract_answers uses the last marker and stops at the line end") {
  CHECK(extract_answers("the answer is * X.\nlater the answer is * Y.") == Strings{"Y"});
  CHECK(extract_answers("the answer is * Ice Hockey.\n\n**Example 4:**") == Strings{"Ice Hockey"});
}

TEST_CASE("extract_answers recovers the exemplar answers of the default prompt") {
  const std::string& p = default_prompt_template();
  std::vector<Strings> found;
  std::size_t pos = 0;
  while ((pos = p.find("the answer is", pos)) != std::string::npos) {
    const auto end = p.find('\n', pos);
    found.push_back(extract_answers(p.substr(pos, end - pos)));
    pos = end;
  }
  CHECK(found == std::vector<Strings>{{"Bahamas"}, {"playwright", "poet"}, {"Ice Hockey"}});
}

TEST_CASE("hits_at_1") {
  CHECK(hits_at_1(Strings{"Bahamas"}, Strings{"Bahamas"}) == 1);
  CHECK(hits_at_1(Strings{"bahamas "}, Strings{"Bahamas"}) == 1);
  CHECK(hits_at_1(Strings{}, Strings{"X"}) == 0);
  CHECK(hits_at_1(Strings{"  ICE   hockey"}, Strings{"Ice Hockey"}) == 1);
  CHECK(hits_at_1(Strings{"poet"}, Strings{"playwright", "poet"}) == 1);
  CHECK(hits_at_1(Strings{"Y", "X"}, Strings{"X"}) == 0);
  // NFC: decomposed and precomposed forms are the same answer.
  CHECK(hits_at_1(Strings{"Cafe\xcc\x81"}, Strings{"Caf\xc3\xa9"}) == 1);
}

TEST_CASE("triplet_f1") {
  const Triplet t1{"A", "r1", "B"};
  const Triplet t2{"B", "r2", "C"};
  const Triplet t3{"A", "r3", "D"};
  CHECK(triplet_f1(std::vector<Triplet>{t1, t2}, std::vector<Triplet>{t1, t3}) == doctest::Approx(0.5));
  CHECK(triplet_f1(std::vector<Triplet>{t1, t3}, std::vector<Triplet>{t1, t3}) == 1.0);
  CHECK(triplet_f1(std::vector<Triplet>{}, std::vector<Triplet>{t1}) == 0.0);
  CHECK(triplet_f1(std::vector<Triplet>{t1, t1, t2}, std::vector<Triplet>{t1, t3}) == doctest::Approx(0.5));
  CHECK(triplet_f1(std::vector<Triplet>{t2, t1}, std::vector<Triplet>{t1, t2}) == 1.0);
  CHECK(triplet_f1(std::vector<Triplet>{{"a", "R1", "b "}}, std::vector<Triplet>{t1}) == 1.0);
  CHECK(triplet_f1(std::vector<Triplet>{t2}, std::vector<Triplet>{t1}) == 0.0);
}

TEST_CASE("ill_triplet_rate") {
  auto g = KnowledgeGraph::from_triplets(
      {make_triplet("A", "r1", "B"), make_triplet("B", "r2", "C"), make_triplet("A", "r3", "D")});
  const std::vector<EntityLabel> q{"A"};
  CHECK(ill_triplet_rate(std::vector<Triplet>{{"A", "r1", "B"}, {"B", "r2", "C"}}, g, q) == 0.0);
  CHECK(ill_triplet_rate(std::vector<Triplet>{{"A", "r1", "B"}, {"B", "r9", "C"}}, g, q) == 0.5);
  CHECK(ill_triplet_rate(std::vector<Triplet>{}, g, q) == 0.0);
  CHECK(ill_triplet_rate(std::vector<Triplet>{{"B", "r2", "C"}, {"X", "r", "Y"}}, g, q) == 1.0);
}

TEST_CASE("build_prompt fills both slots") {
  auto g = KnowledgeGraph::from_triplets({make_triplet("A", "r1", "B"), make_triplet("A", "r3", "D")});
  const std::string p = build_prompt(g, "What is B?", default_prompt_template());
  CHECK(p.find("Context: [ A -> r1 -> B | A -> r3 -> D ]") != std::string::npos);
  CHECK(p.find("Question: What is B?") != std::string::npos);
  CHECK(p.ends_with(std::string(kAnswerPriming)));
  CHECK(p.find("{graph}") == std::string::npos);

  CHECK(build_prompt(g, "q", "{graph} {question}").ends_with(std::string(kAnswerPriming)));
  CHECK_THROWS_AS(build_prompt(g, "q", "{graph} only"), TemplateError);
  CHECK_THROWS_AS(build_prompt(g, "q", "{question} only"), TemplateError);
  CHECK_THROWS_AS(build_prompt(g, "q", "{graph} {graph} {question}"), TemplateError);
}

TEST_CASE("default template carries the three worked examples") {
  const std::string& p = default_prompt_template();
  CHECK(p.find("Grand Bahama -> location.location.containedby -> Bahamas") != std::string::npos);
  CHECK(p.find("Carlton the Bear -> sports.mascot.team -> Toronto Maple Leafs") != std::string::npos);
  CHECK(p.find("{graph}") != std::string::npos);
  CHECK(p.find("{question}") != std::string::npos);
  CHECK(p.find('\\') == std::string::npos);
}
