#include <doctest.h>

#include <sstream>

#include "dog/dog.hpp"
#include "generators.hpp"

using namespace dog;

namespace {

std::shared_ptr<const WhitespaceTokenizer> tokenizer_for(std::vector<std::string> texts) {
  return std::make_shared<const WhitespaceTokenizer>(
      std::make_shared<const Vocabulary>(build_vocabulary(texts)));
}

}  // namespace

TEST_CASE("vocabulary reserves the marker ids") {
  auto tok = tokenizer_for({"A -> r1 -> B"});
  const auto& v = tok->vocab();
  CHECK(v.t_bos_id() == 0);
  CHECK(v.t_eos_id() == 1);
  CHECK(v.eos_id() == 2);
  CHECK(v.string_of(0) == "<");
  CHECK(v.id_of(">") == 1);
  for (TokenId id = 0; id < static_cast<TokenId>(v.size()); ++id) CHECK(v.id_of(v.string_of(id)) == id);
}

TEST_CASE("vocabulary rejects bad marker layouts") {
  CHECK_THROWS_AS(Vocabulary({"<", ">", "<eos>"}, 0, 0, 2), DataError);
  CHECK_THROWS_AS(Vocabulary({"<", ">", "<eos>"}, 0, 1, 7), DataError);
  CHECK_THROWS_AS(Vocabulary({"<", "<", "<eos>"}, 0, 1, 2), DataError);
  std::istringstream bad("a\nb\nc\n");
  CHECK_THROWS_AS(load_vocabulary(bad), DataError);
}

TEST_CASE("vocabulary file round trip keeps line breaks") {
  auto v = build_vocabulary(std::vector<std::string>{"x y\nz"});
  std::ostringstream out;
  write_vocabulary(out, v);
  CHECK(out.str().find("<0x0A>") != std::string::npos);
  std::istringstream in(out.str());
  auto back = load_vocabulary(in);
  CHECK(back.tokens() == v.tokens());
}

TEST_CASE("encode follows whitespace symbols") {
  auto tok = tokenizer_for({"A -> r1 -> B"});
  CHECK(tok->encode("A -> r1 -> B").size() == 5);
  CHECK(tok->encode("").empty());
  auto ids = tok->encode("< A -> r1 -> B >");
  REQUIRE(ids.size() == 7);
  CHECK(ids[0] == tok->vocab().t_bos_id());
  CHECK(ids[6] == tok->vocab().t_eos_id());
}

TEST_CASE("encode rejects what it cannot reproduce") {
  auto tok = tokenizer_for({"A -> r1 -> B"});
  CHECK_THROWS_AS(tok->encode("A  B"), EncodeError);
  CHECK_THROWS_AS(tok->encode(" A"), EncodeError);
  CHECK_THROWS_AS(tok->encode("A\tB"), EncodeError);
  CHECK_THROWS_AS(tok->encode("unknown"), EncodeError);
}

TEST_CASE("decode(encode(text)) is lossless on multi-line text") {
  const std::string text = "Context: [ A -> r -> B ]\n\nQuestion: why?\nAnswer:";
  auto tok = tokenizer_for({text});
  CHECK(tok->decode(tok->encode(text)) == text);
}

TEST_CASE("serialize_triplet emits the marker-delimited surface form") {
  auto tok = tokenizer_for({"A -> r1 -> B"});
  const auto& v = tok->vocab();
  CHECK(serialize_triplet(*tok, make_triplet("A", "r1", "B")) ==
        TokenSeq{v.t_bos_id(), v.id_of("A"), v.id_of("->"), v.id_of("r1"), v.id_of("->"), v.id_of("B"),
                 v.t_eos_id()});

  const auto t = make_triplet("Grand Bahama", "location.location.containedby", "Bahamas");
  auto tok2 = tokenizer_for({triplet_surface(t)});
  CHECK(tok2->decode(serialize_triplet(*tok2, t)) ==
        "< Grand Bahama -> location.location.containedby -> Bahamas >");
}

TEST_CASE("serialize_triplet rejects fields that encode to markers") {
  auto tok = tokenizer_for({"A -> r1 -> B"});
  CHECK_THROWS_AS(serialize_triplet(*tok, make_triplet("x <", "r1", "B")), EncodeError);
  CHECK_THROWS_AS(serialize_triplet(*tok, make_triplet("A", "r1", "> B")), EncodeError);
  CHECK_THROWS_AS(serialize_triplet(*tok, make_triplet("A", "<eos>", "B")), EncodeError);
}

TEST_CASE("parse_triplet enforces three fields") {
  auto tok = tokenizer_for({"A -> r -> s -> B"});
  CHECK(parse_triplet(*tok, serialize_triplet(*tok, make_triplet("A", "r", "B"))) == Triplet{"A", "r", "B"});
  CHECK_THROWS_AS(parse_triplet(*tok, tok->encode("< A -> B >")), DataError);
  CHECK_THROWS_AS(parse_triplet(*tok, tok->encode("< A -> r -> s -> B >")), DataError);
  CHECK_THROWS_AS(parse_triplet(*tok, tok->encode("A -> r -> B >")), DataError);
}

TEST_CASE("serialize/parse round trip with a single leading marker") {
  testing::Rng rng(5);
  for (int round = 0; round < 30; ++round) {
    auto triplets = testing::random_triplets(rng, 20, 12, 5);
    std::vector<std::string> texts;
    for (const auto& t : triplets) texts.push_back(triplet_surface(t));
    auto tok = tokenizer_for(texts);
    for (const auto& t : triplets) {
      const auto seq = serialize_triplet(*tok, t);
      CHECK(std::count(seq.begin(), seq.end(), tok->vocab().t_bos_id()) == 1);
      CHECK(seq.front() == tok->vocab().t_bos_id());
      CHECK(parse_triplet(*tok, seq) == t);
    }
  }
}
