#include <doctest.h>

#include <cmath>

#include "redsense/embeddings.hpp"
#include "redsense/errors.hpp"
#include "redsense/io.hpp"
#include "support/fixtures.hpp"

using namespace redsense;
using namespace redsense::embeddings;
using redsense::testing::TempDir;

TEST_CASE("file with three word vectors of dimension four") {
  TempDir dir;
  io::write_file(dir / "w.jsonl",
                 "{\"key\":\"loan\",\"vector\":[1,0,0,0]}\n{\"key\":\"debt\",\"vector\":[0,1,0,0]}\n"
                 "{\"key\":\"card\",\"vector\":[0,0,1,0.5]}\n");
  const auto s = load_space(dir / "w.jsonl");
  CHECK(s.dim() == 4);
  CHECK(s.size() == 3);
  CHECK(s.lookup("card")->at(3) == 0.5);
  CHECK_FALSE(s.lookup("absent").has_value());
  CHECK_FALSE(s.contains("absent"));
  CHECK(s.keys() == std::vector<std::string>{"card", "debt", "loan"});
}

TEST_CASE("malformed embedding files are format errors") {
  TempDir dir;
  io::write_file(dir / "mixed.jsonl", "{\"key\":\"a\",\"vector\":[1,2,3,4]}\n{\"key\":\"b\",\"vector\":[1,2,3,4,5]}\n");
  CHECK_THROWS_AS(load_space(dir / "mixed.jsonl"), FormatError);
  io::write_file(dir / "dup.jsonl", "{\"key\":\"a\",\"vector\":[1]}\n{\"key\":\"a\",\"vector\":[2]}\n");
  CHECK_THROWS_AS(load_space(dir / "dup.jsonl"), FormatError);
  io::write_file(dir / "empty.jsonl", "");
  CHECK_THROWS_AS(load_space(dir / "empty.jsonl"), FormatError);
  io::write_file(dir / "bad.jsonl", "{\"key\":\"a\",\"vector\":\"x\"}\n");
  CHECK_THROWS_AS(load_space(dir / "bad.jsonl"), FormatError);
  CHECK_THROWS_AS(load_space(dir / "none.jsonl"), IoError);
}

TEST_CASE("insert validates dimension and finiteness") {
  EmbeddingSpace s;
  s.insert("a", {1, 2});
  CHECK(s.dim() == 2);
  CHECK_THROWS_AS(s.insert("b", {1, 2, 3}), FormatError);
  CHECK_THROWS_AS(s.insert("c", {1, NAN}), FormatError);
}

TEST_CASE("synthetic vectors are pure functions of seed, key and dim") {
  CHECK(synthetic_vector(7, "loan", 16) == synthetic_vector(7, "loan", 16));
  CHECK(synthetic_vector(7, "loan", 2).size() == 2);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto key = "token" + std::to_string(i);
    differs = differs || synthetic_vector(7, key, 8) != synthetic_vector(8, key, 8);
  }
  CHECK(differs);
  for (double x : synthetic_vector(3, "range", 64)) {
    CHECK(x >= -1.0);
    CHECK(x < 1.0);
  }
  const auto store = synthetic_store(7, 12);
  CHECK(store.words.lookup("anything")->size() == 12);
  CHECK(*store.words.lookup("anything") == synthetic_vector(7, "anything", 12));
  CHECK_THROWS_AS(synthetic_store(7, 1), PreconditionError);
}

TEST_CASE("write then load round-trips exactly") {
  TempDir dir;
  EmbeddingSpace s;
  s.insert("b", {0.1, 1.0 / 3.0});
  s.insert("a", {-2.5e-7, 4});
  write_space(s, dir / "s.jsonl");
  const auto back = load_space(dir / "s.jsonl");
  CHECK(back.keys() == s.keys());
  CHECK(*back.lookup("b") == *s.lookup("b"));
  CHECK(io::read_file(dir / "s.jsonl").rfind("{\"key\":\"a\"", 0) == 0);
  write_space(s, dir / "d.jsonl");
  const auto store = load_store(dir / "s.jsonl", dir / "d.jsonl");
  CHECK(store.docs.size() == 2);
}

TEST_CASE("mean of word vectors for documents") {
  EmbeddingSpace words;
  words.insert("loan", {1, 0});
  words.insert("debt", {0, 1});
  const auto docs = mean_word_documents(words, {{"d1", "Loan and debt"}, {"d2", "nothing here"}, {"d3", "loan loan"}});
  CHECK(docs.lookup("d1") == Vector{0.5, 0.5});
  CHECK_FALSE(docs.contains("d2"));
  CHECK(docs.lookup("d3") == Vector{1, 0});
}
