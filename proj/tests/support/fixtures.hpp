#pragma once

// Synthetic corpora and scratch directories shared by the tests.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "redsense/corpus.hpp"

namespace redsense::testing {

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string post_line(const corpus::Post& post);
std::string comment_line(const corpus::Comment& comment);
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

// Alphabetic pseudo-word, distinct for distinct (group, index) pairs.
std::string pseudo_word(std::size_t group, std::size_t index);

struct TopicCorpusSpec {
  std::size_t topics = 3;
  std::size_t docs = 150;
  std::size_t vocab_per_topic = 20;
  std::size_t words_per_doc = 60;
  std::size_t words_per_sentence = 10;
  std::uint64_t seed = 1;
};

struct TopicDocuments {
  std::vector<std::pair<std::string, std::string>> id_text;
  std::vector<std::size_t> topic;                 // generating topic per document
  std::vector<std::vector<std::string>> vocab;    // per topic
};

// Every document draws all its words from one topic's vocabulary; the
// vocabularies are disjoint. Documents are assigned to topics round robin.
TopicDocuments topic_documents(const TopicCorpusSpec& spec);

struct RedditFixtureSpec {
  std::size_t posts = 120;
  std::size_t comments = 600;
  std::size_t users = 60;
  TopicCorpusSpec topics{3, 0, 25, 40, 10, 1};  // docs is taken from posts
  std::int64_t start = 1'600'000'000;
  std::int64_t end = 1'600'000'000 + 365 * 86'400;
  std::uint64_t seed = 11;
};

struct RedditFixture {
  std::filesystem::path posts_path;
  std::filesystem::path comments_path;
  std::vector<corpus::Post> posts;
  std::vector<corpus::Comment> comments;
};

// Posts carry topic text, comments pick a post, an author and a score at
// random; some comments are by the post author or deleted.
RedditFixture write_reddit_fixture(const std::filesystem::path& dir, const RedditFixtureSpec& spec);

}  // namespace redsense::testing

#include "redsense/clustering.hpp"
#include "redsense/embeddings.hpp"

namespace redsense::testing {

struct BlobFixture {
  std::vector<clustering::ClusterDoc> docs;
  embeddings::EmbeddingStore store;
  std::vector<std::size_t> blob;  // generating blob per document
};

// Documents of blob b sit near 100 * e_b with unit-scale noise and use only
// blob b's words; every word and phrase of blob b embeds at 10 * e_b.
BlobFixture make_blobs(std::uint64_t seed, std::size_t blobs = 3, std::size_t per_blob = 30, std::size_t dim = 8);

}  // namespace redsense::testing
