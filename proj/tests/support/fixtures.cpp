#include "support/fixtures.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <random>

#include "redsense/io.hpp"

namespace redsense::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::random_device rd;
  std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  for (;;) {
    path_ = fs::temp_directory_path() / ("redsense-test-" + std::to_string(rng() % 1'000'000'000));
    if (fs::create_directories(path_)) return;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string post_line(const corpus::Post& p) {
  return nlohmann::json{{"id", p.id},           {"author", p.author},   {"title", p.title},
                        {"selftext", p.body},   {"created_utc", p.created_utc}, {"score", p.score}}
      .dump();
}

std::string comment_line(const corpus::Comment& c) {
  return nlohmann::json{{"id", c.id},
                        {"author", c.author},
                        {"body", c.body},
                        {"created_utc", c.created_utc},
                        {"score", c.score},
                        {"link_id", "t3_" + c.link_id},
                        {"parent_id", c.parent_id}}
      .dump();
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  io::write_file(path, out);
}

std::string pseudo_word(std::size_t group, std::size_t index) {
  static constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
  static constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};
  auto syllable = [](std::size_t n) {
    return std::string(kOnsets[n % 14]) + kVowels[(n / 14) % 5];
  };
  return syllable(group) + syllable(index) + syllable(index / 70 + 3 * group) + "x";
}

TopicDocuments topic_documents(const TopicCorpusSpec& spec) {
  TopicDocuments out;
  std::mt19937_64 rng(spec.seed);
  for (std::size_t t = 0; t < spec.topics; ++t) {
    std::vector<std::string> words;
    for (std::size_t i = 0; i < spec.vocab_per_topic; ++i) words.push_back(pseudo_word(t, i));
    out.vocab.push_back(std::move(words));
  }
  for (std::size_t d = 0; d < spec.docs; ++d) {
    const auto t = d % spec.topics;
    std::uniform_int_distribution<std::size_t> pick(0, spec.vocab_per_topic - 1);
    std::string text;
    for (std::size_t w = 0; w < spec.words_per_doc; ++w) {
      if (w) text += (w % spec.words_per_sentence == 0) ? ". " : " ";
      text += out.vocab[t][pick(rng)];
    }
    text += ".";
    char id[16];
    std::snprintf(id, sizeof id, "d%04zu", d);
    out.id_text.emplace_back(id, std::move(text));
    out.topic.push_back(t);
  }
  return out;
}

RedditFixture write_reddit_fixture(const fs::path& dir, const RedditFixtureSpec& spec) {
  RedditFixture fx;
  auto topics = spec.topics;
  topics.docs = spec.posts;
  topics.seed = spec.seed;
  const auto docs = topic_documents(topics);
  std::mt19937_64 rng(spec.seed * 7 + 3);
  std::uniform_int_distribution<std::int64_t> when(spec.start, spec.end - 1);
  std::uniform_int_distribution<std::size_t> user(0, spec.users - 1);
  std::uniform_int_distribution<std::int64_t> score(-5, 40);
  auto user_name = [](std::size_t u) { return "user" + std::to_string(u); };

  std::vector<std::string> post_lines;
  for (std::size_t i = 0; i < spec.posts; ++i) {
    corpus::Post p;
    p.id = "p" + std::to_string(1000 + i);
    p.author = user_name(user(rng));
    const auto& text = docs.id_text[i].second;
    p.title = text.substr(0, text.find('.'));
    p.body = text.substr(text.find('.') + 1);
    p.created_utc = when(rng);
    p.score = score(rng);
    post_lines.push_back(post_line(p));
    fx.posts.push_back(std::move(p));
  }
  std::vector<std::string> comment_lines;
  std::uniform_int_distribution<std::size_t> which(0, spec.posts - 1);
  std::uniform_int_distribution<int> kind(0, 9);
  for (std::size_t i = 0; i < spec.comments; ++i) {
    const auto& post = fx.posts[which(rng)];
    corpus::Comment c;
    c.id = "c" + std::to_string(5000 + i);
    const int k = kind(rng);
    c.author = k == 0 ? post.author : (k == 1 ? std::string("[deleted]") : user_name(user(rng)));
    c.body = "reply " + std::to_string(i);
    c.created_utc = post.created_utc + static_cast<std::int64_t>(i % 3600);
    c.score = score(rng) - 3;
    c.link_id = post.id;
    c.parent_id = "t3_" + post.id;
    comment_lines.push_back(comment_line(c));
    fx.comments.push_back(std::move(c));
  }
  fx.posts_path = dir / "posts.jsonl";
  fx.comments_path = dir / "comments.jsonl";
  write_lines(fx.posts_path, post_lines);
  write_lines(fx.comments_path, comment_lines);
  return fx;
}

}  // namespace redsense::testing

namespace redsense::testing {

BlobFixture make_blobs(std::uint64_t seed, std::size_t blobs, std::size_t per_blob, std::size_t dim) {
  BlobFixture fx;
  TopicCorpusSpec spec;
  spec.topics = blobs;
  spec.docs = blobs * per_blob;
  spec.vocab_per_topic = 15;
  spec.words_per_doc = 30;
  spec.seed = seed;
  const auto gen = topic_documents(spec);
  fx.store.words = embeddings::EmbeddingSpace(dim);
  fx.store.docs = embeddings::EmbeddingSpace(dim);
  for (std::size_t b = 0; b < blobs; ++b) {
    embeddings::Vector v(dim, 0.0);
    v[b % dim] = 10.0;
    for (const auto& w : gen.vocab[b]) fx.store.words.insert(w, v);
  }
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  for (std::size_t i = 0; i < gen.id_text.size(); ++i) {
    const auto b = gen.topic[i];
    embeddings::Vector v(dim);
    for (auto& x : v) x = noise(rng);
    v[b % dim] += 100.0;
    fx.store.docs.insert(gen.id_text[i].first, v);
    fx.docs.push_back({gen.id_text[i].first, gen.id_text[i].second});
    fx.blob.push_back(b);
  }
  return fx;
}

}  // namespace redsense::testing
