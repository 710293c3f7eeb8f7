#include <doctest.h>

#include <nlohmann/json.hpp>
#include <set>

#include "redsense/corpus.hpp"
#include "redsense/errors.hpp"
#include "support/fixtures.hpp"

using namespace redsense;
using namespace redsense::corpus;
using redsense::testing::TempDir;
using redsense::testing::comment_line;
using redsense::testing::post_line;
using redsense::testing::write_lines;

namespace {

const TimeWindow kAll{1, 4'000'000'000};

Post make_post(std::string id, std::string author, std::int64_t t, std::int64_t score = 1) {
  return Post{std::move(id), std::move(author), "title " + std::to_string(t), "body text", t, score};
}

Comment make_comment(std::string id, std::string author, const std::string& post, std::int64_t t, std::int64_t score = 0) {
  return Comment{std::move(id), std::move(author), "reply", t, score, post, "t3_" + post};
}

std::set<std::string> post_ids(const Corpus& c) {
  std::set<std::string> s;
  for (const auto& p : c.posts()) s.insert(p.id);
  return s;
}

std::set<std::string> comment_ids(const Corpus& c) {
  std::set<std::string> s;
  for (const auto& x : c.comments()) s.insert(x.id);
  return s;
}

}  // namespace

TEST_CASE("five post lines with one malformed") {
  TempDir dir;
  write_lines(dir / "p.jsonl", {post_line(make_post("a", "u1", 100)), post_line(make_post("b", "u2", 101)),
                                "{\"id\": \"c\", \"author\": ", post_line(make_post("d", "u3", 102)),
                                post_line(make_post("e", "u4", 103))});
  write_lines(dir / "c.jsonl", {});
  const auto r = ingest_dump(dir / "p.jsonl", dir / "c.jsonl", kAll);
  CHECK(r.corpus.posts().size() == 4);
  CHECK(r.stats.posts.lines == 5);
  CHECK(r.stats.posts.rejected == 1);
  CHECK(r.stats.posts.rejected_by_reason.at("malformed_json") == 1);
  REQUIRE(r.stats.posts.rejected_lines.size() == 1);
  CHECK(r.stats.posts.rejected_lines[0].line == 3);
}

TEST_CASE("empty files give an empty corpus") {
  TempDir dir;
  write_lines(dir / "p.jsonl", {});
  write_lines(dir / "c.jsonl", {});
  const auto r = ingest_dump(dir / "p.jsonl", dir / "c.jsonl", kAll);
  CHECK(r.corpus.empty());
  CHECK(r.stats.posts.lines == 0);
  CHECK(r.stats.posts.accepted == 0);
  CHECK(r.stats.comments.lines == 0);
  CHECK(r.stats.comments.rejected == 0);
  CHECK(unique_users(r.corpus) == 0);
}

TEST_CASE("table-shaped fixture at 1/1000 scale") {
  TempDir dir;
  redsense::testing::RedditFixtureSpec spec;
  spec.posts = 135;
  spec.comments = 1522;
  const auto fx = redsense::testing::write_reddit_fixture(dir.path(), spec);
  const auto r = ingest_dump(fx.posts_path, fx.comments_path, {spec.start, spec.end});
  CHECK(r.corpus.posts().size() == 135);
  CHECK(r.corpus.comments().size() == 1522);
  CHECK(r.stats.posts.accepted == 135);
  CHECK(r.stats.comments.accepted == 1522);
  std::size_t threaded = 0;
  for (const auto& [post, ids] : r.corpus.thread_index()) threaded += ids.size();
  CHECK(threaded == 1522);
}

TEST_CASE("rejection and quarantine accounting") {
  TempDir dir;
  auto empty_text = make_post("x", "u", 150);
  empty_text.title = " ";
  empty_text.body = "";
  write_lines(dir / "p.jsonl", {post_line(make_post("a", "u1", 100)), post_line(make_post("a", "u1", 101)),
                                post_line(make_post("late", "u1", 999)), "", "{\"id\":\"m\"}",
                                post_line(empty_text)});
  write_lines(dir / "c.jsonl", {comment_line(make_comment("c1", "u2", "a", 120)),
                                comment_line(make_comment("c2", "u2", "nope", 120)),
                                comment_line(make_comment("c1", "u3", "a", 121)), "[1,2]"});
  const auto r = ingest_dump(dir / "p.jsonl", dir / "c.jsonl", {1, 500});
  const auto& ps = r.stats.posts;
  CHECK(ps.accepted == 1);
  CHECK(ps.rejected_by_reason.at("duplicate_id") == 1);
  CHECK(ps.rejected_by_reason.at("out_of_window") == 1);
  CHECK(ps.rejected_by_reason.at("empty_line") == 1);
  CHECK(ps.rejected_by_reason.at("missing_field") == 1);
  CHECK(ps.quarantined_by_reason.at("empty_text") == 1);
  CHECK(ps.accepted + ps.rejected + ps.quarantined == ps.lines);
  const auto& cs = r.stats.comments;
  CHECK(cs.accepted == 1);
  CHECK(cs.quarantined_by_reason.at("unknown_post") == 1);
  CHECK(cs.rejected_by_reason.at("duplicate_id") == 1);
  CHECK(cs.accepted + cs.rejected + cs.quarantined == cs.lines);
  REQUIRE(r.corpus.comments().size() == 1);
  CHECK(r.corpus.comments()[0].link_id == "a");
  CHECK(r.corpus.comments()[0].parent_id == "t3_a");
  const auto j = to_json(r.stats);
  CHECK(j.at("posts").at("lines") == 6);
}

TEST_CASE("numeric fields accept integral floats and numeric strings") {
  TempDir dir;
  write_lines(dir / "p.jsonl",
              {R"({"id":"a","author":"u","title":"t","selftext":"b","created_utc":"100","score":2.0})",
               R"({"id":"b","author":"u","title":"t","selftext":"b","created_utc":100.5,"score":1})"});
  write_lines(dir / "c.jsonl", {});
  const auto r = ingest_dump(dir / "p.jsonl", dir / "c.jsonl", kAll);
  REQUIRE(r.corpus.posts().size() == 1);
  CHECK(r.corpus.posts()[0].created_utc == 100);
  CHECK(r.corpus.posts()[0].score == 2);
  CHECK(r.stats.posts.rejected_by_reason.at("invalid_field") == 1);
}

TEST_CASE("removed selftext is treated as empty") {
  TempDir dir;
  auto p = make_post("a", "[deleted]", 100);
  p.body = "[removed]";
  write_lines(dir / "p.jsonl", {post_line(p)});
  write_lines(dir / "c.jsonl", {});
  const auto r = ingest_dump(dir / "p.jsonl", dir / "c.jsonl", kAll);
  REQUIRE(r.corpus.posts().size() == 1);
  CHECK(r.corpus.posts()[0].body.empty());
  CHECK(post_text(r.corpus.posts()[0]) == "title 100");
}

TEST_CASE("missing file is an io error") {
  TempDir dir;
  write_lines(dir / "c.jsonl", {});
  CHECK_THROWS_AS(ingest_dump(dir / "absent.jsonl", dir / "c.jsonl", kAll), IoError);
  CHECK_THROWS_AS(ingest_dump(dir / "c.jsonl", dir / "c.jsonl", {5, 5}), PreconditionError);
}

TEST_CASE("corpus constructor validates") {
  CHECK_THROWS_AS(Corpus({make_post("a", "u", 10), make_post("a", "u", 11)}, {}, kAll), PreconditionError);
  CHECK_THROWS_AS(Corpus({make_post("a", "u", 10)}, {make_comment("c", "u", "b", 11)}, kAll), PreconditionError);
  CHECK_THROWS_AS(Corpus({make_post("a", "u", 10)}, {}, {20, 30}), PreconditionError);
}

TEST_CASE("thread index orders comments by time then id") {
  Corpus c({make_post("a", "u", 10)},
           {make_comment("z", "u", "a", 30), make_comment("y", "u", "a", 20), make_comment("x", "u", "a", 30)}, kAll);
  CHECK(c.thread_index().at("a") == std::vector<std::string>{"y", "x", "z"});
  CHECK(c.comments_of("a").size() == 3);
  CHECK(c.find_post("a") != nullptr);
  CHECK(c.find_comment("q") == nullptr);
}

TEST_CASE("split at the median timestamp") {
  std::vector<Post> posts;
  for (int i = 0; i < 10; ++i) posts.push_back(make_post("p" + std::to_string(i), "u", 100 + i));
  Corpus c(posts, {make_comment("c1", "v", "p0", 500), make_comment("c2", "v", "p9", 101)}, kAll);
  const auto parts = split_by_window(c, {105});
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].posts().size() == 5);
  CHECK(parts[1].posts().size() == 5);
  // comments follow their thread even when written after the boundary
  CHECK(parts[0].comments().size() == 1);
  CHECK(parts[0].comments()[0].id == "c1");
  CHECK(parts[1].comments()[0].id == "c2");
}

TEST_CASE("split edge cases") {
  std::vector<Post> posts;
  for (int i = 0; i < 4; ++i) posts.push_back(make_post("p" + std::to_string(i), "u", 100 + i));
  Corpus c(posts, {make_comment("c", "v", "p1", 200)}, kAll);
  const auto one = split_by_window(c, {});
  REQUIRE(one.size() == 1);
  CHECK(post_ids(one[0]) == post_ids(c));
  CHECK(comment_ids(one[0]) == comment_ids(c));
  const auto late = split_by_window(c, {1000});
  CHECK(late[0].posts().size() == 4);
  CHECK(late[1].posts().empty());
  CHECK_THROWS_AS(split_by_window(c, {200, 150}), PreconditionError);
}

TEST_CASE("split partitions posts and comments (property)") {
  TempDir dir;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    redsense::testing::RedditFixtureSpec spec;
    spec.seed = seed;
    const auto fx = redsense::testing::write_reddit_fixture(dir.path(), spec);
    const auto c = ingest_dump(fx.posts_path, fx.comments_path, {spec.start, spec.end}).corpus;
    const std::int64_t step = (spec.end - spec.start) / 4;
    const auto parts = split_by_window(c, {spec.start + step, spec.start + 2 * step, spec.start + 3 * step});
    std::set<std::string> ps, cs;
    std::size_t np = 0, nc = 0;
    for (const auto& part : parts) {
      for (const auto& p : part.posts()) CHECK(part.window().contains(p.created_utc));
      np += part.posts().size();
      nc += part.comments().size();
      for (const auto& id : post_ids(part)) ps.insert(id);
      for (const auto& id : comment_ids(part)) cs.insert(id);
    }
    CHECK(np == ps.size());
    CHECK(nc == cs.size());
    CHECK(ps == post_ids(c));
    CHECK(cs == comment_ids(c));
  }
}

TEST_CASE("unique users") {
  Corpus c({make_post("a", "a", 10), make_post("b", "b", 11)},
           {make_comment("c1", "b", "a", 12), make_comment("c2", "c", "a", 13), make_comment("c3", "[deleted]", "b", 14)},
           kAll);
  CHECK(unique_users(c) == 3);
  Corpus solo({make_post("a", "x", 10)}, {make_comment("c1", "x", "a", 12)}, kAll);
  CHECK(unique_users(solo) == 1);
}

TEST_CASE("ingestion is deterministic and write_jsonl round-trips") {
  TempDir dir;
  const auto fx = redsense::testing::write_reddit_fixture(dir.path(), {});
  const TimeWindow w{redsense::testing::RedditFixtureSpec{}.start, redsense::testing::RedditFixtureSpec{}.end};
  const auto a = ingest_dump(fx.posts_path, fx.comments_path, w).corpus;
  const auto b = ingest_dump(fx.posts_path, fx.comments_path, w).corpus;
  REQUIRE(a.posts().size() == b.posts().size());
  for (std::size_t i = 0; i < a.posts().size(); ++i) CHECK(a.posts()[i].id == b.posts()[i].id);
  CHECK(a.thread_index() == b.thread_index());
  write_jsonl(a, dir / "out/p.jsonl", dir / "out/c.jsonl");
  const auto again = ingest_dump(dir / "out/p.jsonl", dir / "out/c.jsonl", w).corpus;
  CHECK(post_ids(again) == post_ids(a));
  CHECK(comment_ids(again) == comment_ids(a));
  CHECK(again.thread_index() == a.thread_index());
}
