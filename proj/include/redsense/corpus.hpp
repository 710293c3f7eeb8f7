#pragma once

// Pushshift-style post/comment ingestion and the thread index.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace redsense::corpus {

inline constexpr std::string_view kDeletedAuthor = "[deleted]";

// "[deleted]", "[removed]" and the empty string all mark an author that
// cannot be identified.
bool is_deleted_author(std::string_view author);

struct Post {
  std::string id;
  std::string author;
  std::string title;
  std::string body;
  std::int64_t created_utc = 0;
  std::int64_t score = 0;
};

// Title and body joined by a line break (the text seen by the topic model).
std::string post_text(const Post& post);

struct Comment {
  std::string id;
  std::string author;
  std::string body;
  std::int64_t created_utc = 0;
  std::int64_t score = 0;
  std::string link_id;    // parent post id, "t3_" prefix removed
  std::string parent_id;  // as given: "t3_<post>" or "t1_<comment>"
};

// Half-open interval [start, end) of epoch seconds.
struct TimeWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;
  bool contains(std::int64_t t) const { return t >= start && t < end; }
  bool operator==(const TimeWindow&) const = default;
};

// Immutable collection of posts and comments with every comment linked to a
// known post. Safe to share read-only across threads.
class Corpus {
 public:
  Corpus() = default;
  // Throws PreconditionError on duplicate ids, a comment whose link_id is not
  // a post in `posts`, or a post outside `window`.
  Corpus(std::vector<Post> posts, std::vector<Comment> comments, TimeWindow window);

  const std::vector<Post>& posts() const { return posts_; }
  const std::vector<Comment>& comments() const { return comments_; }
  const TimeWindow& window() const { return window_; }
  // post id -> comment ids ordered by (created_utc, id).
  const std::map<std::string, std::vector<std::string>>& thread_index() const { return threads_; }

  const Post* find_post(std::string_view id) const;
  const Comment* find_comment(std::string_view id) const;
  std::vector<const Comment*> comments_of(std::string_view post_id) const;

  bool empty() const { return posts_.empty() && comments_.empty(); }

 private:
  std::vector<Post> posts_;
  std::vector<Comment> comments_;
  TimeWindow window_;
  std::map<std::string, std::vector<std::string>> threads_;
  std::unordered_map<std::string, std::size_t> post_pos_;
  std::unordered_map<std::string, std::size_t> comment_pos_;
};

struct RejectedLine {
  std::size_t line = 0;  // 1-based
  std::string reason;
  std::string detail;
};

// Per-file accounting: accepted + rejected + quarantined == lines.
struct FileStats {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t quarantined = 0;
  std::map<std::string, std::size_t> rejected_by_reason;
  std::map<std::string, std::size_t> quarantined_by_reason;
  std::vector<RejectedLine> rejected_lines;
  std::vector<RejectedLine> quarantined_lines;
};

struct IngestStats {
  FileStats posts;
  FileStats comments;
};

nlohmann::json to_json(const IngestStats& stats);

struct IngestResult {
  Corpus corpus;
  IngestStats stats;
};

// Reads both JSONL dumps (concurrently) and keeps the valid in-window records.
// Malformed or invalid lines are rejected and counted, later duplicates are
// rejected, posts without text and comments whose post is unknown are
// quarantined. Throws IoError when a file cannot be read and
// PreconditionError when window.start >= window.end.
IngestResult ingest_dump(const std::filesystem::path& posts_path,
                         const std::filesystem::path& comments_path, TimeWindow window);

// Partitions the corpus at the given boundaries into boundaries.size() + 1
// consecutive windows. Posts go by their own timestamp; comments follow their
// post so every sub-corpus keeps complete threads. Boundaries outside the
// corpus window are clamped (yielding empty sub-corpora) with a warning.
std::vector<Corpus> split_by_window(const Corpus& corpus, const std::vector<std::int64_t>& boundaries);

// Distinct authors across posts and comments, excluding deleted sentinels.
std::size_t unique_users(const Corpus& corpus);

// Writes the corpus back out in the ingestion schema.
void write_jsonl(const Corpus& corpus, const std::filesystem::path& posts_path,
                 const std::filesystem::path& comments_path);

}  // namespace redsense::corpus
