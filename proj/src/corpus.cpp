#include "redsense/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"

namespace redsense::corpus {

using nlohmann::json;

bool is_deleted_author(std::string_view author) {
  return author.empty() || author == kDeletedAuthor || author == "[removed]";
}

std::string post_text(const Post& post) {
  if (post.body.empty()) return post.title;
  if (post.title.empty()) return post.body;
  return post.title + "\n" + post.body;
}

Corpus::Corpus(std::vector<Post> posts, std::vector<Comment> comments, TimeWindow window)
    : posts_(std::move(posts)), comments_(std::move(comments)), window_(window) {
  for (std::size_t i = 0; i < posts_.size(); ++i) {
    const auto& p = posts_[i];
    if (!post_pos_.emplace(p.id, i).second) throw PreconditionError("duplicate post id " + p.id);
    if (!window_.contains(p.created_utc)) {
      throw PreconditionError("post " + p.id + " lies outside the corpus window");
    }
    threads_[p.id];
  }
  for (std::size_t i = 0; i < comments_.size(); ++i) {
    const auto& c = comments_[i];
    if (!comment_pos_.emplace(c.id, i).second) throw PreconditionError("duplicate comment id " + c.id);
    if (!post_pos_.contains(c.link_id)) {
      throw PreconditionError("comment " + c.id + " links to unknown post " + c.link_id);
    }
  }
  std::vector<std::size_t> order(comments_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ca = comments_[a];
    const auto& cb = comments_[b];
    if (ca.created_utc != cb.created_utc) return ca.created_utc < cb.created_utc;
    return ca.id < cb.id;
  });
  for (std::size_t i : order) threads_[comments_[i].link_id].push_back(comments_[i].id);
}

const Post* Corpus::find_post(std::string_view id) const {
  auto it = post_pos_.find(std::string(id));
  return it == post_pos_.end() ? nullptr : &posts_[it->second];
}

const Comment* Corpus::find_comment(std::string_view id) const {
  auto it = comment_pos_.find(std::string(id));
  return it == comment_pos_.end() ? nullptr : &comments_[it->second];
}

std::vector<const Comment*> Corpus::comments_of(std::string_view post_id) const {
  std::vector<const Comment*> out;
  auto it = threads_.find(std::string(post_id));
  if (it == threads_.end()) return out;
  out.reserve(it->second.size());
  for (const auto& id : it->second) out.push_back(find_comment(id));
  return out;
}

namespace {

json file_stats_json(const FileStats& s) {
  auto lines_json = [](const std::vector<RejectedLine>& lines) {
    json arr = json::array();
    for (const auto& r : lines) arr.push_back({{"line", r.line}, {"reason", r.reason}, {"detail", r.detail}});
    return arr;
  };
  return json{{"lines", s.lines},
              {"accepted", s.accepted},
              {"rejected", s.rejected},
              {"quarantined", s.quarantined},
              {"rejected_by_reason", s.rejected_by_reason},
              {"quarantined_by_reason", s.quarantined_by_reason},
              {"rejected_lines", lines_json(s.rejected_lines)},
              {"quarantined_lines", lines_json(s.quarantined_lines)}};
}

// Field extraction failure; the message becomes the rejection detail.
struct FieldError {
  std::string reason;
  std::string detail;
};

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FieldError{"missing_field", key};
  if (it->is_null()) return {};
  if (!it->is_string()) throw FieldError{"invalid_field", std::string(key) + " is not a string"};
  return it->get<std::string>();
}

std::int64_t require_integer(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FieldError{"missing_field", key};
  if (it->is_number_integer()) return it->get<std::int64_t>();
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (std::isfinite(v) && v == std::floor(v)) return static_cast<std::int64_t>(v);
  } else if (it->is_string()) {
    const auto s = it->get<std::string>();
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw FieldError{"invalid_field", std::string(key) + " is not an integer"};
}

std::string strip_prefix(std::string s, std::string_view prefix) {
  if (s.starts_with(prefix)) s.erase(0, prefix.size());
  return s;
}

bool is_content_sentinel(std::string_view s) { return s == "[removed]" || s == "[deleted]"; }

template <typename Record>
struct ParsedLine {
  std::size_t line = 0;
  Record record;
};

template <typename Record>
struct ParsedFile {
  std::vector<ParsedLine<Record>> records;
  FileStats stats;
};

void reject(FileStats& stats, std::size_t line, std::string reason, std::string detail) {
  ++stats.rejected;
  ++stats.rejected_by_reason[reason];
  stats.rejected_lines.push_back({line, std::move(reason), std::move(detail)});
}

void quarantine(FileStats& stats, std::size_t line, std::string reason, std::string detail) {
  ++stats.quarantined;
  ++stats.quarantined_by_reason[reason];
  stats.quarantined_lines.push_back({line, std::move(reason), std::move(detail)});
}

// Reads one JSONL file, producing every line that parses into a valid,
// in-window, first-occurrence record. Accepted counts are settled by the
// caller once cross-file checks are done.
template <typename Record, typename Decode>
ParsedFile<Record> parse_file(const std::filesystem::path& path, TimeWindow window, Decode decode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  ParsedFile<Record> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    ++out.stats.lines;
    if (io::trim(line).empty()) {
      reject(out.stats, number, "empty_line", "");
      continue;
    }
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      reject(out.stats, number, "malformed_json", "");
      continue;
    }
    Record record;
    try {
      record = decode(obj);
    } catch (const FieldError& e) {
      reject(out.stats, number, e.reason, e.detail);
      continue;
    }
    if (record.id.empty()) {
      reject(out.stats, number, "invalid_field", "empty id");
      continue;
    }
    if (record.created_utc <= 0) {
      reject(out.stats, number, "invalid_field", "created_utc must be positive");
      continue;
    }
    if (!seen.insert(record.id).second) {
      reject(out.stats, number, "duplicate_id", record.id);
      continue;
    }
    if (!window.contains(record.created_utc)) {
      reject(out.stats, number, "out_of_window", record.id);
      continue;
    }
    out.records.push_back({number, std::move(record)});
  }
  if (in.bad()) throw IoError("read failed for " + path.string());
  return out;
}

Post decode_post(const json& obj) {
  Post p;
  p.id = require_string(obj, "id");
  p.author = require_string(obj, "author");
  p.title = require_string(obj, "title");
  p.body = require_string(obj, "selftext");
  if (is_content_sentinel(p.body)) p.body.clear();
  p.created_utc = require_integer(obj, "created_utc");
  p.score = require_integer(obj, "score");
  return p;
}

Comment decode_comment(const json& obj) {
  Comment c;
  c.id = require_string(obj, "id");
  c.author = require_string(obj, "author");
  c.body = require_string(obj, "body");
  c.created_utc = require_integer(obj, "created_utc");
  c.score = require_integer(obj, "score");
  c.link_id = strip_prefix(require_string(obj, "link_id"), "t3_");
  c.parent_id = require_string(obj, "parent_id");
  if (c.link_id.empty()) throw FieldError{"invalid_field", "empty link_id"};
  return c;
}

}  // namespace

json to_json(const IngestStats& stats) {
  return json{{"posts", file_stats_json(stats.posts)}, {"comments", file_stats_json(stats.comments)}};
}

IngestResult ingest_dump(const std::filesystem::path& posts_path,
                         const std::filesystem::path& comments_path, TimeWindow window) {
  if (window.start >= window.end) throw PreconditionError("time window start must precede end");

  auto posts_future = std::async(std::launch::async, [&] {
    return parse_file<Post>(posts_path, window, decode_post);
  });
  auto comments_parsed = parse_file<Comment>(comments_path, window, decode_comment);
  auto posts_parsed = posts_future.get();

  IngestStats stats;
  stats.posts = std::move(posts_parsed.stats);
  stats.comments = std::move(comments_parsed.stats);

  std::vector<Post> posts;
  std::unordered_set<std::string> post_ids;
  for (auto& [line, post] : posts_parsed.records) {
    if (io::trim(post.title).empty() && io::trim(post.body).empty()) {
      quarantine(stats.posts, line, "empty_text", post.id);
      continue;
    }
    post_ids.insert(post.id);
    posts.push_back(std::move(post));
  }
  stats.posts.accepted = posts.size();

  std::vector<Comment> comments;
  for (auto& [line, comment] : comments_parsed.records) {
    if (!post_ids.contains(comment.link_id)) {
      quarantine(stats.comments, line, "unknown_post", comment.link_id);
      continue;
    }
    comments.push_back(std::move(comment));
  }
  stats.comments.accepted = comments.size();

  spdlog::info("ingested {} posts ({} rejected, {} quarantined), {} comments ({} rejected, {} quarantined)",
               stats.posts.accepted, stats.posts.rejected, stats.posts.quarantined, stats.comments.accepted,
               stats.comments.rejected, stats.comments.quarantined);
  return IngestResult{Corpus(std::move(posts), std::move(comments), window), std::move(stats)};
}

std::vector<Corpus> split_by_window(const Corpus& corpus, const std::vector<std::int64_t>& boundaries) {
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) throw PreconditionError("window boundaries must be strictly increasing");
  }
  const auto& whole = corpus.window();
  std::vector<std::int64_t> cuts{whole.start};
  for (auto b : boundaries) {
    if (b <= whole.start || b >= whole.end) {
      spdlog::warn("window boundary {} lies outside the corpus window [{}, {}); its sub-corpus will be empty", b,
                   whole.start, whole.end);
    }
    cuts.push_back(std::clamp(b, whole.start, whole.end));
  }
  cuts.push_back(whole.end);

  const std::size_t n = cuts.size() - 1;
  std::vector<std::vector<Post>> posts(n);
  std::vector<std::vector<Comment>> comments(n);
  std::unordered_map<std::string, std::size_t> bucket_of_post;
  for (const auto& p : corpus.posts()) {
    // upper_bound finds the first cut strictly after the timestamp.
    const auto it = std::upper_bound(cuts.begin() + 1, cuts.end() - 1, p.created_utc);
    const auto bucket = static_cast<std::size_t>(it - (cuts.begin() + 1));
    bucket_of_post.emplace(p.id, bucket);
    posts[bucket].push_back(p);
  }
  for (const auto& c : corpus.comments()) comments[bucket_of_post.at(c.link_id)].push_back(c);

  std::vector<Corpus> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(std::move(posts[i]), std::move(comments[i]), TimeWindow{cuts[i], cuts[i + 1]});
  }
  return out;
}

std::size_t unique_users(const Corpus& corpus) {
  std::unordered_set<std::string_view> users;
  for (const auto& p : corpus.posts()) {
    if (!is_deleted_author(p.author)) users.insert(p.author);
  }
  for (const auto& c : corpus.comments()) {
    if (!is_deleted_author(c.author)) users.insert(c.author);
  }
  return users.size();
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& posts_path,
                 const std::filesystem::path& comments_path) {
  std::string posts_out;
  for (const auto& p : corpus.posts()) {
    json obj{{"id", p.id},     {"author", p.author},           {"title", p.title},
             {"selftext", p.body}, {"created_utc", p.created_utc}, {"score", p.score}};
    posts_out += obj.dump() + "\n";
  }
  std::string comments_out;
  for (const auto& c : corpus.comments()) {
    json obj{{"id", c.id},
             {"author", c.author},
             {"body", c.body},
             {"created_utc", c.created_utc},
             {"score", c.score},
             {"link_id", "t3_" + c.link_id},
             {"parent_id", c.parent_id}};
    comments_out += obj.dump() + "\n";
  }
  io::write_file(posts_path, posts_out);
  io::write_file(comments_path, comments_out);
}

}  // namespace redsense::corpus
