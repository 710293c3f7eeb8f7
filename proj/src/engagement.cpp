#include "redsense/engagement.hpp"

#include <algorithm>
#include <unordered_set>

#include "redsense/errors.hpp"

namespace redsense::engagement {

namespace {

void check_thread(const corpus::Post& post, std::span<const corpus::Comment* const> comments) {
  for (const auto* c : comments) {
    if (c->link_id != post.id) {
      throw PreconditionError("comment " + c->id + " does not belong to post " + post.id);
    }
  }
}

}  // namespace

std::int64_t active_engagement(const corpus::Post& post, std::span<const corpus::Comment* const> comments) {
  check_thread(post, comments);
  std::unordered_set<std::string_view> users;
  for (const auto* c : comments) {
    if (corpus::is_deleted_author(c->author)) continue;
    if (!corpus::is_deleted_author(post.author) && c->author == post.author) continue;
    users.insert(c->author);
  }
  return static_cast<std::int64_t>(users.size());
}

std::int64_t passive_engagement(const corpus::Post& post, std::span<const corpus::Comment* const> comments) {
  check_thread(post, comments);
  std::int64_t score = post.score;
  for (const auto* c : comments) score += c->score;
  return score;
}

std::int64_t total_engagement(const EngagementRecord& record) { return record.active + record.passive; }

EngagementRecord engagement_record(const corpus::Post& post, std::span<const corpus::Comment* const> comments) {
  EngagementRecord r;
  r.post_id = post.id;
  r.active = active_engagement(post, comments);
  r.passive = passive_engagement(post, comments);
  r.total = total_engagement(r);
  r.comments = static_cast<std::int64_t>(comments.size());
  return r;
}

std::vector<EngagementRecord> compute_records(const corpus::Corpus& corpus) {
  std::vector<EngagementRecord> out;
  out.reserve(corpus.posts().size());
  for (const auto& p : corpus.posts()) out.push_back(engagement_record(p, corpus.comments_of(p.id)));
  return out;
}

TopicEngagement topic_engagement(const std::vector<std::string>& representatives,
                                 const std::map<std::string, EngagementRecord>& records, ActiveMeasure measure) {
  if (representatives.empty()) throw PreconditionError("topic engagement needs at least one representative post");
  double active = 0.0;
  double passive = 0.0;
  for (const auto& id : representatives) {
    auto it = records.find(id);
    if (it == records.end()) throw PreconditionError("no engagement record for post " + id);
    active += static_cast<double>(measure == ActiveMeasure::unique_commenters ? it->second.active : it->second.comments);
    passive += static_cast<double>(it->second.passive);
  }
  const auto n = static_cast<double>(representatives.size());
  return TopicEngagement{active / n, passive / n};
}

std::vector<ScatterRow> engagement_scatter(const corpus::Corpus& corpus,
                                           const std::map<std::string, EngagementRecord>& records) {
  std::vector<ScatterRow> rows;
  rows.reserve(corpus.posts().size());
  for (const auto& p : corpus.posts()) {
    auto it = records.find(p.id);
    if (it == records.end()) throw PreconditionError("no engagement record for post " + p.id);
    rows.push_back({p.id, it->second.active, it->second.passive});
  }
  std::sort(rows.begin(), rows.end(), [](const ScatterRow& a, const ScatterRow& b) { return a.post_id < b.post_id; });
  return rows;
}

std::map<std::string, EngagementRecord> index_records(const std::vector<EngagementRecord>& records) {
  std::map<std::string, EngagementRecord> out;
  for (const auto& r : records) out.emplace(r.post_id, r);
  return out;
}

std::string_view measure_name(ActiveMeasure measure) {
  return measure == ActiveMeasure::unique_commenters ? "unique_commenters" : "comment_count";
}

ActiveMeasure parse_measure(std::string_view name) {
  if (name == "unique_commenters") return ActiveMeasure::unique_commenters;
  if (name == "comment_count") return ActiveMeasure::comment_count;
  throw PreconditionError("unknown active engagement measure '" + std::string(name) + "'");
}

}  // namespace redsense::engagement
