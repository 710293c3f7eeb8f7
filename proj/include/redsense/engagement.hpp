#pragma once

// Active, passive and total engagement of posts and topics.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "redsense/corpus.hpp"

namespace redsense::engagement {

struct EngagementRecord {
  std::string post_id;
  std::int64_t active = 0;   // unique commenters other than the author
  std::int64_t passive = 0;  // post score + comment scores
  std::int64_t total = 0;    // active + passive
  std::int64_t comments = 0;
};

// Distinct identifiable commenters, excluding the post author. Throws
// PreconditionError if a comment belongs to another post.
std::int64_t active_engagement(const corpus::Post& post, std::span<const corpus::Comment* const> comments);
std::int64_t passive_engagement(const corpus::Post& post, std::span<const corpus::Comment* const> comments);
std::int64_t total_engagement(const EngagementRecord& record);

EngagementRecord engagement_record(const corpus::Post& post, std::span<const corpus::Comment* const> comments);

// One record per post, in corpus order.
std::vector<EngagementRecord> compute_records(const corpus::Corpus& corpus);

enum class ActiveMeasure {
  unique_commenters,  // record.active
  comment_count       // record.comments
};

struct TopicEngagement {
  double avg_active = 0;
  double avg_passive = 0;
};

// Means over the topic's representative posts. Throws PreconditionError for
// an empty list or a post without a record.
TopicEngagement topic_engagement(const std::vector<std::string>& representatives,
                                 const std::map<std::string, EngagementRecord>& records,
                                 ActiveMeasure measure = ActiveMeasure::unique_commenters);

struct ScatterRow {
  std::string post_id;
  std::int64_t active = 0;
  std::int64_t passive = 0;
  bool operator==(const ScatterRow&) const = default;
};

// One row per corpus post sorted by post id, including uncommented posts.
// Throws PreconditionError when a post has no record.
std::vector<ScatterRow> engagement_scatter(const corpus::Corpus& corpus,
                                           const std::map<std::string, EngagementRecord>& records);

std::map<std::string, EngagementRecord> index_records(const std::vector<EngagementRecord>& records);

std::string_view measure_name(ActiveMeasure measure);
ActiveMeasure parse_measure(std::string_view name);

}  // namespace redsense::engagement
