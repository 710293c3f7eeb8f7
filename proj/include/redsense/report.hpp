#pragma once

// Report assembly: topic strength per timeline, engagement comparison,
// clusters with their summaries, and the topic-count sweep.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "redsense/clustering.hpp"
#include "redsense/corpus.hpp"
#include "redsense/engagement.hpp"
#include "redsense/insight.hpp"
#include "redsense/topicmodel.hpp"

namespace redsense::report {

enum class ShareMode {
  dominant_topic,  // share of posts whose most probable topic is t
  representative   // share of representative-post memberships held by t
};

// Percentages summing to 100 (all zeros for an empty model).
std::vector<double> topic_shares(const topicmodel::TopicModel& model, ShareMode mode = ShareMode::dominant_topic);

struct ClusterView {
  std::string cluster_id;
  std::vector<std::string> members;
  std::vector<std::string> keywords;
  std::optional<insight::SummaryRecord> summary;
};

struct TopicView {
  int topic = 0;
  std::vector<std::string> top_terms;
  double share_percent = 0;
  std::size_t representatives = 0;
  std::optional<engagement::TopicEngagement> engagement;
  std::vector<ClusterView> clusters;
  std::vector<double> chi_trace;
};

struct TimelineView {
  std::string label;
  corpus::TimeWindow window;
  std::size_t posts = 0;
  std::size_t comments = 0;
  std::size_t users = 0;
  int k = 0;
  std::vector<topicmodel::SweepEntry> sweep;
  std::vector<TopicView> topics;
};

struct ReportOptions {
  bool summaries_enabled = true;
  bool clustering_enabled = true;
  ShareMode share_mode = ShareMode::dominant_topic;
};

struct ReportBundle {
  std::string markdown;    // report.md
  std::string topics_csv;  // timeline,topic,share_percent,representatives,top_terms
};

ReportBundle render_report(const std::vector<TimelineView>& timelines, const ReportOptions& options);

std::string_view share_mode_name(ShareMode mode);
ShareMode parse_share_mode(std::string_view name);

}  // namespace redsense::report
