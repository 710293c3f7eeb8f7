#include "redsense/report.hpp"

#include <fmt/format.h>

#include <ctime>

#include "redsense/errors.hpp"
#include "redsense/io.hpp"

namespace redsense::report {

std::vector<double> topic_shares(const topicmodel::TopicModel& model, ShareMode mode) {
  const auto k = static_cast<std::size_t>(model.k);
  std::vector<double> counts(k, 0.0);
  if (mode == ShareMode::dominant_topic) {
    for (std::size_t i = 0; i < model.theta.rows(); ++i) {
      counts[static_cast<std::size_t>(topicmodel::dominant_topic(model.theta.row(i)))] += 1.0;
    }
  } else {
    for (int t = 0; t < model.k; ++t) {
      counts[static_cast<std::size_t>(t)] = static_cast<double>(topicmodel::representative_posts(model, t).size());
    }
  }
  double total = 0.0;
  for (double c : counts) total += c;
  if (total > 0.0) {
    for (double& c : counts) c = 100.0 * c / total;
  }
  return counts;
}

namespace {

std::string utc_date(std::int64_t epoch) {
  if (epoch <= 1 || epoch >= 253'402'300'800) return "open";
  const auto t = static_cast<std::time_t>(epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02}", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday);
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string cell(std::string s) {
  for (char& c : s) {
    if (c == '|' || c == '\n') c = ' ';
  }
  return s;
}

}  // namespace

ReportBundle render_report(const std::vector<TimelineView>& timelines, const ReportOptions& options) {
  ReportBundle bundle;
  std::string& md = bundle.markdown;
  md += "# Discussion insight report\n\n";
  md += "| Timeline | Window (UTC) | Posts | Comments | Users | Topics |\n";
  md += "|---|---|---:|---:|---:|---:|\n";
  for (const auto& tl : timelines) {
    md += fmt::format("| {} | {} to {} | {} | {} | {} | {} |\n", tl.label, utc_date(tl.window.start),
                      utc_date(tl.window.end), tl.posts, tl.comments, tl.users, tl.k);
  }
  md += "\n";

  bundle.topics_csv = io::csv_row({"timeline", "topic", "share_percent", "representatives", "top_terms"});
  for (const auto& tl : timelines) {
    md += fmt::format("## Timeline {}\n\n", tl.label);
    if (!tl.sweep.empty()) {
      md += "### Topic-count sweep\n\n| k | W_k (posts with non-positive skew) |\n|---:|---:|\n";
      for (const auto& e : tl.sweep) md += fmt::format("| {} | {} |\n", e.k, e.w_k);
      md += fmt::format("\nSelected k = {}.\n\n", tl.k);
    }
    md += "### Topics\n\n| Topic | Share of posts (%) | Representative posts | Avg active | Avg passive | Top terms |\n";
    md += "|---:|---:|---:|---:|---:|---|\n";
    for (const auto& topic : tl.topics) {
      const std::string active = topic.engagement ? fmt::format("{:.2f}", topic.engagement->avg_active) : "n/a";
      const std::string passive = topic.engagement ? fmt::format("{:.2f}", topic.engagement->avg_passive) : "n/a";
      md += fmt::format("| {} | {:.1f} | {} | {} | {} | {} |\n", topic.topic, topic.share_percent,
                        topic.representatives, active, passive, cell(join(topic.top_terms, ", ")));
      bundle.topics_csv += io::csv_row({tl.label, std::to_string(topic.topic), io::format_double(topic.share_percent),
                                        std::to_string(topic.representatives), join(topic.top_terms, " ")});
    }
    md += "\n";

    for (const auto& topic : tl.topics) {
      md += fmt::format("### Topic {}: {}\n\n", topic.topic, join(topic.top_terms, ", "));
      if (!options.clustering_enabled) {
        md += "_Clustering was not run._\n\n";
        continue;
      }
      if (topic.clusters.empty()) {
        md += "_No clusters for this topic._\n\n";
        continue;
      }
      if (!topic.chi_trace.empty()) {
        std::vector<std::string> steps;
        for (double chi : topic.chi_trace) steps.push_back(fmt::format("{:.4f}", chi));
        md += fmt::format("Chi trace: {}\n\n", join(steps, " -> "));
      }
      for (const auto& cluster : topic.clusters) {
        md += fmt::format("**{}** ({} posts). Keywords: {}\n\n", cluster.cluster_id, cluster.members.size(),
                          cluster.keywords.empty() ? "none" : join(cluster.keywords, ", "));
        if (!options.summaries_enabled) {
          md += "> Summary skipped (language model disabled).\n\n";
        } else if (!cluster.summary) {
          md += "> No summary available.\n\n";
        } else if (!cluster.summary->ok) {
          md += fmt::format("> Summary failed: {}\n\n", cell(cluster.summary->error));
        } else {
          md += fmt::format("> {}\n\n", cell(cluster.summary->text));
        }
      }
    }
  }
  if (!options.summaries_enabled) md += "## Summaries\n\nSkipped: the language model was disabled for this run.\n";
  return bundle;
}

std::string_view share_mode_name(ShareMode mode) {
  return mode == ShareMode::dominant_topic ? "dominant_topic" : "representative";
}

ShareMode parse_share_mode(std::string_view name) {
  if (name == "dominant_topic") return ShareMode::dominant_topic;
  if (name == "representative") return ShareMode::representative;
  throw PreconditionError("unknown topic share mode '" + std::string(name) + "'");
}

}  // namespace redsense::report
