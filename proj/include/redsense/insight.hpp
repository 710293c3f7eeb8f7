#pragma once

// Summary-of-summaries: posts are summarized one by one, clusters from the
// summaries of their posts.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "redsense/chat_client.hpp"
#include "redsense/corpus.hpp"

namespace redsense::insight {

// A versioned system prompt. The text lives in prompts/<name>.<version>.txt.
struct PromptTemplate {
  std::string name;
  std::string version;
  std::string text;
};

const PromptTemplate& post_prompt();
const PromptTemplate& cluster_prompt();

enum class Level { post, cluster };

struct SummaryRecord {
  std::string subject_id;  // post id, or cluster id
  Level level = Level::post;
  std::string text;
  std::string model_id;
  std::string prompt;       // "<name>.<version>"
  std::string prompt_hash;  // sha256 of the rendered request
  bool ok = false;
  std::string error;
  int attempts = 0;
  std::size_t truncated_chars = 0;
  std::size_t chunks = 0;             // cluster level: first-level sub-batches
  std::vector<std::string> children;  // cluster level: post ids summarized
};

// Throws PreconditionError for a post without text. Input longer than the
// client's budget is truncated (count recorded). A failed request does not
// throw; the record carries ok = false and the error.
SummaryRecord summarize_post(ChatClient& client, const corpus::Post& post, const RetryPolicy& policy = {});

// Summaries for many posts, up to `concurrency` requests in flight; output
// follows input order.
std::vector<SummaryRecord> summarize_posts(ChatClient& client, const std::vector<const corpus::Post*>& posts,
                                           const RetryPolicy& policy = {}, std::size_t concurrency = 1);

// Bulleted list of the successful post summaries. When the list exceeds the
// client's budget it is split greedily into consecutive sub-batches that fit,
// each sub-batch is summarized, and the sub-summaries are merged the same way
// until one request fits. Throws PreconditionError when no successful post
// summary is given.
SummaryRecord summarize_cluster(ChatClient& client, const std::string& cluster_id,
                                const std::vector<SummaryRecord>& post_summaries, const RetryPolicy& policy = {});

// Greedy packing of bullet lines into batches whose rendered length fits
// `budget` characters; a single oversize bullet is truncated to fit.
std::vector<std::vector<std::string>> chunk_bullets(const std::vector<std::string>& items, std::size_t budget);

nlohmann::json to_json(const SummaryRecord& record);
SummaryRecord summary_from_json(const nlohmann::json& obj);
std::string summaries_jsonl(const std::vector<SummaryRecord>& records);
std::vector<SummaryRecord> read_summaries(const std::filesystem::path& path);

}  // namespace redsense::insight
