#include "redsense/insight.hpp"

#include <redsense/prompts_embedded.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <future>
#include <nlohmann/json.hpp>
#include <sstream>

#include "redsense/io.hpp"

namespace redsense::insight {

const PromptTemplate& post_prompt() {
  static const PromptTemplate prompt{"post_summary", "v1", io::trim(prompts_embedded::kPostSummaryV1)};
  return prompt;
}

const PromptTemplate& cluster_prompt() {
  static const PromptTemplate prompt{"cluster_summary", "v1", io::trim(prompts_embedded::kClusterSummaryV1)};
  return prompt;
}

namespace {

ChatRequest render(const PromptTemplate& prompt, std::string content) {
  return ChatRequest{{{"system", prompt.text}, {"user", std::move(content)}}, 0.0};
}

std::string request_hash(const ChatRequest& request) {
  std::string canonical;
  for (const auto& m : request.messages) {
    canonical += m.role;
    canonical += '\0';
    canonical += m.content;
    canonical += '\0';
  }
  return io::sha256_hex(canonical);
}

std::string bullets(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) {
    out += "- ";
    out += item;
    out += '\n';
  }
  return out;
}

// Characters left for content once the system prompt is accounted for.
std::size_t content_budget(const ChatClient& client, const PromptTemplate& prompt) {
  const std::size_t total = client.context_chars();
  const std::size_t reserved = prompt.text.size() + 16;
  return total > reserved + 64 ? total - reserved : 64;
}

// Cuts at a UTF-8 boundary no later than `limit` bytes.
std::string truncate_utf8(const std::string& s, std::size_t limit) {
  if (s.size() <= limit) return s;
  std::size_t cut = limit;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return s.substr(0, cut);
}

const char* level_name(Level level) { return level == Level::post ? "post" : "cluster"; }

}  // namespace

SummaryRecord summarize_post(ChatClient& client, const corpus::Post& post, const RetryPolicy& policy) {
  std::string content = io::trim(corpus::post_text(post));
  if (content.empty()) throw PreconditionError("post " + post.id + " has no text to summarize");

  SummaryRecord record;
  record.subject_id = post.id;
  record.level = Level::post;
  record.model_id = client.model_id();
  record.prompt = post_prompt().name + "." + post_prompt().version;

  const std::size_t budget = content_budget(client, post_prompt());
  if (content.size() > budget) {
    auto cut = truncate_utf8(content, budget);
    record.truncated_chars = content.size() - cut.size();
    spdlog::info("post {}: truncated {} characters to fit the model context", post.id, record.truncated_chars);
    content = std::move(cut);
  }
  const auto request = render(post_prompt(), std::move(content));
  record.prompt_hash = request_hash(request);
  const auto completion = complete_with_retry(client, request, policy);
  record.ok = completion.ok;
  record.text = completion.text;
  record.error = completion.error;
  record.attempts = completion.attempts;
  if (!record.ok) spdlog::warn("post {}: summary failed after {} attempts: {}", post.id, record.attempts, record.error);
  return record;
}

std::vector<SummaryRecord> summarize_posts(ChatClient& client, const std::vector<const corpus::Post*>& posts,
                                           const RetryPolicy& policy, std::size_t concurrency) {
  std::vector<SummaryRecord> out(posts.size());
  const std::size_t width = std::max<std::size_t>(1, concurrency);
  for (std::size_t start = 0; start < posts.size(); start += width) {
    const std::size_t end = std::min(posts.size(), start + width);
    if (width == 1) {
      out[start] = summarize_post(client, *posts[start], policy);
      continue;
    }
    std::vector<std::future<SummaryRecord>> batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] { return summarize_post(client, *posts[i], policy); }));
    }
    for (std::size_t i = start; i < end; ++i) out[i] = batch[i - start].get();
  }
  return out;
}

std::vector<std::vector<std::string>> chunk_bullets(const std::vector<std::string>& items, std::size_t budget) {
  std::vector<std::vector<std::string>> chunks;
  std::size_t used = 0;
  for (const auto& raw : items) {
    std::string item = raw;
    if (item.size() + 3 > budget) item = truncate_utf8(item, budget > 3 ? budget - 3 : 0);
    const std::size_t cost = item.size() + 3;  // "- " + item + "\n"
    if (chunks.empty() || used + cost > budget) {
      chunks.emplace_back();
      used = 0;
    }
    chunks.back().push_back(std::move(item));
    used += cost;
  }
  return chunks;
}

SummaryRecord summarize_cluster(ChatClient& client, const std::string& cluster_id,
                                const std::vector<SummaryRecord>& post_summaries, const RetryPolicy& policy) {
  SummaryRecord record;
  record.subject_id = cluster_id;
  record.level = Level::cluster;
  record.model_id = client.model_id();
  record.prompt = cluster_prompt().name + "." + cluster_prompt().version;

  std::vector<std::string> items;
  for (const auto& s : post_summaries) {
    if (s.level != Level::post) throw PreconditionError("cluster summaries are built from post-level summaries");
    if (!s.ok) continue;
    items.push_back(s.text);
    record.children.push_back(s.subject_id);
  }
  if (items.empty()) throw PreconditionError("cluster " + cluster_id + " has no successful post summary");

  const std::size_t budget = content_budget(client, cluster_prompt());
  std::string hash_input;
  bool first_round = true;
  for (int round = 0;; ++round) {
    auto chunks = chunk_bullets(items, budget);
    if (round >= 8) {
      record.ok = false;
      record.error = "sub-summaries did not shrink to a single request";
      record.prompt_hash = io::sha256_hex(hash_input);
      return record;
    }
    if (first_round) record.chunks = chunks.size();
    first_round = false;
    std::vector<std::string> merged;
    for (const auto& chunk : chunks) {
      const auto request = render(cluster_prompt(), bullets(chunk));
      hash_input += request_hash(request);
      const auto completion = complete_with_retry(client, request, policy);
      record.attempts += completion.attempts;
      if (!completion.ok) {
        record.ok = false;
        record.error = completion.error;
        record.prompt_hash = io::sha256_hex(hash_input);
        spdlog::warn("cluster {}: summary failed: {}", cluster_id, record.error);
        return record;
      }
      merged.push_back(completion.text);
    }
    if (chunks.size() == 1) {
      record.ok = true;
      record.text = merged.front();
      break;
    }
    items = std::move(merged);
  }
  record.prompt_hash = io::sha256_hex(hash_input);
  return record;
}

nlohmann::json to_json(const SummaryRecord& r) {
  nlohmann::json obj{{"subject_id", r.subject_id},
                     {"level", level_name(r.level)},
                     {"text", r.text},
                     {"model_id", r.model_id},
                     {"prompt", r.prompt},
                     {"prompt_hash", r.prompt_hash},
                     {"ok", r.ok},
                     {"attempts", r.attempts},
                     {"truncated_chars", r.truncated_chars}};
  if (!r.error.empty()) obj["error"] = r.error;
  if (r.level == Level::cluster) {
    obj["chunks"] = r.chunks;
    obj["children"] = r.children;
  }
  return obj;
}

SummaryRecord summary_from_json(const nlohmann::json& obj) {
  SummaryRecord r;
  r.subject_id = obj.at("subject_id").get<std::string>();
  r.level = obj.at("level").get<std::string>() == "cluster" ? Level::cluster : Level::post;
  r.text = obj.at("text").get<std::string>();
  r.model_id = obj.at("model_id").get<std::string>();
  r.prompt = obj.value("prompt", "");
  r.prompt_hash = obj.at("prompt_hash").get<std::string>();
  r.ok = obj.at("ok").get<bool>();
  r.attempts = obj.value("attempts", 0);
  r.truncated_chars = obj.value("truncated_chars", std::size_t{0});
  r.error = obj.value("error", "");
  r.chunks = obj.value("chunks", std::size_t{0});
  if (obj.contains("children")) r.children = obj.at("children").get<std::vector<std::string>>();
  return r;
}

std::string summaries_jsonl(const std::vector<SummaryRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

std::vector<SummaryRecord> read_summaries(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<SummaryRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    out.push_back(summary_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace redsense::insight
