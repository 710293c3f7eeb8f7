#include "redsense/chat_client.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "redsense/io.hpp"

namespace redsense::insight {

std::string first_sentence(const std::string& text) {
  std::string s = io::trim(text);
  while (s.starts_with("- ") || s.starts_with("* ")) s = io::trim(s.substr(2));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])))) {
      return s.substr(0, i + 1);
    }
    if (c == '\n') return io::trim(s.substr(0, i));
  }
  return s;
}

std::string MockChatClient::complete(const ChatRequest& request) {
  ++calls_;
  for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
    if (it->role == "user") return first_sentence(it->content);
  }
  return {};
}

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.base_url.find("://");
  if (scheme_end == std::string::npos) throw ChatError("base_url must include a scheme: " + config_.base_url);
  const auto path_start = config_.base_url.find('/', scheme_end + 3);
  origin_ = config_.base_url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/chat/completions";
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  nlohmann::json body{{"model", config_.model}, {"temperature", request.temperature}};
  body["messages"] = nlohmann::json::array();
  for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});

  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto response = client.Post(path_, headers, body.dump(), "application/json");
  if (!response) throw ChatError("chat request failed: " + httplib::to_string(response.error()));
  if (response->status != 200) {
    throw ChatError("chat endpoint returned HTTP " + std::to_string(response->status) + ": " +
                    response->body.substr(0, 200));
  }
  auto reply = nlohmann::json::parse(response->body, nullptr, false);
  if (reply.is_discarded()) throw ChatError("chat endpoint returned invalid JSON");
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ChatError("chat response lacks choices[0].message.content");
  }
}

Completion complete_with_retry(ChatClient& client, const ChatRequest& request, const RetryPolicy& policy) {
  Completion out;
  auto delay = policy.initial_backoff;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    out.attempts = attempt;
    try {
      out.text = io::trim(client.complete(request));
      if (!out.text.empty()) {
        out.ok = true;
        out.error.clear();
        return out;
      }
      out.error = "empty completion";
    } catch (const ChatError& e) {
      out.error = e.what();
    }
    if (attempt == attempts) break;
    spdlog::debug("chat attempt {} failed ({}); retrying in {} ms", attempt, out.error, delay.count());
    if (policy.sleep) {
      policy.sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    delay = std::min(policy.max_backoff,
                     std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * policy.multiplier)));
  }
  out.text.clear();
  return out;
}

}  // namespace redsense::insight
