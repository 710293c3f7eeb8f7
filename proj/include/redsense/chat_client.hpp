#pragma once

// Chat-completion clients: an HTTP client for OpenAI-compatible
// /chat/completions endpoints and a deterministic offline mock.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "redsense/errors.hpp"

namespace redsense::insight {

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

// Transport or protocol failure of a single request.
class ChatError : public Error {
 public:
  using Error::Error;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  // Returns the assistant message content; throws ChatError on failure.
  // Implementations must be safe to call from several threads.
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string model_id() const = 0;
  // Input budget in characters for one request (prompt plus content).
  virtual std::size_t context_chars() const = 0;
};

// Replies with the first sentence of the last user message (leading list
// markers removed). Deterministic, offline, thread-safe.
class MockChatClient final : public ChatClient {
 public:
  explicit MockChatClient(std::size_t context_chars = 4000) : context_chars_(context_chars) {}

  std::string complete(const ChatRequest& request) override;
  std::string model_id() const override { return "mock-echo"; }
  std::size_t context_chars() const override { return context_chars_; }
  std::size_t calls() const { return calls_.load(); }

 private:
  std::size_t context_chars_;
  std::atomic<std::size_t> calls_{0};
};

// First sentence of `text`: up to and including the first '.', '!' or '?'
// followed by whitespace, trimmed; list markers ("- ", "* ") are stripped.
std::string first_sentence(const std::string& text);

struct HttpChatConfig {
  std::string base_url = "https://api.openai.com/v1";  // POSTs to <base_url>/chat/completions
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 60;
  std::size_t context_chars = 12000;
};

class HttpChatClient final : public ChatClient {
 public:
  // Reads the API key from the configured environment variable (may be
  // unset for local endpoints that need no key).
  explicit HttpChatClient(HttpChatConfig config);

  std::string complete(const ChatRequest& request) override;
  std::string model_id() const override { return config_.model; }
  std::size_t context_chars() const override { return config_.context_chars; }

 private:
  HttpChatConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;    // path prefix of base_url + "/chat/completions"
  std::string api_key_;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
  // Replaceable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct Completion {
  bool ok = false;
  std::string text;
  std::string error;
  int attempts = 0;
};

// Calls the client until it returns a non-empty reply or the attempts run
// out, sleeping initial_backoff * multiplier^n (capped) between attempts.
Completion complete_with_retry(ChatClient& client, const ChatRequest& request, const RetryPolicy& policy);

}  // namespace redsense::insight
