#pragma once

// Chat-completion transport: an OpenAI-compatible HTTP client, plus
// record/replay wrappers for offline deterministic runs.
//
// Transcript files live in a directory as `<request-hash>.json`:
//   {"request": {...}, "response": {"content": "...", "latency_s": 1.2,
//    "usage": {"prompt_tokens": 10, "completion_tokens": 5, "total_tokens": 15}}}
// The request hash is the SHA-256 of the canonical (sorted-key, compact)
// request JSON.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "goalrec/recognition.hpp"

namespace goalrec {

struct ProviderConfig {
  std::string name;
  /// Full URL of the chat-completions route.
  std::string endpoint;
  std::string model;
  /// Environment variable holding the bearer token; empty sends no header.
  std::string api_key_env;
  double timeout_s = 120.0;
  /// Total attempts per request, including the first.
  int max_retries = 3;
  int concurrency = 4;
  /// USD per million tokens.
  double price_input_per_mtok = 0.0;
  double price_output_per_mtok = 0.0;
  double temperature = 0.0;

  void validate() const;
};

ProviderConfig provider_from_json(const nlohmann::json& j, std::string name);
nlohmann::json provider_to_json(const ProviderConfig& config);

/// Reads `{"providers": {"<name>": {...}}}` or a bare name-to-config object.
std::map<std::string, ProviderConfig> load_providers(const std::filesystem::path& path);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

nlohmann::json request_to_json(const ChatRequest& request);
std::string canonical_request(const ChatRequest& request);
std::string request_hash(const ChatRequest& request);

struct ChatResponse {
  std::string content;
  TokenUsage usage;
  double latency_s = 0.0;
};

class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, bool retryable) : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Throws TransportError when no response content could be obtained.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Calls `attempt` up to `max_attempts` times, sleeping base·2^k between
/// attempts. Only retryable TransportErrors are retried.
ChatResponse with_retries(const std::function<ChatResponse()>& attempt, int max_attempts,
                          std::chrono::milliseconds base_delay, const Sleeper& sleep);

/// Extracts content and usage from an OpenAI-style completion body.
ChatResponse parse_completion_body(const std::string& body);

class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(ProviderConfig config, Sleeper sleep = {},
                          std::chrono::milliseconds base_delay = std::chrono::milliseconds(1000));
  ChatResponse complete(const ChatRequest& request) override;

 private:
  ChatResponse attempt(const std::string& body, const std::string& api_key);

  ProviderConfig config_;
  Sleeper sleep_;
  std::chrono::milliseconds base_delay_;
  std::string base_url_;
  std::string path_;
};

/// Serves responses from transcript files; a missing transcript is a
/// non-retryable TransportError.
class ReplayClient : public ChatClient {
 public:
  explicit ReplayClient(std::filesystem::path dir);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::filesystem::path dir_;
};

/// Forwards to `inner` and writes a transcript for every successful call into
/// each of `dirs`.
class RecordingClient : public ChatClient {
 public:
  RecordingClient(ChatClient& inner, std::vector<std::filesystem::path> dirs);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  ChatClient& inner_;
  std::vector<std::filesystem::path> dirs_;
};

/// Caps the number of in-flight requests to `inner`.
class ConcurrencyLimitedClient : public ChatClient {
 public:
  ConcurrencyLimitedClient(ChatClient& inner, int limit);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  ChatClient& inner_;
  std::counting_semaphore<> slots_;
};

std::string transcript_json(const ChatRequest& request, const ChatResponse& response);
void write_transcript(const std::filesystem::path& dir, const ChatRequest& request, const ChatResponse& response);

}  // namespace goalrec
