#include "goalrec/chat_client.hpp"

#include "httplib.h"

#include <cstdlib>
#include <fmt/format.h>
#include <thread>

#include "goalrec/hashing.hpp"
#include "goalrec/landmark_cache.hpp"

namespace goalrec {

using nlohmann::json;

void ProviderConfig::validate() const {
  if (endpoint.empty()) throw std::invalid_argument("provider " + name + ": endpoint is required");
  if (model.empty()) throw std::invalid_argument("provider " + name + ": model is required");
  if (!(timeout_s > 0)) throw std::invalid_argument("provider " + name + ": timeout_s must be positive");
  if (max_retries < 1) throw std::invalid_argument("provider " + name + ": max_retries must be at least 1");
  if (concurrency < 1) throw std::invalid_argument("provider " + name + ": concurrency must be at least 1");
  if (price_input_per_mtok < 0 || price_output_per_mtok < 0) {
    throw std::invalid_argument("provider " + name + ": prices must be nonnegative");
  }
}

ProviderConfig provider_from_json(const json& j, std::string name) {
  ProviderConfig c;
  c.name = std::move(name);
  c.endpoint = j.value("endpoint", "");
  c.model = j.value("model", "");
  c.api_key_env = j.value("api_key_env", "");
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.concurrency = j.value("concurrency", c.concurrency);
  c.temperature = j.value("temperature", c.temperature);
  if (j.contains("prices")) {
    c.price_input_per_mtok = j["prices"].value("input_per_mtok", 0.0);
    c.price_output_per_mtok = j["prices"].value("output_per_mtok", 0.0);
  }
  if (j.contains("api_key")) {
    throw std::invalid_argument("provider " + c.name + ": keys are read from the environment (use api_key_env)");
  }
  c.validate();
  return c;
}

json provider_to_json(const ProviderConfig& c) {
  return json{{"endpoint", c.endpoint},
              {"model", c.model},
              {"api_key_env", c.api_key_env},
              {"timeout_s", c.timeout_s},
              {"max_retries", c.max_retries},
              {"concurrency", c.concurrency},
              {"temperature", c.temperature},
              {"prices", {{"input_per_mtok", c.price_input_per_mtok}, {"output_per_mtok", c.price_output_per_mtok}}}};
}

std::map<std::string, ProviderConfig> load_providers(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path.string(), e.what()));
  }
  const json& table = doc.contains("providers") ? doc["providers"] : doc;
  if (!table.is_object()) throw std::invalid_argument(path.string() + ": expected an object of providers");
  std::map<std::string, ProviderConfig> out;
  for (const auto& [name, cfg] : table.items()) out.emplace(name, provider_from_json(cfg, name));
  return out;
}

json request_to_json(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  return json{{"model", request.model}, {"messages", messages}, {"temperature", request.temperature}};
}

std::string canonical_request(const ChatRequest& request) { return request_to_json(request).dump(); }

std::string request_hash(const ChatRequest& request) { return sha256_hex(canonical_request(request)); }

ChatResponse with_retries(const std::function<ChatResponse()>& attempt, int max_attempts,
                          std::chrono::milliseconds base_delay, const Sleeper& sleep) {
  for (int k = 0;; ++k) {
    try {
      return attempt();
    } catch (const TransportError& e) {
      if (!e.retryable() || k + 1 >= max_attempts) {
        throw TransportError(fmt::format("{} (after {} attempt{})", e.what(), k + 1, k == 0 ? "" : "s"), false);
      }
    }
    auto delay = base_delay * (1 << k);
    if (sleep) sleep(delay);
    else std::this_thread::sleep_for(delay);
  }
}

ChatResponse parse_completion_body(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("malformed completion body: ") + e.what(), false);
  }
  ChatResponse r;
  try {
    const json& message = doc.at("choices").at(0).at("message");
    if (message.contains("content") && message["content"].is_string()) r.content = message["content"];
    if (doc.contains("usage") && doc["usage"].is_object()) {
      r.usage.prompt_tokens = doc["usage"].value("prompt_tokens", std::uint64_t{0});
      r.usage.completion_tokens = doc["usage"].value("completion_tokens", std::uint64_t{0});
    }
  } catch (const json::exception& e) {
    throw TransportError(std::string("unexpected completion body: ") + e.what(), false);
  }
  return r;
}

HttpChatClient::HttpChatClient(ProviderConfig config, Sleeper sleep, std::chrono::milliseconds base_delay)
    : config_(std::move(config)), sleep_(std::move(sleep)), base_delay_(base_delay) {
  config_.validate();
  auto scheme = config_.endpoint.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("endpoint must be an absolute URL: " + config_.endpoint);
  auto slash = config_.endpoint.find('/', scheme + 3);
  base_url_ = config_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : config_.endpoint.substr(slash);
}

ChatResponse HttpChatClient::attempt(const std::string& body, const std::string& api_key) {
  httplib::Client client(base_url_);
  auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(config_.timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, body, "application/json");
  double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()), true);
  if (res->status == 429 || res->status >= 500) {
    throw TransportError(fmt::format("HTTP {} from {}", res->status, config_.endpoint), true);
  }
  if (res->status != 200) throw TransportError(fmt::format("HTTP {} from {}", res->status, config_.endpoint), false);
  ChatResponse r = parse_completion_body(res->body);
  r.latency_s = latency;
  return r;
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
  std::string api_key;
  if (!config_.api_key_env.empty()) {
    const char* value = std::getenv(config_.api_key_env.c_str());
    if (!value || !*value) throw TransportError("environment variable " + config_.api_key_env + " is not set", false);
    api_key = value;
  }
  std::string body = canonical_request(request);
  return with_retries([&] { return attempt(body, api_key); }, config_.max_retries, base_delay_, sleep_);
}

std::string transcript_json(const ChatRequest& request, const ChatResponse& response) {
  json usage{{"prompt_tokens", response.usage.prompt_tokens},
             {"completion_tokens", response.usage.completion_tokens},
             {"total_tokens", response.usage.total()}};
  json doc{{"request", request_to_json(request)},
           {"response", {{"content", response.content}, {"usage", usage}, {"latency_s", response.latency_s}}}};
  return doc.dump(2) + "\n";
}

void write_transcript(const std::filesystem::path& dir, const ChatRequest& request, const ChatResponse& response) {
  write_file_atomic(dir / (request_hash(request) + ".json"), transcript_json(request, response));
}

ReplayClient::ReplayClient(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) throw std::invalid_argument("replay directory not found: " + dir_.string());
}

ChatResponse ReplayClient::complete(const ChatRequest& request) {
  auto file = dir_ / (request_hash(request) + ".json");
  if (!std::filesystem::exists(file)) throw TransportError("no transcript for request " + file.filename().string(), false);
  try {
    json doc = json::parse(read_file(file));
    const json& resp = doc.at("response");
    ChatResponse r;
    r.content = resp.at("content").get<std::string>();
    r.usage.prompt_tokens = resp.at("usage").value("prompt_tokens", std::uint64_t{0});
    r.usage.completion_tokens = resp.at("usage").value("completion_tokens", std::uint64_t{0});
    r.latency_s = resp.value("latency_s", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw TransportError(fmt::format("corrupt transcript {}: {}", file.string(), e.what()), false);
  }
}

RecordingClient::RecordingClient(ChatClient& inner, std::vector<std::filesystem::path> dirs)
    : inner_(inner), dirs_(std::move(dirs)) {}

ChatResponse RecordingClient::complete(const ChatRequest& request) {
  ChatResponse r = inner_.complete(request);
  for (const auto& dir : dirs_) write_transcript(dir, request, r);
  return r;
}

ConcurrencyLimitedClient::ConcurrencyLimitedClient(ChatClient& inner, int limit)
    : inner_(inner), slots_(std::max(limit, 1)) {}

ChatResponse ConcurrencyLimitedClient::complete(const ChatRequest& request) {
  slots_.acquire();
  struct Release {
    std::counting_semaphore<>& s;
    ~Release() { s.release(); }
  } release{slots_};
  return inner_.complete(request);
}

}  // namespace goalrec
