#pragma once

// In-process chat-completions endpoint on a loopback port.

#include <atomic>
#include <functional>
#include <string>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"

namespace goalrec::testing {

class FakeOpenAiServer {
 public:
  /// Returns (status, body) for a request body.
  using Handler = std::function<std::pair<int, std::string>(const std::string& body, const httplib::Request& req)>;

  explicit FakeOpenAiServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auto [status, body] = handler_(req.body, req);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeOpenAiServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  int requests() const { return requests_; }

  /// OpenAI-style body with the given content and usage.
  static std::string completion(const std::string& content, int prompt_tokens, int completion_tokens);

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> requests_{0};
};

inline std::string FakeOpenAiServer::completion(const std::string& content, int prompt_tokens, int completion_tokens) {
  nlohmann::json body{{"id", "cmpl-test"},
                      {"object", "chat.completion"},
                      {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}},
                                    {"finish_reason", "stop"}}}},
                      {"usage", {{"prompt_tokens", prompt_tokens},
                                 {"completion_tokens", completion_tokens},
                                 {"total_tokens", prompt_tokens + completion_tokens}}}};
  return body.dump();
}

}  // namespace goalrec::testing
