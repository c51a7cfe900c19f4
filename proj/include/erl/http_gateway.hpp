#pragma once

// Chat-completions client over HTTP(S). Kept apart from prompt.hpp so that
// offline users do not pull in the HTTP stack.

#include <chrono>
#include <cstdlib>
#include <regex>
#include <string>
#include <thread>

#include "erl/prompt.hpp"
#include "httplib.h"
#include "json.hpp"

namespace erl {

struct ParsedEndpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline ParsedEndpoint split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ValidationError("malformed endpoint URL '" + url + "'");
  return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

inline nlohmann::json chat_request_body(const GatewayConfig& config, const Conversation& conversation) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : conversation.turns)
    messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
  return {{"model", config.model},
          {"messages", messages},
          {"temperature", config.temperature},
          {"max_tokens", config.max_tokens}};
}

// First assistant message of a chat-completions response body.
inline std::string first_assistant_message(const std::string& body) {
  const auto j = nlohmann::json::parse(body);
  for (const auto& choice : j.at("choices")) {
    const auto& msg = choice.at("message");
    if (msg.value("role", std::string("assistant")) == "assistant") return msg.at("content").get<std::string>();
  }
  throw GatewayError("response has no assistant message");
}

class HttpGateway : public ChatGateway {
 public:
  explicit HttpGateway(GatewayConfig config) : config_(std::move(config)), endpoint_(split_endpoint(config_.endpoint)) {
    config_.validate();
  }

  std::string complete(const Conversation& conversation) override {
    const std::string body = chat_request_body(config_, conversation).dump();
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0')
      headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(250) * (1 << (attempt - 1)));
      httplib::Client client(endpoint_.base);
      client.set_connection_timeout(config_.timeout_seconds, 0);
      client.set_read_timeout(config_.timeout_seconds, 0);
      client.set_write_timeout(config_.timeout_seconds, 0);
      auto res = client.Post(endpoint_.path, headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) throw GatewayError("HTTP " + std::to_string(res->status) + ": " + res->body);
      try {
        return first_assistant_message(res->body);
      } catch (const GatewayError&) {
        throw;
      } catch (const std::exception& e) {
        throw GatewayError(std::string("unparseable response: ") + e.what());
      }
    }
    throw GatewayError("gave up after " + std::to_string(config_.max_retries + 1) + " attempts (" +
                       last_error + ")");
  }

 private:
  GatewayConfig config_;
  ParsedEndpoint endpoint_;
};

}  // namespace erl
