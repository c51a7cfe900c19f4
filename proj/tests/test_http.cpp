#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "erl/http_gateway.hpp"

using namespace erl;

namespace {

struct LoopbackServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LoopbackServer() = default;
  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LoopbackServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"; }
};

std::string reply(const std::string& content) {
  return nlohmann::json{{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

Conversation hello() {
  Conversation c;
  c.add(Role::System, "sys");
  c.add(Role::User, "hi");
  return c;
}

}  // namespace

TEST(Http, SplitEndpoint) {
  const auto e = split_endpoint("https://api.example.com/v1/chat/completions");
  EXPECT_EQ(e.base, "https://api.example.com");
  EXPECT_EQ(e.path, "/v1/chat/completions");
  EXPECT_EQ(split_endpoint("http://localhost:8080").path, "/");
  EXPECT_THROW(split_endpoint("ftp://x"), ValidationError);
}

TEST(Http, RequestBodyAndBearer) {
  LoopbackServer srv;
  nlohmann::json seen;
  std::string auth;
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(reply("Answer: BEFORE"), "application/json");
  });
  srv.start();

  ::setenv("ERL_TEST_KEY", "sekrit", 1);
  GatewayConfig cfg;
  cfg.endpoint = srv.url();
  cfg.model = "test-model";
  cfg.temperature = 0.5;
  cfg.max_tokens = 77;
  cfg.api_key_env = "ERL_TEST_KEY";
  HttpGateway gw(cfg);
  EXPECT_EQ(gw.complete(hello()), "Answer: BEFORE");
  EXPECT_EQ(auth, "Bearer sekrit");
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["max_tokens"], 77);
  EXPECT_DOUBLE_EQ(seen["temperature"].get<double>(), 0.5);
  ASSERT_EQ(seen["messages"].size(), 2u);
  EXPECT_EQ(seen["messages"][0]["role"], "system");
  EXPECT_EQ(seen["messages"][1]["content"], "hi");
}

TEST(Http, RetriesServerErrors) {
  LoopbackServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (hits++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(reply("ok"), "application/json");
  });
  srv.start();
  GatewayConfig cfg;
  cfg.endpoint = srv.url();
  cfg.max_retries = 2;
  HttpGateway gw(cfg);
  EXPECT_EQ(gw.complete(hello()), "ok");
  EXPECT_EQ(hits.load(), 2);
}

TEST(Http, GivesUpAfterRetries) {
  LoopbackServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 429;
  });
  srv.start();
  GatewayConfig cfg;
  cfg.endpoint = srv.url();
  cfg.max_retries = 1;
  HttpGateway gw(cfg);
  EXPECT_THROW(gw.complete(hello()), GatewayError);
  EXPECT_EQ(hits.load(), 2);
}

TEST(Http, ClientErrorIsNotRetried) {
  LoopbackServer srv;
  std::atomic<int> hits{0};
  srv.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
    res.set_content("bad key", "text/plain");
  });
  srv.start();
  GatewayConfig cfg;
  cfg.endpoint = srv.url();
  HttpGateway gw(cfg);
  EXPECT_THROW(gw.complete(hello()), GatewayError);
  EXPECT_EQ(hits.load(), 1);
}

TEST(Http, FirstAssistantMessage) {
  EXPECT_EQ(first_assistant_message(reply("x")), "x");
  EXPECT_THROW(first_assistant_message(R"({"choices":[]})"), GatewayError);
}
