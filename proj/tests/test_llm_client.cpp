#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <cstdlib>
#include <thread>

#include "support.hpp"
#include "tabcurate/llm_client.hpp"

using namespace tabcurate;
using namespace testing_support;

namespace {

Dataset toy_train() {
  Dataset d(numeric_schema(1), Role::train);
  d.push_back(numeric_row({0.5}, "0"));
  d.push_back(numeric_row({-0.5}, "1"));
  return d;
}

/// A fenced response holding rows x1 = start .. start + count - 1.
std::string response(int start, int count) {
  std::string out = "```json\n";
  for (int i = 0; i < count; ++i) {
    out += "{\"x1\": " + std::to_string(start + i) + ", \"y\": \"" + std::to_string(i % 2) + "\"}\n";
  }
  return out + "```";
}

ProviderConfig fast_provider() {
  ProviderConfig p;
  p.max_rows_per_call = 3;
  p.max_retries = 2;
  p.backoff_base = std::chrono::milliseconds(0);
  return p;
}

}  // namespace

TEST(LlmClient, StopsAtTargetAndAsksForRemainder) {
  CannedTransport t({response(10, 3), response(20, 3), response(30, 3)});
  const auto prompt = build_prompt(numeric_schema(1), toy_train(), 5, true);
  const auto r = generate_synthetic(prompt, numeric_schema(1), toy_train(), fast_provider(), t, 5);
  EXPECT_EQ(t.calls(), 2u);
  EXPECT_EQ(r.calls, 2u);
  ASSERT_EQ(r.data.size(), 5u);
  EXPECT_EQ(r.report.accepted, 5u);
  EXPECT_EQ(r.retries_used, 0u);
  const auto prompts = t.prompts();
  EXPECT_NE(prompts[0].find("generate 3 realistic"), std::string::npos);
  EXPECT_NE(prompts[1].find("generate 2 realistic"), std::string::npos);
  EXPECT_EQ(std::get<double>(r.data[4].cells[0]), 21.0);
}

TEST(LlmClient, CrossBatchDuplicatesAreDroppedAndCostARetry) {
  CannedTransport t({response(10, 3), response(10, 3), response(40, 3)});
  const auto prompt = build_prompt(numeric_schema(1), toy_train(), 6, true);
  const auto r = generate_synthetic(prompt, numeric_schema(1), toy_train(), fast_provider(), t, 6);
  EXPECT_EQ(r.data.size(), 6u);
  EXPECT_EQ(r.report.duplicates_of_synthetic, 3u);
  EXPECT_EQ(r.retries_used, 1u);
}

TEST(LlmClient, BudgetExhaustedCarriesPartialRows) {
  CannedTransport t({response(10, 2), "sorry, I cannot help", "still nothing", "nope"});
  const auto prompt = build_prompt(numeric_schema(1), toy_train(), 10, true);
  std::vector<std::chrono::milliseconds> sleeps;
  auto provider = fast_provider();
  provider.backoff_base = std::chrono::milliseconds(5);
  try {
    generate_synthetic(prompt, numeric_schema(1), toy_train(), provider, t, 10,
                       [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    FAIL();
  } catch (const BudgetExhausted& e) {
    EXPECT_EQ(e.code(), Errc::budget_exhausted);
    EXPECT_EQ(e.got(), 2u);
    EXPECT_EQ(e.wanted(), 10u);
    EXPECT_EQ(e.partial().calls, 4u);
  }
  EXPECT_TRUE(sleeps.empty());  // empty answers are not throttled
}

TEST(LlmClient, TransportFailuresBackOffThenGiveUp) {
  CannedTransport t({});
  const auto prompt = build_prompt(numeric_schema(1), toy_train(), 3, true);
  std::vector<long> sleeps;
  auto provider = fast_provider();
  provider.backoff_base = std::chrono::milliseconds(10);
  try {
    generate_synthetic(prompt, numeric_schema(1), toy_train(), provider, t, 3,
                       [&](std::chrono::milliseconds d) { sleeps.push_back(static_cast<long>(d.count())); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::transport_error);
  }
  EXPECT_EQ(sleeps, (std::vector<long>{10, 20}));
}

TEST(LlmClient, ConcurrentCallsMergeInOrder) {
  CannedTransport t({response(10, 3), response(20, 3), response(30, 3)});
  auto provider = fast_provider();
  provider.concurrency = 3;
  const auto prompt = build_prompt(numeric_schema(1), toy_train(), 9, true);
  const auto r = generate_synthetic(prompt, numeric_schema(1), toy_train(), provider, t, 9);
  EXPECT_EQ(r.data.size(), 9u);
  EXPECT_EQ(r.calls, 3u);
}

TEST(LlmClient, ApiKeyComesFromEnvironment) {
  ProviderConfig p;
  p.api_key_env = "TABCURATE_TEST_KEY_UNSET";
  ::unsetenv("TABCURATE_TEST_KEY_UNSET");
  try {
    resolve_api_key(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::auth_error);
    EXPECT_EQ(std::string(e.what()).find("secret"), std::string::npos);
  }
  ::setenv("TABCURATE_TEST_KEY_SET", "secret-value", 1);
  p.api_key_env = "TABCURATE_TEST_KEY_SET";
  EXPECT_EQ(resolve_api_key(p), "secret-value");
}

TEST(LlmClient, ProviderConfigValidation) {
  ProviderConfig p;
  p.temperature = 2.5;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.max_rows_per_call = 0;
  EXPECT_THROW(p.validate(), Error);
  const auto q = provider_from_json({{"model_name", "m"}, {"temperature", 0.2}});
  EXPECT_EQ(q.model_name, "m");
  EXPECT_EQ(q.temperature, 0.2);
  EXPECT_EQ(q.max_rows_per_call, 50u);
}

TEST(LlmClient, WireFormat) {
  ProviderConfig p;
  p.model_name = "model-x";
  p.temperature = 0.7;
  const auto body = chat_request_body(p, "sys", "user");
  EXPECT_EQ(body["model"], "model-x");
  EXPECT_EQ(body["temperature"], 0.7);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"], "user");
  EXPECT_EQ(chat_response_text(R"({"choices":[{"message":{"role":"assistant","content":"hi"}}]})"), "hi");
  EXPECT_THROW(chat_response_text("{}"), Error);
  EXPECT_THROW(chat_response_text("not json"), Error);
}

TEST(LlmClient, HttpTransportAgainstLocalServer) {
  httplib::Server server;
  std::string seen_auth, seen_model;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    const auto body = nlohmann::json::parse(req.body);
    seen_model = body["model"];
    const std::string user = body["messages"][1]["content"];
    if (user == "deny") {
      res.status = 401;
      return;
    }
    if (user == "slow down") {
      res.status = 429;
      return;
    }
    nlohmann::json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "echo:" + user}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ProviderConfig p;
  p.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  p.model_name = "local";
  p.timeout = std::chrono::milliseconds(5000);
  HttpTransport transport(p, "k123");
  EXPECT_EQ(transport.complete("sys", "ping"), "echo:ping");
  EXPECT_EQ(seen_auth, "Bearer k123");
  EXPECT_EQ(seen_model, "local");
  try {
    transport.complete("sys", "deny");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::auth_error);
  }
  try {
    transport.complete("sys", "slow down");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::rate_limited);
  }
  server.stop();
  th.join();

  ProviderConfig dead = p;
  dead.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  dead.timeout = std::chrono::milliseconds(500);
  HttpTransport closed(dead, "k");
  try {
    closed.complete("s", "u");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::transport_error);
  }
}

TEST(LlmClient, AuthErrorAbortsImmediately) {
  class Denying final : public Transport {
   public:
    std::size_t calls = 0;
    std::string complete(std::string_view, std::string_view) override {
      ++calls;
      throw Error(Errc::auth_error, "denied");
    }
  } t;
  const auto prompt = build_prompt(numeric_schema(1), toy_train(), 3, true);
  EXPECT_THROW(generate_synthetic(prompt, numeric_schema(1), toy_train(), fast_provider(), t, 3), Error);
  EXPECT_EQ(t.calls, 1u);
}
