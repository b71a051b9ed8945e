#include "tabcurate/llm_client.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <thread>
#include <unordered_set>

namespace tabcurate {

void ProviderConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) throw Error(Errc::invalid_argument, "temperature must lie in [0, 2]");
  if (max_rows_per_call < 1) throw Error(Errc::invalid_argument, "max_rows_per_call must be >= 1");
  if (concurrency < 1) throw Error(Errc::invalid_argument, "concurrency must be >= 1");
}

CannedTransport::CannedTransport(std::vector<std::string> responses) : responses_(std::move(responses)) {}

CannedTransport CannedTransport::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open transcript " + path.string(), path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw Error(Errc::invalid_argument, "transcript must be a JSON list of strings: " + path.string());
  }
  std::vector<std::string> responses;
  for (const auto& item : doc) {
    if (!item.is_string()) throw Error(Errc::invalid_argument, "transcript entries must be strings");
    responses.push_back(item.get<std::string>());
  }
  return CannedTransport(std::move(responses));
}

std::string CannedTransport::complete(std::string_view, std::string_view user_text) {
  std::lock_guard lock(mutex_);
  prompts_.emplace_back(user_text);
  if (next_ >= responses_.size()) throw Error(Errc::transport_error, "canned transcript exhausted");
  return responses_[next_++];
}

std::size_t CannedTransport::calls() const {
  std::lock_guard lock(mutex_);
  return prompts_.size();
}

std::vector<std::string> CannedTransport::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

nlohmann::json chat_request_body(const ProviderConfig& config, std::string_view system_text,
                                 std::string_view user_text) {
  return {{"model", config.model_name},
          {"temperature", config.temperature},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", std::string(system_text)}},
                                  {{"role", "user"}, {"content", std::string(user_text)}}})}};
}

std::string chat_response_text(std::string_view body) {
  auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::transport_error, "response body is not JSON");
  try {
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(Errc::transport_error, "response content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::transport_error, "response has no choices[0].message.content");
  }
}

std::string resolve_api_key(const ProviderConfig& config) {
  const char* value = std::getenv(config.api_key_env.c_str());
  if (!value || !*value) {
    throw Error(Errc::auth_error, "environment variable " + config.api_key_env + " is not set", config.api_key_env);
  }
  return value;
}

BudgetExhausted::BudgetExhausted(GenerationResult partial, std::size_t wanted)
    : Error(Errc::budget_exhausted,
            "retry budget exhausted with " + std::to_string(partial.data.size()) + " of " + std::to_string(wanted) +
                " rows",
            std::to_string(partial.data.size()) + "/" + std::to_string(wanted)),
      partial_(std::move(partial)),
      wanted_(wanted) {}

namespace {

struct CallOutcome {
  std::optional<std::string> text;
  std::optional<Error> error;
};

CallOutcome run_call(Transport& transport, const PromptBundle& prompt) {
  try {
    return {transport.complete(prompt.system_text, prompt.render()), std::nullopt};
  } catch (const Error& e) {
    return {std::nullopt, e};
  } catch (const std::exception& e) {
    return {std::nullopt, Error(Errc::transport_error, e.what())};
  }
}

}  // namespace

GenerationResult generate_synthetic(const PromptBundle& prompt, const TabularSchema& schema, const Dataset& train,
                                    const ProviderConfig& provider, Transport& transport, std::size_t n_target,
                                    const SleepFn& sleep) {
  provider.validate();
  if (n_target < 1) throw Error(Errc::invalid_argument, "n_target must be >= 1");

  GenerationResult result{Dataset(schema, Role::synthetic), {}, 0, 0};
  std::unordered_set<std::string> seen;
  std::size_t consecutive_failures = 0;

  auto backoff = [&] {
    if (!sleep || provider.backoff_base.count() <= 0) return;
    const auto shift = std::min<std::size_t>(consecutive_failures - 1, 10);
    sleep(provider.backoff_base * (1LL << shift));
  };

  while (result.data.size() < n_target) {
    // Plan one wave of calls.
    std::vector<PromptBundle> wave;
    std::size_t planned = 0;
    const std::size_t remaining = n_target - result.data.size();
    for (std::size_t c = 0; c < provider.concurrency && planned < remaining; ++c) {
      const std::size_t ask = std::min(provider.max_rows_per_call, remaining - planned);
      wave.push_back(prompt.with_requested(ask));
      planned += ask;
    }

    std::vector<CallOutcome> outcomes;
    if (wave.size() == 1) {
      outcomes.push_back(run_call(transport, wave.front()));
    } else {
      std::vector<std::future<CallOutcome>> futures;
      for (const auto& p : wave) {
        futures.push_back(std::async(std::launch::async, [&transport, &p] { return run_call(transport, p); }));
      }
      for (auto& f : futures) outcomes.push_back(f.get());
    }

    for (auto& outcome : outcomes) {
      ++result.calls;
      if (outcome.error) {
        const auto code = outcome.error->code();
        if (code == Errc::auth_error) throw *outcome.error;
        ++result.retries_used;
        ++consecutive_failures;
        if (result.retries_used > provider.max_retries) {
          if (code == Errc::rate_limited) throw *outcome.error;
          throw Error(Errc::transport_error, outcome.error->what());
        }
        backoff();
        continue;
      }

      auto parsed = parse_llm_output(*outcome.text, schema, train);
      std::size_t fresh = 0;
      for (auto& row : parsed.rows) {
        if (result.data.size() >= n_target) break;
        if (!seen.insert(serialize_row(schema, row)).second) {
          --parsed.report.accepted;
          ++parsed.report.duplicates_of_synthetic;
          parsed.report.rejected.push_back({serialize_row(schema, row), RejectReason::duplicate_of_synthetic, {}});
          continue;
        }
        result.data.push_back(std::move(row));
        ++fresh;
      }
      // Rows past the target were parsed but not kept.
      parsed.report.accepted = fresh;
      result.report.merge(parsed.report);
      if (fresh == 0 && result.data.size() < n_target) {
        ++result.retries_used;
        ++consecutive_failures;
        if (result.retries_used > provider.max_retries) throw BudgetExhausted(std::move(result), n_target);
      } else {
        consecutive_failures = 0;
      }
    }
  }
  return result;
}

GenerationResult generate_synthetic(const PromptBundle& prompt, const TabularSchema& schema, const Dataset& train,
                                    const ProviderConfig& provider, std::size_t n_target) {
  HttpTransport transport(provider, resolve_api_key(provider));
  return generate_synthetic(prompt, schema, train, provider, transport, n_target,
                            [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); });
}

ProviderConfig provider_from_json(const nlohmann::json& doc) {
  ProviderConfig config;
  config.endpoint_url = doc.value("endpoint_url", config.endpoint_url);
  config.model_name = doc.value("model_name", config.model_name);
  config.temperature = doc.value("temperature", config.temperature);
  config.max_rows_per_call = doc.value("max_rows_per_call", config.max_rows_per_call);
  config.max_retries = doc.value("max_retries", config.max_retries);
  config.timeout = std::chrono::milliseconds(doc.value("timeout_ms", static_cast<long long>(config.timeout.count())));
  config.api_key_env = doc.value("api_key_env", config.api_key_env);
  config.concurrency = doc.value("concurrency", config.concurrency);
  config.backoff_base =
      std::chrono::milliseconds(doc.value("backoff_ms", static_cast<long long>(config.backoff_base.count())));
  config.validate();
  return config;
}

}  // namespace tabcurate
