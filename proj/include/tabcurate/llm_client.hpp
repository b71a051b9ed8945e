#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tabcurate/dataset.hpp"
#include "tabcurate/error.hpp"
#include "tabcurate/prompt.hpp"

namespace tabcurate {

struct ProviderConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4";
  double temperature = 0.9;
  std::size_t max_rows_per_call = 50;
  std::size_t max_retries = 5;
  std::chrono::milliseconds timeout{120000};
  std::string api_key_env = "LLM_API_KEY";
  std::size_t concurrency = 1;
  std::chrono::milliseconds backoff_base{500};  // doubled per consecutive failure

  /// Throws Error(invalid_argument) unless temperature is in [0, 2] and
  /// max_rows_per_call, concurrency >= 1.
  void validate() const;
};

/// The single boundary to a text generator: system + user message in, the
/// assistant's text out. Implementations signal failures with Error using
/// auth_error, rate_limited or transport_error.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(std::string_view system_text, std::string_view user_text) = 0;
};

/// Replays canned responses in order; thread safe. Running out of responses is
/// a transport error.
class CannedTransport final : public Transport {
 public:
  explicit CannedTransport(std::vector<std::string> responses);
  /// JSON list of response strings.
  static CannedTransport from_file(const std::filesystem::path& path);

  std::string complete(std::string_view system_text, std::string_view user_text) override;
  std::size_t calls() const;
  std::vector<std::string> prompts() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> responses_;
  std::vector<std::string> prompts_;
  std::size_t next_ = 0;
};

/// Chat-completion over HTTP(S): POSTs {model, temperature, messages} with a
/// bearer token and returns choices[0].message.content.
class HttpTransport final : public Transport {
 public:
  HttpTransport(ProviderConfig config, std::string api_key);
  std::string complete(std::string_view system_text, std::string_view user_text) override;

 private:
  ProviderConfig config_;
  std::string api_key_;
};

/// Request body for the chat-completion wire format.
nlohmann::json chat_request_body(const ProviderConfig& config, std::string_view system_text,
                                 std::string_view user_text);
/// Extracts choices[0].message.content; throws transport_error when absent.
std::string chat_response_text(std::string_view body);

/// Reads the API key from the environment variable named in the config.
/// Throws AuthError when it is unset or empty.
std::string resolve_api_key(const ProviderConfig& config);

struct GenerationResult {
  Dataset data;
  ParseReport report;
  std::size_t calls = 0;
  std::size_t retries_used = 0;
};

/// Thrown when the retry budget runs out before n_target rows were collected;
/// carries what was gathered.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(GenerationResult partial, std::size_t wanted);
  const GenerationResult& partial() const { return partial_; }
  std::size_t got() const { return partial_.data.size(); }
  std::size_t wanted() const { return wanted_; }

 private:
  GenerationResult partial_;
  std::size_t wanted_;
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

/// Calls the transport with the full prompt, each time asking for
/// min(max_rows_per_call, remaining) rows, parsing and accumulating accepted
/// rows (exact duplicates across calls are dropped) until n_target is reached.
/// A call that fails or yields no new rows consumes one retry; rate limits and
/// transport failures back off exponentially. Up to `concurrency` calls run at
/// once and their rows are merged in call order.
GenerationResult generate_synthetic(const PromptBundle& prompt, const TabularSchema& schema, const Dataset& train,
                                    const ProviderConfig& provider, Transport& transport, std::size_t n_target,
                                    const SleepFn& sleep = {});

/// Live variant: resolves the API key and talks HTTP.
GenerationResult generate_synthetic(const PromptBundle& prompt, const TabularSchema& schema, const Dataset& train,
                                    const ProviderConfig& provider, std::size_t n_target);

ProviderConfig provider_from_json(const nlohmann::json& doc);

}  // namespace tabcurate
