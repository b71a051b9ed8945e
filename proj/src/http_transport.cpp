#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "tabcurate/llm_client.hpp"

namespace tabcurate {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::invalid_argument, "endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpTransport::HttpTransport(ProviderConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  split_url(config_.endpoint_url);
}

std::string HttpTransport::complete(std::string_view system_text, std::string_view user_text) {
  const auto endpoint = split_url(config_.endpoint_url);
  httplib::Client client(endpoint.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
  client.set_connection_timeout(static_cast<time_t>(std::max<long long>(1, seconds)), 0);
  client.set_read_timeout(static_cast<time_t>(std::max<long long>(1, seconds)), 0);
  client.set_bearer_token_auth(api_key_);

  const auto body = chat_request_body(config_, system_text, user_text).dump();
  auto response = client.Post(endpoint.path, body, "application/json");
  if (!response) {
    throw Error(Errc::transport_error, "request failed: " + httplib::to_string(response.error()));
  }
  const int status = response->status;
  if (status == 401 || status == 403) throw Error(Errc::auth_error, "provider rejected credentials (HTTP " + std::to_string(status) + ")");
  if (status == 429) throw Error(Errc::rate_limited, "provider rate limit (HTTP 429)");
  if (status < 200 || status >= 300) {
    throw Error(Errc::transport_error, "provider returned HTTP " + std::to_string(status));
  }
  return chat_response_text(response->body);
}

}  // namespace tabcurate
