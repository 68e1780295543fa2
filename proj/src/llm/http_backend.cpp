#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include "cathode/error.hpp"
#include "cathode/llm/backend.hpp"

namespace cathode {
namespace {

// Splits "https://host:port/path" into ("https://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpChatBackend::HttpChatBackend(HttpChatSettings settings) : settings_(std::move(settings)) {
  if (settings_.max_attempts < 1) settings_.max_attempts = 1;
}

nlohmann::json HttpChatBackend::request_body(const ChatRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.history) messages.push_back({{"role", m.role}, {"content", m.content}});
  messages.push_back({{"role", "user"}, {"content", request.prompt}});
  return {
      {"model", request.model_tag},
      {"messages", std::move(messages)},
      {"temperature", request.sampling.temperature},
      {"frequency_penalty", request.sampling.frequency_penalty},
  };
}

std::string HttpChatBackend::response_text(const std::string& body) {
  const auto doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::BackendUnavailable, "response is not JSON");
  try {
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::BackendUnavailable, "response lacks choices[0].message.content");
  }
}

std::string HttpChatBackend::send(const ChatRequest& request) {
  request.validate();
  std::lock_guard lock(mutex_);
  const char* key = std::getenv(settings_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorKind::BackendUnavailable, "environment variable " + settings_.api_key_env + " is not set");
  }
  const auto [base, path] = split_url(settings_.endpoint);
  httplib::Client client(base);
  client.set_connection_timeout(settings_.timeout_seconds);
  client.set_read_timeout(settings_.timeout_seconds);
  client.set_bearer_token_auth(key);

  const std::string body = request_body(request).dump();
  std::string last_error;
  for (int attempt = 0; attempt < settings_.max_attempts; ++attempt) {
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::BackendUnavailable, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    return response_text(res->body);
  }
  throw Error(ErrorKind::BackendUnavailable, last_error);
}

}  // namespace cathode
