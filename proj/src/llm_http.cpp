#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "itin/llm.hpp"

namespace itin {

HttpTransport::HttpTransport(LlmEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (!(endpoint_.timeout_secs > 0)) throw ConfigError("timeout must be positive");
}

std::string HttpTransport::complete(const std::string& prompt) {
  json body = json::object();
  body["model"] = endpoint_.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = 0;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* token = std::getenv(endpoint_.token_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }

  std::string last_error;
  int delay = endpoint_.backoff_ms;
  for (int attempt = 0; attempt <= endpoint_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    httplib::Client cli(endpoint_.base_url);
    auto secs = static_cast<time_t>(endpoint_.timeout_secs);
    auto usecs = static_cast<time_t>((endpoint_.timeout_secs - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    auto res = cli.Post(endpoint_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw TransportError("HTTP " + std::to_string(res->status));
    try {
      json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw TransportError("malformed completion response");
    }
  }
  throw TransportError(last_error + " after " + std::to_string(endpoint_.max_retries + 1) +
                       " attempt(s)");
}

}  // namespace itin
