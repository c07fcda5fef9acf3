#include "prmnav/wire.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "prmnav/error.hpp"
#include "prmnav/text.hpp"

namespace prmnav {

WireConfig WireConfig::from_json(const nlohmann::json& j) {
  WireConfig c;
  c.endpoint = j.at("endpoint").get<std::string>();
  c.model = j.value("model", std::string{});
  c.timeout = std::chrono::milliseconds(j.value("timeout_ms", c.timeout.count()));
  c.retries = j.value("retries", c.retries);
  c.backoff = std::chrono::milliseconds(j.value("backoff_ms", c.backoff.count()));
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  if (c.retries < 0) throw ConfigError("retries must be >= 0");
  return c;
}

ChatClient::ChatClient(WireConfig cfg) : cfg_(std::move(cfg)) {
  const auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + cfg_.endpoint);
  const auto scheme = cfg_.endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme '" + scheme + "'");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("https endpoints need a build with OpenSSL");
#endif
  const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
  origin_ = cfg_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/v1/chat/completions" : cfg_.endpoint.substr(path_start);
}

nlohmann::json ChatClient::build_request(const std::string& prompt,
                                         const std::optional<std::string>& image_base64) const {
  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", prompt}});
  if (image_base64) {
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:image/png;base64," + *image_base64}}}});
  }
  return {{"model", cfg_.model}, {"messages", {{{"role", "user"}, {"content", content}}}}};
}

ChatReply parse_chat_response(const nlohmann::json& body) {
  try {
    const auto& message = body.at("choices").at(0).at("message");
    ChatReply reply;
    const auto& content = message.at("content");
    if (content.is_string()) {
      reply.content = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.value("type", std::string{}) == "text") reply.content += part.value("text", std::string{});
      }
    } else {
      throw ParseError("message content is neither a string nor a list of parts");
    }
    if (auto it = body.find("usage"); it != body.end() && it->is_object()) {
      reply.usage.prompt_tokens = it->value("prompt_tokens", std::int64_t{0});
      reply.usage.completion_tokens = it->value("completion_tokens", std::int64_t{0});
    }
    return reply;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("unexpected completions response: ") + e.what());
  }
}

ChatReply ChatClient::complete(const std::string& prompt, const std::optional<std::string>& image_base64) const {
  const std::string body = build_request(prompt, image_base64).dump();

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
  client.set_read_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));
  client.set_write_timeout(static_cast<time_t>(secs.count()), static_cast<time_t>(usecs.count()));

  std::string last_error;
  const int attempts = cfg_.retries + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1 && cfg_.backoff.count() > 0) std::this_thread::sleep_for(cfg_.backoff * (attempt - 1));
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + " from " + cfg_.endpoint + ": " + res->body);
    }
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("completions response is not JSON: ") + e.what());
    }
    auto reply = parse_chat_response(parsed);
    if (reply.usage.prompt_tokens == 0 && reply.usage.completion_tokens == 0) {
      reply.usage.prompt_tokens = text::estimate_tokens(prompt);
      reply.usage.completion_tokens = text::estimate_tokens(reply.content);
    }
    reply.attempts = attempt;
    return reply;
  }
  throw TransportError(cfg_.endpoint + " failed after " + std::to_string(attempts) + " attempts (" + last_error + ")");
}

}  // namespace prmnav
