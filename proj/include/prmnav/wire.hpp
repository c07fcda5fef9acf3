#pragma once

#include <chrono>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "prmnav/trajectory.hpp"

namespace prmnav {

// Connection settings for a chat-completions style endpoint.
struct WireConfig {
  // Full URL of the completions route, e.g. http://localhost:8000/v1/chat/completions.
  std::string endpoint;
  std::string model;
  std::chrono::milliseconds timeout{30000};
  int retries = 2;
  std::chrono::milliseconds backoff{500};
  // Name of the environment variable holding the bearer token; unset or
  // empty means no Authorization header.
  std::string api_key_env = "PRMNAV_API_KEY";

  static WireConfig from_json(const nlohmann::json& j);
};

struct ChatReply {
  std::string content;
  Usage usage;
  int attempts = 1;
};

// Minimal blocking client. Transport failures, 429 and 5xx responses are
// retried `retries` times; anything else surfaces immediately.
class ChatClient {
 public:
  explicit ChatClient(WireConfig cfg);

  ChatReply complete(const std::string& prompt,
                     const std::optional<std::string>& image_base64 = std::nullopt) const;

  // Request body: {model, messages:[{role:"user", content:[text part, image part?]}]}.
  nlohmann::json build_request(const std::string& prompt, const std::optional<std::string>& image_base64) const;

  const WireConfig& config() const { return cfg_; }

 private:
  WireConfig cfg_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

// Pulls choices[0].message.content and usage out of a completions response.
// Content given as an array of text parts is concatenated.
ChatReply parse_chat_response(const nlohmann::json& body);

}  // namespace prmnav
