#pragma once

// Requires cpp-httplib; define CPPHTTPLIB_OPENSSL_SUPPORT before including
// (and link OpenSSL) for https endpoints.

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "codea11y/error.hpp"
#include "codea11y/model_client.hpp"

namespace codea11y {

/// Environment variable holding the bearer token for the remote model.
inline constexpr const char* kApiKeyEnv = "CODEA11Y_API_KEY";

struct RemoteClientConfig {
  std::string endpoint = "https://api.openai.com";  // scheme://host[:port][/base]
  std::string model = "gpt-4o";
  std::chrono::seconds timeout{60};
};

/// OpenAI-compatible chat-completion client: one user message in, the first
/// choice's content out. Credentials come only from the environment.
class RemoteClient final : public ModelClient {
 public:
  explicit RemoteClient(RemoteClientConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorKind::config_error, "remote endpoint needs a scheme");
    const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
    origin_ = cfg_.endpoint.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? "" : cfg_.endpoint.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  }

  std::string complete(const ModelRequest& request) override {
    auto cli = make_client();
    nlohmann::json body{{"model", cfg_.model},
                        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})}};
    auto res = cli.Post(base_path_ + "/v1/chat/completions", headers(), body.dump(), "application/json");
    if (!res) {
      throw AgentUnavailable("model request failed: " + httplib::to_string(res.error()), true);
    }
    if (res->status >= 500 || res->status == 429) {
      throw AgentUnavailable("model returned HTTP " + std::to_string(res->status), true);
    }
    if (res->status != 200) {
      throw AgentUnavailable("model returned HTTP " + std::to_string(res->status), false);
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw AgentUnavailable(std::string("malformed model response: ") + e.what(), false);
    }
  }

  bool handshake() override {
    auto cli = make_client();
    auto res = cli.Get(base_path_ + "/v1/models", headers());
    return res && res->status < 500 && res->status != 401 && res->status != 403;
  }

  std::string kind() const override { return "remote"; }

 private:
  httplib::Client make_client() const {
    httplib::Client cli(origin_);
    cli.set_connection_timeout(cfg_.timeout);
    cli.set_read_timeout(cfg_.timeout);
    cli.set_write_timeout(cfg_.timeout);
    return cli;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (const char* key = std::getenv(kApiKeyEnv); key && *key) h.emplace("Authorization", std::string("Bearer ") + key);
    return h;
  }

  RemoteClientConfig cfg_;
  std::string origin_;
  std::string base_path_;
};

}  // namespace codea11y
