#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "codea11y/error.hpp"
#include "codea11y/linter.hpp"
#include "codea11y/remote_client.hpp"
#include "codea11y/session.hpp"

namespace codea11y {

enum class ClientKind { scripted, remote };

inline constexpr std::size_t kMinBudgetChars = 512;

struct ServiceConfig {
  std::string listen_address = "127.0.0.1";
  std::uint16_t port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> project_root;
  ClientKind client = ClientKind::scripted;
  std::optional<std::filesystem::path> script;  // scripted mode; builtin script when absent
  RemoteClientConfig remote;
  SessionConfig session;
};

/// Raised for an unrecognised key; carries the offending key name.
class UnknownConfigKey : public Error {
 public:
  explicit UnknownConfigKey(std::string key)
      : Error(ErrorKind::config_error, "unknown config key: " + key), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

namespace config_detail {

inline long long to_integer(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw Error(ErrorKind::config_error, std::string(key) + ": expected an integer");
  return out;
}

inline bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::config_error, std::string(key) + ": expected true or false");
}

}  // namespace config_detail

/// Checks the documented ranges.
inline void validate(const ServiceConfig& cfg) {
  if (cfg.session.budget_chars < kMinBudgetChars) {
    throw Error(ErrorKind::config_error, "budget_chars must be at least " + std::to_string(kMinBudgetChars));
  }
  if (cfg.session.refresh_interval < std::chrono::seconds(1)) {
    throw Error(ErrorKind::config_error, "refresh_interval_s must be at least 1");
  }
  if (!cfg.session.rules.thresholds.valid()) throw Error(ErrorKind::config_error, "invalid contrast thresholds");
}

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// ignored. Relative paths resolve against `base_dir`.
inline ServiceConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {}) {
  using config_detail::to_bool;
  using config_detail::to_integer;
  ServiceConfig cfg;
  auto path_of = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  std::size_t line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    const std::string line = css::detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::config_error, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = css::detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = css::detail::trim(std::string_view(line).substr(eq + 1));

    if (key == "listen_address") {
      cfg.listen_address = value;
    } else if (key == "port") {
      const auto p = to_integer(key, value);
      if (p < 0 || p > 65535) throw Error(ErrorKind::config_error, "port out of range");
      cfg.port = static_cast<std::uint16_t>(p);
    } else if (key == "project_root") {
      cfg.project_root = path_of(value);
    } else if (key == "model_client") {
      if (value == "scripted") cfg.client = ClientKind::scripted;
      else if (value == "remote") cfg.client = ClientKind::remote;
      else throw Error(ErrorKind::config_error, "model_client must be scripted or remote");
    } else if (key == "script") {
      cfg.script = path_of(value);
    } else if (key == "remote_endpoint") {
      cfg.remote.endpoint = value;
    } else if (key == "remote_model") {
      cfg.remote.model = value;
    } else if (key == "remote_timeout_s") {
      const auto s = to_integer(key, value);
      if (s < 1) throw Error(ErrorKind::config_error, "remote_timeout_s must be positive");
      cfg.remote.timeout = std::chrono::seconds(s);
    } else if (key == "notification_style") {
      const auto style = notification_style_from_string(value);
      if (!style) throw Error(ErrorKind::config_error, "notification_style must be popup or modal");
      cfg.session.notification_style = *style;
    } else if (key == "budget_chars") {
      const auto b = to_integer(key, value);
      if (b < 0) throw Error(ErrorKind::config_error, "budget_chars must be positive");
      cfg.session.budget_chars = static_cast<std::size_t>(b);
    } else if (key == "refresh_interval_s") {
      cfg.session.refresh_interval = std::chrono::seconds(to_integer(key, value));
    } else if (key == "strict_invocation") {
      cfg.session.strict_invocation = to_bool(key, value);
    } else if (key == "mention") {
      if (value.empty()) throw Error(ErrorKind::config_error, "mention must not be empty");
      cfg.session.mention = value;
    } else if (key == "transcript_dir") {
      cfg.session.transcript_dir = path_of(value);
    } else if (key == "rules") {
      cfg.session.rules.enabled.clear();
      std::stringstream ids(value);
      for (std::string id; std::getline(ids, id, ',');) {
        const std::string rule = css::detail::trim(id);
        if (rule.empty()) continue;
        if (!find_rule(rule)) throw Error(ErrorKind::config_error, "unknown rule id: " + rule);
        cfg.session.rules.enabled.insert(rule);
      }
    } else {
      throw UnknownConfigKey(key);
    }
  }
  validate(cfg);
  return cfg;
}

inline ServiceConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

}  // namespace codea11y
