#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codea11y/error.hpp"
#include "codea11y/linter.hpp"

namespace codea11y {

enum class AgentKind { responder, correction, reminder, plain };

inline const char* to_string(AgentKind a) {
  switch (a) {
    case AgentKind::responder: return "responder";
    case AgentKind::correction: return "correction";
    case AgentKind::reminder: return "reminder";
    case AgentKind::plain: return "plain";
  }
  return "responder";
}

inline std::optional<AgentKind> agent_from_string(std::string_view s) {
  for (auto a : {AgentKind::responder, AgentKind::correction, AgentKind::reminder, AgentKind::plain}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

struct ModelRequest {
  AgentKind agent = AgentKind::responder;
  std::string prompt;
};

/// Prompt in, text out. Implementations must be safe for concurrent calls
/// and throw AgentUnavailable on failure.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string complete(const ModelRequest& request) = 0;
  /// Cheap reachability probe used when a session is created.
  virtual bool handshake() { return true; }
  virtual std::string kind() const = 0;
};

/// One scripted rule. `match` is a substring, or a regex when written as
/// /pattern/ (optional trailing `i` for case-insensitive). An empty match is
/// the fallback and matches everything.
struct ScriptEntry {
  std::string match;
  std::string response;
  std::optional<AgentKind> agent;  // restricts the entry to one agent
  std::optional<std::string> error;  // "timeout" (retriable) or "fail"
};

/// Parses a script document: a JSON array of
/// {"match", "response", "agent"?, "error"?} objects.
inline std::vector<ScriptEntry> parse_script(const nlohmann::json& doc) {
  if (!doc.is_array()) throw Error(ErrorKind::config_error, "script must be a JSON array");
  std::vector<ScriptEntry> entries;
  for (const auto& j : doc) {
    if (!j.is_object()) throw Error(ErrorKind::config_error, "script entries must be objects");
    ScriptEntry e;
    e.match = j.value("match", std::string{});
    e.response = j.value("response", std::string{});
    if (j.contains("agent")) {
      const auto name = j.at("agent").get<std::string>();
      auto a = agent_from_string(name);
      if (!a) throw Error(ErrorKind::config_error, "unknown agent in script: " + name);
      e.agent = a;
    }
    if (j.contains("error")) e.error = j.at("error").get<std::string>();
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<ScriptEntry> load_script(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return parse_script(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_error, "invalid script " + path.string() + ": " + e.what());
  }
}

/// Minimal script: a conservative reminder and a notice that no model is set up.
inline std::vector<ScriptEntry> builtin_script() {
  return {
      {"", "No reminders needed.", AgentKind::reminder, std::nullopt},
      {"", "The scripted model has no canned answer for this prompt. Configure a script file or a remote model.",
       std::nullopt, std::nullopt},
  };
}

/// Deterministic model stand-in: the first entry matching the prompt wins.
/// The last entry must be an unrestricted fallback.
class ScriptedClient final : public ModelClient {
 public:
  explicit ScriptedClient(std::vector<ScriptEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty() || !entries_.back().match.empty() || entries_.back().agent) {
      throw Error(ErrorKind::config_error, "script must end with a fallback entry (empty match, no agent)");
    }
    for (const auto& e : entries_) compiled_.push_back(compile(e.match));
  }

  std::string complete(const ModelRequest& request) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    {
      std::lock_guard lock(log_mutex_);
      log_.push_back(request);
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.agent && *e.agent != request.agent) continue;
      if (!matches(compiled_[i], e.match, request.prompt)) continue;
      if (e.error) {
        throw AgentUnavailable("scripted " + *e.error + " for " + std::string(to_string(request.agent)),
                               *e.error == "timeout");
      }
      return e.response;
    }
    return entries_.back().response;
  }

  std::string kind() const override { return "scripted"; }

  std::size_t call_count() const { return calls_.load(); }
  std::vector<ModelRequest> requests() const {
    std::lock_guard lock(log_mutex_);
    return log_;
  }

 private:
  static std::optional<std::regex> compile(const std::string& match) {
    if (match.size() < 2 || match.front() != '/') return std::nullopt;
    auto last = match.find_last_of('/');
    if (last == 0) return std::nullopt;
    const std::string flags = match.substr(last + 1);
    if (flags != "" && flags != "i") return std::nullopt;
    auto opts = std::regex::ECMAScript;
    if (flags == "i") opts |= std::regex::icase;
    try {
      return std::regex(match.substr(1, last - 1), opts);
    } catch (const std::regex_error& e) {
      throw Error(ErrorKind::config_error, "invalid regex in script: " + match + ": " + e.what());
    }
  }

  static bool matches(const std::optional<std::regex>& re, const std::string& match, const std::string& prompt) {
    if (match.empty()) return true;
    if (re) return std::regex_search(prompt, *re);
    return prompt.find(match) != std::string::npos;
  }

  std::vector<ScriptEntry> entries_;
  std::vector<std::optional<std::regex>> compiled_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex log_mutex_;
  std::vector<ModelRequest> log_;
};

}  // namespace codea11y
