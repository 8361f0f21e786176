#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "codea11y/config.hpp"
#include "codea11y/error.hpp"
#include "codea11y/model_client.hpp"
#include "codea11y/remote_client.hpp"
#include "codea11y/session.hpp"

namespace codea11y {

/// Builds the model client named by the config. Remote credentials are read
/// from the environment by the client itself.
inline std::shared_ptr<ModelClient> make_model_client(const ServiceConfig& cfg) {
  if (cfg.client == ClientKind::remote) return std::make_shared<RemoteClient>(cfg.remote);
  return std::make_shared<ScriptedClient>(cfg.script ? load_script(*cfg.script) : builtin_script());
}

/// One server-sent event frame.
inline std::string sse_frame(const TurnEvent& ev) {
  return "id: " + std::to_string(ev.seq) + "\nevent: " + ev.kind + "\ndata: " + ev.to_json().dump() + "\n\n";
}

/// JSON API plus event stream over the session orchestrator.
///
///   POST /sessions                      {project_root?, notification_style?} -> 201 {session_id}
///   POST /sessions/{id}/messages        {text, active_file?, cursor_line?}   -> text/event-stream
///   GET  /sessions/{id}/findings        -> linter log
///   POST /sessions/{id}/refresh         -> rescan now (file-save hook)
///   GET  /health                        -> {status, model_client, snapshot_age_s}
class AssistantService {
 public:
  AssistantService(ServiceConfig cfg, std::shared_ptr<ModelClient> client)
      : cfg_(std::move(cfg)), client_(std::move(client)) {
    if (!client_) throw Error(ErrorKind::config_error, "service needs a model client");
    routes();
  }

  AssistantService(const AssistantService&) = delete;
  AssistantService& operator=(const AssistantService&) = delete;
  ~AssistantService() { stop(); }

  /// Binds the listening socket; returns the bound port. Throws IoError when
  /// the address is unavailable.
  int bind() {
    int port = cfg_.port;
    if (port == 0) {
      port = server_.bind_to_any_port(cfg_.listen_address);
      if (port < 0) throw Error(ErrorKind::io_error, "cannot bind " + cfg_.listen_address);
    } else if (!server_.bind_to_port(cfg_.listen_address, port)) {
      throw Error(ErrorKind::io_error, "cannot bind " + cfg_.listen_address + ":" + std::to_string(port));
    }
    port_ = port;
    return port;
  }

  /// Serves until stop(). bind() must have succeeded.
  void run() { server_.listen_after_bind(); }

  void stop() {
    server_.stop();
    std::lock_guard lock(sessions_mutex_);
    for (auto& [id, s] : sessions_) s->stop_auto_refresh();
  }

  void wait_until_ready() const { server_.wait_until_ready(); }
  int port() const { return port_; }
  const ServiceConfig& config() const { return cfg_; }

  std::shared_ptr<Session> find_session(const std::string& id) const {
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

 private:
  static void reply(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void fail(httplib::Response& res, int status, std::string_view error, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = error;
    j["message"] = message;
    reply(res, status, j);
  }

  static std::optional<nlohmann::json> body_json(const httplib::Request& req, httplib::Response& res) {
    if (req.body.empty()) return nlohmann::json::object();
    try {
      auto j = nlohmann::json::parse(req.body);
      if (!j.is_object()) {
        fail(res, 400, "InvalidInput", "request body must be a JSON object");
        return std::nullopt;
      }
      return j;
    } catch (const nlohmann::json::exception& e) {
      fail(res, 400, "InvalidInput", std::string("malformed JSON: ") + e.what());
      return std::nullopt;
    }
  }

  void routes() {
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
    server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) { create_session(req, res); });
    server_.Post(R"(/sessions/([^/]+)/messages)",
                 [this](const httplib::Request& req, httplib::Response& res) { post_message(req, res); });
    server_.Get(R"(/sessions/([^/]+)/findings)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find_session(req.matches[1]);
      if (!s) return fail(res, 404, "NotFound", "unknown session");
      res.status = 200;
      res.set_header("X-Snapshot-Generation", std::to_string(s->snapshot()->generation));
      res.set_content(findings_to_log(s->snapshot()->findings), "application/json");
    });
    server_.Post(R"(/sessions/([^/]+)/refresh)", [this](const httplib::Request& req, httplib::Response& res) {
      auto s = find_session(req.matches[1]);
      if (!s) return fail(res, 404, "NotFound", "unknown session");
      const auto snap = s->refresh_linter_snapshot();
      nlohmann::ordered_json j;
      j["generation"] = snap->generation;
      j["findings"] = snap->findings.size();
      j["degraded"] = s->degraded();
      reply(res, 200, j);
    });
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) { health(res); });
    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        fail(res, 500, "Internal", e.what());
      } catch (...) {
        fail(res, 500, "Internal", "unknown error");
      }
    });
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    auto body = body_json(req, res);
    if (!body) return;
    std::optional<std::filesystem::path> root = cfg_.project_root;
    SessionConfig scfg = cfg_.session;
    try {
      if (body->contains("project_root")) root = std::filesystem::path(body->at("project_root").get<std::string>());
      if (body->contains("notification_style")) {
        auto style = notification_style_from_string(body->at("notification_style").get<std::string>());
        if (!style) return fail(res, 400, "InvalidInput", "notification_style must be popup or modal");
        scfg.notification_style = *style;
      }
    } catch (const nlohmann::json::exception&) {
      return fail(res, 400, "InvalidInput", "project_root and notification_style must be strings");
    }
    std::error_code ec;
    if (!root) return fail(res, 400, "InvalidInput", "no project_root given and no default configured");
    if (!std::filesystem::is_directory(*root, ec)) {
      return fail(res, 400, "InvalidInput", "project_root is not a directory: " + root->string());
    }
    if (client_->kind() == "remote" && !client_->handshake()) {
      return fail(res, 503, "AgentUnavailable", "model client unreachable");
    }

    auto session = std::make_shared<Session>(make_uuid(), std::filesystem::weakly_canonical(*root, ec), client_, scfg);
    session->refresh_linter_snapshot();
    session->start_auto_refresh();
    {
      std::lock_guard lock(sessions_mutex_);
      sessions_[session->id()] = session;
    }
    nlohmann::ordered_json j;
    j["session_id"] = session->id();
    j["project_root"] = session->project_root().generic_string();
    j["notification_style"] = to_string(scfg.notification_style);
    reply(res, 201, j);
  }

  void post_message(const httplib::Request& req, httplib::Response& res) {
    auto session = find_session(req.matches[1]);
    if (!session) return fail(res, 404, "NotFound", "unknown session");
    auto body = body_json(req, res);
    if (!body) return;

    std::string text;
    std::optional<std::filesystem::path> active_file;
    std::optional<std::size_t> cursor;
    try {
      text = body->value("text", std::string{});
      if (body->contains("active_file") && !body->at("active_file").is_null()) {
        active_file = std::filesystem::path(body->at("active_file").get<std::string>());
      }
      if (body->contains("cursor_line") && !body->at("cursor_line").is_null()) {
        const auto c = body->at("cursor_line").get<long long>();
        if (c < 1) return fail(res, 422, "InvalidCursor", "cursor_line must be >= 1");
        cursor = static_cast<std::size_t>(c);
      }
    } catch (const nlohmann::json::exception&) {
      return fail(res, 400, "InvalidInput", "text and active_file must be strings, cursor_line an integer");
    }
    const SessionConfig& scfg = session->config();
    if (parse_invocation(text, scfg.strict_invocation, scfg.mention).prompt.empty()) {
      return fail(res, 422, "EmptyPrompt", "message text is empty");
    }

    std::shared_ptr<TurnTicket> ticket;
    try {
      ticket = std::make_shared<TurnTicket>(session->reserve_turn());
    } catch (const Error& e) {
      return fail(res, 409, to_string(e.kind()), e.what());
    }

    res.status = 200;
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream",
        [session, ticket, text, active_file, cursor](std::size_t, httplib::DataSink& sink) {
          bool open = true;
          auto write = [&](const TurnEvent& ev) {
            if (!open) return;
            const std::string frame = sse_frame(ev);
            open = sink.write(frame.data(), frame.size());
          };
          try {
            session->handle_user_message(std::move(*ticket), text, active_file, cursor, write);
          } catch (const Error& e) {
            // Raised before the turn started (e.g. the prompt became empty);
            // no seq was consumed.
            nlohmann::ordered_json j;
            j["error"] = to_string(e.kind());
            j["message"] = e.what();
            const std::string frame = "event: turn_error\ndata: " + j.dump() + "\n\n";
            if (open) sink.write(frame.data(), frame.size());
          }
          sink.done();
          return true;
        });
  }

  void health(httplib::Response& res) const {
    std::vector<std::shared_ptr<Session>> sessions;
    {
      std::lock_guard lock(sessions_mutex_);
      for (const auto& [id, s] : sessions_) sessions.push_back(s);
    }
    bool degraded = false;
    std::optional<double> oldest;
    const auto now = std::chrono::steady_clock::now();
    for (const auto& s : sessions) {
      degraded = degraded || s->degraded();
      const auto snap = s->snapshot();
      if (snap->generation == 0) continue;
      const double age = std::chrono::duration<double>(now - snap->taken).count();
      oldest = oldest ? std::max(*oldest, age) : age;
    }
    nlohmann::ordered_json j;
    j["status"] = degraded ? "degraded" : "ok";
    j["model_client"] = client_->kind();
    if (oldest) j["snapshot_age_s"] = *oldest;
    else j["snapshot_age_s"] = nullptr;
    j["sessions"] = sessions.size();
    reply(res, 200, j);
  }

  ServiceConfig cfg_;
  std::shared_ptr<ModelClient> client_;
  httplib::Server server_;
  int port_ = 0;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace codea11y
