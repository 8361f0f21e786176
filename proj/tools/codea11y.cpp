// codea11y command-line entry point: lint, score, chat, serve.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>
#include <unistd.h>

#include <CLI11.hpp>

#include "codea11y/config.hpp"
#include "codea11y/linter.hpp"
#include "codea11y/rubric.hpp"
#include "codea11y/service.hpp"
#include "codea11y/session.hpp"

namespace fs = std::filesystem;
using namespace codea11y;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitIo = 2;

RuleConfig rules_from_flag(const std::string& ids) {
  RuleConfig cfg;
  std::stringstream in(ids);
  for (std::string id; std::getline(in, id, ',');) {
    id = css::detail::trim(id);
    if (id.empty()) continue;
    if (!find_rule(id)) throw Error(ErrorKind::config_error, "unknown rule id: " + id);
    cfg.enabled.insert(id);
  }
  return cfg;
}

int run_lint(const std::string& path, const std::string& format, const std::string& rules) {
  RuleConfig cfg;
  try {
    cfg = rules_from_flag(rules);
  } catch (const Error& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    std::error_code ec;
    std::vector<Finding> findings;
    if (fs::is_directory(path, ec)) {
      findings = lint_project(path, cfg);
    } else if (fs::is_regular_file(path, ec)) {
      findings = lint_file(path, fs::path(path).parent_path().empty() ? fs::path(".") : fs::path(path).parent_path(), cfg);
    } else {
      std::cerr << "codea11y: no such file or directory: " << path << "\n";
      return kExitIo;
    }
    std::cout << (format == "json" ? findings_to_log(findings) : text_report(findings));
    const bool serious = std::any_of(findings.begin(), findings.end(), [](const Finding& f) {
      return f.impact == Impact::critical || f.impact == Impact::serious;
    });
    return serious ? 1 : 0;
  } catch (const Error& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return kExitIo;
  }
}

int run_score(const std::vector<std::string>& paths, const std::string& task_flag, const std::string& format,
              bool aggregate) {
  const auto task = task_from_string(task_flag);
  if (!task) {
    std::cerr << "codea11y: unknown task '" << task_flag << "' (expected T1, T2, T3 or T4)\n";
    return kExitUsage;
  }
  std::vector<RubricScore> scores;
  for (const auto& p : paths) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) {
      std::cerr << "codea11y: no such file: " << p << "\n";
      return kExitNoInput;
    }
    try {
      scores.push_back(score_file(p, *task));
    } catch (const Error& e) {
      std::cerr << "codea11y: " << e.what() << "\n";
      return kExitDataErr;
    }
  }
  if (aggregate) {
    const AggregateReport rep = aggregate_scores(scores);
    std::cout << (format == "json" ? rep.to_json().dump(2) + "\n" : rep.to_text());
    return 0;
  }
  if (format == "json") {
    if (scores.size() == 1) {
      std::cout << score_to_json(scores.front()).dump(2) << "\n";
    } else {
      auto arr = nlohmann::ordered_json::array();
      for (const auto& s : scores) arr.push_back(score_to_json(s));
      std::cout << arr.dump(2) << "\n";
    }
  } else {
    for (const auto& s : scores) std::cout << score_text(s);
  }
  int worst = 2;
  for (const auto& s : scores) worst = std::min(worst, s.score);
  return 2 - worst;
}

void print_response(const char* who, const AgentResponse& r) {
  std::cout << "[" << who << "]\n" << r.markdown << "\n\n";
}

void print_reminder(const Reminder& r, NotificationStyle style) {
  const std::string bar(60, '=');
  std::cout << bar << "\n"
            << "REMINDER (" << to_string(style) << "): " << r.text << "\n"
            << bar << "\n\n";
}

int run_chat(const std::string& project, const std::optional<std::string>& script, bool remote,
             const std::string& endpoint, const std::string& model, bool modal, bool strict,
             const std::optional<std::string>& transcript, std::optional<std::string> active_file,
             std::optional<std::size_t> cursor) {
  std::error_code ec;
  if (!fs::is_directory(project, ec)) {
    std::cerr << "codea11y: project root is not a readable directory: " << project << "\n";
    return kExitIo;
  }
  std::shared_ptr<ModelClient> client;
  try {
    if (remote) {
      RemoteClientConfig rc;
      if (!endpoint.empty()) rc.endpoint = endpoint;
      if (!model.empty()) rc.model = model;
      client = std::make_shared<RemoteClient>(rc);
    } else {
      client = std::make_shared<ScriptedClient>(script ? load_script(*script) : builtin_script());
    }
  } catch (const Error& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return e.kind() == ErrorKind::io_error ? kExitIo : kExitUsage;
  }
  SessionConfig cfg;
  cfg.notification_style = modal ? NotificationStyle::modal : NotificationStyle::popup;
  cfg.strict_invocation = strict;
  if (transcript) cfg.transcript_dir = fs::path(*transcript);
  Session session(make_uuid(), fs::weakly_canonical(project, ec), client, cfg);
  session.refresh_linter_snapshot();
  std::cerr << "codea11y chat: " << session.snapshot()->findings.size() << " finding(s) in " << project
            << ". Commands: /file <path> [line], /refresh, /quit\n";

  std::string line;
  while (std::getline(std::cin, line)) {
    const std::string trimmed = css::detail::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed == "/quit" || trimmed == "/exit") break;
    if (trimmed == "/refresh") {
      const auto snap = session.refresh_linter_snapshot();
      std::cout << "[linter] " << snap->findings.size() << " finding(s)\n\n";
      continue;
    }
    if (trimmed.rfind("/file", 0) == 0) {
      std::istringstream args(trimmed.substr(5));
      std::string f;
      std::size_t l = 1;
      args >> f >> l;
      if (f.empty()) active_file.reset();
      else active_file = f;
      cursor = l;
      continue;
    }
    try {
      const TurnResult r = session.handle_user_message(
          trimmed, active_file ? std::optional<fs::path>(*active_file) : std::nullopt, cursor);
      for (const auto& ev : r.events) {
        if (ev.kind == event_kind::turn_error) {
          std::cout << "[error] " << ev.payload.value("stage", "") << ": " << ev.payload.value("message", "") << "\n\n";
        }
      }
      if (r.responder) print_response("responder", *r.responder);
      if (r.correction) print_response("correction", *r.correction);
      if (r.reminder) print_reminder(*r.reminder, cfg.notification_style);
    } catch (const Error& e) {
      std::cout << "[error] " << e.what() << "\n\n";
    }
    std::cout.flush();
  }
  return 0;
}

int run_serve(const std::optional<std::string>& config_path, std::optional<int> port_override) {
  ServiceConfig cfg;
  try {
    if (config_path) cfg = load_config(*config_path);
    if (port_override) {
      if (*port_override < 0 || *port_override > 65535) throw Error(ErrorKind::config_error, "port out of range");
      cfg.port = static_cast<std::uint16_t>(*port_override);
    }
  } catch (const UnknownConfigKey& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return e.kind() == ErrorKind::io_error ? kExitIo : kExitUsage;
  }

  // Signals are taken synchronously by a dedicated thread.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  std::shared_ptr<ModelClient> client;
  try {
    client = make_model_client(cfg);
  } catch (const Error& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return kExitUsage;
  }
  AssistantService service(cfg, client);
  int port = 0;
  try {
    port = service.bind();
  } catch (const Error& e) {
    std::cerr << "codea11y: " << e.what() << "\n";
    return kExitIo;
  }
  std::cerr << "codea11y: listening on http://" << cfg.listen_address << ":" << port << " (model client "
            << client->kind() << ")\n";

  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    signalled = true;
    std::cerr << "codea11y: signal " << sig << ", shutting down\n";
    service.stop();
  });
  service.run();
  // run() also returns if the listener fails; release the waiter then.
  if (!signalled) kill(getpid(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accessibility-aware coding assistant: linter, rubric scorer, chat and service"};
  app.require_subcommand(1);

  std::string lint_path, lint_format = "json", lint_rules;
  auto* lint = app.add_subcommand("lint", "Check markup files for WCAG violations");
  lint->add_option("path", lint_path, "File or project directory")->required();
  lint->add_option("--format", lint_format, "Report format")->check(CLI::IsMember({"json", "text"}));
  lint->add_option("--rules", lint_rules, "Comma-separated rule ids to enable (default all)");

  std::vector<std::string> score_paths;
  std::string score_task_flag, score_format = "json";
  bool score_aggregate = false;
  auto* score = app.add_subcommand("score", "Score submissions against a task rubric");
  score->add_option("path", score_paths, "Submission file(s)")->required();
  score->add_option("--task", score_task_flag, "T1, T2, T3 or T4")->required();
  score->add_option("--format", score_format, "Report format")->check(CLI::IsMember({"json", "text"}));
  score->add_flag("--aggregate", score_aggregate, "Print per-task means instead of individual scores");

  std::string chat_project = ".", chat_endpoint, chat_model;
  std::optional<std::string> chat_script, chat_transcript, chat_file;
  std::optional<std::size_t> chat_cursor;
  bool chat_remote = false, chat_modal = false, chat_strict = false;
  auto* chat = app.add_subcommand("chat", "Interactive terminal chat");
  chat->add_option("--project", chat_project, "Project root");
  chat->add_option("--scripted", chat_script, "Script file for the scripted model client");
  chat->add_flag("--remote", chat_remote, "Use the remote model (token from " + std::string(kApiKeyEnv) + ")");
  chat->add_option("--endpoint", chat_endpoint, "Remote endpoint base URL");
  chat->add_option("--model", chat_model, "Remote model name");
  chat->add_flag("--modal", chat_modal, "Show reminders as modal notifications");
  chat->add_flag("--strict", chat_strict, "Only run the accessibility pipeline for @codea11y messages");
  chat->add_option("--transcript", chat_transcript, "Directory for a JSONL transcript");
  chat->add_option("--file", chat_file, "Active file, relative to the project");
  chat->add_option("--cursor", chat_cursor, "Cursor line in the active file");

  std::optional<std::string> serve_config;
  std::optional<int> serve_port;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", serve_config, "key = value config file");
  serve->add_option("--port", serve_port, "Override the listen port (0 picks a free port)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  if (lint->parsed()) return run_lint(lint_path, lint_format, lint_rules);
  if (score->parsed()) return run_score(score_paths, score_task_flag, score_format, score_aggregate);
  if (chat->parsed()) {
    if (chat_remote && chat_script) {
      std::cerr << "codea11y: --remote and --scripted are exclusive\n";
      return kExitUsage;
    }
    return run_chat(chat_project, chat_script, chat_remote, chat_endpoint, chat_model, chat_modal, chat_strict,
                    chat_transcript, chat_file, chat_cursor);
  }
  if (serve->parsed()) return run_serve(serve_config, serve_port);
  return kExitUsage;
}
