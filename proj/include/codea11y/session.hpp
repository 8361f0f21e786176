#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "codea11y/agents.hpp"
#include "codea11y/context.hpp"
#include "codea11y/error.hpp"
#include "codea11y/linter.hpp"
#include "codea11y/model_client.hpp"

namespace codea11y {

inline constexpr std::string_view kDefaultMention = "@codea11y";
inline constexpr std::size_t kTurnQueueDepth = 4;
inline constexpr std::chrono::seconds kPopupLifetime{8};

// ---------------------------------------------------------------------------
// Invocation.

struct Invocation {
  bool invoked = true;
  std::string prompt;
  friend bool operator==(const Invocation&, const Invocation&) = default;
};

/// Strips a leading mention token (case-insensitive). Without the token the
/// message still invokes the pipeline unless `strict` is set.
inline Invocation parse_invocation(std::string_view raw, bool strict = false, std::string_view mention = kDefaultMention) {
  std::string text = css::detail::trim(raw);
  const std::string lowered = context_detail::lower(text);
  const std::string token = context_detail::lower(mention);
  if (!token.empty() && lowered.rfind(token, 0) == 0) {
    const std::size_t after = token.size();
    const bool boundary = after == text.size() || std::isspace(static_cast<unsigned char>(text[after])) ||
                          text[after] == ',' || text[after] == ':';
    if (boundary) {
      std::size_t i = after;
      while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',' || text[i] == ':')) ++i;
      return {true, text.substr(i)};
    }
  }
  return {!strict, text};
}

// ---------------------------------------------------------------------------
// Events and results.

enum class NotificationStyle { popup, modal };

inline const char* to_string(NotificationStyle s) { return s == NotificationStyle::modal ? "modal" : "popup"; }

inline std::optional<NotificationStyle> notification_style_from_string(std::string_view s) {
  if (s == "popup") return NotificationStyle::popup;
  if (s == "modal") return NotificationStyle::modal;
  return std::nullopt;
}

namespace event_kind {
inline constexpr const char* responder_message = "responder_message";
inline constexpr const char* correction_message = "correction_message";
inline constexpr const char* reminder_notification = "reminder_notification";
inline constexpr const char* turn_error = "turn_error";
inline constexpr const char* turn_done = "turn_done";
}  // namespace event_kind

struct TurnEvent {
  std::string session_id;
  std::uint64_t seq = 0;
  std::string kind;
  nlohmann::ordered_json payload;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["session_id"] = session_id;
    j["seq"] = seq;
    j["kind"] = kind;
    j["payload"] = payload;
    return j;
  }
};

using EventSink = std::function<void(const TurnEvent&)>;

struct TurnResult {
  std::optional<AgentResponse> responder;  // absent when the responder failed
  std::optional<AgentResponse> correction;
  std::optional<Reminder> reminder;
  std::vector<TurnEvent> events;
};

inline nlohmann::ordered_json response_payload(const AgentResponse& r, Role role) {
  nlohmann::ordered_json j;
  j["role"] = to_string(role);
  j["markdown"] = r.markdown;
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : r.code_blocks) blocks.push_back({{"language", b.language}, {"code", b.code}});
  j["code_blocks"] = blocks;
  j["citations"] = r.citations;
  return j;
}

// ---------------------------------------------------------------------------
// Linter snapshot.

struct Snapshot {
  std::vector<Finding> findings;
  std::uint64_t generation = 0;
  std::chrono::steady_clock::time_point taken{};
  std::chrono::system_clock::time_point taken_wall{};
};

struct SessionConfig {
  std::size_t budget_chars = kDefaultBudgetChars;
  bool strict_invocation = false;
  std::string mention = std::string(kDefaultMention);
  NotificationStyle notification_style = NotificationStyle::popup;
  std::chrono::milliseconds refresh_interval{5000};
  RuleConfig rules{};
  /// When set, every event is appended to `<dir>/<session_id>.jsonl`.
  std::optional<std::filesystem::path> transcript_dir;
};

inline std::string make_uuid() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t hi, lo;
  {
    std::lock_guard lock(m);
    hi = rng();
    lo = rng();
  }
  hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                static_cast<unsigned>((hi >> 16) & 0xffff), static_cast<unsigned>(hi & 0xffff),
                static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xffffffffffffULL));
  return buf;
}

// ---------------------------------------------------------------------------
// Session.

class Session;

/// A place in a session's FIFO turn queue. Releasing (destroying) a ticket
/// that never ran lets later turns proceed.
class TurnTicket {
 public:
  TurnTicket() = default;
  TurnTicket(TurnTicket&& o) noexcept : session_(std::exchange(o.session_, nullptr)), number_(o.number_) {}
  TurnTicket& operator=(TurnTicket&& o) noexcept {
    if (this != &o) {
      release();
      session_ = std::exchange(o.session_, nullptr);
      number_ = o.number_;
    }
    return *this;
  }
  TurnTicket(const TurnTicket&) = delete;
  TurnTicket& operator=(const TurnTicket&) = delete;
  ~TurnTicket() { release(); }

  bool valid() const { return session_ != nullptr; }

 private:
  friend class Session;
  TurnTicket(Session* s, std::uint64_t n) : session_(s), number_(n) {}
  void release();

  Session* session_ = nullptr;
  std::uint64_t number_ = 0;
};

class Session {
 public:
  Session(std::string id, std::filesystem::path project_root, std::shared_ptr<ModelClient> client, SessionConfig cfg)
      : id_(std::move(id)), root_(std::move(project_root)), client_(std::move(client)), cfg_(std::move(cfg)),
        snapshot_(std::make_shared<const Snapshot>()) {
    if (!client_) throw Error(ErrorKind::config_error, "session needs a model client");
  }

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session() { stop_auto_refresh(); }

  const std::string& id() const { return id_; }
  const std::filesystem::path& project_root() const { return root_; }
  const SessionConfig& config() const { return cfg_; }
  NotificationStyle notification_style() const { return cfg_.notification_style; }

  ChatContext chat() const {
    std::lock_guard lock(chat_mutex_);
    return chat_;
  }

  // -- linter snapshot ------------------------------------------------------

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard lock(snapshot_mutex_);
    return snapshot_;
  }

  bool degraded() const {
    std::lock_guard lock(snapshot_mutex_);
    return degraded_;
  }

  /// Re-lints the project and swaps the snapshot in one step. On failure the
  /// previous snapshot stays and the session is marked degraded.
  std::shared_ptr<const Snapshot> refresh_linter_snapshot() {
    std::lock_guard refresh(refresh_mutex_);
    try {
      auto next = std::make_shared<Snapshot>();
      next->findings = lint_project(root_, cfg_.rules);
      next->taken = std::chrono::steady_clock::now();
      next->taken_wall = std::chrono::system_clock::now();
      std::lock_guard lock(snapshot_mutex_);
      next->generation = snapshot_->generation + 1;
      snapshot_ = std::move(next);
      degraded_ = false;
      return snapshot_;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::io_error && e.kind() != ErrorKind::invalid_input) throw;
      std::lock_guard lock(snapshot_mutex_);
      degraded_ = true;
      last_refresh_error_ = e.what();
      return snapshot_;
    }
  }

  std::string last_refresh_error() const {
    std::lock_guard lock(snapshot_mutex_);
    return last_refresh_error_;
  }

  /// Starts the periodic refresher. Scans run every refresh interval and on
  /// notify_file_saved.
  void start_auto_refresh() {
    if (refresher_.joinable()) return;
    refresher_ = std::jthread([this](std::stop_token st) {
      std::mutex m;
      std::unique_lock lock(m);
      while (true) {
        wake_.wait_for(lock, st, cfg_.refresh_interval, [&] { return wake_requested_.exchange(false); });
        if (st.stop_requested()) break;
        refresh_linter_snapshot();
      }
    });
  }

  void stop_auto_refresh() {
    if (refresher_.joinable()) {
      refresher_.request_stop();
      refresher_.join();
    }
  }

  /// Save events trigger a rescan: through the refresher when it runs,
  /// synchronously otherwise.
  void notify_file_saved(const std::filesystem::path& /*path*/) {
    if (refresher_.joinable()) {
      wake_requested_ = true;
      wake_.notify_all();
    } else {
      refresh_linter_snapshot();
    }
  }

  // -- turn queue -----------------------------------------------------------

  /// Reserves a place in the FIFO turn queue: one running turn plus up to
  /// four waiting. Throws QueueFull beyond that.
  TurnTicket reserve_turn() {
    std::lock_guard lock(queue_mutex_);
    if (issued_ - finished_ >= 1 + kTurnQueueDepth) {
      throw Error(ErrorKind::queue_full, "turn queue full for session " + id_);
    }
    return TurnTicket(this, issued_++);
  }

  /// Runs one turn: responder, then correction, then reminder. Blocks until
  /// the ticket reaches the front of the queue. Events are passed to `sink`
  /// as they are produced and also returned in order.
  TurnResult handle_user_message(TurnTicket ticket, std::string_view raw_message,
                                 std::optional<std::filesystem::path> active_file = std::nullopt,
                                 std::optional<std::size_t> cursor_line = std::nullopt, const EventSink& sink = {}) {
    if (ticket.session_ != this) throw Error(ErrorKind::invalid_input, "ticket belongs to another session");
    const Invocation inv = parse_invocation(raw_message, cfg_.strict_invocation, cfg_.mention);
    if (inv.prompt.empty()) throw Error(ErrorKind::empty_prompt, "empty prompt");

    wait_for_turn(ticket.number_);
    struct Finish {
      Session* s;
      ~Finish() { s->finish_turn(); }
    } finish{this};
    ticket.session_ = nullptr;  // released by Finish instead

    TurnResult result;
    auto emit = [&](const char* kind, nlohmann::ordered_json payload) {
      TurnEvent ev{id_, next_seq_++, kind, std::move(payload)};
      write_transcript(ev);
      if (sink) sink(ev);
      result.events.push_back(std::move(ev));
    };
    auto error_payload = [](const char* stage, const Error& e) {
      nlohmann::ordered_json j;
      j["stage"] = stage;
      j["error"] = to_string(e.kind());
      j["message"] = e.what();
      const auto* au = dynamic_cast<const AgentUnavailable*>(&e);
      j["retriable"] = au != nullptr && au->retriable();
      return j;
    };
    auto done = [&] {
      nlohmann::ordered_json j;
      j["responder"] = result.responder.has_value();
      j["correction"] = result.correction.has_value();
      j["reminder"] = result.reminder.has_value();
      emit(event_kind::turn_done, std::move(j));
    };

    ContextBundle bundle;
    bundle.user_prompt = inv.prompt;
    try {
      bundle.code = code_window_for(active_file, cursor_line);
      bundle.project = gather_project_context(root_);
    } catch (const Error& e) {
      emit(event_kind::turn_error, error_payload("context", e));
      done();
      return result;
    }
    bundle.history = chat();
    append_turn(Role::user, inv.prompt);

    // Responder.
    try {
      bundle = apply_budget(std::move(bundle), cfg_.budget_chars);
      const PromptTemplate& tmpl = inv.invoked ? responder_template() : plain_template();
      result.responder = responder_run(bundle, *client_, tmpl);
    } catch (const Error& e) {
      emit(event_kind::turn_error, error_payload("responder", e));
      done();
      return result;
    }
    append_turn(Role::responder, result.responder->markdown);
    emit(event_kind::responder_message, response_payload(*result.responder, Role::responder));

    if (!inv.invoked) {
      done();
      return result;
    }

    // Correction.
    try {
      const auto excerpt = get_log_context(snapshot()->findings, chat());
      result.correction = correction_run(excerpt, chat(), *client_, cfg_.budget_chars);
    } catch (const Error& e) {
      emit(event_kind::turn_error, error_payload("correction", e));
    }
    if (result.correction) {
      append_turn(Role::correction, result.correction->markdown);
      emit(event_kind::correction_message, response_payload(*result.correction, Role::correction));
    }

    // Reminder, over everything shown to the developer this turn.
    AgentResponse reviewed = *result.responder;
    if (result.correction) {
      reviewed.markdown += "\n\n" + result.correction->markdown;
      reviewed.code_blocks.insert(reviewed.code_blocks.end(), result.correction->code_blocks.begin(),
                                  result.correction->code_blocks.end());
    }
    try {
      result.reminder = reminder_run(chat(), reviewed, *client_, cfg_.budget_chars);
    } catch (const Error& e) {
      emit(event_kind::turn_error, error_payload("reminder", e));
    }
    if (result.reminder) {
      nlohmann::ordered_json j;
      j["text"] = result.reminder->text;
      j["style"] = to_string(cfg_.notification_style);
      j["source"] = to_string(result.reminder->source);
      if (cfg_.notification_style == NotificationStyle::popup) j["dismiss_after_s"] = kPopupLifetime.count();
      else j["dismiss_after_s"] = nullptr;
      emit(event_kind::reminder_notification, std::move(j));
    }
    done();
    return result;
  }

  TurnResult handle_user_message(std::string_view raw_message,
                                 std::optional<std::filesystem::path> active_file = std::nullopt,
                                 std::optional<std::size_t> cursor_line = std::nullopt, const EventSink& sink = {}) {
    return handle_user_message(reserve_turn(), raw_message, std::move(active_file), cursor_line, sink);
  }

  /// Next seq to be assigned; seqs start at 1.
  std::uint64_t next_seq() const { return next_seq_.load(); }

 private:
  friend class TurnTicket;

  void wait_for_turn(std::uint64_t n) {
    std::unique_lock lock(queue_mutex_);
    queue_cv_.wait(lock, [&] { return skipped_up_to(n); });
  }

  // True when every ticket before n has finished or been abandoned.
  bool skipped_up_to(std::uint64_t n) {
    while (serving_ < n && abandoned_.count(serving_)) {
      abandoned_.erase(serving_);
      ++serving_;
    }
    return serving_ == n;
  }

  void finish_turn() {
    {
      std::lock_guard lock(queue_mutex_);
      ++serving_;
      ++finished_;
    }
    queue_cv_.notify_all();
  }

  void abandon(std::uint64_t n) {
    {
      std::lock_guard lock(queue_mutex_);
      abandoned_.insert(n);
      ++finished_;
      skipped_up_to(issued_);
    }
    queue_cv_.notify_all();
  }

  std::optional<CodeWindow> code_window_for(const std::optional<std::filesystem::path>& active_file,
                                            std::optional<std::size_t> cursor_line) const {
    if (!active_file) return std::nullopt;
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path full = fs::weakly_canonical(active_file->is_absolute() ? *active_file : root_ / *active_file, ec);
    const fs::path rel = full.lexically_relative(fs::weakly_canonical(root_, ec));
    if (rel.empty() || *rel.begin() == "..") {
      throw Error(ErrorKind::invalid_input, "active file is outside the project: " + active_file->generic_string());
    }
    const std::string text = read_file(full);
    const std::string shown = rel.generic_string();
    return extract_code_window(text, cursor_line.value_or(1), shown);
  }

  void append_turn(Role role, std::string text) {
    std::lock_guard lock(chat_mutex_);
    chat_.push_back({role, std::move(text), std::chrono::system_clock::now()});
  }

  void write_transcript(const TurnEvent& ev) const {
    if (!cfg_.transcript_dir) return;
    std::ofstream out(*cfg_.transcript_dir / (id_ + ".jsonl"), std::ios::app);
    out << ev.to_json().dump() << "\n";
  }

  std::string id_;
  std::filesystem::path root_;
  std::shared_ptr<ModelClient> client_;
  SessionConfig cfg_;

  mutable std::mutex chat_mutex_;
  ChatContext chat_;

  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
  bool degraded_ = false;
  std::string last_refresh_error_;
  std::mutex refresh_mutex_;

  mutable std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::uint64_t issued_ = 0;
  std::uint64_t serving_ = 0;
  std::uint64_t finished_ = 0;
  std::set<std::uint64_t> abandoned_;
  std::atomic<std::uint64_t> next_seq_{1};

  std::condition_variable_any wake_;
  std::atomic<bool> wake_requested_{false};
  std::jthread refresher_;  // last member: stops before the rest is destroyed
};

inline void TurnTicket::release() {
  if (session_) session_->abandon(number_);
  session_ = nullptr;
}

}  // namespace codea11y
