#pragma once

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codea11y/error.hpp"
#include "codea11y/linter.hpp"

namespace codea11y {

inline constexpr std::size_t kDefaultBudgetChars = 4000;
inline constexpr std::size_t kCodeWindowLines = 100;
inline constexpr std::size_t kLinesAboveCursor = 50;
inline constexpr std::size_t kProjectExcerptCap = 1500;
inline constexpr std::size_t kLogContextCap = 10;
inline constexpr std::size_t kProtectedFindings = 3;
inline constexpr std::string_view kTruncationMarker = "\n[...truncated]";

struct CodeLine {
  std::size_t line_no;
  std::string text;
  friend bool operator==(const CodeLine&, const CodeLine&) = default;
};

struct CodeWindow {
  std::string file_path;
  std::size_t cursor_line = 1;
  std::vector<CodeLine> lines;

  std::size_t first_line() const { return lines.empty() ? 0 : lines.front().line_no; }
  std::size_t last_line() const { return lines.empty() ? 0 : lines.back().line_no; }
  friend bool operator==(const CodeWindow&, const CodeWindow&) = default;
};

enum class Role { user, responder, correction };

inline const char* to_string(Role r) {
  switch (r) {
    case Role::user: return "user";
    case Role::responder: return "responder";
    case Role::correction: return "correction";
  }
  return "user";
}

struct ChatTurn {
  Role role = Role::user;
  std::string text;
  std::chrono::system_clock::time_point timestamp{};
  friend bool operator==(const ChatTurn& a, const ChatTurn& b) { return a.role == b.role && a.text == b.text; }
};

/// Ordered chat turns, newest last.
using ChatContext = std::vector<ChatTurn>;

struct ProjectExcerpt {
  std::string file_path;
  std::string text;
  friend bool operator==(const ProjectExcerpt&, const ProjectExcerpt&) = default;
};

struct ProjectContext {
  std::vector<ProjectExcerpt> excerpts;
  friend bool operator==(const ProjectContext&, const ProjectContext&) = default;
};

struct ContextBundle {
  std::string user_prompt;
  std::optional<CodeWindow> code;
  ChatContext history;  // turns before the current prompt
  ProjectContext project;
  std::vector<Finding> log_excerpt;
  std::size_t total_chars = 0;
};

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.emplace_back(text.substr(start));
      break;
    }
    std::string line(text.substr(start, nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

/// The 100 lines centered on the cursor: 50 above, the cursor line and 49
/// below, shifted to stay inside the file.
inline CodeWindow extract_code_window(std::string_view file_text, std::size_t cursor_line,
                                      std::string file_path = {}) {
  const auto lines = split_lines(file_text);
  const std::size_t n = lines.size();
  if (cursor_line < 1 || cursor_line > std::max<std::size_t>(n, 1)) {
    throw Error(ErrorKind::invalid_cursor,
                "cursor line " + std::to_string(cursor_line) + " outside 1.." + std::to_string(std::max<std::size_t>(n, 1)));
  }
  CodeWindow w;
  w.file_path = std::move(file_path);
  w.cursor_line = cursor_line;
  if (n == 0) return w;
  std::size_t first = 1, last = n;
  if (n > kCodeWindowLines) {
    // Signed arithmetic keeps the clamp readable.
    long f = static_cast<long>(cursor_line) - static_cast<long>(kLinesAboveCursor);
    long l = static_cast<long>(cursor_line) + static_cast<long>(kCodeWindowLines - kLinesAboveCursor - 1);
    if (f < 1) {
      l += 1 - f;
      f = 1;
    }
    if (l > static_cast<long>(n)) {
      f -= l - static_cast<long>(n);
      l = static_cast<long>(n);
    }
    first = static_cast<std::size_t>(f);
    last = static_cast<std::size_t>(l);
  }
  for (std::size_t i = first; i <= last; ++i) w.lines.push_back({i, lines[i - 1]});
  return w;
}

namespace context_detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Truncates to at most `cap` bytes including the marker, on a UTF-8 boundary.
inline std::string cap_excerpt(const std::string& text, std::size_t cap) {
  if (text.size() <= cap) return text;
  std::size_t keep = cap - kTruncationMarker.size();
  while (keep > 0 && (static_cast<unsigned char>(text[keep]) & 0xc0) == 0x80) --keep;
  return text.substr(0, keep) + std::string(kTruncationMarker);
}

inline bool is_readme(const std::string& name) { return lower(name).rfind("readme", 0) == 0; }

inline bool is_index(const std::string& name) { return lower(name).rfind("index.", 0) == 0; }

}  // namespace context_detail

/// README* files at the project root plus index.* files at the root and in
/// first-level directories, each capped at 1500 characters.
inline ProjectContext gather_project_context(const std::filesystem::path& project_root,
                                             std::size_t per_file_cap = kProjectExcerptCap) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(project_root, ec)) {
    throw Error(ErrorKind::io_error, "project root is not a readable directory: " + project_root.string());
  }
  std::vector<fs::path> picks;
  auto scan = [&](const fs::path& dir, bool root_level) {
    std::error_code iec;
    fs::directory_iterator it(dir, iec);
    if (iec) {
      if (root_level) throw Error(ErrorKind::io_error, "cannot list " + dir.string() + ": " + iec.message());
      return;
    }
    for (const auto& entry : it) {
      if (!entry.is_regular_file(iec)) continue;
      const std::string name = entry.path().filename().string();
      if ((root_level && context_detail::is_readme(name)) || context_detail::is_index(name)) {
        picks.push_back(entry.path());
      }
    }
  };
  scan(project_root, true);
  for (const auto& entry : fs::directory_iterator(project_root, ec)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory(ec) || name.empty() || name[0] == '.' || name == "node_modules") continue;
    scan(entry.path(), false);
  }
  std::vector<std::pair<std::string, fs::path>> ordered;
  for (const auto& p : picks) ordered.emplace_back(p.lexically_relative(project_root).generic_string(), p);
  // README files first, then index files, each alphabetically.
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    const bool ra = context_detail::is_readme(a.first), rb = context_detail::is_readme(b.first);
    if (ra != rb) return ra;
    return a.first < b.first;
  });
  ProjectContext ctx;
  for (const auto& [rel, path] : ordered) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const Error&) {
      continue;
    }
    ctx.excerpts.push_back({rel, context_detail::cap_excerpt(text, per_file_cap)});
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Log relevance.

namespace context_detail {

inline std::set<std::string> word_tokens(std::string_view text) {
  std::set<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.insert(cur);
    cur.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

// `name` occurs on its own, not as the tail of a longer path or word.
inline bool mentions_name(const std::string& haystack, const std::string& name) {
  if (name.empty()) return false;
  for (auto pos = haystack.find(name); pos != std::string::npos; pos = haystack.find(name, pos + 1)) {
    if (pos == 0) return true;
    const unsigned char prev = static_cast<unsigned char>(haystack[pos - 1]);
    if (prev != '/' && prev != '\\' && prev != '-' && prev != '_' && prev != '.' && !std::isalnum(prev)) return true;
  }
  return false;
}

/// Whether `<tag` occurs as markup, so that "a" matches `<a href>` but not the article.
inline bool mentions_tag(const std::string& haystack, const std::string& tag) {
  if (tag.empty()) return false;
  const std::string open = "<" + tag;
  for (auto pos = haystack.find(open); pos != std::string::npos; pos = haystack.find(open, pos + 1)) {
    const std::size_t after = pos + open.size();
    if (after == haystack.size()) return true;
    const char c = haystack[after];
    if (c == '>' || c == '/' || std::isspace(static_cast<unsigned char>(c))) return true;
  }
  return false;
}

inline std::vector<std::string> fenced_blocks(std::string_view markdown) {
  std::vector<std::string> blocks;
  std::size_t pos = 0;
  while (true) {
    const auto open = markdown.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto nl = markdown.find('\n', open);
    if (nl == std::string_view::npos) break;
    const auto close = markdown.find("```", nl + 1);
    const std::size_t end = close == std::string_view::npos ? markdown.size() : close;
    blocks.emplace_back(markdown.substr(nl + 1, end - nl - 1));
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  return blocks;
}

}  // namespace context_detail

/// Log context order: impact rank, then file and span.
inline bool log_order_less(const Finding& a, const Finding& b) {
  if (a.impact != b.impact) return impact_rank(a.impact) < impact_rank(b.impact);
  return finding_less(a, b);
}

/// Findings relevant to the conversation: the finding's file (path, or base
/// name on its own) occurs in the last two user turns or the last responder code
/// blocks, the element's tag occurs as markup (`<input`), or its id or one
/// of its classes occurs as a word there. At most 10, most severe first.
inline std::vector<Finding> get_log_context(const std::vector<Finding>& findings, const ChatContext& chat,
                                            std::size_t cap = kLogContextCap) {
  std::string haystack;
  std::size_t users = 0;
  bool responder_seen = false;
  for (auto it = chat.rbegin(); it != chat.rend(); ++it) {
    if (it->role == Role::user && users < 2) {
      ++users;
      haystack += it->text;
      haystack += '\n';
    } else if (it->role == Role::responder && !responder_seen) {
      responder_seen = true;
      for (const auto& block : context_detail::fenced_blocks(it->text)) {
        haystack += block;
        haystack += '\n';
      }
    }
  }
  const std::string lowered = context_detail::lower(haystack);
  const auto words = context_detail::word_tokens(haystack);

  std::vector<Finding> out;
  for (const auto& f : findings) {
    const std::string file = context_detail::lower(f.element.span.file_path);
    const auto slash = file.find_last_of('/');
    const std::string base = slash == std::string::npos ? file : file.substr(slash + 1);
    bool relevant = (!file.empty() && lowered.find(file) != std::string::npos) ||
                    context_detail::mentions_name(lowered, base);
    if (!relevant) relevant = context_detail::mentions_tag(lowered, context_detail::lower(f.element.tag));
    if (!relevant) {
      std::vector<std::string> tokens;
      if (const auto* id = f.element.attr("id")) tokens.push_back(context_detail::lower(*id));
      if (const auto* cls = f.element.attr("class")) {
        for (const auto& t : context_detail::word_tokens(*cls)) tokens.push_back(t);
      }
      relevant = std::any_of(tokens.begin(), tokens.end(),
                             [&](const std::string& t) { return !t.empty() && words.count(t) > 0; });
    }
    if (relevant) out.push_back(f);
  }
  std::stable_sort(out.begin(), out.end(), log_order_less);
  if (out.size() > cap) out.resize(cap);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization and budget.

inline std::string serialize_finding(const Finding& f) {
  std::string s = "- " + std::string(to_string(f.impact)) + " " + f.rule_id + " " + f.element.span.file_path + ":" +
                  std::to_string(f.element.span.start_line) + " " + f.element.selector;
  if (f.state != State::default_state) s += " :" + std::string(to_string(f.state));
  s += " (WCAG " + f.wcag_tag + "): " + f.message + "\n";
  return s;
}

/// Fixed layout: PROMPT, CODE, FINDINGS, PROJECT, HISTORY. Empty sections
/// other than PROMPT are omitted.
inline std::string serialize_bundle(const ContextBundle& b) {
  std::string out = "### PROMPT\n" + b.user_prompt + "\n";
  if (b.code && !b.code->lines.empty()) {
    out += "### CODE " + b.code->file_path + " lines " + std::to_string(b.code->first_line()) + "-" +
           std::to_string(b.code->last_line()) + " cursor " + std::to_string(b.code->cursor_line) + "\n";
    for (const auto& l : b.code->lines) out += std::to_string(l.line_no) + "| " + l.text + "\n";
  }
  if (!b.log_excerpt.empty()) {
    out += "### FINDINGS\n";
    for (const auto& f : b.log_excerpt) out += serialize_finding(f);
  }
  if (!b.project.excerpts.empty()) {
    out += "### PROJECT\n";
    for (const auto& e : b.project.excerpts) out += "--- " + e.file_path + "\n" + e.text + "\n";
  }
  if (!b.history.empty()) {
    out += "### HISTORY\n";
    for (const auto& t : b.history) out += "[" + std::string(to_string(t.role)) + "] " + t.text + "\n";
  }
  return out;
}

/// Drops material until the serialized bundle fits `budget_chars` (bytes).
/// Drop order: oldest chat turns, project excerpts (last first), code lines
/// farthest from the cursor (down to the cursor line), findings beyond the
/// top three, then the cursor line, then the remaining findings. The user
/// prompt is never altered.
inline ContextBundle apply_budget(ContextBundle bundle, std::size_t budget_chars = kDefaultBudgetChars) {
  ContextBundle minimal;
  minimal.user_prompt = bundle.user_prompt;
  if (serialize_bundle(minimal).size() > budget_chars) {
    throw Error(ErrorKind::prompt_too_large, "user prompt alone exceeds the " + std::to_string(budget_chars) +
                                                 "-character context budget");
  }
  std::stable_sort(bundle.log_excerpt.begin(), bundle.log_excerpt.end(), log_order_less);
  auto size = [&] { return serialize_bundle(bundle).size(); };
  auto fits = [&] { return size() <= budget_chars; };

  while (!fits() && !bundle.history.empty()) bundle.history.erase(bundle.history.begin());
  while (!fits() && !bundle.project.excerpts.empty()) bundle.project.excerpts.pop_back();
  if (bundle.code) {
    auto& lines = bundle.code->lines;
    const auto cursor = bundle.code->cursor_line;
    auto dist = [&](const CodeLine& l) { return l.line_no > cursor ? l.line_no - cursor : cursor - l.line_no; };
    while (!fits() && lines.size() > 1) {
      // Farthest first; on a tie the line below the cursor goes first.
      if (dist(lines.front()) > dist(lines.back())) lines.erase(lines.begin());
      else lines.pop_back();
    }
  }
  while (!fits() && bundle.log_excerpt.size() > kProtectedFindings) bundle.log_excerpt.pop_back();
  if (!fits() && bundle.code) bundle.code->lines.clear();
  while (!fits() && !bundle.log_excerpt.empty()) bundle.log_excerpt.pop_back();
  if (bundle.code && bundle.code->lines.empty()) bundle.code.reset();
  bundle.total_chars = size();
  return bundle;
}

}  // namespace codea11y
