#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codea11y/context.hpp"
#include "codea11y/error.hpp"
#include "codea11y/linter.hpp"
#include "codea11y/model_client.hpp"

namespace codea11y {

inline constexpr std::string_view kNoRemindersSentinel = "No reminders needed.";
inline constexpr std::size_t kReminderMaxChars = 200;

// ---------------------------------------------------------------------------
// Prompt templates.

struct PromptTemplate {
  AgentKind agent;
  std::string preamble;
  std::vector<std::string> directives;
  /// Bundle sections the template expects, in serialization order.
  std::vector<std::string> slots;

  std::string render(std::string_view context) const {
    std::string out = "### SYSTEM\n";
    if (!preamble.empty()) out += preamble + "\n";
    for (const auto& d : directives) out += "- " + d + "\n";
    out += context;
    return out;
  }
};

inline const PromptTemplate& responder_template() {
  static const PromptTemplate t{
      AgentKind::responder,
      "You are an accessibility-aware coding assistant working inside the developer's editor.",
      {
          "I am unfamiliar with accessibility and need to write code that conforms with WCAG 2.1 level AA criteria.",
          "Be an accessibility coach that makes me account for all accessibility requirements.",
          "Use reputable sources such as w3.org, webaim.org and provide links and references for additional learning.",
          "Don't give placeholder variables but tell me where to give meaningful values.",
          "Prioritise my current request and don't mention accessibility if I give a generic request like \"Hi\".",
          "Put code in fenced code blocks tagged with their language, and keep explanations short.",
          "Use the CODE and PROJECT sections to match the framework and conventions already in use.",
      },
      {"prompt", "code", "project", "history"},
  };
  return t;
}

inline const PromptTemplate& correction_template() {
  static const PromptTemplate t{
      AgentKind::correction,
      "You review automated accessibility checker output for the code under discussion.",
      {
          "Review the accessibility checker log and provide feedback to fix errors relevant to current chat context.",
          "If a log error relevant to current chat context occurs, provide a code snippet to fix it.",
          "Only discuss the errors listed under FINDINGS.",
      },
      {"prompt", "findings", "history"},
  };
  return t;
}

inline const PromptTemplate& reminder_template() {
  static const PromptTemplate t{
      AgentKind::reminder,
      "You check the assistant's last answer for manual follow-up the developer must do.",
      {
          "Is there an additional step required by the developer to meet accessibility standards after pasting code?",
          "Reminder should be single line. Be conservative in your response, if not needed, say \"No reminders needed.\"",
          "For example, remind the developer to replace the placeholder attributes with meaningful values or labels, or "
          "visually inspect element for colour contrast when needed.",
      },
      {"prompt", "history", "response"},
  };
  return t;
}

/// Used when strict invocation is on and the message did not mention the assistant.
inline const PromptTemplate& plain_template() {
  static const PromptTemplate t{AgentKind::plain, "You are a helpful coding assistant.", {}, {"prompt", "code", "project", "history"}};
  return t;
}

// ---------------------------------------------------------------------------
// Responses.

struct CodeBlock {
  std::string language;
  std::string code;
  friend bool operator==(const CodeBlock&, const CodeBlock&) = default;
};

struct AgentResponse {
  std::string markdown;
  std::vector<CodeBlock> code_blocks;
  std::vector<std::string> citations;
  friend bool operator==(const AgentResponse&, const AgentResponse&) = default;
};

/// Splits markdown into its fenced code blocks (in order) and cited URLs.
inline AgentResponse parse_response(std::string markdown) {
  AgentResponse r;
  std::size_t pos = 0;
  const std::string& md = markdown;
  while (true) {
    const auto open = md.find("```", pos);
    if (open == std::string::npos) break;
    const auto nl = md.find('\n', open);
    if (nl == std::string::npos) break;
    CodeBlock b;
    b.language = detail::lower_trim(std::string_view(md).substr(open + 3, nl - open - 3));
    const auto close = md.find("```", nl + 1);
    const std::size_t end = close == std::string::npos ? md.size() : close;
    b.code = md.substr(nl + 1, end - nl - 1);
    if (!b.code.empty() && b.code.back() == '\n') b.code.pop_back();
    r.code_blocks.push_back(std::move(b));
    if (close == std::string::npos) break;
    pos = close + 3;
  }
  static const std::regex kUrl(R"(https?://[^\s<>()\[\]"'`]+)");
  std::set<std::string> seen;
  for (auto it = std::sregex_iterator(md.begin(), md.end(), kUrl); it != std::sregex_iterator(); ++it) {
    std::string url = it->str();
    while (!url.empty() && (url.back() == '.' || url.back() == ',' || url.back() == ';' || url.back() == ':')) {
      url.pop_back();
    }
    if (seen.insert(url).second) r.citations.push_back(url);
  }
  r.markdown = std::move(markdown);
  return r;
}

// ---------------------------------------------------------------------------
// Responder.

inline AgentResponse responder_run(const ContextBundle& bundle, ModelClient& client,
                                   const PromptTemplate& tmpl = responder_template()) {
  ModelRequest req{tmpl.agent, tmpl.render(serialize_bundle(bundle))};
  return parse_response(client.complete(req));
}

// ---------------------------------------------------------------------------
// Correction.

namespace agent_detail {

inline std::string title_case(std::string s) {
  for (char& c : s) {
    if (c == '-' || c == '_') c = ' ';
  }
  bool start = true;
  for (char& c : s) {
    if (start && std::isalpha(static_cast<unsigned char>(c))) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    start = c == ' ';
  }
  return s;
}

inline std::string rebuild_start_tag(const ElementRef& el, std::vector<std::pair<std::string, std::string>> extra = {}) {
  std::string out = "<" + (el.tag.empty() ? std::string("element") : el.tag);
  auto attrs = el.attrs;
  for (auto& [k, v] : extra) {
    auto it = std::find_if(attrs.begin(), attrs.end(), [&](const auto& a) { return a.first == k; });
    if (it != attrs.end()) it->second = v;
    else attrs.emplace_back(k, v);
  }
  for (const auto& [k, v] : attrs) out += " " + k + "=\"" + v + "\"";
  return out + ">";
}

// Human-readable field name derived from the control's identifying attributes.
inline std::string field_name(const ElementRef& el) {
  for (const char* key : {"name", "id", "placeholder", "type"}) {
    if (const auto* v = el.attr(key); v && !v->empty()) return title_case(*v);
  }
  return "Field";
}

}  // namespace agent_detail

/// Deterministic fix snippet for one finding, used when the model answer
/// carries no code.
inline CodeBlock suggest_fix(const Finding& f) {
  using agent_detail::rebuild_start_tag;
  const ElementRef& el = f.element;
  const std::string where = "<!-- " + f.element.span.file_path + ":" + std::to_string(f.element.span.start_line) +
                            " (" + f.element.selector + ") -->\n";
  if (f.rule_id == "form-label") {
    const std::string label = agent_detail::field_name(el);
    if (const auto* id = el.attr("id"); id && !id->empty()) {
      return {"html", where + "<label for=\"" + *id + "\">" + label + "</label>\n" + rebuild_start_tag(el)};
    }
    return {"html", where + "<label>" + label + "\n  " + rebuild_start_tag(el) + "\n</label>"};
  }
  if (f.rule_id.rfind("img-alt", 0) == 0) {
    return {"html", where + "<!-- Write alt text that states what the image shows and why it is on the page -->\n" +
                        rebuild_start_tag(el, {{"alt", "(what the image shows)"}})};
  }
  if (f.rule_id.rfind("link-name", 0) == 0) {
    return {"html", where + "<!-- Make the link text name its destination, e.g. \"Read the installation guide\" -->\n" +
                        rebuild_start_tag(el) + "(destination name)</a>"};
  }
  if (f.rule_id == "button-name") {
    return {"html", where + "<!-- Give the button visible text describing its action -->\n" + rebuild_start_tag(el) +
                        "(action name)</button>"};
  }
  if (f.rule_id == "color-contrast") {
    return {"css", "/* " + f.element.span.file_path + ":" + std::to_string(f.element.span.start_line) + " " +
                       f.element.selector + (f.state == State::default_state ? "" : ":" + std::string(to_string(f.state))) +
                       " */\n/* " + f.message + " */\n/* Darken the text or lighten the background until the ratio "
                       "reaches 4.5:1 (3:1 for large text). */"};
  }
  if (f.rule_id == "tabindex-positive") {
    return {"html", where + rebuild_start_tag(el, {{"tabindex", "0"}})};
  }
  if (f.rule_id == "click-no-keyboard") {
    auto attrs = el.attrs;
    std::string out = "<button type=\"button\"";
    for (const auto& [k, v] : attrs) {
      if (k != "role" && k != "tabindex") out += " " + k + "=\"" + v + "\"";
    }
    return {"html", where + "<!-- A native button is focusable and activates with Enter and Space -->\n" + out + ">...</button>"};
  }
  return {"html", where + "<!-- " + f.rule_id + ": " + f.message + " -->"};
}

namespace agent_detail {

inline ContextBundle conversation_bundle(const ChatContext& chat) {
  ContextBundle b;
  auto last_user = std::find_if(chat.rbegin(), chat.rend(), [](const ChatTurn& t) { return t.role == Role::user; });
  if (last_user != chat.rend()) {
    b.user_prompt = last_user->text;
    const auto idx = static_cast<std::size_t>(std::distance(chat.begin(), last_user.base()) - 1);
    for (std::size_t i = 0; i < chat.size(); ++i) {
      if (i != idx) b.history.push_back(chat[i]);
    }
  } else {
    b.history = chat;
  }
  return b;
}

}  // namespace agent_detail

/// Asks the model to address relevant checker findings. Returns nullopt
/// without calling the model when there is nothing to address. If the model
/// answer carries no code, a fix snippet per finding (first three) is
/// appended.
inline std::optional<AgentResponse> correction_run(const std::vector<Finding>& log_excerpt, const ChatContext& chat,
                                                   ModelClient& client, std::size_t budget_chars = kDefaultBudgetChars) {
  if (log_excerpt.empty()) return std::nullopt;
  ContextBundle b = agent_detail::conversation_bundle(chat);
  b.log_excerpt = log_excerpt;
  b = apply_budget(std::move(b), budget_chars);
  const auto& tmpl = correction_template();
  std::string text = client.complete({tmpl.agent, tmpl.render(serialize_bundle(b))});
  AgentResponse r = parse_response(text);
  if (r.code_blocks.empty()) {
    std::string md = detail::lower_trim(text).empty()
                         ? std::string("The accessibility checker reports issues in the code under discussion:\n")
                         : text + "\n\n";
    if (detail::lower_trim(text).empty()) {
      for (const auto& f : b.log_excerpt) md += serialize_finding(f);
    }
    const std::size_t n = std::min<std::size_t>(b.log_excerpt.size(), kProtectedFindings);
    for (std::size_t i = 0; i < n; ++i) {
      const CodeBlock fix = suggest_fix(b.log_excerpt[i]);
      md += "\n```" + fix.language + "\n" + fix.code + "\n```\n";
    }
    r = parse_response(std::move(md));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Placeholder detection.

enum class PlaceholderKind { empty_attr, todo_comment, template_identifier, lexicon_phrase };

inline const char* to_string(PlaceholderKind k) {
  switch (k) {
    case PlaceholderKind::empty_attr: return "empty_attr";
    case PlaceholderKind::todo_comment: return "todo_comment";
    case PlaceholderKind::template_identifier: return "template_identifier";
    case PlaceholderKind::lexicon_phrase: return "lexicon_phrase";
  }
  return "empty_attr";
}

struct PlaceholderFinding {
  PlaceholderKind kind;
  std::size_t block = 0;   // index into the code block list
  std::size_t offset = 0;  // byte offset within the block
  std::size_t length = 0;
  std::string excerpt;     // verbatim block.substr(offset, length)
};

/// Phrases that only appear in stub values an assistant expects the
/// developer to replace.
inline const std::vector<std::string>& placeholder_lexicon() {
  static const std::vector<std::string> kPhrases{
      "your actual image attributes", "your image description", "description of the image",
      "describe the image here",      "image description here", "alt text here",
      "label text here",              "your label here",        "lorem ipsum",
      "insert description",           "insert alt text",        "placeholder text",
  };
  return kPhrases;
}

namespace agent_detail {

inline bool accessibility_attr(std::string_view name) {
  const std::string n = detail::lower_trim(name);
  return n == "alt" || n == "aria-label" || n == "aria-labelledby" || n == "aria-describedby" || n == "title" ||
         n == "label" || n.find("alt") != std::string::npos || n.find("label") != std::string::npos;
}

inline bool empty_value(std::string_view v) {
  std::string s = detail::lower_trim(v);
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') s = detail::lower_trim(std::string_view(s).substr(1, s.size() - 2));
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'' || s.front() == '`') && s.back() == s.front()) {
    return detail::lower_trim(std::string_view(s).substr(1, s.size() - 2)).empty();
  }
  return false;
}

inline std::string escape_regex(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::string_view(R"(\^$.|?*+()[]{})").find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

// True when the identifier is declared, imported, destructured or taken as a
// parameter anywhere in the window.
inline bool identifier_defined(const std::string& window, const std::string& ident) {
  if (ident == "this" || ident == "props") return window.find(ident) != std::string::npos &&
                                                    (ident == "this" || std::regex_search(window, std::regex(R"(\bprops\b\s*[,)])")));
  const std::string id = escape_regex(ident);
  const std::vector<std::regex> patterns{
      std::regex(R"(\b(?:const|let|var|function|class)\s+)" + id + R"(\b)"),
      std::regex(R"(\b(?:const|let|var)\s*[\[{][^\]}=]*\b)" + id + R"(\b)"),
      std::regex(R"(\bimport\s+[^;]*\b)" + id + R"(\b)"),
      std::regex(R"(\(\s*\{?[^()]*\b)" + id + R"(\b[^()]*\}?\s*\)\s*(?:=>|\{))"),
  };
  return std::any_of(patterns.begin(), patterns.end(), [&](const std::regex& re) { return std::regex_search(window, re); });
}

inline std::string enclosing_tag(const std::string& code, std::size_t offset) {
  const auto lt = code.rfind('<', offset);
  if (lt == std::string::npos) return {};
  const auto gt_before = code.rfind('>', offset);
  if (gt_before != std::string::npos && gt_before > lt) return {};
  const auto gt = code.find('>', offset);
  return detail::lower_trim(std::string_view(code).substr(lt, (gt == std::string::npos ? code.size() : gt + 1) - lt));
}

inline bool decorative_tag(const std::string& tag) {
  static const std::regex kDecorative(R"re(role\s*=\s*["'{]?\s*(presentation|none)|aria-hidden\s*=\s*["'{]?\s*true)re");
  return std::regex_search(tag, kDecorative);
}

struct Range {
  std::size_t begin, end;
};

inline void scan_comments(const std::string& code, std::size_t block, std::vector<PlaceholderFinding>& out,
                          std::vector<Range>& comment_ranges) {
  static const std::regex kMarker(R"((add this line|add your text here|your text here|replace this|\btodo\b|\bfixme\b))",
                                  std::regex::icase);
  std::size_t i = 0;
  while (i < code.size()) {
    std::size_t begin = std::string::npos, end = std::string::npos;
    if (code.compare(i, 4, "<!--") == 0) {
      begin = i;
      const auto close = code.find("-->", i + 4);
      end = close == std::string::npos ? code.size() : close + 3;
    } else if (code.compare(i, 2, "/*") == 0) {
      begin = i;
      const auto close = code.find("*/", i + 2);
      end = close == std::string::npos ? code.size() : close + 2;
    } else if (code.compare(i, 2, "//") == 0 && (i == 0 || code[i - 1] != ':')) {
      begin = i;
      const auto nl = code.find('\n', i);
      end = nl == std::string::npos ? code.size() : nl;
    } else if (code[i] == '"' || code[i] == '\'' || code[i] == '`') {
      // Skip string literals so URLs and quoted text are not read as comments.
      const auto close = code.find(code[i], i + 1);
      const auto nl = code.find('\n', i + 1);
      i = (close == std::string::npos || (nl != std::string::npos && nl < close && code[i] != '`')) ? i + 1 : close + 1;
      continue;
    }
    if (begin == std::string::npos) {
      ++i;
      continue;
    }
    std::string text = code.substr(begin, end - begin);
    while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) text.pop_back();
    comment_ranges.push_back({begin, end});
    if (std::regex_search(text, kMarker)) {
      out.push_back({PlaceholderKind::todo_comment, block, begin, text.size(), text});
    }
    i = end;
  }
}

}  // namespace agent_detail

/// Finds stub values in generated code that the developer must replace:
/// empty accessibility attributes and empty labels, marker comments
/// ("Add this line", TODO), undefined template identifiers in
/// accessibility attributes (`alt={imgAlt}`), and stub phrases. Results are
/// ordered by (block, offset).
inline std::vector<PlaceholderFinding> detect_placeholders(const std::vector<CodeBlock>& code_blocks) {
  std::vector<PlaceholderFinding> out;
  std::string window;
  for (const auto& b : code_blocks) window += b.code + "\n";

  static const std::regex kAttr(R"(([A-Za-z_][-A-Za-z0-9_:.]*)\s*=\s*("[^"\n]*"|'[^'\n]*'|\{[^}\n]*\}))");
  static const std::regex kEmptyLabel(R"(<label\b[^>]*>\s*</label>)", std::regex::icase);
  static const std::regex kTemplateIdent(R"(^\{\s*([A-Za-z_$][\w$]*)(?:\.[\w$.]+)?\s*\}$)");

  for (std::size_t bi = 0; bi < code_blocks.size(); ++bi) {
    const std::string& code = code_blocks[bi].code;
    std::vector<agent_detail::Range> comments;
    agent_detail::scan_comments(code, bi, out, comments);
    auto in_comment = [&](std::size_t pos) {
      return std::any_of(comments.begin(), comments.end(), [&](const auto& r) { return pos >= r.begin && pos < r.end; });
    };

    for (auto it = std::sregex_iterator(code.begin(), code.end(), kAttr); it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      const std::size_t pos = static_cast<std::size_t>(m.position(0));
      if (pos > 0 && !std::isspace(static_cast<unsigned char>(code[pos - 1])) && code[pos - 1] != '<' &&
          code[pos - 1] != '{' && code[pos - 1] != '(' && code[pos - 1] != ',') {
        continue;
      }
      if (in_comment(pos)) continue;
      const std::string name = m.str(1);
      const std::string value = m.str(2);
      const std::string lname = detail::lower_trim(name);
      if ((lname == "alt" || lname == "aria-label" || lname == "aria-labelledby") && agent_detail::empty_value(value)) {
        if (lname == "alt" && agent_detail::decorative_tag(agent_detail::enclosing_tag(code, pos))) continue;
        out.push_back({PlaceholderKind::empty_attr, bi, pos, static_cast<std::size_t>(m.length(0)), m.str(0)});
        continue;
      }
      std::smatch idm;
      if (agent_detail::accessibility_attr(name) && std::regex_match(value, idm, kTemplateIdent)) {
        if (!agent_detail::identifier_defined(window, idm.str(1))) {
          out.push_back({PlaceholderKind::template_identifier, bi, pos, static_cast<std::size_t>(m.length(0)), m.str(0)});
        }
      }
    }
    for (auto it = std::sregex_iterator(code.begin(), code.end(), kEmptyLabel); it != std::sregex_iterator(); ++it) {
      const std::size_t pos = static_cast<std::size_t>(it->position(0));
      if (in_comment(pos)) continue;
      out.push_back({PlaceholderKind::empty_attr, bi, pos, static_cast<std::size_t>(it->length(0)), it->str(0)});
    }
    const std::string lowered = context_detail::lower(code);
    for (const auto& phrase : placeholder_lexicon()) {
      for (auto pos = lowered.find(phrase); pos != std::string::npos; pos = lowered.find(phrase, pos + phrase.size())) {
        if (in_comment(pos)) continue;
        out.push_back({PlaceholderKind::lexicon_phrase, bi, pos, phrase.size(), code.substr(pos, phrase.size())});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const PlaceholderFinding& a, const PlaceholderFinding& b) {
    if (a.block != b.block) return a.block < b.block;
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.kind < b.kind;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Reminder.

enum class ReminderSource { model, detector, both };

inline const char* to_string(ReminderSource s) {
  switch (s) {
    case ReminderSource::model: return "model";
    case ReminderSource::detector: return "detector";
    case ReminderSource::both: return "both";
  }
  return "model";
}

struct Reminder {
  std::string text;  // one line, at most 200 bytes
  ReminderSource source = ReminderSource::model;
  friend bool operator==(const Reminder&, const Reminder&) = default;
};

/// Joins non-empty trimmed lines with "; ".
inline std::string collapse_to_line(std::string_view text) {
  std::string out;
  for (const auto& line : split_lines(text)) {
    std::string t = css::detail::trim(line);
    if (t.empty()) continue;
    if (!out.empty()) out += "; ";
    out += t;
  }
  for (char& c : out) {
    if (c == '\r' || c == '\n') c = ' ';
  }
  return out;
}

/// Clips to `max_bytes` on a UTF-8 boundary, marking the cut with "...".
inline std::string clip_line(std::string s, std::size_t max_bytes = kReminderMaxChars) {
  if (s.size() <= max_bytes) return s;
  std::size_t keep = max_bytes - 3;
  while (keep > 0 && (static_cast<unsigned char>(s[keep]) & 0xc0) == 0x80) --keep;
  return s.substr(0, keep) + "...";
}

inline std::string detector_reminder_text(const std::vector<PlaceholderFinding>& found) {
  std::vector<std::string> excerpts;
  for (const auto& f : found) {
    std::string e = collapse_to_line(f.excerpt);
    if (e.size() > 60) e = clip_line(e, 60);
    if (std::find(excerpts.begin(), excerpts.end(), e) == excerpts.end()) excerpts.push_back(e);
    if (excerpts.size() == 3) break;
  }
  std::string list;
  for (const auto& e : excerpts) list += (list.empty() ? "" : ", ") + e;
  return "Replace the placeholder values in the suggested code with meaningful text before using it: " + list;
}

/// Decides whether the developer needs a manual-step reminder. A reminder is
/// produced when the model gives anything other than the sentinel, or when
/// the placeholder detector finds stubs in the response code. A model
/// failure degrades to detector-only.
inline std::optional<Reminder> reminder_run(const ChatContext& chat, const AgentResponse& last_response,
                                            ModelClient& client, std::size_t budget_chars = kDefaultBudgetChars) {
  const auto found = detect_placeholders(last_response.code_blocks);

  std::optional<std::string> model_line;
  try {
    // Turns after the latest user message are the answer under review; it is
    // sent once, under RESPONSE.
    auto last_user = std::find_if(chat.rbegin(), chat.rend(), [](const ChatTurn& t) { return t.role == Role::user; });
    ChatContext history(chat.begin(), last_user.base());
    ContextBundle b = apply_budget(agent_detail::conversation_bundle(history), budget_chars);
    const auto& tmpl = reminder_template();
    const std::string prompt = tmpl.render(serialize_bundle(b) + "### RESPONSE\n" + last_response.markdown + "\n");
    const std::string line = collapse_to_line(client.complete({tmpl.agent, prompt}));
    if (!line.empty() && line != kNoRemindersSentinel) model_line = line;
  } catch (const AgentUnavailable&) {
    // detector-only
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::prompt_too_large) throw;
  }

  if (!model_line && found.empty()) return std::nullopt;
  Reminder r;
  if (model_line && !found.empty()) {
    r.source = ReminderSource::both;
    r.text = *model_line + "; " + detector_reminder_text(found);
  } else if (model_line) {
    r.source = ReminderSource::model;
    r.text = *model_line;
  } else {
    r.source = ReminderSource::detector;
    r.text = detector_reminder_text(found);
  }
  r.text = clip_line(collapse_to_line(r.text));
  return r;
}

}  // namespace codea11y
