#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "codea11y/color.hpp"
#include "codea11y/css.hpp"
#include "codea11y/error.hpp"
#include "codea11y/html.hpp"

namespace codea11y {

enum class Impact { critical, serious, moderate, needs_review };

inline const char* to_string(Impact i) {
  switch (i) {
    case Impact::critical: return "critical";
    case Impact::serious: return "serious";
    case Impact::moderate: return "moderate";
    case Impact::needs_review: return "needs_review";
  }
  return "needs_review";
}

/// Lower is more severe.
inline int impact_rank(Impact i) { return static_cast<int>(i); }

inline std::optional<Impact> impact_from_string(std::string_view s) {
  if (s == "critical") return Impact::critical;
  if (s == "serious") return Impact::serious;
  if (s == "moderate") return Impact::moderate;
  if (s == "needs_review") return Impact::needs_review;
  return std::nullopt;
}

inline std::optional<State> state_from_string(std::string_view s) {
  for (State st : kAllStates) {
    if (s == to_string(st)) return st;
  }
  return std::nullopt;
}

struct ElementRef {
  std::string selector;
  SourceSpan span;
  std::string tag;
  std::vector<std::pair<std::string, std::string>> attrs;

  const std::string* attr(std::string_view name) const {
    for (const auto& [k, v] : attrs) {
      if (k == name) return &v;
    }
    return nullptr;
  }
};

struct Finding {
  std::string rule_id;
  Impact impact = Impact::needs_review;
  ElementRef element;
  std::string message;
  std::string wcag_tag;
  State state = State::default_state;
};

inline bool finding_less(const Finding& a, const Finding& b) {
  if (a.element.span != b.element.span) return span_less(a.element.span, b.element.span);
  if (a.rule_id != b.rule_id) return a.rule_id < b.rule_id;
  if (a.state != b.state) return a.state < b.state;
  return a.message < b.message;
}

inline bool operator==(const Finding& a, const Finding& b) {
  return a.rule_id == b.rule_id && a.impact == b.impact && a.element.selector == b.element.selector &&
         a.element.span == b.element.span && a.message == b.message && a.wcag_tag == b.wcag_tag &&
         a.state == b.state;
}

struct RuleInfo {
  std::string_view id;
  Impact impact;
  std::string_view wcag_tag;
  std::string_view summary;
};

/// Every rule the linter knows. Ids are stable and appear in the log.
inline const std::vector<RuleInfo>& rule_registry() {
  static const std::vector<RuleInfo> kRules{
      {"img-alt", Impact::critical, "1.1.1", "Images must have an alt attribute"},
      {"img-alt-empty", Impact::needs_review, "1.1.1", "Empty alt marks an image as decorative; confirm it is"},
      {"img-alt-uninformative", Impact::serious, "1.1.1", "Alt text must describe the image"},
      {"form-label", Impact::critical, "4.1.2", "Form controls must have an associated label"},
      {"link-name", Impact::serious, "2.4.4", "Links must have discernible text"},
      {"link-name-uninformative", Impact::moderate, "2.4.4", "Link text must describe its destination"},
      {"button-name", Impact::critical, "4.1.2", "Buttons must have discernible text"},
      {"color-contrast", Impact::serious, "1.4.3", "Text must meet the minimum contrast ratio"},
      {"heading-order", Impact::moderate, "1.3.1", "Heading levels should only increase by one"},
      {"tabindex-positive", Impact::serious, "2.4.3", "Avoid positive tabindex values"},
      {"click-no-keyboard", Impact::serious, "2.1.1", "Click handlers on non-interactive elements need keyboard support"},
      {"style-unresolved", Impact::needs_review, "1.4.3", "Styles that could not be resolved statically"},
  };
  return kRules;
}

inline const RuleInfo* find_rule(std::string_view id) {
  for (const auto& r : rule_registry()) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

/// Lexicon of link/alt texts that carry no information on their own.
inline std::vector<std::string> default_uninformative_lexicon() {
  return {"click here", "alt", "image", "here", "link", "click", "more", "read more",
          "learn more", "picture", "photo", "this", "this link", "go"};
}

struct RuleConfig {
  std::set<std::string> enabled;  // rule ids; empty = every registered rule
  ContrastThresholds thresholds;
  std::vector<std::string> uninformative_lexicon = default_uninformative_lexicon();

  bool is_enabled(std::string_view id) const { return enabled.empty() || enabled.count(std::string(id)) > 0; }
};

namespace lint_detail {

inline std::string lower_trim(std::string_view s) { return codea11y::detail::lower_trim(s); }

inline std::string strip_punct(std::string s) {
  while (!s.empty() && std::ispunct(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::ispunct(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

}  // namespace lint_detail

/// Text that only echoes the field (attribute/tag name) or matches the
/// uninformative lexicon. `min_length` (0 to disable) also flags very short
/// text.
inline bool is_uninformative(std::string_view text, const std::vector<std::string>& lexicon,
                             std::initializer_list<std::string_view> field_names, std::size_t min_length = 0) {
  const std::string t = lint_detail::strip_punct(lint_detail::lower_trim(text));
  if (t.empty()) return true;
  for (const auto& word : lexicon) {
    if (t == word) return true;
  }
  for (auto f : field_names) {
    if (t == f) return true;
  }
  return min_length > 0 && t.size() < min_length;
}

// ---------------------------------------------------------------------------

/// Accessible-name helpers shared by rules and the rubric scorer.
struct NameComputer {
  const html::Document& doc;

  std::string labelledby_text(const html::Node& n) const {
    const auto* ids = n.attr("aria-labelledby");
    if (!ids) return {};
    std::istringstream in(*ids);
    std::string id, out;
    while (in >> id) {
      if (auto e = doc.element_by_id(id)) {
        const std::string t = doc.text_content(*e, true);
        if (!t.empty()) {
          if (!out.empty()) out += ' ';
          out += t;
        }
      }
    }
    return out;
  }

  static std::string trimmed_attr(const html::Node& n, std::string_view name) {
    const auto* v = n.attr(name);
    return v ? lint_detail::lower_trim(*v).empty() ? std::string{} : html::Document::collapse_whitespace(*v) : std::string{};
  }

  /// Name of a link or button: aria-labelledby, aria-label, content
  /// (including image alt), then title.
  std::string link_or_button_name(html::NodeId id) const {
    const html::Node& n = doc.node(id);
    if (auto t = labelledby_text(n); !t.empty()) return t;
    if (auto t = trimmed_attr(n, "aria-label"); !t.empty()) return t;
    if (n.tag == "input") {
      const auto* type = n.attr("type");
      const std::string ty = type ? lint_detail::lower_trim(*type) : "";
      if (ty == "image") return trimmed_attr(n, "alt");
      if (const auto* v = n.attr("value")) return html::Document::collapse_whitespace(*v);
      if (ty == "submit") return "Submit";
      if (ty == "reset") return "Reset";
      return trimmed_attr(n, "title");
    }
    if (auto t = doc.text_content(id, true); !t.empty()) return t;
    return trimmed_attr(n, "title");
  }

  /// Whether a form control has a label via for/id, a wrapping label with
  /// text, aria-label or aria-labelledby.
  bool control_labelled(html::NodeId id) const {
    const html::Node& n = doc.node(id);
    if (!trimmed_attr(n, "aria-label").empty()) return true;
    if (!labelledby_text(n).empty()) return true;
    if (const auto* cid = n.attr("id"); cid && !cid->empty()) {
      for (html::NodeId l : doc.elements_by_tag("label")) {
        const auto* f = doc.node(l).attr("for");
        if (f && *f == *cid && !doc.text_content(l, true).empty()) return true;
      }
    }
    for (html::NodeId a : doc.ancestors(id)) {
      if (doc.node(a).tag == "label") {
        if (!doc.text_content(a, true).empty()) return true;
      }
    }
    return false;
  }
};

/// Form controls that need a label (hidden and button-like inputs excluded).
inline bool is_labelable_control(const html::Node& n) {
  if (n.tag == "select" || n.tag == "textarea") return true;
  if (n.tag != "input") return false;
  const auto* type = n.attr("type");
  const std::string t = type ? lint_detail::lower_trim(*type) : "text";
  return t != "hidden" && t != "submit" && t != "button" && t != "reset" && t != "image";
}

inline bool is_button_like(const html::Node& n) {
  if (n.tag == "button") return true;
  if (n.tag == "input") {
    const auto* type = n.attr("type");
    const std::string t = type ? lint_detail::lower_trim(*type) : "";
    return t == "submit" || t == "button" || t == "reset" || t == "image";
  }
  if (const auto* role = n.attr("role")) return lint_detail::lower_trim(*role) == "button";
  return false;
}

inline bool is_natively_interactive(const html::Node& n) {
  static const std::set<std::string_view> kInteractive{"a", "button", "input", "select", "textarea",
                                                       "summary", "details", "option", "label"};
  if (n.tag == "a") return n.has_attr("href");
  return kInteractive.count(n.tag) > 0;
}

inline std::optional<long> tabindex_of(const html::Node& n) {
  const auto* v = n.attr("tabindex");
  if (!v) return std::nullopt;
  const std::string t = lint_detail::lower_trim(*v);
  char* end = nullptr;
  const long num = std::strtol(t.c_str(), &end, 10);
  if (end == t.c_str()) return std::nullopt;
  return num;
}

inline bool has_click_handler(const html::Node& n) {
  for (const auto& a : n.attrs) {
    if (a.name == "onclick" || a.name == "@click" || a.name == "v-on:click" || a.name == "(click)" ||
        a.name == "ng-click") {
      return true;
    }
  }
  return false;
}

/// Elements whose own text is painted and therefore subject to contrast checks.
inline bool renders_text(const html::Document& doc, html::NodeId id) {
  const html::Node& n = doc.node(id);
  static const std::set<std::string_view> kSkip{"script", "style", "head", "title", "template",
                                                "noscript", "textarea", "option", "select"};
  if (kSkip.count(n.tag)) return false;
  for (html::NodeId a : doc.ancestors(id)) {
    if (kSkip.count(doc.node(a).tag)) return false;
  }
  if (n.tag == "input") {
    const auto* type = n.attr("type");
    const std::string t = type ? lint_detail::lower_trim(*type) : "";
    const auto* value = n.attr("value");
    return (t == "submit" || t == "button" || t == "reset") && value && !lint_detail::lower_trim(*value).empty();
  }
  return doc.has_direct_text(id);
}

inline std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

inline std::string format_px(double px) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fpx", px);
  std::string s = buf;
  // 16.00px -> 16px, 18.66px stays
  if (s.size() > 5 && s.compare(s.size() - 5, 5, ".00px") == 0) s.erase(s.size() - 5, 3);
  return s;
}

/// Contrast evaluation for one element/state, shared with the rubric scorer.
struct ContrastCheck {
  State state;
  double ratio;
  double required;
  css::TextStyle style;
  bool passes() const { return ratio >= required; }
};

/// States to evaluate for an element: default plus any state with a rule
/// matching the element or one of its ancestors.
inline std::vector<State> detected_states(const html::Document& doc, const css::StyleResolver& styles,
                                          html::NodeId id) {
  std::vector<State> out{State::default_state};
  std::vector<html::NodeId> chain = doc.ancestors(id);
  chain.insert(chain.begin(), id);
  for (State s : {State::hover, State::active, State::focus}) {
    for (html::NodeId n : chain) {
      if (styles.has_state_rules(n, s)) {
        out.push_back(s);
        break;
      }
    }
  }
  return out;
}

inline std::vector<ContrastCheck> contrast_checks(const html::Document& doc, const css::StyleResolver& styles,
                                                  html::NodeId id, const ContrastThresholds& thresholds) {
  std::vector<ContrastCheck> out;
  for (State s : detected_states(doc, styles, id)) {
    const css::TextStyle ts = css::compute_text_style(doc, styles, id, s);
    const double ratio = contrast_ratio(ts.foreground, ts.background);
    out.push_back({s, ratio, thresholds.minimum_for(ts.font_px, ts.font_weight), ts});
  }
  return out;
}

inline ElementRef make_element_ref(const html::Document& doc, html::NodeId id) {
  const html::Node& n = doc.node(id);
  ElementRef ref;
  ref.selector = html::selector_for(doc, id);
  ref.span = doc.span(id);
  ref.tag = n.tag;
  for (const auto& a : n.attrs) ref.attrs.emplace_back(a.name, a.value);
  return ref;
}

namespace lint_detail {

struct Emitter {
  const html::Document& doc;
  const RuleConfig& cfg;
  std::vector<Finding>& out;

  void operator()(std::string_view rule_id, html::NodeId id, std::string message,
                  State state = State::default_state, std::optional<Impact> impact = std::nullopt) const {
    if (!cfg.is_enabled(rule_id)) return;
    const RuleInfo* info = find_rule(rule_id);
    Finding f;
    f.rule_id = std::string(rule_id);
    f.impact = impact.value_or(info->impact);
    f.element = make_element_ref(doc, id);
    f.message = std::move(message);
    f.wcag_tag = std::string(info->wcag_tag);
    f.state = state;
    out.push_back(std::move(f));
  }
};

inline bool decorative(const html::Node& n) {
  if (const auto* role = n.attr("role")) {
    const std::string r = lower_trim(*role);
    if (r == "presentation" || r == "none") return true;
  }
  if (const auto* hidden = n.attr("aria-hidden")) return lower_trim(*hidden) == "true";
  return false;
}

inline std::string src_stem(const html::Node& n) {
  const auto* src = n.attr("src");
  if (!src) return {};
  std::string s = *src;
  s = s.substr(0, s.find_first_of("?#"));
  const auto slash = s.find_last_of('/');
  if (slash != std::string::npos) s = s.substr(slash + 1);
  return lower_trim(s);
}

inline void check_images(const html::Document& doc, const RuleConfig& cfg, const Emitter& emit) {
  for (html::NodeId id : doc.elements_by_tag("img")) {
    const html::Node& n = doc.node(id);
    const auto* alt = n.attr("alt");
    NameComputer names{doc};
    if (!alt) {
      if (decorative(n)) continue;
      if (!NameComputer::trimmed_attr(n, "aria-label").empty() || !names.labelledby_text(n).empty()) continue;
      emit("img-alt", id, "Image has no alt attribute; add alt text that describes the image");
      continue;
    }
    const std::string a = lower_trim(*alt);
    if (a.empty()) {
      if (decorative(n)) continue;
      emit("img-alt-empty", id,
           "Image has empty alt text and will be treated as decorative; confirm it conveys no information or describe it");
      continue;
    }
    std::string stem = src_stem(n);
    const auto dot = stem.find_last_of('.');
    const std::string stem_noext = dot == std::string::npos ? stem : stem.substr(0, dot);
    if (is_uninformative(a, cfg.uninformative_lexicon, {"alt", "img", "image"}) || (!stem.empty() && (a == stem || a == stem_noext))) {
      emit("img-alt-uninformative", id, "Alt text \"" + *alt + "\" does not describe the image");
    }
  }
}

inline void check_form_labels(const html::Document& doc, const Emitter& emit) {
  NameComputer names{doc};
  for (html::NodeId id : doc.elements()) {
    const html::Node& n = doc.node(id);
    if (!is_labelable_control(n)) continue;
    if (n.attr("aria-hidden") && lower_trim(*n.attr("aria-hidden")) == "true") continue;
    if (!names.control_labelled(id)) {
      emit("form-label", id,
           "Form <" + n.tag + "> has no associated label; add <label for>, a wrapping label, aria-label or aria-labelledby");
    }
  }
}

inline void check_links(const html::Document& doc, const RuleConfig& cfg, const Emitter& emit) {
  NameComputer names{doc};
  for (html::NodeId id : doc.elements_by_tag("a")) {
    const html::Node& n = doc.node(id);
    if (!n.has_attr("href")) continue;
    const std::string name = names.link_or_button_name(id);
    if (lower_trim(name).empty()) {
      emit("link-name", id, "Link has no discernible text");
    } else if (is_uninformative(name, cfg.uninformative_lexicon, {"link", "a", "href", "url"})) {
      emit("link-name-uninformative", id, "Link text \"" + name + "\" does not describe the destination");
    }
  }
}

inline void check_buttons(const html::Document& doc, const Emitter& emit) {
  NameComputer names{doc};
  for (html::NodeId id : doc.elements()) {
    const html::Node& n = doc.node(id);
    if (!is_button_like(n)) continue;
    if (lower_trim(names.link_or_button_name(id)).empty()) emit("button-name", id, "Button has no discernible text");
  }
}

inline void check_headings(const html::Document& doc, const Emitter& emit) {
  int previous = 0;
  for (html::NodeId id : doc.elements()) {
    const std::string& tag = doc.node(id).tag;
    if (!html::detail::is_heading(tag)) continue;
    const int level = tag[1] - '0';
    if (previous > 0 && level > previous + 1) {
      emit("heading-order", id,
           "Heading level jumps from h" + std::to_string(previous) + " to h" + std::to_string(level));
    }
    previous = level;
  }
}

inline void check_keyboard(const html::Document& doc, const Emitter& emit) {
  for (html::NodeId id : doc.elements()) {
    const html::Node& n = doc.node(id);
    const auto tab = tabindex_of(n);
    if (tab && *tab > 0) {
      emit("tabindex-positive", id,
           "tabindex=\"" + std::to_string(*tab) + "\" overrides the natural tab order; use 0 or restructure the markup");
    }
    if (has_click_handler(n) && !is_natively_interactive(n)) {
      const bool focusable = tab && *tab >= 0;
      const bool has_role = n.has_attr("role");
      if (!focusable || !has_role) {
        emit("click-no-keyboard", id,
             "<" + n.tag + "> has a click handler but is not keyboard accessible; use a <button> or add role and tabindex=\"0\"");
      }
    }
  }
}

inline void check_contrast(const html::Document& doc, const css::StyleResolver& styles, const RuleConfig& cfg,
                           const Emitter& emit) {
  for (html::NodeId id : doc.elements()) {
    if (!renders_text(doc, id)) continue;
    for (const auto& check : contrast_checks(doc, styles, id, cfg.thresholds)) {
      if (check.style.background_image) {
        if (check.state == State::default_state) {
          emit("color-contrast", id, "Background image or gradient prevents static contrast evaluation",
               check.state, Impact::needs_review);
        }
        continue;
      }
      if (check.passes()) continue;
      std::string msg = "Insufficient color contrast of " + format_ratio(check.ratio) +
                        " (foreground " + check.style.foreground.hex() + ", background " +
                        check.style.background.hex() + ", font size " + format_px(check.style.font_px) +
                        ", font weight " + std::to_string(check.style.font_weight) + ")";
      if (check.state != State::default_state) msg += " in :" + std::string(to_string(check.state)) + " state";
      msg += "; expected at least " + format_ratio(check.required) + ":1";
      emit("color-contrast", id, std::move(msg), check.state);
    }
  }
}

inline void check_styles(const html::Document& doc, const css::StyleResolver& styles, const Emitter& emit) {
  for (const auto& p : styles.problems()) {
    emit("style-unresolved", p.element,
         p.remote ? "Remote stylesheet \"" + p.href + "\" is not analyzed; verify contrast manually"
                  : "Stylesheet \"" + p.href + "\" could not be found in the project");
  }
  if (!styles.has_local_sheets() || styles.has_remote_sheets()) return;
  for (html::NodeId id : doc.elements()) {
    std::vector<std::string> missing;
    for (const auto& cls : css::detail::class_list(doc.node(id))) {
      if (!styles.class_defined(cls)) missing.push_back(cls);
    }
    if (missing.empty()) continue;
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "." : ", .") + m;
    emit("style-unresolved", id, "Class " + list + " is not defined in any analyzed stylesheet; its styles were skipped");
  }
}

}  // namespace lint_detail

/// Runs every enabled rule over a parsed document. Findings come back sorted
/// by (file, span) and are identical for identical inputs.
inline std::vector<Finding> run_rules(const html::Document& doc, const css::StyleResolver& styles,
                                      const RuleConfig& cfg) {
  std::vector<Finding> out;
  const lint_detail::Emitter emit{doc, cfg, out};
  lint_detail::check_images(doc, cfg, emit);
  lint_detail::check_form_labels(doc, emit);
  lint_detail::check_links(doc, cfg, emit);
  lint_detail::check_buttons(doc, emit);
  lint_detail::check_headings(doc, emit);
  lint_detail::check_keyboard(doc, emit);
  lint_detail::check_contrast(doc, styles, cfg, emit);
  lint_detail::check_styles(doc, styles, emit);
  std::sort(out.begin(), out.end(), finding_less);
  return out;
}

// ---------------------------------------------------------------------------
// Log serialization.

inline nlohmann::ordered_json finding_to_json(const Finding& f) {
  nlohmann::ordered_json j;
  j["rule_id"] = f.rule_id;
  j["impact"] = to_string(f.impact);
  j["selector"] = f.element.selector;
  j["file"] = f.element.span.file_path;
  j["span"] = {{"sl", f.element.span.start_line},
               {"sc", f.element.span.start_col},
               {"el", f.element.span.end_line},
               {"ec", f.element.span.end_col}};
  j["state"] = to_string(f.state);
  j["wcag_tag"] = f.wcag_tag;
  j["message"] = f.message;
  return j;
}

/// Linter log: a JSON array in fixed key order, two-space indented, with a
/// trailing newline. Byte-identical for identical input.
inline std::string findings_to_log(const std::vector<Finding>& findings) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : findings) arr.push_back(finding_to_json(f));
  return arr.dump(2) + "\n";
}

/// Reads findings back from a log document (tag/attrs are not part of the log).
inline std::vector<Finding> findings_from_log(std::string_view text) {
  std::vector<Finding> out;
  const auto arr = nlohmann::json::parse(text);
  if (!arr.is_array()) throw Error(ErrorKind::invalid_input, "linter log must be a JSON array");
  for (const auto& j : arr) {
    Finding f;
    f.rule_id = j.at("rule_id").get<std::string>();
    f.impact = impact_from_string(j.at("impact").get<std::string>()).value_or(Impact::needs_review);
    f.element.selector = j.at("selector").get<std::string>();
    f.element.span.file_path = j.at("file").get<std::string>();
    const auto& s = j.at("span");
    f.element.span.start_line = s.at("sl").get<std::size_t>();
    f.element.span.start_col = s.at("sc").get<std::size_t>();
    f.element.span.end_line = s.at("el").get<std::size_t>();
    f.element.span.end_col = s.at("ec").get<std::size_t>();
    f.state = state_from_string(j.at("state").get<std::string>()).value_or(State::default_state);
    f.wcag_tag = j.at("wcag_tag").get<std::string>();
    f.message = j.at("message").get<std::string>();
    out.push_back(std::move(f));
  }
  return out;
}

inline std::string text_report(const std::vector<Finding>& findings) {
  std::ostringstream out;
  for (const auto& f : findings) {
    out << f.element.span.file_path << ':' << f.element.span.start_line << ':' << f.element.span.start_col << ": "
        << to_string(f.impact) << " [" << f.rule_id << "] ";
    if (f.state != State::default_state) out << "(:" << to_string(f.state) << ") ";
    out << f.message << " (" << f.element.selector << ", WCAG " << f.wcag_tag << ")\n";
  }
  out << findings.size() << (findings.size() == 1 ? " finding\n" : " findings\n");
  return out.str();
}

// ---------------------------------------------------------------------------
// File and project entry points.

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_error, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io_error, "cannot read " + p.string());
  return buf.str();
}

inline bool is_markup_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".html" || ext == ".htm";
}

/// Lints one markup file. The finding `file` field is the path relative to
/// `project_root` with '/' separators.
inline std::vector<Finding> lint_file(const std::filesystem::path& file, const std::filesystem::path& project_root,
                                      const RuleConfig& cfg) {
  namespace fs = std::filesystem;
  const std::string text = read_file(file);
  std::error_code ec;
  const fs::path abs_file = fs::weakly_canonical(file, ec);
  const fs::path abs_root = fs::weakly_canonical(project_root, ec);
  const std::string rel = abs_file.lexically_relative(abs_root).generic_string();
  const html::Document doc = html::parse_document(text, rel.empty() ? file.filename().generic_string() : rel);
  const css::StyleResolver styles(doc, abs_file, abs_root);
  return run_rules(doc, styles, cfg);
}

/// Markup files under a project, sorted, skipping hidden directories and
/// dependency/build folders.
inline std::vector<std::filesystem::path> project_markup_files(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorKind::io_error, "not a readable directory: " + root.string());
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot scan " + root.string() + ": " + ec.message());
  for (auto end = fs::recursive_directory_iterator(); it != end; it.increment(ec)) {
    if (ec) throw Error(ErrorKind::io_error, "cannot scan " + root.string() + ": " + ec.message());
    const auto name = it->path().filename().string();
    if (it->is_directory(ec)) {
      if ((!name.empty() && name[0] == '.') || name == "node_modules" || name == "build" || name == "dist") {
        it.disable_recursion_pending();
      }
      continue;
    }
    if (it->is_regular_file(ec) && is_markup_file(it->path())) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
    return a.lexically_relative(root).generic_string() < b.lexically_relative(root).generic_string();
  });
  return files;
}

/// Lints every markup file in a project. Findings are sorted by (file, span).
inline std::vector<Finding> lint_project(const std::filesystem::path& root, const RuleConfig& cfg) {
  std::vector<Finding> all;
  for (const auto& file : project_markup_files(root)) {
    auto found = lint_file(file, root, cfg);
    all.insert(all.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
  }
  std::sort(all.begin(), all.end(), finding_less);
  return all;
}

}  // namespace codea11y
