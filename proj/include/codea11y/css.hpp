#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "codea11y/color.hpp"
#include "codea11y/html.hpp"

namespace codea11y {

/// Interaction state a style (and a finding) applies to.
enum class State { default_state, hover, active, focus };

inline constexpr std::array<State, 4> kAllStates{State::default_state, State::hover, State::active,
                                                 State::focus};

inline const char* to_string(State s) {
  switch (s) {
    case State::default_state: return "default";
    case State::hover: return "hover";
    case State::active: return "active";
    case State::focus: return "focus";
  }
  return "default";
}

namespace css {

struct Declaration {
  std::string property;  // lowercased
  std::string value;
  bool important = false;
};

struct Compound {
  std::string tag;  // empty or "*" for any
  std::string id;
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, std::optional<std::string>>> attrs;
};

enum class Combinator { descendant, child };

struct Selector {
  // parts[0] is the leftmost compound; combinators[i] joins parts[i] and parts[i+1].
  std::vector<Compound> parts;
  std::vector<Combinator> combinators;
  State state = State::default_state;
  std::tuple<int, int, int> specificity{0, 0, 0};
};

struct Rule {
  std::vector<Selector> selectors;
  std::vector<Declaration> declarations;
};

struct StyleSheet {
  std::string source;  // file path, or "<style>" for embedded blocks
  std::vector<Rule> rules;
  /// Every class name mentioned by any selector, supported or not.
  std::set<std::string> mentioned_classes;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string strip_comments(std::string_view css) {
  std::string out;
  out.reserve(css.size());
  for (std::size_t i = 0; i < css.size(); ++i) {
    if (css[i] == '/' && i + 1 < css.size() && css[i + 1] == '*') {
      const auto end = css.find("*/", i + 2);
      if (end == std::string_view::npos) break;
      i = end + 1;
      out += ' ';
      continue;
    }
    out += css[i];
  }
  return out;
}

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

inline void collect_classes(std::string_view sel, std::set<std::string>& out) {
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (sel[i] != '.') continue;
    std::size_t j = i + 1;
    while (j < sel.size() && ident_char(sel[j])) ++j;
    if (j > i + 1) out.insert(std::string(sel.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
}

// Parses one compound like `button.primary#go[type=submit]:hover`. Returns
// nullopt for selector features outside the supported subset.
inline std::optional<Compound> parse_compound(std::string_view text, State& state) {
  Compound c;
  std::size_t i = 0;
  auto read_ident = [&]() {
    const std::size_t b = i;
    while (i < text.size() && ident_char(text[i])) ++i;
    return std::string(text.substr(b, i - b));
  };
  if (i < text.size() && (text[i] == '*' || ident_char(text[i]))) {
    if (text[i] == '*') {
      c.tag = "*";
      ++i;
    } else {
      c.tag = lower(read_ident());
    }
  }
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '.') {
      ++i;
      auto cls = read_ident();
      if (cls.empty()) return std::nullopt;
      c.classes.push_back(std::move(cls));
    } else if (ch == '#') {
      ++i;
      c.id = read_ident();
      if (c.id.empty()) return std::nullopt;
    } else if (ch == '[') {
      const auto close = text.find(']', i);
      if (close == std::string_view::npos) return std::nullopt;
      const std::string inner = trim(text.substr(i + 1, close - i - 1));
      i = close + 1;
      const auto eq = inner.find('=');
      if (eq == std::string::npos) {
        c.attrs.emplace_back(lower(trim(inner)), std::nullopt);
      } else {
        if (eq > 0 && std::string("~|^$*").find(inner[eq - 1]) != std::string::npos) return std::nullopt;
        std::string value = trim(inner.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
          value = value.substr(1, value.size() - 2);
        }
        c.attrs.emplace_back(lower(trim(inner.substr(0, eq))), value);
      }
    } else if (ch == ':') {
      if (i + 1 < text.size() && text[i + 1] == ':') return std::nullopt;  // pseudo-element
      ++i;
      const std::string pseudo = lower(read_ident());
      if (i < text.size() && text[i] == '(') return std::nullopt;
      if (pseudo == "hover") state = State::hover;
      else if (pseudo == "active") state = State::active;
      else if (pseudo == "focus" || pseudo == "focus-visible" || pseudo == "focus-within") state = State::focus;
      else if (pseudo == "link" || pseudo == "visited") {
        // Treated as the default state.
      } else {
        return std::nullopt;
      }
    } else {
      return std::nullopt;
    }
  }
  return c;
}

inline std::optional<Selector> parse_selector(std::string_view text) {
  Selector sel;
  std::string buf;
  std::optional<Combinator> pending;
  auto flush = [&]() -> bool {
    if (buf.empty()) return true;
    State st = State::default_state;
    auto comp = parse_compound(buf, st);
    buf.clear();
    if (!comp) return false;
    if (st != State::default_state) {
      if (sel.state != State::default_state && sel.state != st) return false;
      sel.state = st;
    }
    if (!sel.parts.empty()) sel.combinators.push_back(pending.value_or(Combinator::descendant));
    pending.reset();
    sel.parts.push_back(std::move(*comp));
    return true;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '[') {
      const auto close = text.find(']', i);
      if (close == std::string_view::npos) return std::nullopt;
      buf.append(text.substr(i, close - i + 1));
      i = close;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!flush()) return std::nullopt;
      if (!sel.parts.empty() && !pending) pending = Combinator::descendant;
    } else if (ch == '>') {
      if (!flush()) return std::nullopt;
      pending = Combinator::child;
    } else if (ch == '+' || ch == '~') {
      return std::nullopt;
    } else {
      buf += ch;
    }
  }
  if (!flush() || sel.parts.empty()) return std::nullopt;
  int ids = 0, classes = 0, tags = 0;
  for (const auto& p : sel.parts) {
    ids += p.id.empty() ? 0 : 1;
    classes += static_cast<int>(p.classes.size() + p.attrs.size());
    tags += (p.tag.empty() || p.tag == "*") ? 0 : 1;
  }
  if (sel.state != State::default_state) ++classes;
  sel.specificity = {ids, classes, tags};
  return sel;
}

inline std::vector<Declaration> parse_declarations(std::string_view block) {
  std::vector<Declaration> out;
  std::size_t i = 0;
  while (i < block.size()) {
    auto semi = block.find(';', i);
    // Semicolons inside url(...) or quotes are rare enough in color/font rules to ignore.
    const std::string_view item = block.substr(i, semi == std::string_view::npos ? std::string_view::npos : semi - i);
    i = semi == std::string_view::npos ? block.size() : semi + 1;
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) continue;
    Declaration d;
    d.property = lower(trim(item.substr(0, colon)));
    d.value = trim(item.substr(colon + 1));
    const auto bang = d.value.find('!');
    if (bang != std::string::npos && lower(trim(std::string_view(d.value).substr(bang + 1))) == "important") {
      d.important = true;
      d.value = trim(std::string_view(d.value).substr(0, bang));
    }
    if (!d.property.empty() && !d.value.empty()) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace detail

/// Parses a stylesheet into rules over the supported selector subset:
/// type/class/id/attribute compounds joined by descendant or child
/// combinators, with :hover/:active/:focus marking the rule's state.
/// At-rule blocks are skipped.
inline StyleSheet parse_stylesheet(std::string_view text, std::string source) {
  StyleSheet sheet;
  sheet.source = std::move(source);
  const std::string css = detail::strip_comments(text);
  std::size_t i = 0;
  while (i < css.size()) {
    while (i < css.size() && std::isspace(static_cast<unsigned char>(css[i]))) ++i;
    if (i >= css.size()) break;
    if (css[i] == '@') {
      const auto brace = css.find('{', i);
      const auto semi = css.find(';', i);
      if (semi != std::string::npos && (brace == std::string::npos || semi < brace)) {
        i = semi + 1;
        continue;
      }
      if (brace == std::string::npos) break;
      int depth = 0;
      std::size_t j = brace;
      for (; j < css.size(); ++j) {
        if (css[j] == '{') ++depth;
        else if (css[j] == '}' && --depth == 0) break;
      }
      i = j + 1;
      continue;
    }
    const auto open = css.find('{', i);
    if (open == std::string::npos) break;
    const auto close = css.find('}', open);
    const std::string prelude = css.substr(i, open - i);
    const std::string body = css.substr(open + 1, (close == std::string::npos ? css.size() : close) - open - 1);
    i = close == std::string::npos ? css.size() : close + 1;

    detail::collect_classes(prelude, sheet.mentioned_classes);
    Rule rule;
    std::size_t start = 0;
    while (start <= prelude.size()) {
      auto comma = prelude.find(',', start);
      const std::string part = detail::trim(std::string_view(prelude).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!part.empty()) {
        if (auto sel = detail::parse_selector(part)) rule.selectors.push_back(std::move(*sel));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rule.declarations = detail::parse_declarations(body);
    if (!rule.selectors.empty() && !rule.declarations.empty()) sheet.rules.push_back(std::move(rule));
  }
  return sheet;
}

namespace detail {

inline std::vector<std::string> class_list(const html::Node& n) {
  std::vector<std::string> out;
  const std::string* cls = n.attr("class");
  if (!cls) return out;
  std::istringstream in(*cls);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline bool matches_compound(const html::Document& doc, html::NodeId id, const Compound& c) {
  const html::Node& n = doc.node(id);
  if (!n.is_element()) return false;
  if (!c.tag.empty() && c.tag != "*" && c.tag != n.tag) return false;
  if (!c.id.empty()) {
    const auto* v = n.attr("id");
    if (!v || *v != c.id) return false;
  }
  if (!c.classes.empty()) {
    const auto have = class_list(n);
    for (const auto& cls : c.classes) {
      if (std::find(have.begin(), have.end(), cls) == have.end()) return false;
    }
  }
  for (const auto& [name, value] : c.attrs) {
    const auto* v = n.attr(name);
    if (!v) return false;
    if (value && *v != *value) return false;
  }
  return true;
}

inline bool matches_from(const html::Document& doc, html::NodeId id, const Selector& sel, std::size_t part) {
  if (!matches_compound(doc, id, sel.parts[part])) return false;
  if (part == 0) return true;
  const Combinator comb = sel.combinators[part - 1];
  for (html::NodeId p = doc.node(id).parent; p != html::kNoNode && p != html::kRoot; p = doc.node(p).parent) {
    if (matches_from(doc, p, sel, part - 1)) return true;
    if (comb == Combinator::child) return false;
  }
  return false;
}

}  // namespace detail

inline bool matches(const html::Document& doc, html::NodeId id, const Selector& sel) {
  return detail::matches_from(doc, id, sel, sel.parts.size() - 1);
}

/// How a stylesheet was (or was not) located for a document.
struct SheetProblem {
  html::NodeId element;  // the <link> element
  std::string href;
  bool remote = false;   // true: not fetched by design; false: missing locally
};

/// Static style resolution for one document: linked local stylesheets,
/// embedded <style> blocks and inline style attributes, in document order.
/// Rules are applied by (importance, specificity, source order); inline
/// declarations rank above rules of equal importance.
class StyleResolver {
 public:
  StyleResolver() = default;

  /// `project_root` bounds linked stylesheet lookup; root-relative hrefs
  /// ("/css/site.css") resolve against it. Without a document path on disk
  /// only embedded and inline styles are used.
  StyleResolver(const html::Document& doc, const std::filesystem::path& document_path = {},
                const std::filesystem::path& project_root = {})
      : doc_(&doc) {
    for (html::NodeId id : doc.elements()) {
      const html::Node& n = doc.node(id);
      if (n.tag == "style") {
        add_sheet(parse_stylesheet(doc.text_content_raw(id), "<style>"));
      } else if (n.tag == "link") {
        const auto* rel = n.attr("rel");
        const auto* href = n.attr("href");
        if (!rel || !href || detail::lower(*rel).find("stylesheet") == std::string::npos) continue;
        load_link(id, *href, document_path, project_root);
      }
    }
  }

  const std::vector<StyleSheet>& sheets() const noexcept { return sheets_; }
  const std::vector<SheetProblem>& problems() const noexcept { return problems_; }
  bool has_local_sheets() const noexcept { return !sheets_.empty(); }
  bool has_remote_sheets() const noexcept {
    return std::any_of(problems_.begin(), problems_.end(), [](const SheetProblem& p) { return p.remote; });
  }

  bool class_defined(const std::string& cls) const {
    return std::any_of(sheets_.begin(), sheets_.end(),
                       [&](const StyleSheet& s) { return s.mentioned_classes.count(cls) > 0; });
  }

  /// Whether any rule for `state` (other than default) matches the element.
  bool has_state_rules(html::NodeId id, State state) const {
    for (const auto& sheet : sheets_) {
      for (const auto& rule : sheet.rules) {
        for (const auto& sel : rule.selectors) {
          if (sel.state == state && matches(*doc_, id, sel)) return true;
        }
      }
    }
    return false;
  }

  /// Winning declared value of `property` on the element itself in `state`.
  /// State rules apply on top of default-state rules.
  std::optional<std::string> declared(html::NodeId id, std::string_view property, State state) const {
    std::optional<std::string> best;
    std::tuple<int, int, int, int, std::size_t> best_rank{-1, 0, 0, 0, 0};
    std::size_t order = 0;
    for (const auto& sheet : sheets_) {
      for (const auto& rule : sheet.rules) {
        ++order;
        for (const auto& sel : rule.selectors) {
          if (sel.state != State::default_state && sel.state != state) continue;
          if (!matches(*doc_, id, sel)) continue;
          for (const auto& d : rule.declarations) {
            if (d.property != property) continue;
            const auto [a, b, c] = sel.specificity;
            const std::tuple<int, int, int, int, std::size_t> rank{d.important ? 2 : 0, a, b, c, order};
            if (rank >= best_rank) {
              best_rank = rank;
              best = d.value;
            }
          }
        }
      }
    }
    if (const auto* style = doc_->node(id).attr("style")) {
      for (const auto& d : detail::parse_declarations(*style)) {
        if (d.property != property) continue;
        const std::tuple<int, int, int, int, std::size_t> rank{d.important ? 3 : 1, 0, 0, 0, 0};
        if (rank >= best_rank) {
          best_rank = rank;
          best = d.value;
        }
      }
    }
    return best;
  }

 private:
  void add_sheet(StyleSheet sheet) { sheets_.push_back(std::move(sheet)); }

  void load_link(html::NodeId id, const std::string& href, const std::filesystem::path& document_path,
                 const std::filesystem::path& project_root) {
    namespace fs = std::filesystem;
    const std::string h = detail::lower(href);
    if (h.rfind("http:", 0) == 0 || h.rfind("https:", 0) == 0 || h.rfind("//", 0) == 0 ||
        h.rfind("data:", 0) == 0) {
      problems_.push_back({id, href, true});
      return;
    }
    std::string clean = href.substr(0, href.find_first_of("?#"));
    if (document_path.empty() && project_root.empty()) {
      problems_.push_back({id, href, false});
      return;
    }
    fs::path candidate;
    if (!clean.empty() && clean[0] == '/') {
      candidate = project_root / clean.substr(1);
    } else {
      candidate = document_path.parent_path() / clean;
    }
    std::error_code ec;
    const fs::path resolved = fs::weakly_canonical(candidate, ec);
    if (!project_root.empty()) {
      const fs::path root = fs::weakly_canonical(project_root, ec);
      auto rel = resolved.lexically_relative(root);
      if (rel.empty() || *rel.begin() == "..") {
        problems_.push_back({id, href, false});
        return;
      }
    }
    std::ifstream in(resolved, std::ios::binary);
    if (!in) {
      problems_.push_back({id, href, false});
      return;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    add_sheet(parse_stylesheet(buf.str(), clean));
  }

  const html::Document* doc_ = nullptr;
  std::vector<StyleSheet> sheets_;
  std::vector<SheetProblem> problems_;
};

// ---------------------------------------------------------------------------
// Computed values needed by the contrast checks.

namespace detail {

inline std::optional<double> parse_length_px(std::string_view value, double parent_px) {
  const std::string v = lower(trim(value));
  static const std::array<std::pair<std::string_view, double>, 8> kKeywords{{
      {"xx-small", 9.0}, {"x-small", 10.0}, {"small", 13.0}, {"medium", 16.0},
      {"large", 18.0}, {"x-large", 24.0}, {"xx-large", 32.0}, {"xxx-large", 48.0}}};
  for (const auto& [k, px] : kKeywords) {
    if (v == k) return px;
  }
  if (v == "larger") return parent_px * 1.2;
  if (v == "smaller") return parent_px / 1.2;
  char* end = nullptr;
  const double num = std::strtod(v.c_str(), &end);
  if (end == v.c_str()) return std::nullopt;
  const std::string unit(end);
  if (unit == "px") return num;
  if (unit == "pt") return num * 96.0 / 72.0;
  if (unit == "em") return num * parent_px;
  if (unit == "rem") return num * 16.0;
  if (unit == "%") return num * parent_px / 100.0;
  return std::nullopt;
}

inline std::optional<int> parse_weight(std::string_view value, int parent_weight) {
  const std::string v = lower(trim(value));
  if (v == "normal") return 400;
  if (v == "bold") return 700;
  if (v == "bolder") return parent_weight >= 600 ? 900 : 700;
  if (v == "lighter") return parent_weight >= 600 ? 400 : 100;
  char* end = nullptr;
  const long num = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') return std::nullopt;
  return static_cast<int>(num);
}

// Finds the first color token in a `background` shorthand.
inline std::optional<ColorSRGB> color_from_background(std::string_view value) {
  const std::string v = trim(value);
  if (auto c = parse_color(v)) return c;
  std::size_t i = 0;
  while (i < v.size()) {
    while (i < v.size() && std::isspace(static_cast<unsigned char>(v[i]))) ++i;
    std::size_t j = i;
    int depth = 0;
    while (j < v.size() && (depth > 0 || !std::isspace(static_cast<unsigned char>(v[j])))) {
      if (v[j] == '(') ++depth;
      if (v[j] == ')') --depth;
      ++j;
    }
    if (auto c = parse_color(std::string_view(v).substr(i, j - i))) return c;
    i = j;
  }
  return std::nullopt;
}

inline bool has_image(std::string_view value) {
  const std::string v = lower(value);
  return v.find("url(") != std::string::npos || v.find("gradient(") != std::string::npos;
}

}  // namespace detail

/// Effective text rendering needed to evaluate contrast for one element in
/// one state.
struct TextStyle {
  ColorSRGB foreground = kBlack;
  ColorSRGB background = kWhite;
  double font_px = 16.0;
  int font_weight = 400;
  bool background_image = false;  // contrast cannot be determined statically
};

/// Computes foreground/background/font for an element. The element and its
/// ancestors are all evaluated in `state`; color, font-size and font-weight
/// inherit; backgrounds composite upward over white.
inline TextStyle compute_text_style(const html::Document& doc, const StyleResolver& styles, html::NodeId id,
                                    State state) {
  std::vector<html::NodeId> chain = doc.ancestors(id);
  std::reverse(chain.begin(), chain.end());
  chain.push_back(id);

  TextStyle ts;
  std::optional<ColorSRGB> fg;
  std::vector<ColorSRGB> layers;  // bottom to top
  for (html::NodeId n : chain) {
    const std::string& tag = doc.node(n).tag;
    // User-agent defaults for headings and bold elements.
    if (html::detail::is_heading(tag)) {
      static constexpr std::array<double, 6> kEm{2.0, 1.5, 1.17, 1.0, 0.83, 0.67};
      ts.font_px = 16.0 * kEm[static_cast<std::size_t>(tag[1] - '1')];
      ts.font_weight = 700;
    } else if (tag == "b" || tag == "strong" || tag == "th") {
      ts.font_weight = 700;
    }
    if (auto v = styles.declared(n, "font-size", state)) {
      if (auto px = detail::parse_length_px(*v, ts.font_px)) ts.font_px = *px;
    }
    if (auto v = styles.declared(n, "font-weight", state)) {
      if (auto w = detail::parse_weight(*v, ts.font_weight)) ts.font_weight = *w;
    }
    if (auto v = styles.declared(n, "color", state)) {
      if (auto c = parse_color(*v)) fg = c;
    }
    std::optional<ColorSRGB> bg;
    bool image = false;
    if (auto v = styles.declared(n, "background-color", state)) bg = parse_color(*v);
    if (auto v = styles.declared(n, "background", state)) {
      image = detail::has_image(*v);
      if (!bg) bg = detail::color_from_background(*v);
    }
    if (auto v = styles.declared(n, "background-image", state)) image = image || detail::has_image(*v);
    if (bg) {
      if (bg->opaque()) {
        layers.clear();
        ts.background_image = false;
      }
      layers.push_back(*bg);
    }
    if (image) ts.background_image = true;
  }
  ColorSRGB base = kWhite;
  for (const auto& layer : layers) base = composite(layer, base);
  base.a = 1.0;
  ts.background = base;
  ts.foreground = fg.value_or(kBlack);
  if (!ts.foreground.opaque()) {
    ts.foreground = composite(ts.foreground, base);
    ts.foreground.a = 1.0;
  }
  return ts;
}

}  // namespace css
}  // namespace codea11y
