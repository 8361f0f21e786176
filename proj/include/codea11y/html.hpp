#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codea11y/error.hpp"

namespace codea11y {

/// 1-based, inclusive source range.
struct SourceSpan {
  std::string file_path;
  std::size_t start_line = 1;
  std::size_t start_col = 1;
  std::size_t end_line = 1;
  std::size_t end_col = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

inline bool span_less(const SourceSpan& a, const SourceSpan& b) {
  if (a.file_path != b.file_path) return a.file_path < b.file_path;
  if (a.start_line != b.start_line) return a.start_line < b.start_line;
  if (a.start_col != b.start_col) return a.start_col < b.start_col;
  if (a.end_line != b.end_line) return a.end_line < b.end_line;
  return a.end_col < b.end_col;
}

namespace html {

using NodeId = std::size_t;
inline constexpr NodeId kRoot = 0;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

enum class NodeKind { document, element, text, comment };

struct Attribute {
  std::string name;  // lowercased
  std::string value; // entity-decoded
};

struct Node {
  NodeKind kind = NodeKind::element;
  std::string tag;  // lowercased; empty for non-elements
  std::vector<Attribute> attrs;
  std::string text;  // text/comment payload
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  std::size_t begin = 0;  // byte offsets into the source, [begin, end)
  std::size_t end = 0;

  bool is_element() const noexcept { return kind == NodeKind::element; }

  const std::string* attr(std::string_view name) const {
    for (const auto& a : attrs) {
      if (a.name == name) return &a.value;
    }
    return nullptr;
  }
  bool has_attr(std::string_view name) const { return attr(name) != nullptr; }
};

namespace detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) cp = 0xfffd;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

// Decodes numeric references and the handful of named entities that matter
// for accessible-name text. Unknown entities are left verbatim.
inline std::string decode_entities(std::string_view s) {
  static const std::map<std::string_view, std::uint32_t> kNamed{
      {"amp", '&'},    {"lt", '<'},      {"gt", '>'},      {"quot", '"'},
      {"apos", '\''},  {"nbsp", 0xa0},   {"copy", 0xa9},   {"reg", 0xae},
      {"mdash", 0x2014}, {"ndash", 0x2013}, {"hellip", 0x2026}, {"rsquo", 0x2019},
      {"lsquo", 0x2018}, {"rdquo", 0x201d}, {"ldquo", 0x201c}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out += s[i];
      continue;
    }
    const std::string_view ref = s.substr(i + 1, semi - i - 1);
    if (!ref.empty() && ref[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = ref.size() > 1;
      const bool hex = ref.size() > 1 && (ref[1] == 'x' || ref[1] == 'X');
      for (std::size_t k = hex ? 2 : 1; ok && k < ref.size(); ++k) {
        const char c = ref[k];
        if (hex && std::isxdigit(static_cast<unsigned char>(c))) {
          cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c)) ? c - '0' : (std::tolower(c) - 'a' + 10));
        } else if (!hex && std::isdigit(static_cast<unsigned char>(c))) {
          cp = cp * 10 + static_cast<std::uint32_t>(c - '0');
        } else {
          ok = false;
        }
        if (cp > 0x10ffff) cp = 0x110000;
      }
      if (ok && ref.size() > (hex ? 2u : 1u)) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (auto it = kNamed.find(ref); it != kNamed.end()) {
      append_utf8(out, it->second);
      i = semi;
      continue;
    }
    out += s[i];
  }
  return out;
}

inline bool contains(std::initializer_list<std::string_view> set, std::string_view tag) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

inline bool is_void(std::string_view tag) {
  return contains({"area", "base", "br", "col", "embed", "hr", "img", "input", "link",
                   "meta", "param", "source", "track", "wbr"},
                  tag);
}

// Start tags that implicitly close an open <p>.
inline bool closes_p(std::string_view tag) {
  return contains({"address", "article", "aside", "blockquote", "details", "dialog", "div",
                   "dl", "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2",
                   "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav",
                   "ol", "p", "pre", "section", "table", "ul", "summary"},
                  tag);
}

inline bool is_heading(std::string_view tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

// Elements that bound the search for an open <p> ("button scope").
inline bool is_scope_boundary(std::string_view tag) {
  return contains({"applet", "caption", "html", "table", "td", "th", "marquee", "object",
                   "template", "button"},
                  tag);
}

// Rejects input that is clearly not markup text: NUL bytes or malformed UTF-8.
inline bool looks_like_text(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == 0) return false;
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c & 0xe0) == 0xc0 && c >= 0xc2) len = 2;
    else if ((c & 0xf0) == 0xe0) len = 3;
    else if ((c & 0xf8) == 0xf0 && c <= 0xf4) len = 4;
    else return false;
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xc0) != 0x80) return false;
    }
    i += len;
  }
  return true;
}

}  // namespace detail

/// Parsed markup: a flat, index-linked element tree that remembers where each
/// node came from in the source.
class Document {
 public:
  Document() { nodes_.push_back(Node{NodeKind::document, {}, {}, {}, kNoNode, {}, 0, 0}); }

  const std::string& file_path() const noexcept { return file_path_; }
  const std::string& source() const noexcept { return source_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Element ids in document (pre-order) order.
  std::vector<NodeId> elements() const {
    std::vector<NodeId> out;
    walk(kRoot, [&](NodeId id) {
      if (nodes_[id].is_element()) out.push_back(id);
    });
    return out;
  }

  std::vector<NodeId> elements_by_tag(std::string_view tag) const {
    std::vector<NodeId> out;
    for (NodeId id : elements()) {
      if (nodes_[id].tag == tag) out.push_back(id);
    }
    return out;
  }

  std::optional<NodeId> element_by_id(std::string_view id) const {
    for (NodeId e : elements()) {
      if (const auto* v = nodes_[e].attr("id"); v && *v == id) return e;
    }
    return std::nullopt;
  }

  /// Element ancestors from the parent upward (document node excluded).
  std::vector<NodeId> ancestors(NodeId id) const {
    std::vector<NodeId> out;
    for (NodeId p = nodes_.at(id).parent; p != kNoNode && p != kRoot; p = nodes_[p].parent) {
      out.push_back(p);
    }
    return out;
  }

  bool has_ancestor(NodeId id, std::string_view tag) const {
    for (NodeId a : ancestors(id)) {
      if (nodes_[a].tag == tag) return true;
    }
    return false;
  }

  /// Concatenated descendant text with whitespace collapsed. Script, style and
  /// template content is excluded. When `with_alt` is set, images contribute
  /// their alt text (accessible-name computation).
  std::string text_content(NodeId id, bool with_alt = false) const {
    std::string raw;
    collect_text(id, with_alt, raw);
    return collapse_whitespace(raw);
  }

  /// Raw concatenation of direct text children (e.g. a <style> body).
  std::string text_content_raw(NodeId id) const {
    std::string out;
    for (NodeId c : nodes_.at(id).children) {
      if (nodes_[c].kind == NodeKind::text) out += nodes_[c].text;
    }
    return out;
  }

  /// Whether the element has a non-whitespace text node as a direct child.
  bool has_direct_text(NodeId id) const {
    for (NodeId c : nodes_.at(id).children) {
      const Node& n = nodes_[c];
      if (n.kind == NodeKind::text &&
          std::any_of(n.text.begin(), n.text.end(), [](char ch) { return !detail::is_space(ch); })) {
        return true;
      }
    }
    return false;
  }

  SourceSpan span(NodeId id) const {
    const Node& n = nodes_.at(id);
    SourceSpan s;
    s.file_path = file_path_;
    const auto [sl, sc] = position(n.begin);
    const auto [el, ec] = position(n.end > n.begin ? n.end - 1 : n.begin);
    s.start_line = sl;
    s.start_col = sc;
    s.end_line = el;
    s.end_col = ec;
    return s;
  }

  /// 1-based (line, column) of a byte offset; columns count bytes.
  std::pair<std::size_t, std::size_t> position(std::size_t offset) const {
    if (line_starts_.empty()) return {1, 1};
    const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    const std::size_t line = static_cast<std::size_t>(it - line_starts_.begin());
    return {line, offset - line_starts_[line - 1] + 1};
  }

  /// Source text of the element's start tag.
  std::string start_tag_source(NodeId id) const {
    const Node& n = nodes_.at(id);
    const auto gt = source_.find('>', n.begin);
    if (gt == std::string::npos) return source_.substr(n.begin);
    return source_.substr(n.begin, gt - n.begin + 1);
  }

  static std::string collapse_whitespace(std::string_view raw) {
    std::string out;
    bool pending_space = false;
    for (char c : raw) {
      if (detail::is_space(c)) {
        pending_space = !out.empty();
      } else {
        if (pending_space) out += ' ';
        pending_space = false;
        out += c;
      }
    }
    return out;
  }

  template <typename Fn>
  void walk(NodeId id, Fn&& fn) const {
    fn(id);
    for (NodeId c : nodes_[id].children) walk(c, fn);
  }

 private:
  friend class Parser;

  void collect_text(NodeId id, bool with_alt, std::string& out) const {
    const Node& n = nodes_[id];
    if (n.kind == NodeKind::text) {
      out += n.text;
      return;
    }
    if (n.kind == NodeKind::comment) return;
    if (n.is_element()) {
      if (n.tag == "script" || n.tag == "style" || n.tag == "template") return;
      if (with_alt && n.tag == "img") {
        if (const auto* alt = n.attr("alt")) {
          out += ' ';
          out += *alt;
          out += ' ';
        }
        return;
      }
    }
    for (NodeId c : n.children) {
      collect_text(c, with_alt, out);
      if (nodes_[c].is_element() && !detail::contains({"a", "b", "i", "em", "strong", "span", "small", "code", "abbr", "mark", "sub", "sup", "label", "u", "s", "q", "cite", "kbd", "time"}, nodes_[c].tag)) {
        out += ' ';
      }
    }
  }

  std::string file_path_;
  std::string source_;
  std::vector<std::size_t> line_starts_;
  std::vector<Node> nodes_;
};

/// Error-recovering tree builder. Implements the subset of HTML5 tree
/// construction that matters for static checks: void elements, implied end
/// tags for p/li/dt/dd/option/tr/td/th, stray end tags ignored, and unclosed
/// elements closed at end of input. Misnested formatting elements are closed
/// by stack order rather than with the adoption agency algorithm.
class Parser {
 public:
  Parser(std::string_view source, std::string file_path) {
    doc_.file_path_ = std::move(file_path);
    doc_.source_ = std::string(source);
    doc_.line_starts_.push_back(0);
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (source[i] == '\n') doc_.line_starts_.push_back(i + 1);
    }
    stack_.push_back(kRoot);
  }

  Document run() && {
    const std::string& s = doc_.source_;
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] == '<') {
        const std::size_t next = i + 1 < s.size() ? i + 1 : i;
        const char c = s[next];
        if (s.compare(i, 4, "<!--") == 0) {
          i = comment(i);
          continue;
        }
        if (c == '!' || c == '?') {
          i = bogus(i);
          continue;
        }
        if (c == '/' && i + 2 < s.size() && std::isalpha(static_cast<unsigned char>(s[i + 2]))) {
          i = end_tag(i);
          continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
          i = start_tag(i);
          continue;
        }
      }
      const std::size_t lt = s.find('<', i + 1);
      const std::size_t stop = lt == std::string::npos ? s.size() : lt;
      text(i, stop);
      i = stop;
    }
    while (stack_.size() > 1) pop(s.size());
    doc_.nodes_[kRoot].end = s.size();
    return std::move(doc_);
  }

 private:
  Node& current() { return doc_.nodes_[stack_.back()]; }

  NodeId append(Node n) {
    n.parent = stack_.back();
    doc_.nodes_.push_back(std::move(n));
    const NodeId id = doc_.nodes_.size() - 1;
    doc_.nodes_[doc_.nodes_[id].parent].children.push_back(id);
    return id;
  }

  void pop(std::size_t end_offset) {
    Node& n = current();
    n.end = std::max(end_offset, n.end);
    const NodeId closed = stack_.back();
    stack_.pop_back();
    // Implicitly closed elements extend to cover their content.
    if (!stack_.empty()) {
      Node& parent = current();
      parent.end = std::max(parent.end, doc_.nodes_[closed].end);
    }
  }

  // Pops until the nearest open `tag` (inclusive) if it is in scope.
  bool close_in_scope(std::string_view tag, std::size_t end_offset,
                      std::initializer_list<std::string_view> boundaries = {}) {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      const std::string& t = doc_.nodes_[stack_[k]].tag;
      if (t == tag) {
        while (stack_.size() > k) pop(end_offset);
        return true;
      }
      if (detail::is_scope_boundary(t) || detail::contains(boundaries, t)) return false;
    }
    return false;
  }

  bool open(std::string_view tag) const {
    for (std::size_t k = 1; k < stack_.size(); ++k) {
      if (doc_.nodes_[stack_[k]].tag == tag) return true;
    }
    return false;
  }

  void text(std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    const std::string decoded = detail::decode_entities(std::string_view(doc_.source_).substr(begin, end - begin));
    Node& cur = current();
    if (!cur.children.empty()) {
      Node& last = doc_.nodes_[cur.children.back()];
      if (last.kind == NodeKind::text && last.end == begin) {
        last.text += decoded;
        last.end = end;
        cur.end = std::max(cur.end, end);
        return;
      }
    }
    Node n;
    n.kind = NodeKind::text;
    n.text = decoded;
    n.begin = begin;
    n.end = end;
    append(std::move(n));
    current().end = std::max(current().end, end);
  }

  std::size_t comment(std::size_t i) {
    const std::string& s = doc_.source_;
    auto close = s.find("-->", i + 4);
    const std::size_t end = close == std::string::npos ? s.size() : close + 3;
    Node n;
    n.kind = NodeKind::comment;
    n.text = s.substr(i + 4, (close == std::string::npos ? s.size() : close) - (i + 4));
    n.begin = i;
    n.end = end;
    append(std::move(n));
    return end;
  }

  std::size_t bogus(std::size_t i) {
    const auto gt = doc_.source_.find('>', i);
    return gt == std::string::npos ? doc_.source_.size() : gt + 1;
  }

  std::size_t end_tag(std::size_t i) {
    const std::string& s = doc_.source_;
    std::size_t j = i + 2;
    while (j < s.size() && !detail::is_space(s[j]) && s[j] != '>' && s[j] != '/') ++j;
    const std::string tag = detail::to_lower(std::string_view(s).substr(i + 2, j - i - 2));
    const auto gt = s.find('>', j);
    const std::size_t end = gt == std::string::npos ? s.size() : gt + 1;

    if (tag == "br") {
      Node n;
      n.tag = "br";
      n.begin = i;
      n.end = end;
      append(std::move(n));
      return end;
    }
    if (tag == "p" && !has_in_scope("p")) {
      Node n;
      n.tag = "p";
      n.begin = i;
      n.end = end;
      append(std::move(n));
      return end;
    }
    if (tag == "html" || tag == "body" || tag == "head") {
      // Closed at end of input; content after </body> still belongs to body.
      if (tag == "head") close_in_scope("head", end);
      return end;
    }
    for (std::size_t k = stack_.size(); k-- > 1;) {
      if (doc_.nodes_[stack_[k]].tag == tag) {
        while (stack_.size() > k) pop(end);
        break;
      }
    }
    return end;
  }

  bool has_in_scope(std::string_view tag) const {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      const std::string& t = doc_.nodes_[stack_[k]].tag;
      if (t == tag) return true;
      if (detail::is_scope_boundary(t)) return false;
    }
    return false;
  }

  std::size_t start_tag(std::size_t i) {
    const std::string& s = doc_.source_;
    std::size_t j = i + 1;
    while (j < s.size() && !detail::is_space(s[j]) && s[j] != '>' && s[j] != '/') ++j;
    Node n;
    n.tag = detail::to_lower(std::string_view(s).substr(i + 1, j - i - 1));
    n.begin = i;

    // Attributes.
    bool closed = false;
    while (j < s.size()) {
      while (j < s.size() && (detail::is_space(s[j]) || s[j] == '/')) ++j;
      if (j >= s.size()) break;
      if (s[j] == '>') {
        ++j;
        closed = true;
        break;
      }
      std::size_t k = j;
      while (k < s.size() && !detail::is_space(s[k]) && s[k] != '>' && s[k] != '=' &&
             !(s[k] == '/' && k + 1 < s.size() && s[k + 1] == '>')) {
        ++k;
      }
      if (k == j) ++k;  // lone '=' or similar junk
      Attribute attr{detail::to_lower(std::string_view(s).substr(j, k - j)), {}};
      j = k;
      std::size_t look = j;
      while (look < s.size() && detail::is_space(s[look])) ++look;
      if (look < s.size() && s[look] == '=') {
        j = look + 1;
        while (j < s.size() && detail::is_space(s[j])) ++j;
        if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
          const char q = s[j];
          const auto endq = s.find(q, j + 1);
          const std::size_t stop = endq == std::string::npos ? s.size() : endq;
          attr.value = detail::decode_entities(std::string_view(s).substr(j + 1, stop - j - 1));
          j = endq == std::string::npos ? s.size() : endq + 1;
        } else if (j < s.size() && s[j] == '{') {
          // JSX-style expression value: keep the braces verbatim.
          int depth = 0;
          std::size_t k2 = j;
          for (; k2 < s.size(); ++k2) {
            if (s[k2] == '{') ++depth;
            else if (s[k2] == '}' && --depth == 0) break;
          }
          const std::size_t stop = k2 < s.size() ? k2 + 1 : s.size();
          attr.value = s.substr(j, stop - j);
          j = stop;
        } else {
          std::size_t k2 = j;
          while (k2 < s.size() && !detail::is_space(s[k2]) && s[k2] != '>') ++k2;
          attr.value = detail::decode_entities(std::string_view(s).substr(j, k2 - j));
          j = k2;
        }
      }
      if (!attr.name.empty() && !n.has_attr(attr.name)) n.attrs.push_back(std::move(attr));
    }
    const std::size_t end = closed ? j : s.size();
    n.end = end;
    insert_element(std::move(n), end);
    return raw_text_tail(end);
  }

  void insert_element(Node n, std::size_t end) {
    const std::string tag = n.tag;
    if ((tag == "html" || tag == "body" || tag == "head") && open(tag)) return;
    if (tag == "form" && open("form")) return;

    if (detail::closes_p(tag)) close_in_scope("p", n.begin);
    if (detail::is_heading(tag) && detail::is_heading(current().tag)) pop(n.begin);
    if (tag == "li") close_in_scope("li", n.begin, {"ul", "ol"});
    if (tag == "dt" || tag == "dd") {
      close_in_scope("dt", n.begin, {"dl"});
      close_in_scope("dd", n.begin, {"dl"});
    }
    if (tag == "option" && current().tag == "option") pop(n.begin);
    if (tag == "optgroup") {
      if (current().tag == "option") pop(n.begin);
      if (current().tag == "optgroup") pop(n.begin);
    }
    if (tag == "tr") close_until_any({"tr"}, {"table", "tbody", "thead", "tfoot"}, n.begin);
    if (tag == "td" || tag == "th") close_until_any({"td", "th"}, {"tr", "table"}, n.begin);
    if (tag == "a" && open("a")) close_in_scope("a", n.begin);
    if (tag == "button" && open("button")) {
      for (std::size_t k = stack_.size(); k-- > 1;) {
        if (doc_.nodes_[stack_[k]].tag == "button") {
          while (stack_.size() > k) pop(n.begin);
          break;
        }
      }
    }

    const NodeId id = append(std::move(n));
    current().end = std::max(current().end, end);
    if (!detail::is_void(tag)) stack_.push_back(id);
  }

  void close_until_any(std::initializer_list<std::string_view> targets,
                       std::initializer_list<std::string_view> boundaries, std::size_t offset) {
    for (std::size_t k = stack_.size(); k-- > 1;) {
      const std::string& t = doc_.nodes_[stack_[k]].tag;
      if (detail::contains(targets, t)) {
        while (stack_.size() > k) pop(offset);
        return;
      }
      if (detail::contains(boundaries, t)) return;
    }
  }

  // Raw-text elements swallow everything up to their matching end tag.
  std::size_t raw_text_tail(std::size_t pos) {
    const std::string tag = current().tag;
    if (!detail::contains({"script", "style", "textarea", "title"}, tag) || stack_.back() == kRoot) return pos;
    const std::string& s = doc_.source_;
    const std::string lower = detail::to_lower(s.substr(pos));
    const auto close = lower.find("</" + tag);
    const std::size_t stop = close == std::string::npos ? s.size() : pos + close;
    if (stop > pos) {
      Node t;
      t.kind = NodeKind::text;
      t.text = (tag == "script" || tag == "style") ? s.substr(pos, stop - pos)
                                                      : detail::decode_entities(std::string_view(s).substr(pos, stop - pos));
      t.begin = pos;
      t.end = stop;
      append(std::move(t));
    }
    if (close == std::string::npos) {
      pop(s.size());
      return s.size();
    }
    const auto gt = s.find('>', stop);
    const std::size_t end = gt == std::string::npos ? s.size() : gt + 1;
    pop(end);
    return end;
  }

  Document doc_;
  std::vector<NodeId> stack_;
};

/// Parses markup into a best-effort element tree. Malformed markup never
/// fails; input that is not UTF-8 text raises InvalidInput.
inline Document parse_document(std::string_view source_text, std::string file_path) {
  if (!detail::looks_like_text(source_text)) {
    throw Error(ErrorKind::invalid_input, "input is not UTF-8 text: " + file_path);
  }
  return Parser(source_text, std::move(file_path)).run();
}

// ---------------------------------------------------------------------------
// Selectors. Generated selectors are either `#id` (when the id is unique and
// a plain identifier) or a child-combinator path of `tag:nth-of-type(k)`
// steps from a top-level element.

namespace detail {

inline bool plain_ident(std::string_view s) {
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
  });
}

}  // namespace detail

inline std::string selector_for(const Document& doc, NodeId id) {
  const Node& n = doc.node(id);
  if (const auto* v = n.attr("id"); v && detail::plain_ident(*v)) {
    std::size_t count = 0;
    for (NodeId e : doc.elements()) {
      if (const auto* o = doc.node(e).attr("id"); o && *o == *v) ++count;
    }
    if (count == 1) return "#" + *v;
  }
  std::vector<std::string> steps;
  for (NodeId cur = id; cur != kRoot && cur != kNoNode; cur = doc.node(cur).parent) {
    const Node& c = doc.node(cur);
    std::size_t index = 0;
    for (NodeId sib : doc.node(c.parent).children) {
      const Node& s = doc.node(sib);
      if (s.is_element() && s.tag == c.tag) ++index;
      if (sib == cur) break;
    }
    steps.push_back(c.tag + ":nth-of-type(" + std::to_string(index) + ")");
  }
  std::string out;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (!out.empty()) out += " > ";
    out += *it;
  }
  return out;
}

/// Resolves a selector in the generated grammar. Returns every matching
/// element (callers check uniqueness).
inline std::vector<NodeId> resolve_selector(const Document& doc, std::string_view selector) {
  std::vector<NodeId> out;
  if (selector.empty()) return out;
  if (selector[0] == '#') {
    const std::string_view want = selector.substr(1);
    for (NodeId e : doc.elements()) {
      if (const auto* v = doc.node(e).attr("id"); v && *v == want) out.push_back(e);
    }
    return out;
  }
  std::vector<NodeId> frontier{kRoot};
  std::size_t pos = 0;
  while (pos < selector.size()) {
    auto sep = selector.find(" > ", pos);
    const std::string_view step = selector.substr(pos, sep == std::string_view::npos ? std::string_view::npos : sep - pos);
    pos = sep == std::string_view::npos ? selector.size() : sep + 3;
    const auto colon = step.find(":nth-of-type(");
    if (colon == std::string_view::npos || step.back() != ')') return {};
    const std::string_view tag = step.substr(0, colon);
    const std::string_view num = step.substr(colon + 13, step.size() - colon - 14);
    std::size_t want = 0;
    for (char c : num) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return {};
      want = want * 10 + static_cast<std::size_t>(c - '0');
    }
    std::vector<NodeId> next;
    for (NodeId parent : frontier) {
      std::size_t index = 0;
      for (NodeId child : doc.node(parent).children) {
        const Node& c = doc.node(child);
        if (c.is_element() && c.tag == tag && ++index == want) next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

}  // namespace html
}  // namespace codea11y
