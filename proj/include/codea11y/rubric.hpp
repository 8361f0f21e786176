#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "codea11y/css.hpp"
#include "codea11y/error.hpp"
#include "codea11y/html.hpp"
#include "codea11y/linter.hpp"

namespace codea11y {

inline constexpr std::string_view kRubricVersion = "1";

enum class TaskKind { T1_button_contrast, T2_form, T3_links, T4_alt_text };

inline constexpr std::array<TaskKind, 4> kAllTasks{TaskKind::T1_button_contrast, TaskKind::T2_form,
                                                   TaskKind::T3_links, TaskKind::T4_alt_text};

inline const char* task_id(TaskKind t) {
  switch (t) {
    case TaskKind::T1_button_contrast: return "T1";
    case TaskKind::T2_form: return "T2";
    case TaskKind::T3_links: return "T3";
    case TaskKind::T4_alt_text: return "T4";
  }
  return "T1";
}

inline const char* task_title(TaskKind t) {
  switch (t) {
    case TaskKind::T1_button_contrast: return "Button Visibility";
    case TaskKind::T2_form: return "Form Element";
    case TaskKind::T3_links: return "Add Section";
    case TaskKind::T4_alt_text: return "Enhance Image for SEO";
  }
  return "";
}

/// Accepts "T1".."T4" in any case.
inline std::optional<TaskKind> task_from_string(std::string_view s) {
  const std::string t = detail::lower_trim(s);
  for (TaskKind k : kAllTasks) {
    if (t == detail::lower_trim(task_id(k))) return k;
  }
  return std::nullopt;
}

inline const char* score_label(int score) {
  switch (score) {
    case 0: return "Unacceptable";
    case 1: return "Average";
    default: return "Good";
  }
}

struct Evidence {
  std::string criterion;
  bool pass = false;
  std::string detail;
  std::vector<ElementRef> elements;  // the elements the verdict rests on
  std::vector<Finding> findings;
};

struct RubricScore {
  TaskKind task = TaskKind::T1_button_contrast;
  int score = 0;
  std::vector<Evidence> evidence;
  std::string rubric_version = std::string(kRubricVersion);
  std::string file;
};

struct DescriptorCategory {
  std::string name;
  std::vector<std::string> keywords;  // lowercase single words
};

/// Alt-text descriptor categories. The defaults are replaceable keyword lists.
struct DescriptorConfig {
  std::array<DescriptorCategory, 4> categories;
  int required_count = 3;

  static DescriptorConfig defaults() {
    DescriptorConfig c;
    c.categories[0] = {"subject",
                       {"person", "man", "woman", "child", "girl", "boy", "people", "baby", "family", "team",
                        "student", "chef", "doctor", "worker", "dog", "cat", "bird", "horse", "car", "bus", "train",
                        "bicycle", "bike", "boat", "ship", "building", "house", "lighthouse", "tower", "bridge",
                        "town", "village", "tree", "flower", "mountain", "cake", "coffee", "cup", "book", "laptop",
                        "phone", "product", "chart", "graph", "map", "logo", "shoe", "bag", "plate", "pizza"}};
    c.categories[1] = {"action",
                       {"sitting", "standing", "walking", "running", "holding", "smiling", "playing", "reading",
                        "eating", "drinking", "working", "riding", "jumping", "looking", "talking", "cooking",
                        "typing", "waving", "pointing", "climbing", "swimming", "flying", "dancing", "writing",
                        "laughing", "hugging", "carrying", "wearing", "crashing", "blooming", "shining", "rising",
                        "sailing", "pouring", "serving", "leaning", "lying", "barking", "singing", "presenting"}};
    c.categories[2] = {"setting",
                       {"beach", "park", "street", "kitchen", "office", "forest", "field", "garden", "room",
                        "classroom", "stage", "studio", "market", "harbor", "harbour", "lake", "river", "sea",
                        "ocean", "coast", "coastal", "desert", "snow", "night", "dusk", "dawn", "sunset", "sunrise",
                        "background", "outdoors", "indoors", "downtown", "cafe", "restaurant", "library", "stadium",
                        "skyline", "hillside", "valley", "city", "countryside", "rain", "autumn", "winter"}};
    c.categories[3] = {"embedded-text",
                       {"text", "sign", "reads", "says", "caption", "titled", "labeled", "labelled", "banner",
                        "headline", "words", "slogan", "quote", "poster", "lettering", "inscription"}};
    return c;
  }
};

struct ScoreConfig {
  RuleConfig rules{};
  DescriptorConfig descriptors = DescriptorConfig::defaults();
};

namespace rubric_detail {

inline std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'') {
      cur += static_cast<char>(std::tolower(u));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

inline bool keyword_hit(const std::vector<std::string>& tokens, const std::vector<std::string>& keywords) {
  for (const auto& t : tokens) {
    for (const auto& k : keywords) {
      if (t == k || t == k + "s" || t == k + "es") return true;
    }
  }
  return false;
}

inline bool has_quoted_text(std::string_view text) {
  static const std::regex kQuoted("\"[^\"]+\"|\xE2\x80\x9C[^\xE2]+\xE2\x80\x9D");
  const std::string s(text);
  return std::regex_search(s, kQuoted);
}

inline Evidence element_evidence(std::string criterion, bool pass, std::string detail_text,
                                 const html::Document& doc, const std::vector<html::NodeId>& ids) {
  Evidence e{std::move(criterion), pass, std::move(detail_text), {}, {}};
  for (html::NodeId id : ids) e.elements.push_back(make_element_ref(doc, id));
  return e;
}

inline std::string file_basename(std::string_view src) {
  std::string s(src);
  if (auto q = s.find_first_of("?#"); q != std::string::npos) s.resize(q);
  if (auto slash = s.find_last_of('/'); slash != std::string::npos) s = s.substr(slash + 1);
  return detail::lower_trim(s);
}

}  // namespace rubric_detail

/// Names the descriptor categories an alt text covers.
inline std::vector<std::string> matched_descriptors(std::string_view alt, const DescriptorConfig& cfg) {
  const auto tokens = rubric_detail::words(alt);
  std::vector<std::string> out;
  for (const auto& cat : cfg.categories) {
    bool hit = rubric_detail::keyword_hit(tokens, cat.keywords);
    if (!hit && cat.name == "embedded-text") hit = rubric_detail::has_quoted_text(alt);
    if (hit) out.push_back(cat.name);
  }
  return out;
}

namespace rubric_detail {

inline RubricScore score_t1(const html::Document& doc, const css::StyleResolver& styles, const ScoreConfig& cfg) {
  RubricScore r{TaskKind::T1_button_contrast, 2, {}, std::string(kRubricVersion), doc.file_path()};
  std::vector<html::NodeId> buttons;
  for (html::NodeId id : doc.elements()) {
    if (is_button_like(doc.node(id))) buttons.push_back(id);
  }
  if (buttons.empty()) {
    r.score = 0;
    r.evidence.push_back({"target absent", false, "no button found", {}, {}});
    return r;
  }
  for (html::NodeId id : buttons) {
    int tier = 2;
    for (const auto& c : contrast_checks(doc, styles, id, cfg.rules.thresholds)) {
      const bool ok = c.passes();
      std::string text = format_ratio(c.ratio) + ":1 " + c.style.foreground.hex() + " on " + c.style.background.hex() +
                         (ok ? " >= " : " < ") + format_ratio(c.required) + ":1";
      Evidence e = element_evidence(std::string("contrast ") + to_string(c.state), ok, std::move(text), doc, {id});
      if (!ok) {
        Finding f;
        f.rule_id = "color-contrast";
        f.impact = Impact::serious;
        f.element = e.elements.front();
        f.message = "Text contrast " + format_ratio(c.ratio) + ":1 is below " + format_ratio(c.required) + ":1" +
                    (c.state == State::default_state ? "" : std::string(" in ") + to_string(c.state) + " state");
        f.wcag_tag = "1.4.3";
        f.state = c.state;
        e.findings.push_back(std::move(f));
        tier = std::min(tier, c.state == State::default_state ? 0 : 1);
      }
      r.evidence.push_back(std::move(e));
    }
    r.score = std::min(r.score, tier);
  }
  return r;
}

inline RubricScore score_t2(const html::Document& doc, const css::StyleResolver& styles, const ScoreConfig& cfg) {
  RubricScore r{TaskKind::T2_form, 0, {}, std::string(kRubricVersion), doc.file_path()};
  std::vector<html::NodeId> controls;
  for (html::NodeId id : doc.elements()) {
    if (is_labelable_control(doc.node(id))) controls.push_back(id);
  }
  if (controls.empty()) {
    r.evidence.push_back({"target absent", false, "no form control found", {}, {}});
    return r;
  }
  const NameComputer names{doc};
  std::vector<html::NodeId> unlabelled;
  for (html::NodeId id : controls) {
    if (!names.control_labelled(id)) unlabelled.push_back(id);
  }
  const bool labels_ok = unlabelled.empty();
  r.evidence.push_back(labels_ok
                           ? element_evidence("form labeling", true, "every control has a label", doc, controls)
                           : element_evidence("form labeling", false,
                                              std::to_string(unlabelled.size()) + " control(s) without a label", doc,
                                              unlabelled));

  // Keyboard: natural tab order, no focusable control removed from it, no
  // mouse-only handlers.
  std::vector<html::NodeId> kb_bad;
  for (html::NodeId id : doc.elements()) {
    const html::Node& n = doc.node(id);
    const auto ti = tabindex_of(n);
    if (ti && *ti > 0) kb_bad.push_back(id);
    else if (ti && *ti < 0 && (is_labelable_control(n) || is_button_like(n))) kb_bad.push_back(id);
  }
  RuleConfig kb_rules = cfg.rules;
  kb_rules.enabled = {"click-no-keyboard", "tabindex-positive"};
  std::vector<Finding> kb_findings = run_rules(doc, styles, kb_rules);
  for (const auto& f : kb_findings) {
    if (f.rule_id == "click-no-keyboard") {
      for (html::NodeId id : html::resolve_selector(doc, f.element.selector)) kb_bad.push_back(id);
    }
  }
  std::sort(kb_bad.begin(), kb_bad.end());
  kb_bad.erase(std::unique(kb_bad.begin(), kb_bad.end()), kb_bad.end());
  const bool keyboard_ok = kb_bad.empty();
  Evidence kb = keyboard_ok ? element_evidence("keyboard navigation", true, "natural tab order, no mouse-only handlers",
                                               doc, {})
                            : element_evidence("keyboard navigation", false,
                                               std::to_string(kb_bad.size()) + " element(s) break keyboard access",
                                               doc, kb_bad);
  kb.findings = std::move(kb_findings);
  r.evidence.push_back(std::move(kb));
  r.score = (labels_ok ? 1 : 0) + (keyboard_ok ? 1 : 0);
  return r;
}

inline RubricScore score_t3(const html::Document& doc, const ScoreConfig& cfg) {
  RubricScore r{TaskKind::T3_links, 2, {}, std::string(kRubricVersion), doc.file_path()};
  const NameComputer names{doc};
  std::vector<html::NodeId> links, missing, uninformative;
  for (html::NodeId id : doc.elements_by_tag("a")) {
    if (!doc.node(id).has_attr("href")) continue;
    links.push_back(id);
    const std::string name = names.link_or_button_name(id);
    if (detail::lower_trim(name).empty()) missing.push_back(id);
    else if (is_uninformative(name, cfg.rules.uninformative_lexicon, {"a", "link", "href", "url"}, 4)) {
      uninformative.push_back(id);
    }
  }
  if (links.empty()) {
    r.score = 0;
    r.evidence.push_back({"target absent", false, "no link found", {}, {}});
    return r;
  }
  r.evidence.push_back(missing.empty()
                           ? element_evidence("link descriptions present", true, "every link has a name", doc, links)
                           : element_evidence("link descriptions present", false,
                                              std::to_string(missing.size()) + " link(s) without a name", doc, missing));
  r.evidence.push_back(
      uninformative.empty()
          ? element_evidence("link descriptions informative", true, "no generic link text", doc, links)
          : element_evidence("link descriptions informative", false,
                             std::to_string(uninformative.size()) + " link(s) with generic text", doc, uninformative));
  r.score = !missing.empty() ? 0 : !uninformative.empty() ? 1 : 2;
  return r;
}

inline RubricScore score_t4(const html::Document& doc, const ScoreConfig& cfg) {
  RubricScore r{TaskKind::T4_alt_text, 2, {}, std::string(kRubricVersion), doc.file_path()};
  const auto images = doc.elements_by_tag("img");
  if (images.empty()) {
    r.score = 0;
    r.evidence.push_back({"target absent", false, "no image found", {}, {}});
    return r;
  }
  for (html::NodeId id : images) {
    const html::Node& n = doc.node(id);
    const auto* alt = n.attr("alt");
    if (!alt || detail::lower_trim(*alt).empty()) {
      r.score = 0;
      r.evidence.push_back(element_evidence("alt text present", false, alt ? "alt is empty" : "alt is missing", doc, {id}));
      continue;
    }
    const std::string base = file_basename(n.attr("src") ? *n.attr("src") : "");
    const std::string stem = base.substr(0, base.find('.'));
    if (is_uninformative(*alt, cfg.rules.uninformative_lexicon, {"img", "image", "alt", "alt text", base, stem})) {
      r.score = 0;
      r.evidence.push_back(element_evidence("alt text informative", false, "alt \"" + *alt + "\" only names the field",
                                            doc, {id}));
      continue;
    }
    const auto matched = matched_descriptors(*alt, cfg.descriptors);
    const bool enough = static_cast<int>(matched.size()) >= cfg.descriptors.required_count;
    std::string which;
    for (const auto& m : matched) which += (which.empty() ? "" : ", ") + m;
    r.evidence.push_back(element_evidence(
        "alt text descriptors", enough,
        std::to_string(matched.size()) + " of 4 descriptors" + (which.empty() ? "" : " (" + which + ")") + ", need " +
            std::to_string(cfg.descriptors.required_count),
        doc, {id}));
    r.score = std::min(r.score, enough ? 2 : 1);
  }
  return r;
}

}  // namespace rubric_detail

/// Scores one submission against a task's evaluation criteria.
inline RubricScore score_task(const html::Document& doc, const css::StyleResolver& styles, TaskKind task,
                              const ScoreConfig& cfg = {}) {
  if (cfg.descriptors.required_count < 1 || cfg.descriptors.required_count > 4) {
    throw Error(ErrorKind::score_error, "required_count must be within 1..4");
  }
  switch (task) {
    case TaskKind::T1_button_contrast: return rubric_detail::score_t1(doc, styles, cfg);
    case TaskKind::T2_form: return rubric_detail::score_t2(doc, styles, cfg);
    case TaskKind::T3_links: return rubric_detail::score_t3(doc, cfg);
    case TaskKind::T4_alt_text: return rubric_detail::score_t4(doc, cfg);
  }
  throw Error(ErrorKind::score_error, "unknown task");
}

/// Reads, parses and scores a submission file. Unreadable or non-text input
/// raises ScoreError.
inline RubricScore score_file(const std::filesystem::path& file, TaskKind task, const ScoreConfig& cfg = {}) {
  try {
    const std::string text = read_file(file);
    const html::Document doc = html::parse_document(text, file.filename().generic_string());
    const css::StyleResolver styles(doc, std::filesystem::absolute(file), std::filesystem::absolute(file).parent_path());
    return score_task(doc, styles, task, cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::score_error) throw;
    throw Error(ErrorKind::score_error, std::string("cannot score ") + file.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports.

inline nlohmann::ordered_json score_to_json(const RubricScore& s) {
  nlohmann::ordered_json j;
  j["task"] = task_id(s.task);
  j["file"] = s.file;
  j["score"] = s.score;
  j["label"] = score_label(s.score);
  j["rubric_version"] = s.rubric_version;
  auto ev = nlohmann::ordered_json::array();
  for (const auto& e : s.evidence) {
    nlohmann::ordered_json x;
    x["criterion"] = e.criterion;
    x["pass"] = e.pass;
    x["detail"] = e.detail;
    auto els = nlohmann::ordered_json::array();
    for (const auto& el : e.elements) {
      els.push_back({{"selector", el.selector}, {"line", el.span.start_line}, {"tag", el.tag}});
    }
    x["elements"] = els;
    auto fs = nlohmann::ordered_json::array();
    for (const auto& f : e.findings) fs.push_back(finding_to_json(f));
    x["findings"] = fs;
    ev.push_back(std::move(x));
  }
  j["evidence"] = ev;
  return j;
}

inline std::string score_text(const RubricScore& s) {
  std::string out = std::string(task_id(s.task)) + " " + task_title(s.task) + ": " + std::to_string(s.score) + " (" +
                    score_label(s.score) + ")" + (s.file.empty() ? "" : "  " + s.file) + "\n";
  for (const auto& e : s.evidence) {
    out += std::string("  [") + (e.pass ? "pass" : "FAIL") + "] " + e.criterion + ": " + e.detail;
    if (!e.pass && !e.elements.empty()) out += "  at " + e.elements.front().selector;
    out += "\n";
  }
  return out;
}

struct TaskSummary {
  TaskKind task;
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;  // sample standard deviation (n - 1); 0 for a single score
};

struct AggregateReport {
  std::string rubric_version;
  std::vector<TaskSummary> tasks;  // tasks with at least one score, in task order

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["rubric_version"] = rubric_version;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& t : tasks) {
      nlohmann::ordered_json x;
      x["task"] = task_id(t.task);
      x["title"] = task_title(t.task);
      x["n"] = t.n;
      x["mean"] = t.mean;
      x["sd"] = t.sd;
      arr.push_back(std::move(x));
    }
    j["tasks"] = arr;
    return j;
  }

  std::string to_text() const {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-28s %4s %6s %6s\n", "Task", "n", "mean", "sd");
    out += buf;
    for (const auto& t : tasks) {
      const std::string name = std::string(task_id(t.task)) + " " + task_title(t.task);
      std::snprintf(buf, sizeof buf, "%-28s %4zu %6.2f %6.2f\n", name.c_str(), t.n, t.mean, t.sd);
      out += buf;
    }
    return out;
  }
};

/// Per-task mean scores. Throws EmptyReport for no input and ScoreError when
/// rubric versions differ.
inline AggregateReport aggregate_scores(const std::vector<RubricScore>& scores) {
  if (scores.empty()) throw Error(ErrorKind::empty_report, "no scores to aggregate");
  AggregateReport rep;
  rep.rubric_version = scores.front().rubric_version;
  for (const auto& s : scores) {
    if (s.rubric_version != rep.rubric_version) {
      throw Error(ErrorKind::score_error, "mixed rubric versions: " + rep.rubric_version + " and " + s.rubric_version);
    }
  }
  for (TaskKind t : kAllTasks) {
    std::vector<int> v;
    for (const auto& s : scores) {
      if (s.task == t) v.push_back(s.score);
    }
    if (v.empty()) continue;
    TaskSummary sum{t, v.size(), 0, 0};
    for (int x : v) sum.mean += x;
    sum.mean /= static_cast<double>(v.size());
    double var = 0;
    for (int x : v) var += (x - sum.mean) * (x - sum.mean);
    sum.sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    rep.tasks.push_back(sum);
  }
  return rep;
}

}  // namespace codea11y
