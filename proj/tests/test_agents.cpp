#include <functional>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "codea11y/agents.hpp"
#include "codea11y/model_client.hpp"
#include "support.hpp"

using namespace codea11y;
using testing_support::fixture;
using testing_support::slurp;

namespace {

/// Client whose answer is computed by a callback; records every request.
class FnClient final : public ModelClient {
 public:
  explicit FnClient(std::function<std::string(const ModelRequest&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const ModelRequest& r) override {
    requests.push_back(r);
    return fn_(r);
  }
  std::string kind() const override { return "test"; }
  std::vector<ModelRequest> requests;

 private:
  std::function<std::string(const ModelRequest&)> fn_;
};

std::string sentinel(const ModelRequest&) { return std::string(kNoRemindersSentinel); }

std::set<std::string> kinds_of(const std::vector<PlaceholderFinding>& found) {
  std::set<std::string> out;
  for (const auto& f : found) out.insert(to_string(f.kind));
  return out;
}

std::vector<std::filesystem::path> md_files(const std::string& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture(dir))) {
    if (e.path().extension() == ".md") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Finding form_label_finding() {
  for (const auto& f : lint_project(fixture("projects/kube-like"), {})) {
    if (f.rule_id == "form-label") return f;
  }
  throw std::runtime_error("kube-like fixture lost its form-label finding");
}

}  // namespace

TEST(Templates, ResponderCarriesDirectives) {
  const auto& t = responder_template();
  const std::vector<std::string> required = {
      "I am unfamiliar with accessibility and need to write code that conforms with WCAG 2.1 level AA criteria.",
      "Be an accessibility coach that makes me account for all accessibility requirements.",
      "Use reputable sources such as w3.org, webaim.org and provide links and references for additional learning.",
      "Don't give placeholder variables but tell me where to give meaningful values.",
      "Prioritise my current request and don't mention accessibility if I give a generic request like \"Hi\".",
  };
  for (const auto& d : required) EXPECT_NE(std::find(t.directives.begin(), t.directives.end(), d), t.directives.end()) << d;
  const auto rendered = t.render("### PROMPT\nx\n");
  EXPECT_EQ(rendered.rfind("### SYSTEM\n", 0), 0u);
  EXPECT_NE(rendered.find("- Be an accessibility coach"), std::string::npos);
  EXPECT_TRUE(rendered.ends_with("### PROMPT\nx\n"));
}

TEST(Templates, CorrectionAndReminderDirectives) {
  const auto& c = correction_template().directives;
  EXPECT_EQ(c.at(0), "Review the accessibility checker log and provide feedback to fix errors relevant to current chat context.");
  EXPECT_EQ(c.at(1), "If a log error relevant to current chat context occurs, provide a code snippet to fix it.");
  const auto& r = reminder_template().directives;
  EXPECT_EQ(r.at(0), "Is there an additional step required by the developer to meet accessibility standards after pasting code?");
  EXPECT_NE(r.at(1).find("\"No reminders needed.\""), std::string::npos);
  EXPECT_NE(r.at(2).find("visually inspect element for colour contrast"), std::string::npos);
  EXPECT_TRUE(plain_template().directives.empty());
}

TEST(ParseResponse, BlocksAndCitations) {
  const auto r = parse_response(
      "See https://webaim.org/resources/contrastchecker/.\n\n```HTML\n<button>Go</button>\n```\n"
      "and (https://www.w3.org/WAI/) again https://webaim.org/resources/contrastchecker/\n```\nplain\n```\n");
  ASSERT_EQ(r.code_blocks.size(), 2u);
  EXPECT_EQ(r.code_blocks[0].language, "html");
  EXPECT_EQ(r.code_blocks[0].code, "<button>Go</button>");
  EXPECT_EQ(r.code_blocks[1].language, "");
  EXPECT_EQ(r.citations,
            (std::vector<std::string>{"https://webaim.org/resources/contrastchecker/", "https://www.w3.org/WAI/"}));
}

// A truncated answer still gets its trailing code scanned.
TEST(ParseResponse, UnterminatedFenceRunsToEnd) {
  const auto r = parse_response("```html\n<p>cut off");
  ASSERT_EQ(r.code_blocks.size(), 1u);
  EXPECT_EQ(r.code_blocks[0].code, "<p>cut off");
}

TEST(Responder, SendsRenderedBundle) {
  FnClient client([](const ModelRequest&) { return "Hello"; });
  ContextBundle b;
  b.user_prompt = "Hi";
  const auto r = responder_run(b, client);
  EXPECT_EQ(r.markdown, "Hello");
  ASSERT_EQ(client.requests.size(), 1u);
  EXPECT_EQ(client.requests[0].agent, AgentKind::responder);
  EXPECT_NE(client.requests[0].prompt.find("### PROMPT\nHi\n"), std::string::npos);
}

TEST(Responder, PropagatesUnavailable) {
  FnClient client([](const ModelRequest&) -> std::string { throw AgentUnavailable("down", true); });
  ContextBundle b;
  b.user_prompt = "x";
  EXPECT_THROW(responder_run(b, client), AgentUnavailable);
}

TEST(Correction, SkipsModelWithoutFindings) {
  FnClient client([](const ModelRequest&) { return "should not be called"; });
  EXPECT_FALSE(correction_run({}, {{Role::user, "x", {}}}, client).has_value());
  EXPECT_TRUE(client.requests.empty());
}

TEST(Correction, ModelAnswerWithCodeKept) {
  FnClient client([](const ModelRequest&) { return "Fix:\n```html\n<label for=\"e\">Email</label>\n```\n"; });
  const auto r = correction_run({form_label_finding()}, {{Role::user, "community/index.html", {}}}, client);
  ASSERT_TRUE(r.has_value());
  ASSERT_EQ(r->code_blocks.size(), 1u);
  EXPECT_NE(client.requests.at(0).prompt.find(" form-label "), std::string::npos);
  EXPECT_EQ(client.requests[0].agent, AgentKind::correction);
}

TEST(Correction, EmptyAnswerGetsDeterministicFix) {
  FnClient client([](const ModelRequest&) { return ""; });
  const auto r = correction_run({form_label_finding()}, {{Role::user, "community/index.html", {}}}, client);
  ASSERT_TRUE(r.has_value());
  ASSERT_EQ(r->code_blocks.size(), 1u);
  EXPECT_NE(r->code_blocks[0].code.find("<label>Email\n  <input"), std::string::npos);
  EXPECT_NE(r->markdown.find("form-label"), std::string::npos);
}

TEST(SuggestFix, EveryRuleHasASnippet) {
  for (const auto& rule : rule_registry()) {
    Finding f;
    f.rule_id = std::string(rule.id);
    f.element.tag = rule.id.rfind("img", 0) == 0 ? "img" : rule.id.rfind("link", 0) == 0 ? "a" : "div";
    f.element.attrs = {{"id", "x"}};
    const auto fix = suggest_fix(f);
    EXPECT_FALSE(fix.code.empty()) << rule.id;
    EXPECT_TRUE(detect_placeholders({fix}).empty() || rule.id.rfind("img", 0) == 0) << rule.id;
  }
}

TEST(Placeholders, FlaggedFixturesMatchExpectedKinds) {
  const auto expected = nlohmann::json::parse(slurp("placeholders/expected.json"));
  const auto files = md_files("placeholders/flagged");
  ASSERT_EQ(files.size(), expected.size());
  for (const auto& path : files) {
    const auto name = path.filename().string();
    ASSERT_TRUE(expected.contains(name)) << name;
    const auto want = expected.at(name).get<std::set<std::string>>();
    const auto found = detect_placeholders(parse_response(read_file(path)).code_blocks);
    EXPECT_EQ(kinds_of(found), want) << name;
  }
}

TEST(Placeholders, CleanFixturesHaveNone) {
  const auto files = md_files("placeholders/clean");
  ASSERT_FALSE(files.empty());
  for (const auto& path : files) {
    const auto found = detect_placeholders(parse_response(read_file(path)).code_blocks);
    EXPECT_TRUE(found.empty()) << path.filename() << ": " << (found.empty() ? "" : found[0].excerpt);
  }
}

TEST(Placeholders, SpansPointAtExcerpt) {
  const std::vector<CodeBlock> blocks{{"html", "<p>ok</p>"}, {"html", "<img src=\"a.png\" alt=\"\">"}};
  const auto found = detect_placeholders(blocks);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].block, 1u);
  EXPECT_EQ(blocks[1].code.substr(found[0].offset, found[0].length), found[0].excerpt);
  EXPECT_EQ(found[0].kind, PlaceholderKind::empty_attr);
}

TEST(Placeholders, DecorativeImageExempt) {
  EXPECT_TRUE(detect_placeholders({{"html", "<img src=\"rule.png\" alt=\"\" role=\"presentation\">"}}).empty());
  EXPECT_TRUE(detect_placeholders({{"html", "<img src=\"rule.png\" alt=\"\" aria-hidden=\"true\">"}}).empty());
}

TEST(Placeholders, UrlIsNotAComment) {
  EXPECT_TRUE(detect_placeholders({{"css", "a { background: url(https://example.com/todo.png); }"}}).empty());
  EXPECT_EQ(detect_placeholders({{"js", "const x = 1; // TODO: wire up"}}).size(), 1u);
}

TEST(Reminder, DetectorOverridesSentinelOnFlaggedFixtures) {
  for (const auto& path : md_files("placeholders/flagged")) {
    FnClient client(sentinel);
    const auto response = parse_response(read_file(path));
    const ChatContext chat{{Role::user, "add an image", {}}, {Role::responder, response.markdown, {}}};
    const auto r = reminder_run(chat, response, client);
    ASSERT_TRUE(r.has_value()) << path.filename();
    EXPECT_EQ(r->source, ReminderSource::detector) << path.filename();
    EXPECT_EQ(r->text.find('\n'), std::string::npos);
    EXPECT_LE(r->text.size(), kReminderMaxChars);
  }
}

TEST(Reminder, SentinelAndCleanCodeMeansNone) {
  FnClient client(sentinel);
  const auto response = parse_response(slurp("placeholders/clean/labeled_form.md"));
  EXPECT_FALSE(reminder_run({{Role::user, "form", {}}}, response, client).has_value());
  FnClient padded([](const ModelRequest&) { return "  No reminders needed.\n"; });
  EXPECT_FALSE(reminder_run({{Role::user, "form", {}}}, response, padded).has_value());
}

TEST(Reminder, ModelLineCollapsedAndClipped) {
  FnClient client([](const ModelRequest&) {
    return "Check contrast\n\n  on hover.\n" + std::string(400, 'x') + "\xC3\xA9\xC3\xA9";
  });
  const auto r = reminder_run({{Role::user, "b", {}}}, parse_response("ok"), client);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->source, ReminderSource::model);
  EXPECT_EQ(r->text.rfind("Check contrast; on hover.; ", 0), 0u);
  EXPECT_LE(r->text.size(), kReminderMaxChars);
  EXPECT_TRUE(r->text.ends_with("..."));
}

TEST(Reminder, BothSources) {
  FnClient client([](const ModelRequest&) { return "Test with a screen reader."; });
  const auto response = parse_response(slurp("placeholders/flagged/empty_label.md"));
  const auto r = reminder_run({{Role::user, "form", {}}}, response, client);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->source, ReminderSource::both);
  EXPECT_EQ(r->text.rfind("Test with a screen reader.; Replace the placeholder", 0), 0u);
}

TEST(Reminder, ModelFailureFallsBackToDetector) {
  FnClient down([](const ModelRequest&) -> std::string { throw AgentUnavailable("timeout", true); });
  const auto flagged = parse_response(slurp("placeholders/flagged/todo_comment.md"));
  const auto r = reminder_run({{Role::user, "x", {}}}, flagged, down);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->source, ReminderSource::detector);
  EXPECT_FALSE(reminder_run({{Role::user, "x", {}}}, parse_response("fine"), down).has_value());
}

TEST(Reminder, ResponseSentOnceUnderResponseHeader) {
  FnClient client(sentinel);
  const auto response = parse_response("Here you go.");
  reminder_run({{Role::user, "earlier", {}}, {Role::responder, "old", {}}, {Role::user, "now", {}},
                {Role::responder, "Here you go.", {}}},
               response, client);
  const auto& p = client.requests.at(0).prompt;
  EXPECT_NE(p.find("### PROMPT\nnow\n"), std::string::npos);
  EXPECT_NE(p.find("### RESPONSE\nHere you go.\n"), std::string::npos);
  EXPECT_EQ(p.find("[responder] Here you go."), std::string::npos);
  EXPECT_NE(p.find("[responder] old"), std::string::npos);
}

TEST(Scripted, FirstMatchAgentFilterAndErrors) {
  ScriptedClient client(load_script(fixture("scripts/demo_script.json")));
  EXPECT_EQ(client.complete({AgentKind::responder, "### PROMPT\nHi\n"}), "Hi! What are you working on today?");
  EXPECT_EQ(client.complete({AgentKind::reminder, "### PROMPT\nHi\n"}), "No reminders needed.");
  ScriptedClient failing(load_script(fixture("scripts/responder_timeout.json")));
  try {
    failing.complete({AgentKind::responder, "x"});
    FAIL();
  } catch (const AgentUnavailable& e) {
    EXPECT_TRUE(e.retriable());
  }
  EXPECT_EQ(client.call_count(), 2u);
}

TEST(Scripted, RejectsScriptWithoutFallback) {
  EXPECT_THROW(ScriptedClient(std::vector<ScriptEntry>{{"x", "y", std::nullopt, std::nullopt}}), Error);
  EXPECT_THROW(parse_script(nlohmann::json::parse(R"([{"match":"","agent":"nobody"}])")), Error);
}
