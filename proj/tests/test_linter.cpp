#include <chrono>
#include <set>

#include <gtest/gtest.h>

#include "codea11y/linter.hpp"
#include "support.hpp"

using namespace codea11y;
using testing_support::fixture;
using testing_support::slurp;

namespace {

const std::vector<std::string> kCorpus = {
    "button_no_name",      "contrast_default", "contrast_hover",   "contrast_large_text",  "form_label_variants",
    "form_no_label",       "heading_order",    "img_alt_empty",    "img_alt_uninformative", "img_missing_alt",
    "keyboard_traps",      "link_no_name",     "link_uninformative", "malformed",           "remote_stylesheet",
    "style_unresolved",
};

std::vector<Finding> lint_fixture(const std::string& name, const RuleConfig& cfg = {}) {
  return lint_file(fixture(name + ".html"), fixture(""), cfg);
}

}  // namespace

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, ByteIdentical) {
  const auto name = GetParam();
  EXPECT_EQ(findings_to_log(lint_fixture(name)), slurp("expected/" + name + ".json"));
}

INSTANTIATE_TEST_SUITE_P(Corpus, Golden, ::testing::ValuesIn(kCorpus),
                         [](const auto& info) { return info.param; });

TEST(LinterCorpus, CoversEveryRegisteredRule) {
  std::set<std::string> seen;
  for (const auto& name : kCorpus) {
    for (const auto& f : lint_fixture(name)) seen.insert(f.rule_id);
  }
  for (const auto& r : rule_registry()) EXPECT_TRUE(seen.count(std::string(r.id))) << r.id;
  EXPECT_GE(kCorpus.size(), 12u);
}

TEST(LinterCorpus, WholeCorpusUnderFiveSeconds) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) {
    for (const auto& name : kCorpus) lint_fixture(name);
  }
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(5));
}

TEST(LinterCorpus, CleanSetHasNoFindings) {
  for (const char* f : {"clean/landing.html", "clean/form.html", "clean/gallery.html"}) {
    EXPECT_TRUE(lint_file(fixture(f), fixture("clean"), {}).empty()) << f;
  }
  EXPECT_TRUE(lint_project(fixture("clean"), {}).empty());
}

TEST(LinterRules, EmptyAltIsNeedsReview) {
  const auto found = lint_fixture("img_alt_empty");
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].rule_id, "img-alt-empty");
  EXPECT_EQ(found[0].impact, Impact::needs_review);
}

TEST(LinterRules, HoverStateContrastFailure) {
  const auto found = lint_fixture("contrast_hover");
  const bool hover = std::any_of(found.begin(), found.end(), [](const Finding& f) {
    return f.rule_id == "color-contrast" && f.state == State::hover && f.message.find("2.53 ") != std::string::npos;
  });
  EXPECT_TRUE(hover);
}

TEST(LinterRules, LargeTextUsesLowerThreshold) {
  const char* page = R"(<style>.big { color: #949494; font-size: 24px; } .small { color: #949494; }</style>
                        <p class="big">Big</p><p class="small">Small</p>)";
  const auto doc = html::parse_document(page, "t.html");
  const auto found = run_rules(doc, css::StyleResolver(doc), {});
  ASSERT_EQ(found.size(), 1u);
  EXPECT_NE(found[0].element.selector.find("p:nth-of-type(2)"), std::string::npos);
}

TEST(LinterRules, RuleFilter) {
  RuleConfig cfg;
  cfg.enabled = {"link-name"};
  for (const auto& f : lint_fixture("malformed", cfg)) EXPECT_EQ(f.rule_id, "link-name");
  cfg.enabled = {"img-alt"};
  EXPECT_EQ(lint_fixture("malformed", cfg).size(), 1u);
}

TEST(LinterRules, CustomLexicon) {
  RuleConfig cfg;
  cfg.uninformative_lexicon = {"details"};
  const auto doc = html::parse_document(R"(<a href="/a">details</a><a href="/b">click here</a>)", "t.html");
  const auto found = run_rules(doc, css::StyleResolver(doc), cfg);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].rule_id, "link-name-uninformative");
}

TEST(LinterProject, KubeLikeGoldenAndSkipsDependencies) {
  const auto found = lint_project(fixture("projects/kube-like"), {});
  EXPECT_EQ(findings_to_log(found), slurp("expected/kube-like.json"));
  for (const auto& f : found) EXPECT_EQ(f.element.span.file_path.find("node_modules"), std::string::npos);
}

TEST(LinterProject, MissingRootIsIoError) {
  try {
    lint_project(fixture("does-not-exist"), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io_error);
  }
}

TEST(LinterLog, RoundTrip) {
  const auto found = lint_fixture("contrast_hover");
  const auto back = findings_from_log(findings_to_log(found));
  ASSERT_EQ(back.size(), found.size());
  for (std::size_t i = 0; i < found.size(); ++i) EXPECT_TRUE(back[i] == found[i]) << i;
}

TEST(LinterLog, SortedAndDeterministic) {
  const auto a = lint_fixture("keyboard_traps");
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end(), finding_less));
  EXPECT_EQ(findings_to_log(a), findings_to_log(lint_fixture("keyboard_traps")));
}
