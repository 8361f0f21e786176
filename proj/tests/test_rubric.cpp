#include <gtest/gtest.h>

#include <cmath>

#include "codea11y/rubric.hpp"
#include "support.hpp"

using namespace codea11y;
using testing_support::fixture;
using testing_support::TempDir;

namespace {

RubricScore score_inline(const std::string& html, TaskKind task, const ScoreConfig& cfg = {}) {
  TempDir dir("rubric");
  dir.write("index.html", html);
  return score_file(dir.path() / "index.html", task, cfg);
}

std::string button_page(const std::string& hover, const std::string& focus, const std::string& active) {
  return "<!DOCTYPE html><html><head><style>\n"
         ".b { color: #ffffff; background-color: #1f4e79; }\n"
         ".b:hover { background-color: " + hover + "; }\n"
         ".b:focus { background-color: " + focus + "; }\n"
         ".b:active { background-color: " + active + "; }\n"
         "</style></head><body><button class=\"b\">Go</button></body></html>\n";
}

const Evidence* find_evidence(const RubricScore& s, const std::string& criterion) {
  for (const auto& e : s.evidence) {
    if (e.criterion == criterion) return &e;
  }
  return nullptr;
}

RubricScore make_score(TaskKind t, int score) {
  RubricScore s;
  s.task = t;
  s.score = score;
  return s;
}

}  // namespace

struct RubricCase {
  const char* file;
  TaskKind task;
  int expected;
};

class RubricFixtures : public ::testing::TestWithParam<RubricCase> {};

TEST_P(RubricFixtures, ScoresExactly) {
  const auto& c = GetParam();
  const RubricScore s = score_file(fixture(std::string("rubric/") + c.file), c.task);
  EXPECT_EQ(s.score, c.expected) << score_text(s);
  EXPECT_EQ(s.task, c.task);
  EXPECT_EQ(s.rubric_version, kRubricVersion);
}

INSTANTIATE_TEST_SUITE_P(
    All, RubricFixtures,
    ::testing::Values(RubricCase{"t1_score0.html", TaskKind::T1_button_contrast, 0},
                      RubricCase{"t1_score1.html", TaskKind::T1_button_contrast, 1},
                      RubricCase{"t1_score2.html", TaskKind::T1_button_contrast, 2},
                      RubricCase{"t2_score0.html", TaskKind::T2_form, 0},
                      RubricCase{"t2_score1.html", TaskKind::T2_form, 1},
                      RubricCase{"t2_score2.html", TaskKind::T2_form, 2},
                      RubricCase{"t3_score0.html", TaskKind::T3_links, 0},
                      RubricCase{"t3_score1.html", TaskKind::T3_links, 1},
                      RubricCase{"t3_score2.html", TaskKind::T3_links, 2},
                      RubricCase{"t4_score0.html", TaskKind::T4_alt_text, 0},
                      RubricCase{"t4_score1.html", TaskKind::T4_alt_text, 1},
                      RubricCase{"t4_score2.html", TaskKind::T4_alt_text, 2}),
    [](const auto& info) {
      std::string n = info.param.file;
      return n.substr(0, n.find('.'));
    });

TEST(RubricT1, AllStatesMustPassForGood) {
  // #163a5c and #0b1f33 pass against white; #6fa8dc is 2.53:1.
  EXPECT_EQ(score_inline(button_page("#163a5c", "#163a5c", "#0b1f33"), TaskKind::T1_button_contrast).score, 2);
  EXPECT_EQ(score_inline(button_page("#6fa8dc", "#163a5c", "#0b1f33"), TaskKind::T1_button_contrast).score, 1);
  EXPECT_EQ(score_inline(button_page("#163a5c", "#6fa8dc", "#0b1f33"), TaskKind::T1_button_contrast).score, 1);
  EXPECT_EQ(score_inline(button_page("#163a5c", "#163a5c", "#6fa8dc"), TaskKind::T1_button_contrast).score, 1);
}

TEST(RubricT1, StatesWithoutRulesInheritDefault) {
  const std::string page =
      "<html><head><style>.b { color: #ffffff; background-color: #1f4e79; }</style></head>"
      "<body><button class=\"b\">Go</button></body></html>";
  const RubricScore s = score_inline(page, TaskKind::T1_button_contrast);
  EXPECT_EQ(s.score, 2) << score_text(s);
  // States without their own rules resolve to the default colours, so only
  // the default check is reported.
  EXPECT_NE(find_evidence(s, "contrast default"), nullptr);
  EXPECT_EQ(find_evidence(s, "contrast hover"), nullptr);
}

TEST(RubricT1, FailedStateCitesElementAndFinding) {
  const RubricScore s = score_inline(button_page("#6fa8dc", "#163a5c", "#0b1f33"), TaskKind::T1_button_contrast);
  const Evidence* e = find_evidence(s, "contrast hover");
  ASSERT_NE(e, nullptr);
  EXPECT_FALSE(e->pass);
  ASSERT_EQ(e->elements.size(), 1u);
  EXPECT_EQ(e->elements[0].tag, "button");
  ASSERT_EQ(e->findings.size(), 1u);
  EXPECT_EQ(e->findings[0].rule_id, "color-contrast");
  EXPECT_EQ(e->findings[0].state, State::hover);
  EXPECT_NE(e->detail.find("2.53"), std::string::npos) << e->detail;
}

TEST(Rubric, EveryFailedCriterionCitesEvidence) {
  for (const auto& [file, task] : std::vector<std::pair<const char*, TaskKind>>{
           {"t1_score0.html", TaskKind::T1_button_contrast},
           {"t2_score0.html", TaskKind::T2_form},
           {"t3_score0.html", TaskKind::T3_links},
           {"t4_score0.html", TaskKind::T4_alt_text}}) {
    const RubricScore s = score_file(fixture(std::string("rubric/") + file), task);
    bool any_failed = false;
    for (const auto& e : s.evidence) {
      if (e.pass) continue;
      any_failed = true;
      EXPECT_TRUE(!e.elements.empty() || !e.findings.empty()) << file << ": " << e.criterion;
      for (const auto& el : e.elements) EXPECT_GT(el.span.start_line, 0u) << file;
    }
    EXPECT_TRUE(any_failed) << file;
  }
}

TEST(Rubric, AbsentTargetScoresZero) {
  const std::string empty = "<html><body><p>Nothing here</p></body></html>";
  for (TaskKind t : kAllTasks) {
    const RubricScore s = score_inline(empty, t);
    EXPECT_EQ(s.score, 0) << task_id(t);
    ASSERT_EQ(s.evidence.size(), 1u);
    EXPECT_EQ(s.evidence[0].criterion, "target absent");
  }
}

TEST(RubricT2, LabelAndKeyboardAreIndependentPoints) {
  const auto s = score_file(fixture("rubric/t2_score1.html"), TaskKind::T2_form);
  const Evidence* labels = find_evidence(s, "form labeling");
  const Evidence* kb = find_evidence(s, "keyboard navigation");
  ASSERT_TRUE(labels && kb);
  EXPECT_TRUE(labels->pass);
  EXPECT_FALSE(kb->pass);
  EXPECT_FALSE(kb->elements.empty());
}

TEST(RubricT4, EmptyAltIsUnacceptable) {
  const auto s = score_inline("<html><body><img src=\"park.jpg\" alt=\"\"></body></html>", TaskKind::T4_alt_text);
  EXPECT_EQ(s.score, 0);
}

TEST(RubricT4, FileNameAltIsUnacceptable) {
  const auto s =
      score_inline("<html><body><img src=\"img/park.jpg\" alt=\"park.jpg\"></body></html>", TaskKind::T4_alt_text);
  EXPECT_EQ(s.score, 0) << score_text(s);
}

TEST(RubricT4, DescriptorConfigIsReplaceable) {
  ScoreConfig cfg;
  cfg.descriptors.required_count = 2;
  const auto lenient = score_file(fixture("rubric/t4_score1.html"), TaskKind::T4_alt_text, cfg);
  EXPECT_EQ(lenient.score, 2) << score_text(lenient);

  ScoreConfig custom;
  custom.descriptors.categories[0].keywords = {"zeppelin"};
  custom.descriptors.required_count = 1;
  const auto s = score_inline("<html><body><img src=\"a.png\" alt=\"A zeppelin\"></body></html>", TaskKind::T4_alt_text,
                              custom);
  EXPECT_EQ(s.score, 2) << score_text(s);
}

TEST(RubricT4, RequiredCountValidated) {
  ScoreConfig cfg;
  cfg.descriptors.required_count = 5;
  try {
    score_file(fixture("rubric/t4_score1.html"), TaskKind::T4_alt_text, cfg);
    FAIL() << "expected ScoreError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::score_error);
  }
}

TEST(Rubric, UnreadableFileIsScoreError) {
  try {
    score_file(fixture("rubric/does_not_exist.html"), TaskKind::T1_button_contrast);
    FAIL() << "expected ScoreError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::score_error);
  }
}

TEST(Rubric, TaskNamesAndLabels) {
  EXPECT_EQ(task_from_string("t3"), TaskKind::T3_links);
  EXPECT_EQ(task_from_string(" T1 "), TaskKind::T1_button_contrast);
  EXPECT_FALSE(task_from_string("T5").has_value());
  EXPECT_STREQ(score_label(0), "Unacceptable");
  EXPECT_STREQ(score_label(1), "Average");
  EXPECT_STREQ(score_label(2), "Good");
}

TEST(Rubric, JsonReportFields) {
  const auto s = score_file(fixture("rubric/t3_score0.html"), TaskKind::T3_links);
  const auto j = score_to_json(s);
  EXPECT_EQ(j["task"], "T3");
  EXPECT_EQ(j["score"], 0);
  EXPECT_EQ(j["label"], "Unacceptable");
  EXPECT_EQ(j["rubric_version"], std::string(kRubricVersion));
  EXPECT_EQ(j["file"], "t3_score0.html");
  ASSERT_TRUE(j["evidence"].is_array());
  for (const auto& e : j["evidence"]) {
    for (const char* k : {"criterion", "pass", "detail", "elements", "findings"}) EXPECT_TRUE(e.contains(k)) << k;
    for (const auto& el : e["elements"]) {
      EXPECT_TRUE(el.contains("selector"));
      EXPECT_TRUE(el.contains("line"));
      EXPECT_EQ(el["tag"], "a");
    }
  }
}

TEST(RubricAggregate, EmptyInputIsEmptyReport) {
  try {
    aggregate_scores({});
    FAIL() << "expected EmptyReport";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_report);
  }
}

TEST(RubricAggregate, MixedVersionsRejected) {
  auto a = make_score(TaskKind::T1_button_contrast, 2);
  auto b = make_score(TaskKind::T1_button_contrast, 1);
  b.rubric_version = "0";
  try {
    aggregate_scores({a, b});
    FAIL() << "expected ScoreError";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::score_error);
  }
}

TEST(RubricAggregate, SingleScoreHasZeroSpread) {
  const auto rep = aggregate_scores({make_score(TaskKind::T2_form, 1)});
  ASSERT_EQ(rep.tasks.size(), 1u);
  EXPECT_EQ(rep.tasks[0].n, 1u);
  EXPECT_DOUBLE_EQ(rep.tasks[0].mean, 1.0);
  EXPECT_DOUBLE_EQ(rep.tasks[0].sd, 0.0);
}

// Ten-participant score distributions for each task under two assistants,
// with the mean and sample standard deviation (two decimals) they produce.
struct StudyGroup {
  TaskKind task;
  std::vector<int> scores;
  double mean;
  double sd;
};

TEST(RubricAggregate, ReproducesTenParticipantSummaries) {
  const std::vector<StudyGroup> groups = {
      {TaskKind::T1_button_contrast, {2, 2, 2, 2, 1, 1, 1, 1, 1, 0}, 1.3, 0.67},
      {TaskKind::T1_button_contrast, {2, 2, 1, 1, 1, 0, 0, 0, 0, 0}, 0.7, 0.82},
      {TaskKind::T2_form, {2, 2, 2, 2, 2, 2, 2, 1, 0, 0}, 1.5, 0.85},
      {TaskKind::T2_form, {2, 2, 1, 0, 0, 0, 0, 0, 0, 0}, 0.5, 0.85},
      {TaskKind::T3_links, {2, 2, 2, 2, 2, 2, 2, 2, 2, 2}, 2.0, 0.0},
      {TaskKind::T3_links, {2, 2, 2, 2, 2, 2, 2, 2, 1, 0}, 1.7, 0.67},
      {TaskKind::T4_alt_text, {2, 2, 2, 1, 0, 0, 0, 0, 0, 0}, 0.7, 0.95},
      {TaskKind::T4_alt_text, {1, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 0.1, 0.32},
  };
  for (const auto& g : groups) {
    std::vector<RubricScore> scores;
    for (int x : g.scores) scores.push_back(make_score(g.task, x));
    const auto rep = aggregate_scores(scores);
    ASSERT_EQ(rep.tasks.size(), 1u);
    EXPECT_EQ(rep.tasks[0].n, 10u);
    EXPECT_NEAR(rep.tasks[0].mean, g.mean, 1e-12) << task_id(g.task);
    EXPECT_NEAR(std::round(rep.tasks[0].sd * 100) / 100, g.sd, 1e-12) << task_id(g.task);
  }
}

TEST(RubricAggregate, GroupsByTaskInOrder) {
  const auto rep = aggregate_scores({make_score(TaskKind::T4_alt_text, 2), make_score(TaskKind::T1_button_contrast, 0),
                                     make_score(TaskKind::T1_button_contrast, 2)});
  ASSERT_EQ(rep.tasks.size(), 2u);
  EXPECT_EQ(rep.tasks[0].task, TaskKind::T1_button_contrast);
  EXPECT_DOUBLE_EQ(rep.tasks[0].mean, 1.0);
  EXPECT_NEAR(rep.tasks[0].sd, std::sqrt(2.0), 1e-12);
  EXPECT_EQ(rep.tasks[1].task, TaskKind::T4_alt_text);
  const auto j = rep.to_json();
  EXPECT_EQ(j["tasks"][0]["task"], "T1");
  EXPECT_EQ(j["tasks"][0]["n"], 2);
  EXPECT_NE(rep.to_text().find("T1 Button Visibility"), std::string::npos);
}
