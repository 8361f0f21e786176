#include <set>

#include <gtest/gtest.h>

#include "codea11y/html.hpp"
#include "codea11y/linter.hpp"
#include "support.hpp"

using namespace codea11y;
using testing_support::slurp;

namespace {

// Ancestor paths for inspected elements, reference output of
// tests/oracles/tree_oracle.py (html5lib) with the implied html/head/body/tbody
// wrappers removed.
const std::vector<std::string> kMalformedShape = {
    "div < ",
    "p < div",
    "p < div",
    "li < div > ul",
    "li < div > ul",
    "img < div > ul > li",
    "td < div > table > tr",
    "td < div > table > tr",
    "a < div > table > tr > td",
    "h4 < div",
    "div < div > h4",
};

const std::vector<std::string> kKeyboardShape = {
    "h1 < main", "a < main", "div < main", "div < main", "button < main", "input < main",
};

std::vector<std::string> shape(const html::Document& doc) {
  static const std::set<std::string> watch{"img", "a",  "input", "button", "label", "h1", "h2", "h3",
                                           "h4",  "h5", "h6",    "li",     "td",    "p",  "div"};
  static const std::set<std::string> implied{"html", "head", "body", "tbody"};
  std::vector<std::string> out;
  for (auto id : doc.elements()) {
    const auto& n = doc.node(id);
    if (!watch.count(n.tag)) continue;
    const auto anc = doc.ancestors(id);
    std::string path;
    for (auto it = anc.rbegin(); it != anc.rend(); ++it) {
      const auto& t = doc.node(*it).tag;
      if (t.empty() || implied.count(t)) continue;
      path += (path.empty() ? "" : " > ") + t;
    }
    out.push_back(n.tag + " < " + path);
  }
  return out;
}

}  // namespace

TEST(HtmlTree, MalformedMatchesReferenceParser) {
  EXPECT_EQ(shape(html::parse_document(slurp("malformed.html"), "malformed.html")), kMalformedShape);
}

TEST(HtmlTree, WellFormedMatchesReferenceParser) {
  EXPECT_EQ(shape(html::parse_document(slurp("keyboard_traps.html"), "k.html")), kKeyboardShape);
}

TEST(HtmlTree, ImpliedEndTags) {
  const auto doc = html::parse_document("<ul><li>a<li>b</ul><p>x<p>y<div>z</div>", "t.html");
  EXPECT_EQ(doc.elements_by_tag("li").size(), 2u);
  for (auto id : doc.elements_by_tag("li")) EXPECT_EQ(doc.node(doc.node(id).parent).tag, "ul");
  const auto ps = doc.elements_by_tag("p");
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(doc.text_content(ps[0]), "x");
  const auto div = doc.elements_by_tag("div").at(0);
  EXPECT_NE(doc.node(div).parent, ps[1]);
}

TEST(HtmlTree, VoidAndSelfClosing) {
  const auto doc = html::parse_document("<p><img src=a.png><br/><input type=text>after</p>", "t.html");
  const auto p = doc.elements_by_tag("p").at(0);
  EXPECT_EQ(doc.text_content(p), "after");
  for (const char* t : {"img", "br", "input"}) {
    const auto id = doc.elements_by_tag(t).at(0);
    EXPECT_TRUE(doc.node(id).children.empty()) << t;
    EXPECT_EQ(doc.node(id).parent, p) << t;
  }
}

TEST(HtmlTree, StrayEndTagIgnored) {
  const auto doc = html::parse_document("<div><span>a</div></span><p>b</p>", "t.html");
  const auto p = doc.elements_by_tag("p").at(0);
  EXPECT_EQ(doc.node(doc.node(p).parent).tag, "");
}

TEST(HtmlAttributes, DecodedAndLowercased) {
  const auto doc = html::parse_document(R"(<IMG ALT="Tom &amp; Jerry &#169; &#x263A;" Data-X='1' hidden>)", "t.html");
  const auto& img = doc.node(doc.elements_by_tag("img").at(0));
  ASSERT_NE(img.attr("alt"), nullptr);
  EXPECT_EQ(*img.attr("alt"), "Tom & Jerry \xC2\xA9 \xE2\x98\xBA");
  ASSERT_NE(img.attr("data-x"), nullptr);
  EXPECT_EQ(*img.attr("data-x"), "1");
  ASSERT_NE(img.attr("hidden"), nullptr);
  EXPECT_EQ(*img.attr("hidden"), "");
}

TEST(HtmlText, ScriptAndStyleExcluded) {
  const auto doc = html::parse_document("<a href=x>Go <script>var a='<b>';</script><style>a{}</style> home</a>", "t");
  EXPECT_EQ(doc.text_content(doc.elements_by_tag("a").at(0)), "Go home");
  EXPECT_TRUE(doc.elements_by_tag("b").empty());
}

TEST(HtmlText, AltContributesToName) {
  const auto doc = html::parse_document(R"(<a href=x><img src=i.png alt="Home"></a>)", "t");
  const auto a = doc.elements_by_tag("a").at(0);
  EXPECT_EQ(doc.text_content(a), "");
  EXPECT_EQ(doc.text_content(a, true), "Home");
}

TEST(HtmlSpans, LineAndColumn) {
  const auto doc = html::parse_document(slurp("form_no_label.html"), "form_no_label.html");
  const auto id = html::resolve_selector(doc, "html:nth-of-type(1) > body:nth-of-type(1) > main:nth-of-type(1) > "
                                              "form:nth-of-type(1) > input:nth-of-type(2)")
                      .at(0);
  const auto sp = doc.span(id);
  EXPECT_EQ(sp.file_path, "form_no_label.html");
  EXPECT_EQ(sp.start_line, 9u);
  EXPECT_EQ(sp.start_col, 7u);
  EXPECT_EQ(sp.end_line, 9u);
  EXPECT_EQ(sp.end_col, 67u);
}

TEST(HtmlSelectors, RoundTrip) {
  const auto doc = html::parse_document(slurp("malformed.html"), "m.html");
  for (auto id : doc.elements()) {
    const auto sel = html::selector_for(doc, id);
    const auto hits = html::resolve_selector(doc, sel);
    ASSERT_EQ(hits.size(), 1u) << sel;
    EXPECT_EQ(hits[0], id) << sel;
  }
}

TEST(HtmlSelectors, IdPreferred) {
  const auto doc = html::parse_document(R"(<main><input id="q"><input></main>)", "t");
  const auto inputs = doc.elements_by_tag("input");
  EXPECT_EQ(html::selector_for(doc, inputs[0]), "#q");
  EXPECT_EQ(html::selector_for(doc, inputs[1]),
            "main:nth-of-type(1) > input:nth-of-type(2)");
}
