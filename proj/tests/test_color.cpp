#include <chrono>

#include <gtest/gtest.h>

#include "codea11y/color.hpp"

using namespace codea11y;

namespace {

struct OraclePair {
  const char* fg;
  const char* bg;
  double ratio;
};

// Produced by tests/oracles/contrast_oracle.py (mpmath, 50 digits).
constexpr OraclePair kOracle[] = {
    {"#000000", "#ffffff", 21.0},
    {"#ffffff", "#000000", 21.0},
    {"#777777", "#ffffff", 4.4780894535772156},
    {"#767676", "#ffffff", 4.5422249596052541},
    {"#999999", "#ffffff", 2.8490277552870376},
    {"#808080", "#ffffff", 3.9494396480491165},
    {"#808080", "#000000", 5.3172100022779833},
    {"#1f4e79", "#ffffff", 8.6629654110799146},
    {"#163a5c", "#ffffff", 11.706479135340304},
    {"#6fa8dc", "#ffffff", 2.5269494322223633},
    {"#595959", "#ffffff", 7.0047292080359352},
    {"#ff0000", "#ffffff", 3.9984767707539985},
    {"#00ff00", "#000000", 15.304},
    {"#0000ff", "#ffff00", 8.0016366612111293},
    {"#123456", "#abcdef", 7.6973075889799832},
    {"#0a0a0a", "#0b0b0b", 1.0058690363860938},
    {"#f0f0f0", "#fafafa", 1.0918268432718338},
    {"#336699", "#ffcc00", 3.966863743915809},
    {"#4a4a4a", "#d3d3d3", 5.9201255247358611},
    {"#e91e63", "#212121", 3.7039698473378792},
};

ColorSRGB c(const char* text) {
  auto v = parse_color(text);
  if (!v) throw std::runtime_error(std::string("bad color ") + text);
  return *v;
}

}  // namespace

TEST(Contrast, MatchesOracleOnTwentyPairs) {
  static_assert(std::size(kOracle) == 20);
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& p : kOracle) {
    EXPECT_NEAR(contrast_ratio(c(p.fg), c(p.bg)), p.ratio, 1e-6) << p.fg << " on " << p.bg;
  }
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::seconds(1));
}

TEST(Contrast, Extremes) {
  EXPECT_DOUBLE_EQ(contrast_ratio(kBlack, kWhite), 21.0);
  EXPECT_DOUBLE_EQ(contrast_ratio(kWhite, kBlack), 21.0);
  EXPECT_DOUBLE_EQ(contrast_ratio(c("#3a7bd5"), c("#3a7bd5")), 1.0);
}

TEST(Contrast, Symmetric) {
  for (const auto& p : kOracle) EXPECT_DOUBLE_EQ(contrast_ratio(c(p.fg), c(p.bg)), contrast_ratio(c(p.bg), c(p.fg)));
}

TEST(Luminance, MidGrey) {
  EXPECT_NEAR(relative_luminance(c("#808080")), 0.21586050011389916, 1e-12);
  EXPECT_DOUBLE_EQ(relative_luminance(kBlack), 0.0);
  EXPECT_DOUBLE_EQ(relative_luminance(kWhite), 1.0);
}

TEST(Luminance, UsesLinearSegmentAtThreshold) {
  // 10/255 = 0.0392 sits just under the 0.03928 knee.
  EXPECT_NEAR(detail::linearize_channel(10), 10.0 / 255.0 / 12.92, 1e-15);
  EXPECT_NEAR(detail::linearize_channel(11), std::pow((11.0 / 255.0 + 0.055) / 1.055, 2.4), 1e-15);
}

TEST(ParseColor, Forms) {
  EXPECT_EQ(c("#fff"), kWhite);
  EXPECT_EQ(c("#FFFFFF"), kWhite);
  EXPECT_EQ(c("  white "), kWhite);
  EXPECT_EQ(c("rgb(255, 255, 255)"), kWhite);
  EXPECT_EQ(c("rgb(255 255 255)"), kWhite);
  EXPECT_EQ(c("#1f4e79").hex(), "#1f4e79");
  EXPECT_DOUBLE_EQ(c("rgba(0,0,0,.4)").a, 0.4);
  EXPECT_DOUBLE_EQ(c("rgb(0 0 0 / 50%)").a, 0.5);
  EXPECT_NEAR(c("#00000080").a, 128 / 255.0, 1e-12);
  EXPECT_DOUBLE_EQ(c("transparent").a, 0.0);
}

TEST(ParseColor, RejectsGarbage) {
  for (const char* bad : {"", "#12", "#ggg", "rgb(1,2)", "not-a-color", "#12345"}) {
    EXPECT_FALSE(parse_color(bad).has_value()) << bad;
  }
}

TEST(Composite, TranslucentTextOverWhite) {
  const auto out = composite(c("rgba(0,0,0,.4)"), kWhite);
  EXPECT_EQ(out.hex(), "#999999");
  EXPECT_TRUE(out.opaque());
  EXPECT_NEAR(contrast_ratio(c("rgba(0,0,0,.4)"), kWhite), 2.849, 1e-3);
}

TEST(Thresholds, LargeText) {
  ContrastThresholds t;
  EXPECT_DOUBLE_EQ(t.minimum_for(16, 400), 4.5);
  EXPECT_DOUBLE_EQ(t.minimum_for(24, 400), 3.0);
  EXPECT_DOUBLE_EQ(t.minimum_for(18.66, 700), 3.0);
  EXPECT_DOUBLE_EQ(t.minimum_for(18.66, 400), 4.5);
  EXPECT_TRUE(t.valid());
  t.large_text_min = 5.0;
  EXPECT_FALSE(t.valid());
}
