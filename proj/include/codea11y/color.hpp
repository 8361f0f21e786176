#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace codea11y {

/// 8-bit sRGB color with straight (non-premultiplied) alpha.
struct ColorSRGB {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  double a = 1.0;

  friend bool operator==(const ColorSRGB&, const ColorSRGB&) = default;

  bool opaque() const noexcept { return a >= 1.0; }

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  }
};

inline constexpr ColorSRGB kBlack{0, 0, 0, 1.0};
inline constexpr ColorSRGB kWhite{255, 255, 255, 1.0};

/// Minimum contrast ratios. Large text is text at or above `large_text_px`, or
/// at or above `large_bold_text_px` when its weight is >= 700.
struct ContrastThresholds {
  double normal_text_min = 4.5;
  double large_text_min = 3.0;
  double large_text_px = 24.0;
  double large_bold_text_px = 18.66;

  bool valid() const noexcept {
    return normal_text_min > large_text_min && large_text_min >= 1.0;
  }

  bool is_large(double font_px, int font_weight) const noexcept {
    return font_px >= large_text_px ||
           (font_weight >= 700 && font_px >= large_bold_text_px);
  }

  double minimum_for(double font_px, int font_weight) const noexcept {
    return is_large(font_px, font_weight) ? large_text_min : normal_text_min;
  }
};

namespace detail {

inline double linearize_channel(std::uint8_t channel) {
  const double s = channel / 255.0;
  return s <= 0.03928 ? s / 12.92 : std::pow((s + 0.055) / 1.055, 2.4);
}

}  // namespace detail

/// WCAG 2.1 relative luminance of an sRGB color. Alpha is ignored; composite
/// translucent colors first.
inline double relative_luminance(const ColorSRGB& c) {
  return 0.2126 * detail::linearize_channel(c.r) +
         0.7152 * detail::linearize_channel(c.g) +
         0.0722 * detail::linearize_channel(c.b);
}

/// Source-over compositing of `top` onto `bottom`. The result carries the
/// combined alpha; compositing onto an opaque color yields an opaque color.
inline ColorSRGB composite(const ColorSRGB& top, const ColorSRGB& bottom) {
  const double ta = std::clamp(top.a, 0.0, 1.0);
  const double ba = std::clamp(bottom.a, 0.0, 1.0);
  const double out_a = ta + ba * (1.0 - ta);
  if (out_a <= 0.0) return ColorSRGB{0, 0, 0, 0.0};
  auto mix = [&](std::uint8_t t, std::uint8_t b) {
    const double v = (t * ta + b * ba * (1.0 - ta)) / out_a;
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  return ColorSRGB{mix(top.r, bottom.r), mix(top.g, bottom.g),
                   mix(top.b, bottom.b), out_a};
}

/// WCAG contrast ratio in [1, 21]. A translucent background is first
/// composited over white; a translucent foreground over the background.
inline double contrast_ratio(const ColorSRGB& fg, const ColorSRGB& bg) {
  const ColorSRGB base = bg.opaque() ? bg : composite(bg, kWhite);
  const ColorSRGB text = fg.opaque() ? fg : composite(fg, base);
  const double l1 = relative_luminance(text);
  const double l2 = relative_luminance(base);
  const double lighter = std::max(l1, l2);
  const double darker = std::min(l1, l2);
  return (lighter + 0.05) / (darker + 0.05);
}

namespace detail {

struct NamedColor {
  std::string_view name;
  std::uint32_t rgb;
};

// CSS basic keywords plus the extended names that show up most in UI code.
inline constexpr std::array<NamedColor, 48> kNamedColors{{
    {"black", 0x000000},     {"white", 0xffffff},      {"red", 0xff0000},
    {"green", 0x008000},     {"blue", 0x0000ff},       {"yellow", 0xffff00},
    {"gray", 0x808080},      {"grey", 0x808080},       {"silver", 0xc0c0c0},
    {"maroon", 0x800000},    {"purple", 0x800080},     {"fuchsia", 0xff00ff},
    {"lime", 0x00ff00},      {"olive", 0x808000},      {"navy", 0x000080},
    {"teal", 0x008080},      {"aqua", 0x00ffff},       {"orange", 0xffa500},
    {"darkgray", 0xa9a9a9},  {"darkgrey", 0xa9a9a9},   {"lightgray", 0xd3d3d3},
    {"lightgrey", 0xd3d3d3}, {"dimgray", 0x696969},    {"dimgrey", 0x696969},
    {"gainsboro", 0xdcdcdc}, {"whitesmoke", 0xf5f5f5}, {"darkblue", 0x00008b},
    {"darkred", 0x8b0000},   {"darkgreen", 0x006400},  {"lightblue", 0xadd8e6},
    {"lightgreen", 0x90ee90}, {"pink", 0xffc0cb},      {"gold", 0xffd700},
    {"crimson", 0xdc143c},   {"coral", 0xff7f50},      {"tomato", 0xff6347},
    {"salmon", 0xfa8072},    {"khaki", 0xf0e68c},      {"beige", 0xf5f5dc},
    {"ivory", 0xfffff0},     {"skyblue", 0x87ceeb},    {"steelblue", 0x4682b4},
    {"royalblue", 0x4169e1}, {"slategray", 0x708090},  {"slategrey", 0x708090},
    {"darkslategray", 0x2f4f4f}, {"indigo", 0x4b0082}, {"rebeccapurple", 0x663399},
}};

inline std::string lower_trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

inline std::optional<int> hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return std::nullopt;
}

// Parses one rgb()/rgba() component: integer 0-255 or percentage.
inline std::optional<double> parse_channel(std::string_view tok, bool alpha) {
  std::string t = lower_trim(tok);
  if (t.empty()) return std::nullopt;
  bool percent = false;
  if (t.back() == '%') {
    percent = true;
    t.pop_back();
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') return std::nullopt;
  if (alpha) return std::clamp(percent ? v / 100.0 : v, 0.0, 1.0);
  return std::clamp(percent ? v * 255.0 / 100.0 : v, 0.0, 255.0);
}

}  // namespace detail

/// Parses a CSS color value: #rgb, #rgba, #rrggbb, #rrggbbaa, rgb()/rgba()
/// (comma or space separated), `transparent`, and common named colors.
inline std::optional<ColorSRGB> parse_color(std::string_view text) {
  const std::string s = detail::lower_trim(text);
  if (s.empty()) return std::nullopt;
  if (s == "transparent") return ColorSRGB{0, 0, 0, 0.0};
  if (s[0] == '#') {
    const std::string_view h(s.c_str() + 1, s.size() - 1);
    std::array<int, 8> d{};
    for (std::size_t i = 0; i < h.size() && i < d.size(); ++i) {
      auto v = detail::hex_digit(h[i]);
      if (!v) return std::nullopt;
      d[i] = *v;
    }
    switch (h.size()) {
      case 3:
      case 4: {
        ColorSRGB c{static_cast<std::uint8_t>(d[0] * 17), static_cast<std::uint8_t>(d[1] * 17),
                    static_cast<std::uint8_t>(d[2] * 17), 1.0};
        if (h.size() == 4) c.a = d[3] * 17 / 255.0;
        return c;
      }
      case 6:
      case 8: {
        ColorSRGB c{static_cast<std::uint8_t>(d[0] * 16 + d[1]),
                    static_cast<std::uint8_t>(d[2] * 16 + d[3]),
                    static_cast<std::uint8_t>(d[4] * 16 + d[5]), 1.0};
        if (h.size() == 8) c.a = (d[6] * 16 + d[7]) / 255.0;
        return c;
      }
      default:
        return std::nullopt;
    }
  }
  if (s.rfind("rgb", 0) == 0) {
    const auto open = s.find('(');
    const auto close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) return std::nullopt;
    std::string inner = s.substr(open + 1, close - open - 1);
    for (char& ch : inner) {
      if (ch == ',' || ch == '/') ch = ' ';
    }
    std::array<std::string, 4> parts;
    std::size_t n = 0, i = 0;
    while (i < inner.size()) {
      while (i < inner.size() && inner[i] == ' ') ++i;
      if (i >= inner.size()) break;
      if (n == parts.size()) return std::nullopt;
      const auto j = inner.find(' ', i);
      parts[n++] = inner.substr(i, j == std::string::npos ? std::string::npos : j - i);
      i = j == std::string::npos ? inner.size() : j;
    }
    if (n < 3) return std::nullopt;
    ColorSRGB c;
    std::array<std::uint8_t*, 3> channels{&c.r, &c.g, &c.b};
    for (std::size_t k = 0; k < 3; ++k) {
      auto v = detail::parse_channel(parts[k], false);
      if (!v) return std::nullopt;
      *channels[k] = static_cast<std::uint8_t>(std::lround(*v));
    }
    if (n == 4) {
      auto v = detail::parse_channel(parts[3], true);
      if (!v) return std::nullopt;
      c.a = *v;
    }
    return c;
  }
  for (const auto& named : detail::kNamedColors) {
    if (named.name == s) {
      return ColorSRGB{static_cast<std::uint8_t>(named.rgb >> 16),
                       static_cast<std::uint8_t>((named.rgb >> 8) & 0xff),
                       static_cast<std::uint8_t>(named.rgb & 0xff), 1.0};
    }
  }
  return std::nullopt;
}

}  // namespace codea11y
