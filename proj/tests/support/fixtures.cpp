#include "support/fixtures.hpp"

#include <random>

namespace glyphgan::testing {

TempDir::TempDir(const std::string& label) {
  auto base = std::filesystem::temp_directory_path();
  std::random_device rd;
  path_ = base / ("glyphgan_" + label + "_" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

RawImage make_toy_glyph(CharacterCode c, StyleLabel style, int width,
                        int height) {
  RawImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<size_t>(width) * height, 255);

  auto draw = [&](double x0, double y0, double x1, double y1, double thick) {
    const int px0 = static_cast<int>(x0 * width);
    const int px1 = static_cast<int>(x1 * width);
    const int py0 = static_cast<int>(y0 * height);
    const int py1 = static_cast<int>(y1 * height);
    const int tw = std::max(1, static_cast<int>(thick * width));
    const int th = std::max(1, static_cast<int>(thick * height));
    for (int y = std::max(0, py0 - th / 2);
         y <= std::min(height - 1, py1 + th / 2); ++y)
      for (int x = std::max(0, px0 - tw / 2);
           x <= std::min(width - 1, px1 + tw / 2); ++x)
        img.pixels[static_cast<size_t>(y) * width + x] = 0;
  };

  // Layout from the character, thickness from the style.
  std::mt19937 layout(static_cast<uint32_t>(c) * 2654435761u);
  std::uniform_real_distribution<double> u(0.12, 0.88);
  const double thick = 0.03 + 0.012 * (style % 4);
  const int strokes = 2 + static_cast<int>(layout() % 3);
  for (int i = 0; i < strokes; ++i) {
    const double a = u(layout), b = u(layout), len = 0.25 + 0.5 * u(layout);
    if (layout() % 2 == 0)
      draw(a, b, std::min(0.92, a + len), b, thick);  // horizontal bar
    else
      draw(a, b, a, std::min(0.92, b + len), thick);  // vertical bar
  }
  return img;
}

RawImage make_toy_target(CharacterCode c, StyleLabel style) {
  const int short_side = 100 + static_cast<int>((c * 7 + style) % 41);
  if ((c + style) % 2 == 0) return make_toy_glyph(c, style, short_side, 140);
  return make_toy_glyph(c, style, 140, short_side);
}

RawImage make_toy_source(CharacterCode c) {
  return make_toy_glyph(c, 0, kGlyphSize, kGlyphSize);
}

std::vector<CharacterCode> toy_characters(int count) {
  std::vector<CharacterCode> chars;
  for (int i = 0; i < count; ++i)
    chars.push_back(static_cast<CharacterCode>(0x4E00 + i));
  return chars;
}

void write_toy_corpus(const std::filesystem::path& root, int styles,
                      const std::vector<CharacterCode>& chars) {
  for (int s = 1; s <= styles; ++s) {
    auto dir = root / std::to_string(s);
    std::filesystem::create_directories(dir);
    for (CharacterCode c : chars)
      write_png(dir / (codepoint_hex(c) + ".png"), make_toy_target(c, s));
  }
  auto source = root / "source";
  std::filesystem::create_directories(source);
  for (CharacterCode c : chars)
    write_png(source / (codepoint_hex(c) + ".png"), make_toy_source(c));
}

ComponentDictionary make_toy_dictionary(const std::vector<CharacterCode>& chars,
                                        int vocab) {
  std::map<CharacterCode, ComponentSequence> entries;
  for (CharacterCode c : chars) {
    ComponentSequence seq;
    const int n = 1 + static_cast<int>(c % 6);
    for (int i = 0; i < n; ++i)
      seq.push_back(1 + static_cast<int>((c * 31 + i * 17) % vocab));
    entries[c] = seq;
  }
  return ComponentDictionary(std::move(entries), vocab);
}

}  // namespace glyphgan::testing
