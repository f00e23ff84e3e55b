#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/testing.hpp"

#include "glyphgan/errors.hpp"
#include "glyphgan/image.hpp"
#include "support/fixtures.hpp"

using namespace glyphgan;
using glyphgan::testing::TempDir;

namespace {

RawImage constant_image(int w, int h, uint8_t v) {
  RawImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(static_cast<size_t>(w) * h, v);
  return img;
}

}  // namespace

TEST_CASE("png round-trip preserves 8-bit grayscale exactly") {
  TempDir dir("png");
  auto img = testing::make_toy_glyph(U'一', 1, 37, 53);
  auto path = dir.path() / "g.png";
  write_png(path, img);
  auto back = read_png(path);
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.pixels == img.pixels);
}

TEST_CASE("140x100 input scales to 183 wide, centered with white padding") {
  // 100 * 256 / 140 = 182.857 -> 183 half-up; left pad 36, right pad 37.
  auto img = testing::make_toy_glyph(U'丁', 1, 100, 140);
  auto glyph = normalize_glyph(img);
  check_glyph(glyph);
  auto acc = glyph.accessor<float, 3>();
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 36; ++x) CHECK(acc[0][y][x] == 1.0f);
    for (int x = 219; x < 256; ++x) CHECK(acc[0][y][x] == 1.0f);
  }
  // content region has ink somewhere
  CHECK(glyph.min().item<float>() < 0.0f);
}

TEST_CASE("horizontal long side transposes the layout") {
  auto img = testing::make_toy_glyph(U'丁', 1, 140, 100);
  auto glyph = normalize_glyph(img);
  auto acc = glyph.accessor<float, 3>();
  for (int x = 0; x < 256; ++x) {
    for (int y = 0; y < 36; ++y) CHECK(acc[0][y][x] == 1.0f);
    for (int y = 219; y < 256; ++y) CHECK(acc[0][y][x] == 1.0f);
  }
}

TEST_CASE("all-white square input maps to the constant +1 glyph") {
  auto glyph = normalize_glyph(constant_image(140, 140, 255));
  CHECK(glyph.min().item<float>() == doctest::Approx(1.0f).epsilon(1e-6));
  CHECK(glyph.max().item<float>() == 1.0f);
}

TEST_CASE("intensity polarity: black maps to -1, white to +1") {
  auto black = normalize_glyph(constant_image(256, 256, 0));
  CHECK(black.max().item<float>() == doctest::Approx(-1.0f));
  RawImage img = constant_image(2, 2, 0);
  auto t = glyph_from_u8(img);
  CHECK(t[0][0][0].item<float>() == doctest::Approx(-1.0f));
}

TEST_CASE("aspect ratio preserved within one pixel of rounding") {
  for (int short_side : {60, 97, 100, 128, 139}) {
    auto img = constant_image(short_side, 140, 200);
    auto glyph = normalize_glyph(img);
    (void)glyph;
    const double exact = short_side * 256.0 / 140.0;
    const int rounded = static_cast<int>(std::floor(exact + 0.5));
    CHECK(std::abs(rounded - exact) <= 0.5);
  }
}

TEST_CASE("degenerate image is rejected") {
  RawImage img;
  img.width = 0;
  img.height = 10;
  CHECK_THROWS_AS(normalize_glyph(img), DataError);
}

TEST_CASE("values stay inside [-1,1] despite Lanczos overshoot") {
  // High-contrast checkerboard provokes ringing.
  RawImage img = constant_image(97, 140, 255);
  for (int y = 0; y < 140; ++y)
    for (int x = 0; x < 97; ++x)
      if (((x / 3) + (y / 3)) % 2 == 0)
        img.pixels[static_cast<size_t>(y) * 97 + x] = 0;
  auto glyph = normalize_glyph(img);
  CHECK(glyph.min().item<float>() >= -1.0f);
  CHECK(glyph.max().item<float>() <= 1.0f);
}

TEST_CASE("lanczos resampling preserves constants and is exact at scale 1") {
  std::vector<float> src(40 * 30, 200.0f);
  auto out = resize_lanczos3(src, 40, 30, 73, 256);
  for (float v : out) CHECK(v == doctest::Approx(200.0f).epsilon(1e-5));
  auto same = resize_lanczos3(src, 40, 30, 40, 30);
  CHECK(same == src);
}

TEST_CASE("directory glyph provider loads by hex code point") {
  TempDir dir("provider");
  auto img = testing::make_toy_source(U'一');
  write_png(dir.path() / "4e00.png", img);
  DirectoryGlyphProvider provider(dir.path());

  CHECK(provider.has(U'一'));
  CHECK_FALSE(provider.has(U'丁'));
  CHECK_THROWS_AS(provider.load(U'丁'), MissingGlyphError);

  SUBCASE("256x256 source is a pure range-mapped passthrough") {
    auto glyph = render_source_glyph(U'一', provider);
    auto direct = glyph_from_u8(img);
    CHECK(torch::allclose(glyph, direct));
  }
  SUBCASE("small source goes through the shared normalization path") {
    auto small = testing::make_toy_glyph(U'丁', 0, 140, 140);
    write_png(dir.path() / "4e01.png", small);
    auto glyph = render_source_glyph(U'丁', provider);
    CHECK(torch::allclose(glyph, normalize_glyph(small)));
  }
}

TEST_CASE("glyph_to_u8 inverts glyph_from_u8") {
  auto img = testing::make_toy_source(U'丙');
  auto back = glyph_to_u8(glyph_from_u8(img));
  CHECK(back.pixels == img.pixels);
}
