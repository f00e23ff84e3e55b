#include "glyphgan/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "glyphgan/errors.hpp"

namespace glyphgan {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

RawImage read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DataError("cannot open image: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DataError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("corrupt PNG: " + path.string());
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  // Collapse every input variant to 8-bit single-channel gray.
  png_byte color = png_get_color_type(png, info);
  png_byte depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_strip_16(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  RawImage img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  if (img.width <= 0 || img.height <= 0) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DataError("degenerate image: " + path.string());
  }
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  std::vector<png_bytep> rows(img.height);
  for (int y = 0; y < img.height; ++y)
    rows[y] = img.pixels.data() + static_cast<size_t>(y) * img.width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::filesystem::path& path, const RawImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<size_t>(img.width) * img.height)
    throw ShapeError("write_png: inconsistent image buffer");

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw DataError("cannot write image: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DataError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError("PNG write failed: " + path.string());
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(
                           img.pixels.data() + static_cast<size_t>(y) * img.width));
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
}

torch::Tensor glyph_from_u8(const RawImage& img) {
  auto t = torch::from_blob(const_cast<uint8_t*>(img.pixels.data()),
                            {1, img.height, img.width}, torch::kUInt8)
               .to(torch::kFloat32);
  return t / 127.5f - 1.0f;
}

RawImage glyph_to_u8(const torch::Tensor& glyph) {
  check_glyph(glyph);
  auto t = ((glyph.squeeze(0) + 1.0f) * 127.5f)
               .round()
               .clamp(0, 255)
               .to(torch::kUInt8)
               .contiguous();
  RawImage img;
  img.height = static_cast<int>(t.size(0));
  img.width = static_cast<int>(t.size(1));
  img.pixels.assign(t.data_ptr<uint8_t>(),
                    t.data_ptr<uint8_t>() + t.numel());
  return img;
}

void check_glyph(const torch::Tensor& glyph) {
  if (glyph.dim() != 3 || glyph.size(0) != 1 || glyph.size(1) != kGlyphSize ||
      glyph.size(2) != kGlyphSize)
    throw ShapeError("glyph tensor must be 1x256x256");
}

namespace {

constexpr int kLanczosLobes = 3;

double lanczos3(double t) {
  t = std::abs(t);
  if (t < 1e-12) return 1.0;
  if (t >= kLanczosLobes) return 0.0;
  const double pt = M_PI * t;
  return kLanczosLobes * std::sin(pt) * std::sin(pt / kLanczosLobes) / (pt * pt);
}

// 1-D resampling weights for one output position, normalized to sum 1 so
// constant signals are preserved.
void lanczos_row(int dst, int src_len, double scale, std::vector<float>& w,
                 int& start) {
  const double center = (dst + 0.5) / scale - 0.5;
  const double radius = scale < 1.0 ? kLanczosLobes / scale : kLanczosLobes;
  start = std::max(0, static_cast<int>(std::floor(center - radius)));
  const int end = std::min(src_len - 1, static_cast<int>(std::ceil(center + radius)));
  w.assign(end - start + 1, 0.0f);
  double sum = 0.0;
  const double k = scale < 1.0 ? scale : 1.0;
  for (int i = start; i <= end; ++i) {
    double v = lanczos3((i - center) * k);
    w[i - start] = static_cast<float>(v);
    sum += v;
  }
  if (sum != 0.0)
    for (auto& v : w) v = static_cast<float>(v / sum);
}

std::vector<float> resize_axis(const std::vector<float>& src, int w, int h,
                               int dst_w) {
  if (dst_w == w) return src;
  std::vector<float> out(static_cast<size_t>(dst_w) * h);
  const double scale = static_cast<double>(dst_w) / w;
  std::vector<float> weights;
  int start;
  for (int x = 0; x < dst_w; ++x) {
    lanczos_row(x, w, scale, weights, start);
    for (int y = 0; y < h; ++y) {
      float acc = 0.0f;
      const float* row = src.data() + static_cast<size_t>(y) * w;
      for (size_t i = 0; i < weights.size(); ++i)
        acc += weights[i] * row[start + i];
      out[static_cast<size_t>(y) * dst_w + x] = acc;
    }
  }
  return out;
}

std::vector<float> transpose(const std::vector<float>& src, int w, int h) {
  std::vector<float> out(src.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out[static_cast<size_t>(x) * h + y] = src[static_cast<size_t>(y) * w + x];
  return out;
}

}  // namespace

std::vector<float> resize_lanczos3(const std::vector<float>& src, int src_w,
                                   int src_h, int dst_w, int dst_h) {
  auto horiz = resize_axis(src, src_w, src_h, dst_w);
  auto t = transpose(horiz, dst_w, src_h);
  auto vert = resize_axis(t, src_h, dst_w, dst_h);
  return transpose(vert, dst_h, dst_w);
}

torch::Tensor normalize_glyph(const RawImage& raw) {
  if (raw.width <= 0 || raw.height <= 0)
    throw DataError("normalize_glyph: degenerate image");

  const int long_side = std::max(raw.width, raw.height);
  // Short side rounded half-up; long side becomes exactly 256.
  auto scaled = [&](int side) {
    return static_cast<int>(std::floor(
        static_cast<double>(side) * kGlyphSize / long_side + 0.5));
  };
  const int dst_w = raw.width == long_side ? kGlyphSize : scaled(raw.width);
  const int dst_h = raw.height == long_side ? kGlyphSize : scaled(raw.height);

  std::vector<float> src(raw.pixels.begin(), raw.pixels.end());
  std::vector<float> resized = resize_lanczos3(src, raw.width, raw.height,
                                               dst_w, dst_h);

  // White canvas; odd padding pixel goes to the right/bottom.
  const int off_x = (kGlyphSize - dst_w) / 2;
  const int off_y = (kGlyphSize - dst_h) / 2;
  auto canvas = torch::full({1, kGlyphSize, kGlyphSize}, 1.0f, torch::kFloat32);
  auto acc = canvas.accessor<float, 3>();
  for (int y = 0; y < dst_h; ++y)
    for (int x = 0; x < dst_w; ++x) {
      float v = resized[static_cast<size_t>(y) * dst_w + x] / 127.5f - 1.0f;
      acc[0][off_y + y][off_x + x] = std::clamp(v, -1.0f, 1.0f);
    }
  return canvas;
}

std::string codepoint_hex(CharacterCode h) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04x", static_cast<unsigned>(h));
  return buf;
}

std::filesystem::path DirectoryGlyphProvider::path_for(CharacterCode h) const {
  return root_ / (codepoint_hex(h) + ".png");
}

bool DirectoryGlyphProvider::has(CharacterCode h) const {
  return std::filesystem::exists(path_for(h));
}

RawImage DirectoryGlyphProvider::load(CharacterCode h) const {
  auto p = path_for(h);
  if (!std::filesystem::exists(p))
    throw MissingGlyphError("no source glyph for U+" +
                            MissingCharacterError::to_hex(h) + " at " +
                            p.string());
  return read_png(p);
}

torch::Tensor render_source_glyph(CharacterCode h,
                                  const GlyphProvider& provider) {
  return normalize_glyph(provider.load(h));
}

}  // namespace glyphgan
