#ifndef GLYPHGAN_IMAGE_HPP
#define GLYPHGAN_IMAGE_HPP

#include <torch/torch.h>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "glyphgan/components.hpp"

namespace glyphgan {

constexpr int kGlyphSize = 256;

// 8-bit grayscale bitmap as read from disk. 1-bit corpus files are
// expanded to 0/255 on load.
struct RawImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major, 255 = white paper

  uint8_t at(int y, int x) const { return pixels[y * width + x]; }
};

RawImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RawImage& img);

// Model-space glyph tensors are {1, 256, 256} float32 in [-1, 1],
// white background +1, full ink -1.
torch::Tensor glyph_from_u8(const RawImage& img);
RawImage glyph_to_u8(const torch::Tensor& glyph);
void check_glyph(const torch::Tensor& glyph);

// Scales the long side to 256 with Lanczos-3, preserving aspect ratio
// (short side rounded half-up), centers on a white 256x256 canvas with
// the odd padding pixel on the right/bottom, maps to [-1, 1].
torch::Tensor normalize_glyph(const RawImage& raw);

// Separable Lanczos-3 resampling on float intensities; no re-binarization.
std::vector<float> resize_lanczos3(const std::vector<float>& src, int src_w,
                                   int src_h, int dst_w, int dst_h);

// Source of font-rendered input glyphs x.
class GlyphProvider {
 public:
  virtual ~GlyphProvider() = default;
  virtual bool has(CharacterCode h) const = 0;
  // Throws MissingGlyphError when the glyph is unavailable.
  virtual RawImage load(CharacterCode h) const = 0;
};

// Default provider: a directory of pre-rendered `<hex-codepoint>.png` files.
class DirectoryGlyphProvider : public GlyphProvider {
 public:
  explicit DirectoryGlyphProvider(std::filesystem::path root)
      : root_(std::move(root)) {}
  bool has(CharacterCode h) const override;
  RawImage load(CharacterCode h) const override;
  std::filesystem::path path_for(CharacterCode h) const;

 private:
  std::filesystem::path root_;
};

// Provider-backed equivalent of normalize_glyph for input images x.
torch::Tensor render_source_glyph(CharacterCode h, const GlyphProvider& provider);

std::string codepoint_hex(CharacterCode h);

}  // namespace glyphgan

#endif
