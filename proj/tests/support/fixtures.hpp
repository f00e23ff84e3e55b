#ifndef GLYPHGAN_TEST_FIXTURES_HPP
#define GLYPHGAN_TEST_FIXTURES_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "glyphgan/components.hpp"
#include "glyphgan/dataset.hpp"
#include "glyphgan/image.hpp"

namespace glyphgan::testing {

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Deterministic procedural glyph: a few black strokes whose layout depends
// on the character and whose thickness depends on the style. Style 0 is
// the "font-rendered" source look.
RawImage make_toy_glyph(CharacterCode c, StyleLabel style, int width,
                        int height);

// Long side 140, aspect varying per character, like the corpus images.
RawImage make_toy_target(CharacterCode c, StyleLabel style);
// 256x256 source render.
RawImage make_toy_source(CharacterCode c);

// `count` consecutive code points starting at U+4E00.
std::vector<CharacterCode> toy_characters(int count);

// Corpus layout `<root>/<style>/<hex>.png` + `<root>/source/<hex>.png`.
void write_toy_corpus(const std::filesystem::path& root, int styles,
                      const std::vector<CharacterCode>& chars);

// Dictionary with deterministic sequences of length 1..6.
ComponentDictionary make_toy_dictionary(const std::vector<CharacterCode>& chars,
                                        int vocab = kDefaultComponentVocabSize);

}  // namespace glyphgan::testing

#endif
