#ifndef GLYPHGAN_COMPONENTS_HPP
#define GLYPHGAN_COMPONENTS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <vector>

namespace glyphgan {

using CharacterCode = char32_t;
using ComponentId = int;  // valid range [1, vocab_size]

constexpr int kDefaultComponentVocabSize = 517;

// Ordered component IDs for one character. Order is significant.
using ComponentSequence = std::vector<ComponentId>;

// Immutable after load; safe for concurrent readers.
class ComponentDictionary {
 public:
  ComponentDictionary() = default;
  ComponentDictionary(std::map<CharacterCode, ComponentSequence> entries,
                      int vocab_size);

  // File format: one character per line, `<char><TAB><id> <id> ...`.
  // Throws ParseError / RangeError / DataError with the offending line.
  static ComponentDictionary load(const std::filesystem::path& path,
                                  int vocab_size = kDefaultComponentVocabSize);

  // Throws MissingCharacterError when `h` has no entry.
  const ComponentSequence& decompose(CharacterCode h) const;

  bool contains(CharacterCode h) const { return entries_.count(h) > 0; }

  // Characters from `chars` with no entry; empty set means full coverage.
  std::set<CharacterCode> missing_from(const std::set<CharacterCode>& chars) const;

  std::size_t size() const { return entries_.size(); }
  int vocab_size() const { return vocab_size_; }
  const std::map<CharacterCode, ComponentSequence>& entries() const {
    return entries_;
  }

  bool operator==(const ComponentDictionary&) const = default;

 private:
  std::map<CharacterCode, ComponentSequence> entries_;
  int vocab_size_ = kDefaultComponentVocabSize;
};

// Writes the load() format back out; round-trips exactly.
void write_dictionary(const ComponentDictionary& dict,
                      const std::filesystem::path& path);

}  // namespace glyphgan

#endif
