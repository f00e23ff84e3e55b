#include "glyphgan/components.hpp"

#include <fstream>
#include <sstream>

#include "glyphgan/errors.hpp"
#include "glyphgan/utf8.hpp"

namespace glyphgan {

std::string MissingCharacterError::to_hex(char32_t c) {
  static const char* digits = "0123456789ABCDEF";
  std::string s;
  for (int shift = 28; shift >= 0; shift -= 4) {
    int d = (c >> shift) & 0xF;
    if (!s.empty() || d != 0 || shift < 16) s += digits[d];
  }
  return s;
}

ComponentDictionary::ComponentDictionary(
    std::map<CharacterCode, ComponentSequence> entries, int vocab_size)
    : entries_(std::move(entries)), vocab_size_(vocab_size) {}

ComponentDictionary ComponentDictionary::load(
    const std::filesystem::path& path, int vocab_size) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dictionary file: " + path.string());

  std::map<CharacterCode, ComponentSequence> entries;
  std::string line;
  int line_no = 0;
  const std::string spath = path.string();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    auto decoded = utf8::decode_first(line);
    if (!decoded) throw ParseError(spath, line_no, "invalid UTF-8 character");
    auto [ch, consumed] = *decoded;
    if (consumed >= static_cast<int>(line.size()) || line[consumed] != '\t')
      throw ParseError(spath, line_no, "expected TAB after character");

    ComponentSequence seq;
    std::istringstream ids(line.substr(consumed + 1));
    std::string tok;
    while (ids >> tok) {
      std::size_t pos = 0;
      int id;
      try {
        id = std::stoi(tok, &pos);
      } catch (const std::exception&) {
        throw ParseError(spath, line_no, "non-numeric component ID '" + tok + "'");
      }
      if (pos != tok.size())
        throw ParseError(spath, line_no, "non-numeric component ID '" + tok + "'");
      if (id < 1 || id > vocab_size)
        throw RangeError(spath + ":" + std::to_string(line_no) +
                         ": component ID " + std::to_string(id) +
                         " outside [1, " + std::to_string(vocab_size) + "]");
      seq.push_back(id);
    }
    if (seq.empty())
      throw ParseError(spath, line_no, "empty component sequence");
    if (!entries.emplace(ch, std::move(seq)).second)
      throw DataError(spath + ":" + std::to_string(line_no) +
                      ": duplicate character U+" +
                      MissingCharacterError::to_hex(ch));
  }
  return ComponentDictionary(std::move(entries), vocab_size);
}

const ComponentSequence& ComponentDictionary::decompose(CharacterCode h) const {
  auto it = entries_.find(h);
  if (it == entries_.end()) throw MissingCharacterError(h);
  return it->second;
}

std::set<CharacterCode> ComponentDictionary::missing_from(
    const std::set<CharacterCode>& chars) const {
  std::set<CharacterCode> missing;
  for (CharacterCode c : chars)
    if (!contains(c)) missing.insert(c);
  return missing;
}

void write_dictionary(const ComponentDictionary& dict,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dictionary file: " + path.string());
  for (const auto& [ch, seq] : dict.entries()) {
    out << utf8::encode(ch) << '\t';
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out << ' ';
      out << seq[i];
    }
    out << '\n';
  }
}

}  // namespace glyphgan
