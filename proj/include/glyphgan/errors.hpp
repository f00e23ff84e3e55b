#ifndef GLYPHGAN_ERRORS_HPP
#define GLYPHGAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace glyphgan {

// Bad file contents: malformed lines, duplicate keys, unreadable images.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : DataError {
  ParseError(const std::string& path, int line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MissingCharacterError : DataError {
  explicit MissingCharacterError(char32_t code)
      : DataError("character U+" + to_hex(code) + " has no dictionary entry"),
        character(code) {}
  char32_t character;

  static std::string to_hex(char32_t c);
};

struct MissingGlyphError : DataError {
  using DataError::DataError;
};

// Non-finite loss during training; carries the offending step.
struct DivergenceError : std::runtime_error {
  DivergenceError(long step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what),
        step(step) {}
  long step;
};

}  // namespace glyphgan

#endif
