#pragma once

#include <stdexcept>
#include <string>

namespace beamsel {

/// Input value outside its documented domain (negative pitch, taper level
/// out of range, mismatched matrix shapes, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A pattern measurement could not be taken from the available samples,
/// e.g. no -3 dB crossing inside the cut or no sidelobe left in the window.
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Request refused because honouring it would destroy the result, e.g.
/// placing a null on top of the main lobe.
class RejectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Work request exceeds a hard resource limit (sample counts, memory).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration values that parse fine but cannot be used together.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem-level failure: missing file, unwritable directory.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file content. Carries enough context to find the bad field.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, const std::string& what)
      : std::runtime_error(file + ": " + what), file_(file) {}
  ParseError(const std::string& file, long line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}

  const std::string& file() const { return file_; }
  long line() const { return line_; }  ///< 1-based, 0 when not line-oriented

 private:
  std::string file_;
  long line_ = 0;
};

}  // namespace beamsel
