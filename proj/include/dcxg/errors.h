#ifndef DCXG_ERRORS_H_
#define DCXG_ERRORS_H_

#include <stdexcept>
#include <string>
#include <vector>

namespace dcxg {

// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed vector file content.
class FormatError : public Error {
 public:
  FormatError(int line, const std::string &reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Vectors of differing dimensionality. line is 0 when not file-related.
class DimensionMismatch : public Error {
 public:
  DimensionMismatch(int line, size_t expected, size_t actual)
      : Error((line > 0 ? "line " + std::to_string(line) + ": " : "") +
              "dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(actual)),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("zero vector has no direction") {}
};

class OutOfVocabulary : public Error {
 public:
  explicit OutOfVocabulary(const std::string &word)
      : Error("out of vocabulary: " + word), word_(word) {}
  const std::string &word() const { return word_; }

 private:
  std::string word_;
};

class EmptyFillerList : public Error {
 public:
  EmptyFillerList() : Error("prototype needs at least one filler") {}
};

// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structural problem in a feature structure (e.g. a cycle).
class StructureError : public Error {
 public:
  using Error::Error;
};

// Syntax or shape error in a grammar file. location is a byte offset or a
// JSON pointer into the document.
class ParseError : public Error {
 public:
  ParseError(const std::string &location, const std::string &reason)
      : Error(location + ": " + reason), location_(location), reason_(reason) {}
  const std::string &location() const { return location_; }
  const std::string &reason() const { return reason_; }

 private:
  std::string location_;
  std::string reason_;
};

// One failed validation rule.
struct ValidationIssue {
  std::string object;
  std::string rule;
};

// All validation failures found in one pass.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues)
      : Error(Format(issues)), issues_(std::move(issues)) {}
  const std::vector<ValidationIssue> &issues() const { return issues_; }

 private:
  static std::string Format(const std::vector<ValidationIssue> &issues) {
    std::string out = "validation failed";
    for (const auto &issue : issues) {
      out += "\n  " + issue.object + ": " + issue.rule;
    }
    return out;
  }
  std::vector<ValidationIssue> issues_;
};

class InheritanceClash : public Error {
 public:
  InheritanceClash(const std::string &first, const std::string &second,
                   const std::string &path, const std::string &detail)
      : Error("inheritance clash between " + first + " and " + second +
              " at " + path + ": " + detail),
        first_(first),
        second_(second),
        path_(path) {}
  const std::string &first() const { return first_; }
  const std::string &second() const { return second_; }
  const std::string &path() const { return path_; }

 private:
  std::string first_;
  std::string second_;
  std::string path_;
};

class NoScorableRoles : public Error {
 public:
  NoScorableRoles() : Error("no role has both a filler and a prototype") {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input sentence") {}
};

}  // namespace dcxg

#endif  // DCXG_ERRORS_H_
