#pragma once

#include <stdexcept>
#include <string>

namespace ccmd {

// Invalid input: names the offending field.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Non-finite iterate, bracket failure and similar.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, long t = -1)
      : std::runtime_error(t >= 0 ? what + " (t=" + std::to_string(t) + ")" : what),
        t_(t) {}
  long iteration() const { return t_; }

 private:
  long t_;
};

// A diagnostic needs data the run did not record.
class DiagnosticUnavailable : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ccmd
