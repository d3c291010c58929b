#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace creamkit {

/// A located problem found while parsing or validating input.
/// `line` is 1-based, 0 when the input has no line structure.
struct Diagnostic {
  std::size_t line = 0;
  std::string node;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

std::string to_string(const Diagnostic& d);

/// Thrown for contract violations on otherwise-valid data (unknown codes,
/// out-of-grid scores, missing scope nodes).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either a value or the complete list of diagnostics that prevented it.
template <class T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(std::vector<Diagnostic> errors) : state_(std::move(errors)) {}  // NOLINT

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!ok()) throw Error("Result holds errors: " + first_message());
    return std::get<T>(state_);
  }
  T&& value() && {
    if (!ok()) throw Error("Result holds errors: " + first_message());
    return std::get<T>(std::move(state_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  const std::vector<Diagnostic>& errors() const {
    static const std::vector<Diagnostic> kNone;
    return ok() ? kNone : std::get<std::vector<Diagnostic>>(state_);
  }

 private:
  std::string first_message() const {
    const auto& errs = std::get<std::vector<Diagnostic>>(state_);
    return errs.empty() ? std::string("(none)") : to_string(errs.front());
  }

  std::variant<T, std::vector<Diagnostic>> state_;
};

}  // namespace creamkit
