#pragma once

#include <stdexcept>
#include <string>

namespace exactpl {

// A caller violated a documented precondition (bad interval, level out of
// range, x outside a function's domain, ...).
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation would exceed a configured resource cap.
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed textual input (rational literals, file formats).
struct parse_error : std::runtime_error {
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// An internal self-check failed.  Results carry their own verification
// records; a violated record is a bug, not a user error.
struct internal_error : std::logic_error {
  explicit internal_error(const std::string& what) : std::logic_error(what) {}
};

}  // namespace exactpl
