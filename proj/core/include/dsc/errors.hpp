#pragma once

#include <stdexcept>
#include <string>

namespace dsc {

// Rejected user input. The engine state is unchanged when one is thrown.
enum class UpdateErrorKind {
  kUnknownElement,
  kDuplicateElement,
  kFrequencyExceeded,
  kCapacityExceeded,
  kUnknownSet,
  kInvalidMembers,
};

const char* to_string(UpdateErrorKind kind);

class UpdateError : public std::runtime_error {
 public:
  UpdateError(UpdateErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  UpdateErrorKind kind() const { return kind_; }

 private:
  UpdateErrorKind kind_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A broken internal invariant. Always a bug, never bad input.
class InternalFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

[[noreturn]] void raise_internal_fault(const char* cond, const char* file,
                                       int line);

}  // namespace dsc

#define DSC_CHECK(cond)                                         \
  do {                                                          \
    if (!(cond)) ::dsc::raise_internal_fault(#cond, __FILE__, __LINE__); \
  } while (0)
