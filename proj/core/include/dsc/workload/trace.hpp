#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dsc/config.hpp"
#include "dsc/engine.hpp"

namespace dsc::workload {

struct TraceParams {
  double epsilon = 0.2;
  std::int64_t cost_ratio = 1;
  std::int32_t max_frequency = 1;
  std::int64_t capacity = 1;
  bool operator==(const TraceParams&) const = default;
};

struct TraceSet {
  SetId id = 0;
  std::string cost_text;  // kept verbatim for round trips
  double cost = 1.0;
  bool operator==(const TraceSet&) const = default;
};

struct Trace {
  TraceParams params;
  std::vector<TraceSet> sets;
  std::vector<Update> updates;

  Config config(bool deterministic, std::uint64_t seed) const;
  std::vector<SetSpec> set_specs() const;
  bool operator==(const Trace&) const = default;
};

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ValidationKind : std::uint8_t {
  kInvalidParams,
  kInvalidCost,
  kDuplicateSet,
  kUnknownSet,
  kInvalidMembers,
  kFrequencyExceeded,
  kDuplicateElement,
  kUnknownElement,
  kCapacityExceeded,
};

const char* to_string(ValidationKind kind);

class ValidationError : public std::runtime_error {
 public:
  ValidationError(ValidationKind kind, std::size_t line,
                  const std::string& what);
  ValidationKind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  ValidationKind kind_;
  std::size_t line_;
};

// Line format:
//   DSC 1
//   params epsilon=<dec> C=<int> f=<int> capacity=<int>
//   set <id> <cost>
//   begin
//   + <elem> <set> [<set> ...]
//   - <elem>
//   end
// Blank lines and text after '#' are ignored.
Trace parse_trace(std::string_view text);
std::string render_trace(const Trace& trace);

// Semantic checks applied by parse_trace; line numbers are 0 when the trace
// was not parsed from text.
void validate_trace(const Trace& trace);

Trace load_trace(const std::string& path);  // throws std::ios_base::failure
void save_trace(const Trace& trace, const std::string& path);

// Shortest decimal text that parses back to the same double.
std::string format_decimal(double x);

}  // namespace dsc::workload
