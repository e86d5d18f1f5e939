#include "dsc/workload/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dsc::workload {
namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r')) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' &&
           line[j] != '\r') {
      ++j;
    }
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw SyntaxError(line, std::string("malformed ") + what + " '" +
                                std::string(tok) + "'");
  }
  return value;
}

struct LineMap {
  std::vector<std::size_t> set_lines;
  std::vector<std::size_t> update_lines;
  std::size_t params_line = 0;
};

void validate_with_lines(const Trace& t, const LineMap* lines) {
  auto set_line = [&](std::size_t i) {
    return lines ? lines->set_lines[i] : 0;
  };
  auto update_line = [&](std::size_t i) {
    return lines ? lines->update_lines[i] : 0;
  };
  const TraceParams& p = t.params;
  const std::size_t pl = lines ? lines->params_line : 0;
  if (!(p.epsilon > 0 && p.epsilon <= 1)) {
    throw ValidationError(ValidationKind::kInvalidParams, pl,
                          "epsilon must lie in (0, 1]");
  }
  if (p.cost_ratio < 1 || p.max_frequency < 1 || p.capacity < 1) {
    throw ValidationError(ValidationKind::kInvalidParams, pl,
                          "C, f and capacity must be positive");
  }
  std::unordered_set<SetId> declared;
  const double low = 1.0 / static_cast<double>(p.cost_ratio);
  for (std::size_t i = 0; i < t.sets.size(); ++i) {
    const TraceSet& s = t.sets[i];
    if (!declared.insert(s.id).second) {
      throw ValidationError(ValidationKind::kDuplicateSet, set_line(i),
                            "set " + std::to_string(s.id) + " declared twice");
    }
    if (!(s.cost >= low && s.cost <= 1.0)) {
      throw ValidationError(ValidationKind::kInvalidCost, set_line(i),
                            "cost of set " + std::to_string(s.id) +
                                " outside [1/C, 1]");
    }
  }
  std::unordered_set<ElementId> live;
  for (std::size_t i = 0; i < t.updates.size(); ++i) {
    const Update& u = t.updates[i];
    const std::size_t line = update_line(i);
    const std::string elem = "element " + std::to_string(u.elem);
    if (u.kind == Update::Kind::kDelete) {
      if (live.erase(u.elem) == 0) {
        throw ValidationError(ValidationKind::kUnknownElement, line,
                              elem + " is not live");
      }
      continue;
    }
    if (live.count(u.elem)) {
      throw ValidationError(ValidationKind::kDuplicateElement, line,
                            elem + " is already live");
    }
    if (u.members.empty()) {
      throw ValidationError(ValidationKind::kInvalidMembers, line,
                            elem + " has no member sets");
    }
    if (u.members.size() > static_cast<std::size_t>(p.max_frequency)) {
      throw ValidationError(ValidationKind::kFrequencyExceeded, line,
                            elem + " has " + std::to_string(u.members.size()) +
                                " member sets, f is " +
                                std::to_string(p.max_frequency));
    }
    std::unordered_set<SetId> seen;
    for (SetId s : u.members) {
      if (!declared.count(s)) {
        throw ValidationError(ValidationKind::kUnknownSet, line,
                              "set " + std::to_string(s) + " is not declared");
      }
      if (!seen.insert(s).second) {
        throw ValidationError(ValidationKind::kInvalidMembers, line,
                              elem + " lists set " + std::to_string(s) +
                                  " twice");
      }
    }
    if (live.size() + 1 > static_cast<std::size_t>(p.capacity)) {
      throw ValidationError(ValidationKind::kCapacityExceeded, line,
                            "live count would exceed capacity " +
                                std::to_string(p.capacity));
    }
    live.insert(u.elem);
  }
}

}  // namespace

SyntaxError::SyntaxError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      line_(line) {}

ValidationError::ValidationError(ValidationKind kind, std::size_t line,
                                 const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " +
                         to_string(kind) + ": " + what),
      kind_(kind),
      line_(line) {}

const char* to_string(ValidationKind kind) {
  switch (kind) {
    case ValidationKind::kInvalidParams: return "InvalidParams";
    case ValidationKind::kInvalidCost: return "InvalidCost";
    case ValidationKind::kDuplicateSet: return "DuplicateSet";
    case ValidationKind::kUnknownSet: return "UnknownSet";
    case ValidationKind::kInvalidMembers: return "InvalidMembers";
    case ValidationKind::kFrequencyExceeded: return "FrequencyExceeded";
    case ValidationKind::kDuplicateElement: return "DuplicateElement";
    case ValidationKind::kUnknownElement: return "UnknownElement";
    case ValidationKind::kCapacityExceeded: return "CapacityExceeded";
  }
  return "Unknown";
}

std::string format_decimal(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

Config Trace::config(bool deterministic, std::uint64_t seed) const {
  Config cfg;
  cfg.epsilon = params.epsilon;
  cfg.cost_ratio = params.cost_ratio;
  cfg.max_frequency = params.max_frequency;
  cfg.capacity = params.capacity;
  cfg.deterministic = deterministic;
  cfg.rng_seed = seed;
  return cfg;
}

std::vector<SetSpec> Trace::set_specs() const {
  std::vector<SetSpec> out;
  out.reserve(sets.size());
  for (const TraceSet& s : sets) out.push_back({s.id, s.cost});
  return out;
}

Trace parse_trace(std::string_view text) {
  enum class Stage { kHeader, kParams, kSets, kUpdates, kDone };
  Stage stage = Stage::kHeader;
  Trace t;
  LineMap lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string_view head = tok[0];
    switch (stage) {
      case Stage::kHeader:
        if (tok.size() != 2 || head != "DSC" || tok[1] != "1") {
          throw SyntaxError(line_no, "expected header 'DSC 1'");
        }
        stage = Stage::kParams;
        break;
      case Stage::kParams: {
        if (head != "params") throw SyntaxError(line_no, "expected params");
        bool have[4] = {false, false, false, false};
        for (std::size_t i = 1; i < tok.size(); ++i) {
          auto eq = tok[i].find('=');
          if (eq == std::string_view::npos) {
            throw SyntaxError(line_no, "expected key=value");
          }
          auto key = tok[i].substr(0, eq);
          auto val = tok[i].substr(eq + 1);
          if (key == "epsilon") {
            t.params.epsilon = parse_number<double>(val, line_no, "epsilon");
            have[0] = true;
          } else if (key == "C") {
            t.params.cost_ratio = parse_number<std::int64_t>(val, line_no, "C");
            have[1] = true;
          } else if (key == "f") {
            t.params.max_frequency =
                parse_number<std::int32_t>(val, line_no, "f");
            have[2] = true;
          } else if (key == "capacity") {
            t.params.capacity =
                parse_number<std::int64_t>(val, line_no, "capacity");
            have[3] = true;
          } else {
            throw SyntaxError(line_no,
                              "unknown parameter '" + std::string(key) + "'");
          }
        }
        if (!(have[0] && have[1] && have[2] && have[3])) {
          throw SyntaxError(line_no, "params needs epsilon, C, f, capacity");
        }
        lines.params_line = line_no;
        stage = Stage::kSets;
        break;
      }
      case Stage::kSets:
        if (head == "set") {
          if (tok.size() != 3) throw SyntaxError(line_no, "expected set <id> <cost>");
          TraceSet s;
          s.id = parse_number<SetId>(tok[1], line_no, "set id");
          s.cost_text = std::string(tok[2]);
          s.cost = parse_number<double>(tok[2], line_no, "cost");
          t.sets.push_back(std::move(s));
          lines.set_lines.push_back(line_no);
        } else if (head == "begin" && tok.size() == 1) {
          stage = Stage::kUpdates;
        } else {
          throw SyntaxError(line_no, "expected set or begin");
        }
        break;
      case Stage::kUpdates:
        if (head == "+") {
          if (tok.size() < 3) {
            throw SyntaxError(line_no, "insert needs an element and a set");
          }
          Update u;
          u.kind = Update::Kind::kInsert;
          u.elem = parse_number<ElementId>(tok[1], line_no, "element id");
          for (std::size_t i = 2; i < tok.size(); ++i) {
            u.members.push_back(parse_number<SetId>(tok[i], line_no, "set id"));
          }
          t.updates.push_back(std::move(u));
          lines.update_lines.push_back(line_no);
        } else if (head == "-") {
          if (tok.size() != 2) throw SyntaxError(line_no, "expected - <elem>");
          t.updates.push_back(
              Update::erase(parse_number<ElementId>(tok[1], line_no, "element id")));
          lines.update_lines.push_back(line_no);
        } else if (head == "end" && tok.size() == 1) {
          stage = Stage::kDone;
        } else {
          throw SyntaxError(line_no, "expected update or end");
        }
        break;
      case Stage::kDone:
        throw SyntaxError(line_no, "content after end");
    }
  }
  if (stage != Stage::kDone) {
    throw SyntaxError(line_no, "unexpected end of input");
  }
  validate_with_lines(t, &lines);
  return t;
}

void validate_trace(const Trace& trace) { validate_with_lines(trace, nullptr); }

std::string render_trace(const Trace& t) {
  std::string out = "DSC 1\n";
  out += "params epsilon=" + format_decimal(t.params.epsilon) +
         " C=" + std::to_string(t.params.cost_ratio) +
         " f=" + std::to_string(t.params.max_frequency) +
         " capacity=" + std::to_string(t.params.capacity) + "\n";
  for (const TraceSet& s : t.sets) {
    out += "set " + std::to_string(s.id) + " " +
           (s.cost_text.empty() ? format_decimal(s.cost) : s.cost_text) + "\n";
  }
  out += "begin\n";
  for (const Update& u : t.updates) {
    if (u.kind == Update::Kind::kDelete) {
      out += "- " + std::to_string(u.elem) + "\n";
      continue;
    }
    out += "+ " + std::to_string(u.elem);
    for (SetId s : u.members) out += " " + std::to_string(s);
    out += "\n";
  }
  out += "end\n";
  return out;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open " + path);
  out << render_trace(trace);
  if (!out) throw std::ios_base::failure("write failed for " + path);
}

}  // namespace dsc::workload
