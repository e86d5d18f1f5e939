#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "dsc/errors.hpp"
#include "dsc/workload/generate.hpp"
#include "dsc/workload/trace.hpp"

namespace dsc::workload {
namespace {

constexpr const char* kMinimal =
    "DSC 1\n"
    "# two sets, one element in and out\n"
    "params epsilon=0.5 C=2 f=2 capacity=4\n"
    "set 1 1\n"
    "set 2 0.5   # cheap\n"
    "\n"
    "begin\n"
    "+ 7 1 2\n"
    "- 7\n"
    "end\n";

ValidationKind validation_kind(const std::string& text) {
  try {
    parse_trace(text);
  } catch (const ValidationError& err) {
    return err.kind();
  }
  ADD_FAILURE() << "trace accepted:\n" << text;
  return ValidationKind::kInvalidParams;
}

std::string with_body(const std::string& params, const std::string& sets,
                      const std::string& updates) {
  return "DSC 1\n" + params + "\n" + sets + "begin\n" + updates + "end\n";
}

TEST(TraceParse, Minimal) {
  const Trace t = parse_trace(kMinimal);
  EXPECT_DOUBLE_EQ(t.params.epsilon, 0.5);
  EXPECT_EQ(t.params.cost_ratio, 2);
  EXPECT_EQ(t.params.max_frequency, 2);
  EXPECT_EQ(t.params.capacity, 4);
  ASSERT_EQ(t.sets.size(), 2u);
  EXPECT_EQ(t.sets[1].cost_text, "0.5");
  ASSERT_EQ(t.updates.size(), 2u);
  EXPECT_EQ(t.updates[0], Update::insert(7, {1, 2}));
  EXPECT_EQ(t.updates[1], Update::erase(7));
  const Config cfg = t.config(false, 9);
  EXPECT_FALSE(cfg.deterministic);
  EXPECT_EQ(cfg.rng_seed, 9u);
  EXPECT_EQ(t.set_specs().size(), 2u);
}

TEST(TraceParse, SyntaxErrorsCarryLine) {
  try {
    parse_trace("DSC 1\nparams epsilon=0.5 C=1 f=1 capacity=1\nbogus\n");
    FAIL();
  } catch (const SyntaxError& err) {
    EXPECT_EQ(err.line(), 3u);
  }
  EXPECT_THROW(parse_trace("DSC 2\n"), SyntaxError);
  EXPECT_THROW(parse_trace(""), SyntaxError);
  // Missing end.
  EXPECT_THROW(parse_trace("DSC 1\nparams epsilon=0.5 C=1 f=1 capacity=1\n"
                           "set 1 1\nbegin\n+ 1 1\n"),
               SyntaxError);
  EXPECT_THROW(parse_trace("DSC 1\nparams epsilon=abc C=1 f=1 capacity=1\n"
                           "begin\nend\n"),
               SyntaxError);
}

TEST(TraceValidate, RejectsSemanticErrors) {
  const std::string p = "params epsilon=0.5 C=2 f=2 capacity=2";
  const std::string s = "set 1 1\nset 2 0.5\nset 3 1\n";
  EXPECT_EQ(validation_kind(with_body(p, s, "+ 1 9\n")),
            ValidationKind::kUnknownSet);
  EXPECT_EQ(validation_kind(with_body(p, s, "+ 1 1 2 3\n")),
            ValidationKind::kFrequencyExceeded);
  EXPECT_EQ(validation_kind(with_body(p, s, "+ 1 1\n+ 1 2\n")),
            ValidationKind::kDuplicateElement);
  EXPECT_EQ(validation_kind(with_body(p, s, "- 4\n")),
            ValidationKind::kUnknownElement);
  EXPECT_EQ(validation_kind(with_body(p, s, "+ 1 1\n+ 2 1\n+ 3 1\n")),
            ValidationKind::kCapacityExceeded);
  EXPECT_EQ(validation_kind(with_body(p, s, "+ 1 1 1\n")),
            ValidationKind::kInvalidMembers);
  EXPECT_EQ(validation_kind(with_body(p, "set 1 1\nset 1 1\n", "")),
            ValidationKind::kDuplicateSet);
  EXPECT_EQ(validation_kind(with_body(p, "set 1 0.25\n", "")),
            ValidationKind::kInvalidCost);
  EXPECT_EQ(validation_kind(with_body(p, "set 1 1.5\n", "")),
            ValidationKind::kInvalidCost);
  EXPECT_EQ(validation_kind(
                with_body("params epsilon=0 C=1 f=1 capacity=1", "", "")),
            ValidationKind::kInvalidParams);
  // Reinserting after a delete is fine.
  EXPECT_NO_THROW(parse_trace(with_body(p, s, "+ 1 1\n- 1\n+ 1 2\n")));
}

TEST(TraceRender, RoundTrip) {
  const Trace t = parse_trace(kMinimal);
  const std::string text = render_trace(t);
  EXPECT_EQ(parse_trace(text), t);
  EXPECT_EQ(render_trace(parse_trace(text)), text);
}

TEST(TraceRender, GeneratedRoundTrip) {
  WorkloadParams p;
  p.kind = WorkloadKind::kChurn;
  p.sets = 30;
  p.frequency = 5;
  p.updates = 500;
  p.cost_ratio = 8;
  p.epsilon = 0.15;
  p.seed = 4;
  const Trace t = generate(p);
  EXPECT_NO_THROW(validate_trace(t));
  EXPECT_EQ(parse_trace(render_trace(t)), t);
}

TEST(TraceFiles, SaveAndLoad) {
  const auto path =
      std::filesystem::temp_directory_path() / "dsc_trace_test.trace";
  const Trace t = parse_trace(kMinimal);
  save_trace(t, path.string());
  EXPECT_EQ(load_trace(path.string()), t);
  std::filesystem::remove(path);
  EXPECT_THROW(load_trace("/nonexistent/dir/x.trace"), std::ios_base::failure);
}

TEST(FormatDecimal, ShortestRoundTrip) {
  EXPECT_EQ(format_decimal(0.5), "0.5");
  EXPECT_EQ(format_decimal(1.0), "1");
  EXPECT_EQ(format_decimal(0.1), "0.1");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_decimal(x)), x);
}

TEST(Generate, Deterministic) {
  for (auto kind : {WorkloadKind::kRandom, WorkloadKind::kWindow,
                    WorkloadKind::kChurn}) {
    WorkloadParams p;
    p.kind = kind;
    p.seed = 11;
    const Trace a = generate(p);
    EXPECT_EQ(a, generate(p)) << to_string(kind);
    EXPECT_EQ(a.updates.size(), p.updates);
    EXPECT_NO_THROW(validate_trace(a));
    p.seed = 12;
    EXPECT_NE(a, generate(p)) << to_string(kind);
  }
}

TEST(Generate, CostsWithinRange) {
  WorkloadParams p;
  p.cost_ratio = 4;
  p.seed = 3;
  const Trace t = generate(p);
  ASSERT_EQ(t.sets.size(), static_cast<std::size_t>(p.sets));
  for (const TraceSet& s : t.sets) {
    EXPECT_GE(s.cost, 0.25);
    EXPECT_LE(s.cost, 1.0);
  }
}

TEST(Generate, WindowOfOneAlternates) {
  WorkloadParams p;
  p.kind = WorkloadKind::kWindow;
  p.window = 1;
  p.updates = 40;
  const Trace t = generate(p);
  for (std::size_t i = 0; i < t.updates.size(); ++i) {
    EXPECT_EQ(t.updates[i].kind,
              i % 2 == 0 ? Update::Kind::kInsert : Update::Kind::kDelete);
  }
}

TEST(Generate, MembershipSizes) {
  WorkloadParams p;
  p.frequency = 6;
  p.min_members = 6;
  p.sets = 10;
  p.updates = 200;
  const Trace t = generate(p);
  for (const Update& u : t.updates) {
    if (u.kind == Update::Kind::kInsert) {
      EXPECT_EQ(u.members.size(), 6u);
    }
  }
}

TEST(Generate, EdgeCases) {
  WorkloadParams p;
  p.updates = 0;
  EXPECT_TRUE(generate(p).updates.empty());
  p.frequency = 0;
  EXPECT_THROW(generate(p), ConfigError);
  p.frequency = 4;
  p.sets = 3;
  EXPECT_THROW(generate(p), ConfigError);
  EXPECT_EQ(parse_workload_kind("churn"), WorkloadKind::kChurn);
  EXPECT_FALSE(parse_workload_kind("nope").has_value());
}

}  // namespace
}  // namespace dsc::workload
