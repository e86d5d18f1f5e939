// Command-line front end: run, check, gen and bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsc/errors.hpp"
#include "dsc/workload/bench.hpp"
#include "dsc/workload/generate.hpp"
#include "dsc/workload/runner.hpp"
#include "dsc/workload/trace.hpp"

namespace {

using namespace dsc::workload;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

Trace read_trace(const std::string& path) {
  try {
    return load_trace(path);
  } catch (const std::ios_base::failure& e) {
    throw IoError(e.what());
  }
}

struct RunFlags {
  std::string trace;
  std::string mode = "det";
  std::uint64_t seed = 0;
  std::string check_level = "none";
  std::string out;
};

int cmd_run(const RunFlags& flags, bool strict) {
  const Trace trace = read_trace(flags.trace);
  RunOptions opts;
  opts.deterministic = flags.mode == "det";
  opts.seed = flags.seed;
  if (strict) {
    opts.check = CheckLevel::kFull;
    opts.monitor = true;
    opts.approximation = true;
  } else {
    opts.check = *parse_check_level(flags.check_level);
  }
  RunResult res = run_trace(trace, opts);
  write_output(flags.out, res.report.dump(2) + "\n");
  if (!res.ok) {
    std::cerr << "dsc: " << res.failure << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct GenFlags {
  std::string kind = "random";
  WorkloadParams params;
  std::string out;
};

int cmd_gen(GenFlags flags) {
  flags.params.kind = *parse_workload_kind(flags.kind);
  const Trace trace = generate(flags.params);
  write_output(flags.out, render_trace(trace));
  return kExitOk;
}

struct BenchFlags {
  std::vector<std::int32_t> freqs = {8, 16, 32, 64, 128};
  std::string mode = "both";
  std::string csv;
  double max_ratio = 3.0;
  BenchOptions opts;
};

int cmd_bench(BenchFlags flags) {
  flags.opts.freqs = flags.freqs;
  flags.opts.det = flags.mode != "rand";
  flags.opts.rand = flags.mode != "det";
  const auto rows = run_bench(flags.opts);
  write_output(flags.csv, bench_csv(rows));
  const ScalingVerdict verdict = check_scaling(rows, flags.max_ratio);
  for (const std::string& line : verdict.lines) std::cerr << line << "\n";
  return verdict.ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic set cover engine tools"};
  app.require_subcommand(1);
  const std::vector<std::string> modes = {"det", "rand"};

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Replay a trace and print a JSON report");
  run->add_option("--trace", run_flags.trace, "Trace file")->required();
  run->add_option("--mode", run_flags.mode)->check(CLI::IsMember(modes));
  run->add_option("--seed", run_flags.seed);
  run->add_option("--check-level", run_flags.check_level)
      ->check(CLI::IsMember({"none", "fast", "full"}));
  run->add_option("--out", run_flags.out, "Report path (default stdout)");

  RunFlags check_flags;
  auto* check = app.add_subcommand(
      "check", "Replay with full audits, contract and approximation checks");
  check->add_option("--trace", check_flags.trace, "Trace file")->required();
  check->add_option("--mode", check_flags.mode)->check(CLI::IsMember(modes));
  check->add_option("--seed", check_flags.seed);
  check->add_option("--out", check_flags.out, "Report path (default stdout)");

  GenFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "Generate a workload trace");
  gen->add_option("--kind", gen_flags.kind)
      ->check(CLI::IsMember({"random", "window", "churn"}));
  gen->add_option("--sets", gen_flags.params.sets);
  gen->add_option("--freq", gen_flags.params.frequency);
  gen->add_option("--min-members", gen_flags.params.min_members);
  gen->add_option("--updates", gen_flags.params.updates);
  gen->add_option("--epsilon", gen_flags.params.epsilon);
  gen->add_option("--cost-ratio", gen_flags.params.cost_ratio);
  gen->add_option("--capacity", gen_flags.params.capacity);
  gen->add_option("--window", gen_flags.params.window);
  gen->add_option("--seed", gen_flags.params.seed);
  gen->add_option("--out", gen_flags.out, "Trace path (default stdout)");

  BenchFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Frequency sweep with CSV output");
  bench->add_option("--freqs", bench_flags.freqs)->delimiter(',');
  bench->add_option("--updates", bench_flags.opts.updates);
  bench->add_option("--volume", bench_flags.opts.volume,
                    "Live membership volume n*f");
  bench->add_option("--sets", bench_flags.opts.sets);
  bench->add_option("--epsilon", bench_flags.opts.epsilon);
  bench->add_option("--cost-ratio", bench_flags.opts.cost_ratio);
  bench->add_option("--mode", bench_flags.mode)
      ->check(CLI::IsMember({"det", "rand", "both"}));
  bench->add_option("--seed", bench_flags.opts.seed);
  bench->add_option("--repeats", bench_flags.opts.repeats);
  bench->add_option("--max-ratio", bench_flags.max_ratio);
  bench->add_option("--csv", bench_flags.csv, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_flags, false);
    if (*check) return cmd_run(check_flags, true);
    if (*gen) return cmd_gen(gen_flags);
    if (*bench) return cmd_bench(bench_flags);
  } catch (const IoError& e) {
    std::cerr << "dsc: " << e.what() << "\n";
    return kExitIo;
  } catch (const SyntaxError& e) {
    std::cerr << "dsc: syntax error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "dsc: invalid trace: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dsc::ConfigError& e) {
    std::cerr << "dsc: invalid parameters: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dsc::UpdateError& e) {
    std::cerr << "dsc: rejected update: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dsc::InternalFault& e) {
    std::cerr << "dsc: internal fault: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
