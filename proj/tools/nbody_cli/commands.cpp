#include "nbody_cli/commands.hpp"

#include <fstream>
#include <ostream>

#include "nbody/report.hpp"
#include "nbody/results_csv.hpp"

namespace nbody::cli {

namespace {

void log_skip(std::ostream& log, const SkippedCombination& s) {
  log << "skipped " << s.config.variant.label() << " t" << s.config.variant.threads
      << " " << to_string(s.config.precision) << " n=" << s.config.n_bodies
      << ": " << s.reason << "\n";
}

int run_command(const CliConfig& config, std::ostream& out, std::ostream& log) {
  SweepPlan plan = config.plan;
  plan.repetitions = 1;
  plan.warmup_runs = 0;
  bool failed = false;
  SweepSink sink;
  sink.on_skip = [&](const SkippedCombination& s) { log_skip(log, s); };
  sink.on_result = [&](const BenchResult& r) {
    const auto& c = r.config;
    out << c.variant.label() << " t" << c.variant.threads << " "
        << to_string(c.precision) << " n=" << c.n_bodies
        << " steps=" << c.params.steps;
    if (!r.ok()) {
      failed = true;
      out << " status=" << r.status << "\n";
      return;
    }
    out << " checksum=" << format_checksum(r.checksum)
        << " time_s=" << format_real(r.best_time_s)
        << " gflops=" << format_real(r.gflops_best) << "\n";
  };
  run_sweep(plan, sink);
  return failed ? kExitRuntime : kExitOk;
}

int bench_command(const CliConfig& config, std::ostream& out, std::ostream& log) {
  SweepPlan plan = config.plan;
  std::optional<CsvResultWriter> writer;
  if (config.out) {
    writer.emplace(*config.out, config.resume);
    plan.completed = completed_keys(writer->existing_rows());
    if (!plan.completed.empty()) {
      log << "resume: " << plan.completed.size()
          << " completed combinations found in " << config.out->string() << "\n";
    }
  } else {
    out << kCsvHeader << "\n";
  }

  bool failed = false;
  SweepSink sink;
  sink.on_skip = [&](const SkippedCombination& s) { log_skip(log, s); };
  sink.on_result = [&](const BenchResult& r) {
    if (!r.ok()) failed = true;
    if (writer) {
      writer->append(r);
    } else {
      out << format_csv_row(r) << "\n" << std::flush;
    }
    log << r.config.variant.label() << " t" << r.config.variant.threads << " "
        << to_string(r.config.precision) << " n=" << r.config.n_bodies << ": "
        << (r.ok() ? format_real(r.gflops_best) + " GFLOPS" : r.status) << "\n";
  };
  run_sweep(plan, sink);
  return failed ? kExitRuntime : kExitOk;
}

int validate_command(const CliConfig& config, std::ostream& out, std::ostream&) {
  bool all_passed = true;
  std::string csv;
  for (const std::size_t n : config.plan.n_values) {
    const auto ladder = ladder_entries(config, n);
    const ValidationReport report =
        cross_validate(n, config.plan.seed, config.plan.params, ladder);
    out << render_text(report);
    all_passed = all_passed && report.all_passed();
    std::string rows = render_csv(report);
    if (!csv.empty()) rows.erase(0, rows.find('\n') + 1);
    csv += rows;
  }
  if (config.out) {
    std::ofstream file(*config.out, std::ios::trunc);
    file << csv;
    if (!file) throw std::runtime_error("cannot write " + config.out->string());
  }
  return all_passed ? kExitOk : kExitValidation;
}

int report_command(const CliConfig& config, std::ostream& out) {
  const std::string markdown = render_report(*config.report_input);
  if (config.out) {
    std::ofstream file(*config.out, std::ios::trunc);
    file << markdown;
    if (!file) throw std::runtime_error("cannot write " + config.out->string());
  } else {
    out << markdown;
  }
  return kExitOk;
}

}  // namespace

int execute(const CliConfig& config, std::ostream& out, std::ostream& log) {
  if (config.command != Command::Report) log << describe(config);
  switch (config.command) {
    case Command::Run: return run_command(config, out, log);
    case Command::Bench: return bench_command(config, out, log);
    case Command::Validate: return validate_command(config, out, log);
    case Command::Report: return report_command(config, out);
  }
  return kExitUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& log) {
  CliConfig config;
  try {
    config = parse_args(argc, argv);
  } catch (const HelpRequested& help) {
    out << help.what();
    return kExitOk;
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return execute(config, out, log);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace nbody::cli
