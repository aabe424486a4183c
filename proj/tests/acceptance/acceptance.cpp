// Acceptance suite: one PASS/FAIL/SKIP line per criterion, details indented.
// Exit status is nonzero when any criterion fails.

#include <CLI11.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nbody/harness.hpp"
#include "nbody/kernels.hpp"
#include "nbody/report.hpp"
#include "nbody/results_csv.hpp"
#include "nbody/validation.hpp"
#include "nbody_cli/commands.hpp"

using namespace nbody;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::vector<std::string> details;

  void note(std::string line) { details.push_back(std::move(line)); }
  // Records a check; any failing check fails the criterion.
  void check(bool ok, std::string line) {
    if (!ok) verdict = Verdict::Fail;
    details.push_back((ok ? "ok    " : "FAIL  ") + line);
  }
};

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double rel(double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::abs(b); }

SimParams params_with(std::uint64_t steps, double dt = 0.01, double eps2 = 1e-9) {
  SimParams p;
  p.steps = steps;
  p.dt = dt;
  p.softening_sq = eps2;
  return p;
}

// 1. Full ladder against the independent oracle.
Outcome variant_equivalence() {
  Outcome o;
  const std::vector<std::size_t> blocks{8, 64, 256};
  const std::vector<unsigned> threads{1, 2, 4};
  const auto ladder = full_ladder(blocks, threads);
  const auto start = std::chrono::steady_clock::now();
  const auto report = cross_validate(1024, Seed{42}, params_with(10), ladder);
  const double elapsed = seconds_since(start);

  double worst_double = 0.0, worst_single = 0.0;
  for (const auto& c : report.checks) {
    auto& worst = c.entry.precision == Precision::Double ? worst_double : worst_single;
    worst = std::max(worst, c.oracle_rel_dev);
    if (!c.passed) o.check(false, c.entry.label() + ": " + c.reason);
  }
  o.check(report.all_passed(), std::to_string(report.checks.size()) +
                                   " ladder entries within tolerance of the oracle");
  o.check(worst_double <= kDoubleTolerance,
          "max double deviation " + fmt("%.3g", worst_double) + " <= 1e-9");
  o.check(worst_single <= kSingleTolerance,
          "max single deviation " + fmt("%.3g", worst_single) + " <= 5e-4");
  o.check(elapsed < 60.0, "runtime " + fmt("%.2f", elapsed) + " s < 60 s");
  return o;
}

// 2. GFLOPS formula, exact value and recomputation from CSV rows.
Outcome gflops_formula(const std::vector<ResultRow>& rows) {
  Outcome o;
  o.check(gflops(1000, 100, 2.0) == 1.0, "gflops(1000, 100, 2.0) == 1.0");
  double worst = 0.0;
  std::size_t checked = 0;
  for (const auto& row : rows) {
    if (!row.ok()) continue;
    const double n = static_cast<double>(row.n_bodies);
    const double s = static_cast<double>(row.steps);
    worst = std::max(worst, rel(*row.gflops_best, 20.0 * n * n * s / (*row.best_time_s * 1e9)));
    worst = std::max(worst, rel(*row.gflops_mean, 20.0 * n * n * s / (*row.mean_time_s * 1e9)));
    ++checked;
  }
  o.check(checked > 0 && worst <= 4 * std::numeric_limits<double>::epsilon(),
          std::to_string(checked) + " CSV rows recompute, max relative error " +
              fmt("%.3g", worst));
  return o;
}

double max_position_error(const std::vector<BodyState>& a, const std::vector<BodyState>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double dx = a[i].position.x - b[i].position.x;
    const double dy = a[i].position.y - b[i].position.y;
    const double dz = a[i].position.z - b[i].position.z;
    worst = std::max(worst, std::sqrt(dx * dx + dy * dy + dz * dz));
  }
  return worst;
}

// 3. Momentum, energy drift and the convergence order of the update rule.
Outcome physics() {
  Outcome o;
  {
    const auto p = params_with(100);
    const auto end = simulate(init_system(256, Seed{42}, Precision::Double, Layout::Soa), p,
                              KernelVariant::reference());
    const Diagnostics d = diagnostics(end, p);
    const double ratio = d.momentum_norm() / d.momentum_scale;
    o.check(ratio <= kMomentumDriftBound,
            "momentum |sum m v| / sum m|v| = " + fmt("%.3g", ratio) + " <= 1e-9");
  }

  const std::vector<BodyState> at_rest = {{{0, 0, 0}, {}, 1.0}, {{1, 0, 0}, {}, 1.0}};
  {
    const auto drift = energy_drift(
        ParticleSystem::from_bodies(at_rest, Precision::Double, Layout::Soa),
        params_with(100, 1e-3, 0.0), KernelVariant::reference());
    o.check(drift.relative && drift.value <= 1e-4,
            "two-body energy drift " + fmt("%.3g", drift.value) + " <= 1e-4 (dt=1e-3, 100 steps)");
  }

  // Bodies released from rest collide before t=1, so the order check follows
  // the same pair on a circular orbit.
  const double v = std::sqrt(0.5);
  const std::vector<BodyState> orbit = {{{-0.5, 0, 0}, {0, -v, 0}, 1.0},
                                        {{0.5, 0, 0}, {0, v, 0}, 1.0}};
  const double dt = 0.01;
  const double total = 1.0;
  auto run = [&](double step) {
    const auto steps = static_cast<std::uint64_t>(std::llround(total / step));
    return simulate(ParticleSystem::from_bodies(orbit, Precision::Double, Layout::Soa),
                    params_with(steps, step, 0.0), KernelVariant::reference())
        .bodies();
  };
  const auto oracle = reference_simulate(
      orbit, params_with(static_cast<std::uint64_t>(std::llround(16 * total / dt)), dt / 16, 0.0));
  const double e_full = max_position_error(run(dt), oracle);
  const double e_half = max_position_error(run(dt / 2), oracle);
  const double ratio = e_full / e_half;
  o.check(ratio >= 3.0 && ratio <= 5.0,
          "error ratio when halving dt = " + fmt("%.3f", ratio) + " in [3, 5] (errors " +
              fmt("%.3g", e_full) + ", " + fmt("%.3g", e_half) + ")");
  if (ratio < 3.0) {
    o.note("      the update rule v += a dt; p += (v + a dt/2) dt is first order (ratio ~2)");
  }
  return o;
}

// 4. Bitwise-identical checksums over three runs.
Outcome determinism() {
  Outcome o;
  const std::vector<KernelVariant> variants = {
      KernelVariant::reference(),
      {Layout::Aos, MathForm::PowThenDivide, std::nullopt, 1},
      {Layout::Soa, MathForm::PowThenDivide, std::nullopt, 4},
      {Layout::Soa, MathForm::ReciprocalMultiply, 64, 2},
      {Layout::Soa, MathForm::ReciprocalMultiply, 8, 3},
  };
  const auto p = params_with(10);
  for (const auto& variant : variants) {
    for (const auto prec : {Precision::Double, Precision::Single}) {
      std::set<std::uint64_t> bits;
      for (int run = 0; run < 3; ++run) {
        const auto sys = simulate(init_system(1024, Seed{42}, prec, variant.layout), p, variant);
        bits.insert(std::bit_cast<std::uint64_t>(checksum(sys)));
      }
      o.check(bits.size() == 1, variant.label() + " t" + std::to_string(variant.threads) + " " +
                                    std::string(to_string(prec)) + ": 3 identical checksums");
    }
  }
  return o;
}

// 5. Directional performance at N=32768.
Outcome performance() {
  Outcome o;
  const unsigned hw = std::thread::hardware_concurrency();
  o.note("      host reports " + std::to_string(hw) + " hardware thread(s)");
  const auto start = std::chrono::steady_clock::now();

  auto bench = [&](const KernelVariant& variant, Precision prec) {
    BenchConfig c;
    c.n_bodies = 32768;
    c.params = params_with(10);
    c.variant = variant;
    c.precision = prec;
    c.seed = Seed{42};
    c.repetitions = 5;
    c.warmup_runs = 0;
    const BenchResult r = measure(c);
    o.note("      " + variant.label() + " t" + std::to_string(variant.threads) + " " +
           std::string(to_string(prec)) + ": best " + fmt("%.2f", r.best_time_s) + " s, " +
           fmt("%.2f", r.gflops_best) + " GFLOPS");
    return r;
  };

  const KernelVariant soa1 = KernelVariant::reference();
  const BenchResult soa_double = bench(soa1, Precision::Double);

  if (hw >= 4) {
    KernelVariant soa4 = soa1;
    soa4.threads = 4;
    const BenchResult par = bench(soa4, Precision::Double);
    const double speedup = soa_double.best_time_s / par.best_time_s;
    o.check(speedup >= 2.0, "(a) T=4 speedup " + fmt("%.2f", speedup) + "x >= 2.0x");
  } else {
    o.note("skip  (a) T=4 speedup needs >= 4 hardware threads");
  }

  const BenchResult aos = bench({Layout::Aos, MathForm::PowThenDivide, std::nullopt, 1},
                                Precision::Double);
  const double layout_ratio = soa_double.gflops_best / aos.gflops_best;
  o.check(layout_ratio >= 0.9, "(b) soa/aos throughput " + fmt("%.2f", layout_ratio) +
                                   "x >= 0.9x (expected >= 1.5x: " +
                                   (layout_ratio >= 1.5 ? "met" : "not met") + ")");

  const BenchResult soa_single = bench(soa1, Precision::Single);
  const double precision_ratio = soa_single.gflops_best / soa_double.gflops_best;
  o.check(precision_ratio >= 1.2,
          "(c) single/double throughput " + fmt("%.2f", precision_ratio) + "x >= 1.2x");

  const double elapsed = seconds_since(start);
  o.check(elapsed < 300.0, "runtime " + fmt("%.1f", elapsed) + " s < 300 s");
  return o;
}

// 6. Blocked kernels against the unblocked kernel.
Outcome blocking_safety() {
  Outcome o;
  const auto p = params_with(10);
  for (const auto prec : {Precision::Double, Precision::Single}) {
    for (const auto form : {MathForm::PowThenDivide, MathForm::ReciprocalMultiply}) {
      const KernelVariant plain{Layout::Soa, form, std::nullopt, 1};
      const auto start = init_system(1024, Seed{42}, prec, Layout::Soa);
      const double ref = checksum(simulate(start, p, plain));
      for (const std::size_t b : {8u, 64u, 256u}) {
        KernelVariant blocked = plain;
        blocked.block_size = b;
        const double dev = rel(checksum(simulate(start, p, blocked)), ref);
        o.check(dev <= tolerance_for(prec),
                blocked.label() + " " + std::string(to_string(prec)) + ": deviation " +
                    fmt("%.3g", dev) + " <= " + fmt("%g", tolerance_for(prec)));
      }
    }
  }
  return o;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nbody");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, log;
  return cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, log);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Cell text of the row labelled `label` in the table titled `title`, N column `col`.
std::string table_cell(const std::string& md, const std::string& title, const std::string& label,
                       std::size_t col) {
  const auto at = md.find("## " + title);
  if (at == std::string::npos) return {};
  const auto row = md.find("| " + label + " |", at);
  const auto next = md.find("## ", at + 3);
  if (row == std::string::npos || (next != std::string::npos && row > next)) return {};
  std::string line = md.substr(row, md.find('\n', row) - row);
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, '|')) {
    const auto b = cell.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    cells.push_back(cell.substr(b, cell.find_last_not_of(' ') - b + 1));
  }
  return col + 1 < cells.size() ? cells[col + 1] : std::string{};
}

// 7. Sweep to CSV, interrupted and resumed, then rendered.
Outcome csv_pipeline(std::vector<ResultRow>& rows_out) {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "nbody_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto csv = dir / "sweep.csv";
  const std::vector<std::string> sweep = {
      "bench", "--variant", "soa", "--precision", "both", "--n", "64,128", "--threads", "1,2",
      "--steps", "5", "--reps", "3", "--warmup", "1", "--out", csv.string()};

  o.check(cli(sweep) == 0, "sweep exit status 0");
  const auto first = read_results_csv(csv);
  std::size_t ok_rows = 0;
  for (const auto& r : first) ok_rows += r.ok();
  o.check(first.size() == 8 && ok_rows == 8, std::to_string(ok_rows) + " ok rows of 8");

  // Simulate an interruption: keep the header and five rows, plus a torn line.
  std::string text = slurp(csv);
  std::size_t cut = 0;
  for (int line = 0; line < 6; ++line) cut = text.find('\n', cut) + 1;
  const std::string kept = text.substr(0, cut);
  std::ofstream(csv, std::ios::trunc | std::ios::binary) << kept << text.substr(cut, 20);

  auto resumed = sweep;
  resumed.push_back("--resume");
  o.check(cli(resumed) == 0, "resumed sweep exit status 0");
  const std::string after = slurp(csv);
  const auto rows = read_results_csv(csv);
  std::set<ResultKey> keys;
  for (const auto& r : rows) {
    if (r.ok()) keys.insert({r.variant, r.n_bodies, r.threads, parse_precision(r.precision)});
  }
  o.check(after.compare(0, kept.size(), kept) == 0, "completed rows untouched by resume");
  o.check(rows.size() == 8 && keys.size() == 8,
          std::to_string(rows.size()) + " rows, " + std::to_string(keys.size()) +
              " distinct ok combinations after resume");

  const std::string md = render_report(rows);
  auto find = [&](unsigned t, const std::string& prec, std::size_t n) -> const ResultRow* {
    for (const auto& r : rows) {
      if (r.threads == t && r.precision == prec && r.n_bodies == n) return &r;
    }
    return nullptr;
  };
  std::size_t compared = 0, matched = 0;
  for (std::size_t col = 0; col < 2; ++col) {
    const std::size_t n = col == 0 ? 64 : 128;
    for (const std::string prec : {"double", "single"}) {
      const auto* t1 = find(1, prec, n);
      const auto* t2 = find(2, prec, n);
      if (!t1 || !t2) continue;
      const double speedup = *t1->best_time_s / *t2->best_time_s;
      compared += 2;
      matched += table_cell(md, "Parallel speedup", "soa t2 " + prec, col) == format_cell(speedup);
      matched += table_cell(md, "Parallel efficiency", "soa t2 " + prec, col) ==
                 format_cell(speedup / 2);
    }
    for (const unsigned t : {1u, 2u}) {
      const auto* s = find(t, "single", n);
      const auto* d = find(t, "double", n);
      if (!s || !d) continue;
      ++compared;
      matched += table_cell(md, "Single / double", "soa t" + std::to_string(t), col) ==
                 format_cell(*s->gflops_best / *d->gflops_best);
    }
  }
  o.check(compared == 12 && matched == compared,
          std::to_string(matched) + " of 12 report cells match hand computation");
  rows_out = rows;
  std::filesystem::remove_all(dir);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the N-body library"};
  std::vector<int> only;
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  auto selected = [&](int k) {
    return only.empty() || std::find(only.begin(), only.end(), k) != only.end();
  };

  std::vector<ResultRow> sweep_rows;
  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
  };
  // The sweep runs first so the GFLOPS criterion can check its rows.
  const std::vector<Criterion> criteria = {
      {7, "CSV/report pipeline", [&] { return csv_pipeline(sweep_rows); }},
      {1, "variant equivalence", variant_equivalence},
      {2, "GFLOPS formula",
       [&] {
         if (sweep_rows.empty()) csv_pipeline(sweep_rows);
         return gflops_formula(sweep_rows);
       }},
      {3, "physics", physics},
      {4, "determinism", determinism},
      {6, "blocking safety", blocking_safety},
      {5, "directional performance", performance},
  };

  std::map<int, std::pair<std::string, Verdict>> summary;
  for (const auto& c : criteria) {
    if (!selected(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.check(false, std::string("exception: ") + e.what());
    }
    const char* tag = outcome.verdict == Verdict::Pass ? "PASS"
                      : outcome.verdict == Verdict::Fail ? "FAIL"
                                                         : "SKIP";
    std::cout << "[" << tag << "] criterion " << c.id << " " << c.name << " ("
              << fmt("%.1f", seconds_since(start)) << " s)\n";
    for (const auto& d : outcome.details) std::cout << "    " << d << "\n";
    std::cout << std::flush;
    summary[c.id] = {c.name, outcome.verdict};
  }

  int failed = 0;
  std::cout << "\nsummary:\n";
  for (const auto& [id, entry] : summary) {
    const bool fail = entry.second == Verdict::Fail;
    failed += fail;
    std::cout << "  " << id << " " << entry.first << ": "
              << (fail ? "FAIL" : entry.second == Verdict::Pass ? "PASS" : "SKIP") << "\n";
  }
  return failed == 0 ? 0 : 1;
}
