#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbody/harness.hpp"

namespace nbody {

inline constexpr std::string_view kCsvHeader =
    "variant,layout,math_form,block_size,threads,precision,n_bodies,steps,seed,"
    "repetitions,best_time_s,mean_time_s,gflops_best,gflops_mean,checksum,"
    "status,host_label,timestamp_utc";

// Reals are written with 17 significant digits so every value round-trips.
std::string format_real(double value);

// One CSV line without the trailing newline.
std::string format_csv_row(const BenchResult& result);

// A parsed CSV data row.
struct ResultRow {
  std::size_t line = 0;  // 1-based line number in the file
  std::string variant;
  std::string layout;
  std::string math_form;
  std::optional<std::size_t> block_size;
  unsigned threads = 1;
  std::string precision;
  std::size_t n_bodies = 0;
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  unsigned repetitions = 0;
  std::optional<double> best_time_s;
  std::optional<double> mean_time_s;
  std::optional<double> gflops_best;
  std::optional<double> gflops_mean;
  std::optional<double> checksum;
  std::string status;
  std::string host_label;
  std::string timestamp_utc;

  bool ok() const { return status == "ok"; }
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses CSV text. Every malformed row is reported (with its line number) in a
// single CsvError.
std::vector<ResultRow> parse_results_csv(std::string_view text);
std::vector<ResultRow> read_results_csv(const std::filesystem::path& path);

// Keys of the rows with status ok; those combinations are not re-run on resume.
std::set<ResultKey> completed_keys(const std::vector<ResultRow>& rows);

// Writes header then one row per result, replacing any existing file.
void emit_csv(const std::vector<BenchResult>& results,
              const std::filesystem::path& path);

// Appends rows as results arrive, flushing each line. In resume mode an
// existing file with the expected header is kept (a torn final line is
// dropped); otherwise the file is truncated and the header written.
class CsvResultWriter {
 public:
  CsvResultWriter(std::filesystem::path path, bool resume);

  void append(const BenchResult& result);
  // Rows that were already in the file when it was opened for resume.
  const std::vector<ResultRow>& existing_rows() const { return existing_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<ResultRow> existing_;
};

}  // namespace nbody
