#include "nbody/results_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace nbody {

namespace {

constexpr std::size_t kColumns = 18;

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  if (s == "nan" || s == "-nan") {
    out = std::nan("");
    return true;
  }
  if (s == "inf" || s == "-inf") {
    out = s[0] == '-' ? -INFINITY : INFINITY;
    return true;
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

// Empty cells are absent values (error rows carry no timings).
bool parse_optional_real(std::string_view s, std::optional<double>& out) {
  if (s.empty()) {
    out.reset();
    return true;
  }
  double v = 0.0;
  if (!parse_real(s, v)) return false;
  out = v;
  return true;
}

std::optional<std::string> parse_row(std::string_view line, ResultRow& row) {
  const auto f = split_fields(line);
  if (f.size() != kColumns) {
    return "expected " + std::to_string(kColumns) + " fields, found " +
           std::to_string(f.size());
  }
  row.variant = f[0];
  row.layout = f[1];
  row.math_form = f[2];
  if (row.variant.empty()) return std::string("empty variant");
  if (!f[3].empty()) {
    std::size_t b = 0;
    if (!parse_int(f[3], b)) return std::string("bad block_size");
    row.block_size = b;
  }
  if (!parse_int(f[4], row.threads)) return std::string("bad threads");
  row.precision = f[5];
  if (row.precision != "single" && row.precision != "double") {
    return std::string("bad precision");
  }
  if (!parse_int(f[6], row.n_bodies)) return std::string("bad n_bodies");
  if (!parse_int(f[7], row.steps)) return std::string("bad steps");
  if (!parse_int(f[8], row.seed)) return std::string("bad seed");
  if (!parse_int(f[9], row.repetitions)) return std::string("bad repetitions");
  if (!parse_optional_real(f[10], row.best_time_s)) return std::string("bad best_time_s");
  if (!parse_optional_real(f[11], row.mean_time_s)) return std::string("bad mean_time_s");
  if (!parse_optional_real(f[12], row.gflops_best)) return std::string("bad gflops_best");
  if (!parse_optional_real(f[13], row.gflops_mean)) return std::string("bad gflops_mean");
  if (!parse_optional_real(f[14], row.checksum)) return std::string("bad checksum");
  row.status = f[15];
  if (row.status != "ok" && row.status != "skipped" &&
      row.status.rfind("error:", 0) != 0) {
    return std::string("bad status");
  }
  if (row.ok() && (!row.best_time_s || !row.mean_time_s || !row.gflops_best ||
                   !row.gflops_mean || !row.checksum)) {
    return std::string("ok row with missing measurements");
  }
  row.host_label = f[16];
  row.timestamp_utc = f[17];
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_real(double value) { return format_checksum(value); }

std::string format_csv_row(const BenchResult& r) {
  const auto& c = r.config;
  const bool timed = !r.times_s.empty();
  std::string line;
  line += c.variant.label();
  line += ',';
  line += to_string(c.variant.layout);
  line += ',';
  line += to_string(c.variant.math_form);
  line += ',';
  if (c.variant.block_size) line += std::to_string(*c.variant.block_size);
  line += ',' + std::to_string(c.variant.threads);
  line += ',';
  line += to_string(c.precision);
  line += ',' + std::to_string(c.n_bodies);
  line += ',' + std::to_string(c.params.steps);
  line += ',' + std::to_string(c.seed.value);
  line += ',' + std::to_string(c.repetitions);
  for (const double v : {r.best_time_s, r.mean_time_s, r.gflops_best, r.gflops_mean,
                         r.checksum}) {
    line += ',';
    if (timed) line += format_real(v);
  }
  line += ',' + sanitize(r.status);
  line += ',' + sanitize(r.host_label);
  line += ',' + format_utc(r.timestamp);
  return line;
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::vector<std::string> problems;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool saw_header = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!saw_header) {
      if (line != kCsvHeader) {
        throw CsvError("line 1: header does not match the results schema");
      }
      saw_header = true;
      continue;
    }
    if (line.empty()) continue;
    ResultRow row;
    row.line = line_no;
    if (auto why = parse_row(line, row)) {
      problems.push_back("line " + std::to_string(line_no) + ": " + *why);
    } else {
      rows.push_back(std::move(row));
    }
  }
  if (!saw_header) throw CsvError("line 1: missing header");
  if (!problems.empty()) {
    std::string msg = "malformed CSV rows:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CsvError(msg);
  }
  return rows;
}

std::vector<ResultRow> read_results_csv(const std::filesystem::path& path) {
  try {
    return parse_results_csv(read_file(path));
  } catch (const CsvError& e) {
    throw CsvError(path.string() + ": " + e.what());
  }
}

std::set<ResultKey> completed_keys(const std::vector<ResultRow>& rows) {
  std::set<ResultKey> keys;
  for (const auto& row : rows) {
    if (!row.ok()) continue;
    keys.insert({row.variant, row.n_bodies, row.threads,
                 parse_precision(row.precision)});
  }
  return keys;
}

void emit_csv(const std::vector<BenchResult>& results,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& r : results) out << format_csv_row(r) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvResultWriter::CsvResultWriter(std::filesystem::path path, bool resume)
    : path_(std::move(path)) {
  bool keep = false;
  if (resume && std::filesystem::exists(path_)) {
    std::string text = read_file(path_);
    // Drop a partially written final line left by an interrupted run.
    if (!text.empty() && text.back() != '\n') {
      const std::size_t last = text.rfind('\n');
      text.erase(last == std::string::npos ? 0 : last + 1);
      std::ofstream fix(path_, std::ios::trunc | std::ios::binary);
      fix << text;
      if (!fix) throw std::runtime_error("cannot rewrite " + path_.string());
    }
    if (!text.empty()) {
      try {
        existing_ = parse_results_csv(text);
      } catch (const CsvError& e) {
        throw CsvError(path_.string() + ": " + e.what());
      }
      keep = true;
    }
  }
  out_.open(path_, keep ? std::ios::app : std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot write " + path_.string());
  if (!keep) {
    out_ << kCsvHeader << '\n';
    out_.flush();
  }
}

void CsvResultWriter::append(const BenchResult& result) {
  out_ << format_csv_row(result) << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
}

}  // namespace nbody
