#include "nbody/report.hpp"

#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

namespace nbody {

namespace {

// (variant, threads, precision) identifies one plotted series.
using SeriesKey = std::tuple<std::string, unsigned, std::string>;

struct Index {
  std::set<std::size_t> ns;
  std::map<SeriesKey, std::map<std::size_t, const ResultRow*>> series;

  const ResultRow* find(const std::string& variant, unsigned threads,
                        const std::string& precision, std::size_t n) const {
    const auto it = series.find({variant, threads, precision});
    if (it == series.end()) return nullptr;
    const auto cell = it->second.find(n);
    return cell == it->second.end() ? nullptr : cell->second;
  }
};

Index build_index(const std::vector<ResultRow>& rows) {
  Index idx;
  for (const auto& row : rows) {
    if (!row.ok()) continue;
    idx.ns.insert(row.n_bodies);
    idx.series[{row.variant, row.threads, row.precision}][row.n_bodies] = &row;
  }
  return idx;
}

using Cell = std::function<std::optional<double>(std::size_t n)>;

struct TableRow {
  std::string label;
  Cell cell;
};

void write_table(std::ostringstream& os, const std::string& title,
                 const std::string& first_column, const std::set<std::size_t>& ns,
                 const std::vector<TableRow>& rows) {
  os << "## " << title << "\n\n";
  if (rows.empty()) {
    os << "_no comparable rows_\n\n";
    return;
  }
  os << "| " << first_column << " |";
  for (const auto n : ns) os << " N=" << n << " |";
  os << "\n|---|";
  for (std::size_t k = 0; k < ns.size(); ++k) os << "---:|";
  os << "\n";
  for (const auto& row : rows) {
    os << "| " << row.label << " |";
    for (const auto n : ns) {
      const auto v = row.cell(n);
      os << ' ' << (v ? format_cell(*v) : std::string("-")) << " |";
    }
    os << "\n";
  }
  os << "\n";
}

std::string series_label(const SeriesKey& key) {
  return std::get<0>(key) + " t" + std::to_string(std::get<1>(key)) + " " +
         std::get<2>(key);
}

}  // namespace

std::string format_cell(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

std::string render_report(const std::vector<ResultRow>& rows) {
  const Index idx = build_index(rows);
  std::ostringstream os;
  os << "# N-body benchmark report\n\n";

  std::vector<TableRow> gflops_rows;
  for (const auto& [key, cells] : idx.series) {
    gflops_rows.push_back({series_label(key), [&cells = cells](std::size_t n) {
                             const auto it = cells.find(n);
                             return it == cells.end()
                                        ? std::nullopt
                                        : std::optional<double>(*it->second->gflops_best);
                           }});
  }
  write_table(os, "GFLOPS (best of R)", "variant", idx.ns, gflops_rows);

  std::vector<TableRow> layout_rows;
  for (const std::string precision : {"double", "single"}) {
    if (!idx.series.count({"aos", 1, precision}) ||
        !idx.series.count({"soa", 1, precision})) {
      continue;
    }
    layout_rows.push_back(
        {"soa/aos " + precision, [&idx, precision](std::size_t n) {
           const auto* soa = idx.find("soa", 1, precision, n);
           const auto* aos = idx.find("aos", 1, precision, n);
           if (!soa || !aos) return std::optional<double>();
           return std::optional<double>(*soa->gflops_best / *aos->gflops_best);
         }});
  }
  write_table(os, "SoA / AoS throughput", "ratio", idx.ns, layout_rows);

  std::vector<TableRow> precision_rows;
  for (const auto& [key, cells] : idx.series) {
    const auto& [variant, threads, precision] = key;
    if (precision != "single" || !idx.series.count({variant, threads, "double"})) {
      continue;
    }
    precision_rows.push_back(
        {variant + " t" + std::to_string(threads),
         [&idx, variant = variant, threads = threads](std::size_t n) {
           const auto* s = idx.find(variant, threads, "single", n);
           const auto* d = idx.find(variant, threads, "double", n);
           if (!s || !d) return std::optional<double>();
           return std::optional<double>(*s->gflops_best / *d->gflops_best);
         }});
  }
  write_table(os, "Single / double throughput", "variant", idx.ns, precision_rows);

  std::vector<TableRow> speedup_rows;
  std::vector<TableRow> efficiency_rows;
  for (const auto& [key, cells] : idx.series) {
    const auto& [variant, threads, precision] = key;
    if (threads == 1 || !idx.series.count({variant, 1, precision})) continue;
    auto speedup = [&idx, variant = variant, threads = threads,
                    precision = precision](std::size_t n) {
      const auto* base = idx.find(variant, 1, precision, n);
      const auto* par = idx.find(variant, threads, precision, n);
      if (!base || !par) return std::optional<double>();
      return std::optional<double>(*base->best_time_s / *par->best_time_s);
    };
    const std::string label = series_label(key);
    speedup_rows.push_back({label, speedup});
    efficiency_rows.push_back({label, [speedup, threads = threads](std::size_t n) {
                                 const auto s = speedup(n);
                                 if (!s) return s;
                                 return std::optional<double>(*s / threads);
                               }});
  }
  write_table(os, "Parallel speedup (time T=1 / time T)", "variant", idx.ns,
              speedup_rows);
  write_table(os, "Parallel efficiency (speedup / T)", "variant", idx.ns,
              efficiency_rows);
  return os.str();
}

std::string render_report(const std::filesystem::path& csv_path) {
  return render_report(read_results_csv(csv_path));
}

}  // namespace nbody
