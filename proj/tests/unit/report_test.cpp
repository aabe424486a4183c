#include <gtest/gtest.h>

#include "nbody/report.hpp"

using namespace nbody;

namespace {

ResultRow row(std::string variant, unsigned threads, std::string precision, std::size_t n,
              double best_time, double gflops_best, std::string status = "ok") {
  ResultRow r;
  r.variant = std::move(variant);
  r.threads = threads;
  r.precision = std::move(precision);
  r.n_bodies = n;
  r.best_time_s = best_time;
  r.mean_time_s = best_time;
  r.gflops_best = gflops_best;
  r.gflops_mean = gflops_best;
  r.checksum = 1.0;
  r.status = std::move(status);
  return r;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST(Report, FormatCell) {
  EXPECT_EQ(format_cell(1.0), "1.000");
  EXPECT_EQ(format_cell(2.0 / 3.0), "0.667");
}

TEST(Report, HandComputedRatios) {
  const std::vector<ResultRow> rows = {
      row("aos", 1, "double", 64, 4.0, 1.0),
      row("soa", 1, "double", 64, 2.0, 2.0),
      row("soa", 2, "double", 64, 1.25, 3.2),
      row("soa", 1, "single", 64, 1.0, 5.0),
      row("aos", 1, "double", 128, 8.0, 2.0),
  };
  const std::string md = render_report(rows);
  EXPECT_TRUE(contains(md, "| variant | N=64 | N=128 |")) << md;
  EXPECT_TRUE(contains(md, "| soa t1 double | 2.000 | - |")) << md;
  EXPECT_TRUE(contains(md, "| soa/aos double | 2.000 | - |")) << md;
  EXPECT_TRUE(contains(md, "| soa t1 | 2.500 | - |")) << md;
  // Speedup 2.0 / 1.25, efficiency half of that.
  EXPECT_TRUE(contains(md, "| soa t2 double | 1.600 | - |")) << md;
  EXPECT_TRUE(contains(md, "| soa t2 double | 0.800 | - |")) << md;
}

TEST(Report, SkipsNonOkRowsAndLastDuplicateWins) {
  const std::vector<ResultRow> rows = {
      row("soa", 1, "double", 64, 2.0, 2.0),
      row("soa", 1, "double", 64, 1.0, 4.0),
      row("soa", 1, "double", 128, 0.0, 0.0, "error:x"),
  };
  const std::string md = render_report(rows);
  EXPECT_TRUE(contains(md, "| soa t1 double | 4.000 |")) << md;
  EXPECT_FALSE(contains(md, "N=128")) << md;
  EXPECT_TRUE(contains(md, "_no comparable rows_")) << md;
}
