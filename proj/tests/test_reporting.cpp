#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <doctest.h>

#include "fiberamp/csv.hpp"
#include "fiberamp/svg.hpp"
#include "support.hpp"

using namespace fiberamp;

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, -3.25, 1.2566370614359172e-07, 3e26, 1e-300}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("csv writer emits manifest comments then data") {
  std::ostringstream os;
  CsvWriter w(os);
  Manifest m;
  m.version = "0.0.test";
  m.config_hash = 0xdeadbeefull;
  m.extra.emplace_back("solver", "rk4");
  w.manifest(m);
  w.header({"a", "b"});
  w.row({1.5, -2.0});
  const std::string text = os.str();
  CHECK(text.find("# tool: fiberamp 0.0.test\n") != std::string::npos);
  CHECK(text.find("# config-hash: 00000000deadbeef\n") != std::string::npos);
  CHECK(text.find("# solver: rk4\n") != std::string::npos);
  CHECK(text.find("a,b\n1.5,-2\n") != std::string::npos);
}

TEST_CASE("csv reader skips comments and parses rows") {
  const char* path = "/tmp/fiberamp_csv_test.csv";
  {
    std::ofstream out(path);
    out << "# tool: test\nx,y\n1,2\n3.5,-4\n";
  }
  const CsvTable t = read_csv(path);
  CHECK(t.columns == std::vector<std::string>{"x", "y"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[1][0] == 3.5);
  CHECK(t.column_index("y") == 1);
  CHECK(t.column_index("nope") == -1);
  std::remove(path);

  {
    std::ofstream out(path);
    out << "x,y\n1,banana\n";
  }
  CHECK_THROWS_WITH(read_csv(path), doctest::Contains("malformed"));
  std::remove(path);
}

TEST_CASE("line plot output is deterministic and well-formed") {
  PlotSeries s;
  s.label = "trace";
  for (int i = 0; i <= 100; ++i) {
    s.x.push_back(0.1 * i);
    s.y.push_back(std::sin(0.1 * i));
  }
  PlotStyle style;
  style.title = "test";
  style.x_label = "z (m)";
  style.y_label = "P (W)";
  const std::string a = svg_line_plot({s}, style);
  const std::string b = svg_line_plot({s}, style);
  CHECK(a == b);
  CHECK(a.rfind("<svg", 0) == 0);
  CHECK(a.find("</svg>") != std::string::npos);
  // a single series yields a single polyline
  std::size_t count = 0, pos = 0;
  while ((pos = a.find("<polyline", pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 1);
  CHECK(a.find("z (m)") != std::string::npos);
}

TEST_CASE("heatmap matches the golden fixture") {
  const std::vector<double> xs = {1000, 2000, 3000};
  const std::vector<double> ys = {0.1, 1.0};
  const std::vector<double> values = {1e-4, 2e-4, 4e-4, 1e-5, 3e-5, 9e-5};
  HeatmapStyle style;
  style.title = "eps";
  style.x_label = "pump";
  style.y_label = "length";
  const std::string got = svg_grid_heatmap(xs, ys, values, style);
  CHECK(got.rfind("<svg", 0) == 0);
  // one cell per value plus 64 colorbar segments
  std::size_t rects = 0, pos = 0;
  while ((pos = got.find("<rect", pos)) != std::string::npos) {
    ++rects;
    ++pos;
  }
  CHECK(rects == 1 + 6 + 64);  // background + cells + colorbar

  const std::string golden_path =
      std::string(FIBERAMP_TEST_DATA_DIR) + "/golden_heatmap.svg";
  std::ifstream in(golden_path);
  REQUIRE_MESSAGE(in.good(), "missing golden fixture ", golden_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  CHECK(got == ss.str());
}

TEST_CASE("non-finite heatmap cells are painted as invalid") {
  const std::vector<double> xs = {1.0, 2.0};
  const std::vector<double> ys = {1.0};
  const std::vector<double> values = {1e-3,
                                      std::numeric_limits<double>::quiet_NaN()};
  const std::string got = svg_grid_heatmap(xs, ys, values, {});
  CHECK(got.find("#bbbbbb") != std::string::npos);
}
