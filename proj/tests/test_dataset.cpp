#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "macrosig/dataset.hpp"
#include "macrosig/errors.hpp"
#include "macrosig/rng.hpp"

using namespace macrosig;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("MonthDate parse, order and successor") {
  MonthDate d = MonthDate::parse("1986-01");
  CHECK(d.year == 1986);
  CHECK(d.month == 1);
  CHECK(d.successor() == MonthDate{1986, 2});
  CHECK(MonthDate{1986, 12}.successor() == MonthDate{1987, 1});
  CHECK(MonthDate{1986, 1} < MonthDate{1986, 2});
  CHECK(months_between(MonthDate{2022, 6}, MonthDate{1986, 1}) == 437);
  CHECK(MonthDate{1986, 1}.plus_months(437) == MonthDate{2022, 6});

  CHECK_THROWS_AS(MonthDate::parse("1986-13"), MalformedDate);
  CHECK_THROWS_AS(MonthDate::parse("1986/01"), MalformedDate);
  CHECK_THROWS_AS(MonthDate::parse("86-01"), MalformedDate);
}

TEST_CASE("load_csv smallest well-formed file") {
  auto path = write_temp("ms_small.csv", "date,x\n2000-01,1\n2000-02,2\n2000-03,3\n");
  auto series = load_csv(path);
  REQUIRE(series.size() == 1);
  CHECK(series[0].name == "x");
  CHECK(series[0].length() == 3);
  CHECK(series[0].missing_head() == 0);
  CHECK(series[0].values[2] == 3.0);
}

TEST_CASE("load_csv missing head and interior gaps") {
  auto ok = write_temp("ms_head.csv",
                       "date,y\n2000-01,\n2000-02,\n2000-03,3\n2000-04,4\n2000-05,5\n");
  auto series = load_csv(ok);
  CHECK(series[0].missing_head() == 2);
  CHECK(series[0].observed() == 3);
  CHECK(series[0].first_observed_date() == MonthDate{2000, 3});

  auto bad = write_temp("ms_gap.csv",
                        "date,z\n2000-01,1\n2000-02,2\n2000-03,\n2000-04,4\n2000-05,5\n");
  CHECK_THROWS_AS(load_csv(bad), InteriorMissingValue);
}

TEST_CASE("load_csv rejects malformed input") {
  CHECK_THROWS_AS(load_csv(write_temp("ms_date.csv", "date,x\n2000-1,1\n")), MalformedDate);
  CHECK_THROWS_AS(
      load_csv(write_temp("ms_gap2.csv", "date,x\n2000-01,1\n2000-03,2\n")),
      NonContiguousDates);
  CHECK_THROWS_AS(
      load_csv(write_temp("ms_num.csv", "date,x\n2000-01,1_000\n")), MalformedNumber);
  // scientific notation is fine
  auto sci = load_csv(write_temp("ms_sci.csv", "date,x\n2000-01,1.5e-3\n"));
  CHECK(sci[0].values[0] == doctest::Approx(0.0015));
}

TEST_CASE("transform level and first_diff") {
  MonthlySeries s{"x", MonthDate{2000, 1}, Eigen::VectorXd::LinSpaced(4, 1.0, 4.0)};
  MonthlySeries level = transform(s, {TransformKind::Level});
  CHECK(level.values == s.values);
  CHECK(level.start == s.start);

  MonthlySeries diff = transform(s, {TransformKind::FirstDiff});
  CHECK(diff.length() == 3);
  CHECK(diff.values[0] == 1.0);
  CHECK(diff.start == MonthDate{2000, 2});
}

TEST_CASE("transform yoy_pct of a constant series is zero") {
  MonthlySeries s{"c", MonthDate{2000, 1}, Eigen::VectorXd::Constant(30, 5.0)};
  MonthlySeries yoy = transform(s, {TransformKind::YoYPct});
  CHECK(yoy.length() == 18);
  CHECK(yoy.start == MonthDate{2001, 1});
  for (int i = 0; i < yoy.length(); ++i) CHECK(yoy.values[i] == 0.0);
}

TEST_CASE("transform monthly_return_pct arithmetic") {
  Eigen::VectorXd v(2);
  v << 100.0, 110.0;
  MonthlySeries s{"r", MonthDate{2000, 1}, v};
  MonthlySeries ret = transform(s, {TransformKind::MonthlyReturnPct});
  CHECK(ret.length() == 1);
  CHECK(ret.start == MonthDate{2000, 2});
  CHECK(ret.values[0] == doctest::Approx(10.0));
}

TEST_CASE("transform yoy_pct of a geometric series equals the closed form") {
  const int n = 60;
  Eigen::VectorXd v(n);
  for (int t = 0; t < n; ++t) v[t] = std::pow(1.01, t);
  MonthlySeries s{"g", MonthDate{2000, 1}, v};
  MonthlySeries yoy = transform(s, {TransformKind::YoYPct});
  const double expected = 100.0 * (std::pow(1.01, 12) - 1.0);
  for (int i = 0; i < yoy.length(); ++i)
    CHECK(yoy.values[i] == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("transform error paths") {
  MonthlySeries tiny{"t", MonthDate{2000, 1}, Eigen::VectorXd::Constant(5, 1.0)};
  CHECK_THROWS_AS(transform(tiny, {TransformKind::YoYPct}), InsufficientHistory);

  Eigen::VectorXd withzero(3);
  withzero << 1.0, 0.0, 2.0;
  MonthlySeries z{"z", MonthDate{2000, 1}, withzero};
  CHECK_THROWS_AS(transform(z, {TransformKind::MonthlyReturnPct}), DivisionByZero);
}

TEST_CASE("spread subtracts aligned series") {
  MonthlySeries a{"a", MonthDate{2000, 1}, Eigen::VectorXd::Constant(5, 3.0)};
  MonthlySeries b{"b", MonthDate{2000, 1}, Eigen::VectorXd::Constant(5, 1.0)};
  MonthlySeries sp = spread(a, b, "a_minus_b");
  CHECK(sp.length() == 5);
  for (int i = 0; i < 5; ++i) CHECK(sp.values[i] == 2.0);
}

TEST_CASE("align produces the 438x2 panel of the sample window") {
  const int n = 438;
  MonthDate start{1986, 1};
  MonthlySeries f1{"f1", start, Eigen::VectorXd::LinSpaced(n, 0.0, 1.0)};
  MonthlySeries f2{"f2", start, Eigen::VectorXd::Constant(n, 2.0)};
  Eigen::VectorXd lab = Eigen::VectorXd::Zero(n);
  for (int i = 100; i < 140; ++i) lab[i] = 1.0;
  MonthlySeries label{"Recession", start, lab};

  Panel p = align({f1, f2}, label, MonthRange{start, start.plus_months(n - 1)});
  CHECK(p.rows() == 438);
  CHECK(p.cols() == 2);
  CHECK(p.label.sum() == 40);
  CHECK(p.feature_names == std::vector<std::string>{"f1", "f2"});
  CHECK(p.dates.back() == MonthDate{2022, 6});
}

TEST_CASE("align degenerate one-month window") {
  MonthlySeries f{"f", MonthDate{2000, 1}, Eigen::VectorXd::Constant(5, 1.0)};
  Eigen::VectorXd lv = Eigen::VectorXd::Zero(5);
  MonthlySeries label{"y", MonthDate{2000, 1}, lv};
  Panel p = align({f}, label, MonthRange{MonthDate{2000, 3}, MonthDate{2000, 3}});
  CHECK(p.rows() == 1);
}

TEST_CASE("align reports coverage gaps and non-binary labels") {
  MonthlySeries late{"late", MonthDate{2000, 4}, Eigen::VectorXd::Constant(5, 1.0)};
  Eigen::VectorXd lv = Eigen::VectorXd::Zero(8);
  MonthlySeries label{"y", MonthDate{2000, 1}, lv};
  CHECK_THROWS_WITH_AS(
      align({late}, label, MonthRange{MonthDate{2000, 1}, MonthDate{2000, 8}}),
      doctest::Contains("2000-01"), CoverageGap);

  Eigen::VectorXd bad = Eigen::VectorXd::Constant(8, 0.5);
  MonthlySeries nb{"y", MonthDate{2000, 1}, bad};
  MonthlySeries f{"f", MonthDate{2000, 1}, Eigen::VectorXd::Constant(8, 1.0)};
  CHECK_THROWS_AS(align({f}, nb, MonthRange{MonthDate{2000, 1}, MonthDate{2000, 8}}),
                  NonBinaryLabel);
}

namespace {

Panel make_panel(int n, int positives, std::uint64_t seed = 3) {
  auto eng = rng::make_engine(seed);
  Panel p;
  p.feature_names = {"a", "b"};
  p.features.resize(n, 2);
  p.label.resize(n);
  for (int i = 0; i < n; ++i) {
    p.dates.push_back(MonthDate{1986, 1}.plus_months(i));
    p.features(i, 0) = rng::next_normal(eng);
    p.features(i, 1) = rng::next_normal(eng);
    p.label[i] = i < positives ? 1 : 0;
  }
  return p;
}

}  // namespace

TEST_CASE("split chronological counts match the paper's 329/109") {
  Panel p = make_panel(438, 40);
  auto [train, test] = split(p, SplitSpec{0.75, SplitSpec::Mode::Chronological, 0});
  CHECK(train.rows() == 329);
  CHECK(test.rows() == 109);
  CHECK(train.dates.front() == MonthDate{1986, 1});
  CHECK(test.dates.back() == p.dates.back());
}

TEST_CASE("split exact halving and too-few-rows error") {
  Panel p = make_panel(8, 2);
  auto [train, test] = split(p, SplitSpec{0.5, SplitSpec::Mode::Chronological, 0});
  CHECK(train.rows() == 4);
  CHECK(test.rows() == 4);

  Panel tiny = make_panel(7, 2);
  CHECK_THROWS_AS(split(tiny, SplitSpec{}), TooFewRows);
}

TEST_CASE("split random mode is deterministic and partitions the rows") {
  Panel p = make_panel(438, 40);
  SplitSpec spec{0.75, SplitSpec::Mode::Random, 1};
  auto [tr1, te1] = split(p, spec);
  auto [tr2, te2] = split(p, spec);
  CHECK(tr1.rows() == 329);
  REQUIRE(tr1.rows() == tr2.rows());
  for (int i = 0; i < tr1.rows(); ++i) CHECK(tr1.dates[i] == tr2.dates[i]);

  // union of the date sets is the full panel, intersection empty
  std::vector<int> seen(438, 0);
  for (const auto& d : tr1.dates) seen[months_between(d, MonthDate{1986, 1})]++;
  for (const auto& d : te1.dates) seen[months_between(d, MonthDate{1986, 1})]++;
  for (int c : seen) CHECK(c == 1);
}

TEST_CASE("panel CSV round-trip is exact") {
  Panel p = make_panel(20, 5, 99);
  p.features(3, 1) = 1.0 / 3.0;
  p.features(4, 0) = -2.5e-13;
  std::string path =
      (std::filesystem::temp_directory_path() / "ms_roundtrip.csv").string();
  save_csv(p, path);
  Panel q = panel_from_csv(path, "Recession");
  REQUIRE(q.rows() == p.rows());
  REQUIRE(q.cols() == p.cols());
  for (int i = 0; i < p.rows(); ++i) {
    CHECK(q.label[i] == p.label[i]);
    for (int j = 0; j < p.cols(); ++j) CHECK(q.features(i, j) == p.features(i, j));
  }
  // second save emits identical bytes
  std::string path2 =
      (std::filesystem::temp_directory_path() / "ms_roundtrip2.csv").string();
  save_csv(q, path2);
  std::ifstream f1(path), f2(path2);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
}
