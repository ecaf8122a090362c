#include "macrosig/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "macrosig/rng.hpp"

namespace macrosig {

std::string MonthDate::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

MonthDate MonthDate::parse(const std::string& text) {
  if (text.size() != 7 || text[4] != '-')
    throw MalformedDate("expected YYYY-MM, got '" + text + "'");
  for (int i : {0, 1, 2, 3, 5, 6})
    if (text[i] < '0' || text[i] > '9')
      throw MalformedDate("expected YYYY-MM, got '" + text + "'");
  int y = std::stoi(text.substr(0, 4));
  int m = std::stoi(text.substr(5, 2));
  if (m < 1 || m > 12) throw MalformedDate("month out of range in '" + text + "'");
  return MonthDate{y, m};
}

int MonthlySeries::missing_head() const {
  int h = 0;
  while (h < length() && std::isnan(values[h])) ++h;
  return h;
}

void MonthlySeries::validate() const {
  int h = missing_head();
  for (int i = h; i < length(); ++i)
    if (std::isnan(values[i]))
      throw InteriorMissingValue("series '" + name + "' missing at row " +
                                 std::to_string(i) + " (" +
                                 start.plus_months(i).to_string() + ")");
}

int Panel::column_index(const std::string& name) const {
  for (int j = 0; j < cols(); ++j)
    if (feature_names[j] == name) return j;
  return -1;
}

Panel Panel::select_rows(const std::vector<int>& rows_idx) const {
  Panel out;
  out.feature_names = feature_names;
  out.label_name = label_name;
  out.dates.reserve(rows_idx.size());
  out.features.resize(static_cast<int>(rows_idx.size()), cols());
  out.label.resize(static_cast<int>(rows_idx.size()));
  for (std::size_t i = 0; i < rows_idx.size(); ++i) {
    out.dates.push_back(dates[rows_idx[i]]);
    out.features.row(static_cast<int>(i)) = features.row(rows_idx[i]);
    out.label[static_cast<int>(i)] = label[rows_idx[i]];
  }
  return out;
}

Panel Panel::select_columns(const std::vector<std::string>& names) const {
  Panel out;
  out.dates = dates;
  out.label = label;
  out.label_name = label_name;
  out.feature_names = names;
  out.features.resize(rows(), static_cast<int>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    int src = column_index(names[j]);
    if (src < 0) throw Error("unknown column '" + names[j] + "'");
    out.features.col(static_cast<int>(j)) = features.col(src);
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, const std::string& column, int row) {
  double v;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw MalformedNumber("column '" + column + "' row " + std::to_string(row) +
                          ": cannot parse '" + cell + "'");
  return v;
}

}  // namespace

std::vector<MonthlySeries> load_csv(const std::string& path,
                                    const std::string& date_column) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "': empty file");
  std::vector<std::string> header = split_line(line);
  if (header.empty() || header[0] != date_column)
    throw Error("'" + path + "': first column must be '" + date_column + "'");

  const std::size_t ncol = header.size();
  std::vector<std::vector<double>> columns(ncol - 1);
  std::vector<MonthDate> dates;

  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != ncol)
      throw Error("'" + path + "' row " + std::to_string(row) + ": expected " +
                  std::to_string(ncol) + " cells, got " + std::to_string(cells.size()));
    MonthDate d = MonthDate::parse(cells[0]);
    if (!dates.empty() && d != dates.back().successor())
      throw NonContiguousDates("row " + std::to_string(row) + ": " + d.to_string() +
                               " does not follow " + dates.back().to_string());
    dates.push_back(d);
    for (std::size_t j = 1; j < ncol; ++j) {
      if (cells[j].empty())
        columns[j - 1].push_back(std::numeric_limits<double>::quiet_NaN());
      else
        columns[j - 1].push_back(parse_cell(cells[j], header[j], row));
    }
    ++row;
  }
  if (dates.empty()) throw Error("'" + path + "': no data rows");

  std::vector<MonthlySeries> out;
  out.reserve(ncol - 1);
  for (std::size_t j = 1; j < ncol; ++j) {
    MonthlySeries s;
    s.name = header[j];
    s.start = dates.front();
    s.values = Eigen::Map<const Eigen::VectorXd>(columns[j - 1].data(),
                                                 static_cast<int>(columns[j - 1].size()));
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

MonthlySeries transform(const MonthlySeries& series, const TransformSpec& spec) {
  series.validate();
  if (spec.kind == TransformKind::Spread)
    throw Error("spread needs two series; use spread()");

  const int head = series.missing_head();
  const int n_obs = series.observed();
  const int lag = spec.lag();
  if (n_obs <= lag)
    throw InsufficientHistory("series '" + series.name + "': " + std::to_string(n_obs) +
                              " observations, transform needs more than " +
                              std::to_string(lag));

  MonthlySeries out;
  out.name = series.name;
  out.start = series.first_observed_date().plus_months(lag);
  out.values.resize(n_obs - lag);
  const auto x = series.values.segment(head, n_obs);

  switch (spec.kind) {
    case TransformKind::Level:
      out.values = x;
      break;
    case TransformKind::FirstDiff:
      out.values = x.tail(n_obs - 1) - x.head(n_obs - 1);
      break;
    case TransformKind::YoYPct:
    case TransformKind::MonthlyReturnPct: {
      for (int t = lag; t < n_obs; ++t) {
        double base = x[t - lag];
        if (base == 0.0)
          throw DivisionByZero("series '" + series.name + "' at " +
                               series.first_observed_date().plus_months(t).to_string() +
                               ": lagged value is 0");
        out.values[t - lag] = 100.0 * (x[t] - base) / base;
      }
      break;
    }
    case TransformKind::Spread:
      break;  // unreachable
  }
  return out;
}

MonthlySeries spread(const MonthlySeries& minuend, const MonthlySeries& subtrahend,
                     const std::string& name) {
  minuend.validate();
  subtrahend.validate();
  MonthDate first = std::max(minuend.first_observed_date(), subtrahend.first_observed_date());
  MonthDate last = std::min(minuend.last_date(), subtrahend.last_date());
  if (first > last)
    throw InsufficientHistory("spread " + minuend.name + "-" + subtrahend.name +
                              ": series do not overlap");
  int n = months_between(last, first) + 1;
  MonthlySeries out;
  out.name = name.empty() ? minuend.name + "_minus_" + subtrahend.name : name;
  out.start = first;
  out.values = minuend.values.segment(months_between(first, minuend.start), n) -
               subtrahend.values.segment(months_between(first, subtrahend.start), n);
  return out;
}

Panel align(const std::vector<MonthlySeries>& series, const MonthlySeries& label,
            const MonthRange& window) {
  if (window.first > window.last) throw Error("empty window");
  const int n = window.length();

  auto coverage_check = [&](const MonthlySeries& s) {
    if (s.first_observed_date() > window.first || s.last_date() < window.last) {
      MonthDate gap = s.first_observed_date() > window.first ? window.first
                                                             : s.last_date().successor();
      throw CoverageGap("series '" + s.name + "' does not cover " + gap.to_string());
    }
  };

  coverage_check(label);
  Panel panel;
  panel.label_name = label.name;
  panel.dates.reserve(n);
  for (int i = 0; i < n; ++i) panel.dates.push_back(window.first.plus_months(i));

  panel.label.resize(n);
  {
    int off = months_between(window.first, label.start);
    for (int i = 0; i < n; ++i) {
      double v = label.values[off + i];
      if (v != 0.0 && v != 1.0)
        throw NonBinaryLabel("label '" + label.name + "' at " +
                             panel.dates[i].to_string() + " is " + format_double(v));
      panel.label[i] = static_cast<int>(v);
    }
  }

  panel.features.resize(n, static_cast<int>(series.size()));
  panel.feature_names.reserve(series.size());
  for (std::size_t j = 0; j < series.size(); ++j) {
    coverage_check(series[j]);
    int off = months_between(window.first, series[j].start);
    panel.features.col(static_cast<int>(j)) = series[j].values.segment(off, n);
    panel.feature_names.push_back(series[j].name);
  }
  return panel;
}

std::pair<Panel, Panel> split(const Panel& panel, const SplitSpec& spec) {
  const int n = panel.rows();
  if (n < 8) throw TooFewRows("split needs at least 8 rows, got " + std::to_string(n));

  int n_train = static_cast<int>(std::ceil(spec.train_fraction * n));
  n_train = std::clamp(n_train, 1, n - 1);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (spec.mode == SplitSpec::Mode::Random) {
    auto eng = rng::make_engine(spec.seed);
    rng::shuffle(order, eng);
  }
  std::vector<int> train(order.begin(), order.begin() + n_train);
  std::vector<int> test(order.begin() + n_train, order.end());
  return {panel.select_rows(train), panel.select_rows(test)};
}

void save_csv(const Panel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write '" + path + "'");
  out << "date";
  for (const auto& name : panel.feature_names) out << ',' << name;
  out << ',' << panel.label_name << '\n';
  for (int i = 0; i < panel.rows(); ++i) {
    out << panel.dates[i].to_string();
    for (int j = 0; j < panel.cols(); ++j) out << ',' << format_double(panel.features(i, j));
    out << ',' << panel.label[i] << '\n';
  }
  if (!out) throw IoFailure("write failed for '" + path + "'");
}

Panel panel_from_csv(const std::string& path, const std::string& label_column,
                     const std::string& date_column) {
  std::vector<MonthlySeries> series = load_csv(path, date_column);
  std::vector<MonthlySeries> feats;
  const MonthlySeries* label = nullptr;
  for (const auto& s : series) {
    if (s.name == label_column)
      label = &s;
    else
      feats.push_back(s);
  }
  if (!label) throw Error("label column '" + label_column + "' not found in '" + path + "'");
  MonthRange window{label->start, label->last_date()};
  return align(feats, *label, window);
}

}  // namespace macrosig
