#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "macrosig/errors.hpp"

namespace macrosig {

// Calendar month, totally ordered, with exact successor arithmetic.
struct MonthDate {
  int year = 1900;
  int month = 1;  // 1..12

  auto operator<=>(const MonthDate&) const = default;

  int index() const { return year * 12 + (month - 1); }
  static MonthDate from_index(int idx) {
    int y = idx / 12, m = idx % 12;
    if (m < 0) {
      m += 12;
      --y;
    }
    return MonthDate{y, m + 1};
  }
  MonthDate plus_months(int n) const { return from_index(index() + n); }
  MonthDate successor() const { return plus_months(1); }

  std::string to_string() const;       // "YYYY-MM"
  static MonthDate parse(const std::string& text);  // throws MalformedDate
};

// Difference in months (a - b).
inline int months_between(const MonthDate& a, const MonthDate& b) {
  return a.index() - b.index();
}

// Named monthly sequence. Missing observations are NaN and may appear only
// as a contiguous prefix (the "missing head"); everything after the first
// observed value is present.
struct MonthlySeries {
  std::string name;
  MonthDate start;        // date of values[0], missing or not
  Eigen::VectorXd values;

  int length() const { return static_cast<int>(values.size()); }
  int missing_head() const;
  int observed() const { return length() - missing_head(); }
  MonthDate first_observed_date() const { return start.plus_months(missing_head()); }
  MonthDate last_date() const { return start.plus_months(length() - 1); }

  // Throws InteriorMissingValue if a NaN appears after the first observation.
  void validate() const;
};

enum class TransformKind { Level, YoYPct, MonthlyReturnPct, FirstDiff, Spread };

struct TransformSpec {
  TransformKind kind = TransformKind::Level;
  // For Spread: column names the pipeline resolves before calling transform.
  std::string minuend;
  std::string subtrahend;

  int lag() const {
    switch (kind) {
      case TransformKind::YoYPct: return 12;
      case TransformKind::MonthlyReturnPct:
      case TransformKind::FirstDiff: return 1;
      default: return 0;
    }
  }
};

// Aligned feature matrix with a binary label; rows are consecutive months.
// Contains no missing entries by construction.
struct Panel {
  std::vector<MonthDate> dates;
  Eigen::MatrixXd features;  // rows match dates
  std::vector<std::string> feature_names;
  Eigen::VectorXi label;     // 1 = recession
  std::string label_name = "Recession";

  int rows() const { return static_cast<int>(dates.size()); }
  int cols() const { return static_cast<int>(feature_names.size()); }
  int column_index(const std::string& name) const;  // -1 when absent

  Panel select_rows(const std::vector<int>& rows) const;
  Panel select_columns(const std::vector<std::string>& names) const;
};

struct SplitSpec {
  double train_fraction = 0.75;
  enum class Mode { Chronological, Random } mode = Mode::Chronological;
  std::uint64_t seed = 0;
};

struct MonthRange {
  MonthDate first;
  MonthDate last;  // inclusive
  int length() const { return months_between(last, first) + 1; }
};

// CSV ingestion: header row, `date_column` formatted YYYY-MM, rows strictly
// consecutive months. Empty cells mark missing values and are legal only as
// a contiguous column prefix. One series per non-date column, header order.
std::vector<MonthlySeries> load_csv(const std::string& path,
                                    const std::string& date_column = "date");

MonthlySeries transform(const MonthlySeries& series, const TransformSpec& spec);
MonthlySeries spread(const MonthlySeries& minuend, const MonthlySeries& subtrahend,
                     const std::string& name = "");

Panel align(const std::vector<MonthlySeries>& series, const MonthlySeries& label,
            const MonthRange& window);

std::pair<Panel, Panel> split(const Panel& panel, const SplitSpec& spec);

// Round-trip exact CSV export (shortest decimal text that reparses to the
// same double). Label written as the last column.
void save_csv(const Panel& panel, const std::string& path);
Panel panel_from_csv(const std::string& path, const std::string& label_column,
                     const std::string& date_column = "date");

std::string format_double(double v);

}  // namespace macrosig
