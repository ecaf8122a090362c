// Generates fixtures/synthetic_macro.csv: 438 monthly rows (1986-01 ..
// 2022-06), 20 feature columns and a binary Recession label with 40 positive
// periods in four contiguous blocks. Three return-like columns start with
// missing heads of 4, 18 and 13 months to exercise backcasting. Everything
// is drawn from a fixed seed, so the emitted file is reproducible.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "macrosig/dataset.hpp"
#include "macrosig/rng.hpp"

using macrosig::MonthDate;
namespace rng = macrosig::rng;

namespace {

constexpr int kRows = 438;

struct Column {
  std::string name;
  int missing_head = 0;
  double recession_shift = 0;  // mean shift during recession months
  double base = 0;
  double ar = 0.5;     // AR(1) persistence of the noise
  double noise = 1.0;  // innovation scale
};

std::vector<int> recession_label() {
  std::vector<int> label(kRows, 0);
  auto mark = [&](MonthDate first, MonthDate last) {
    for (int i = macrosig::months_between(first, MonthDate{1986, 1});
         i <= macrosig::months_between(last, MonthDate{1986, 1}); ++i)
      label[i] = 1;
  };
  mark({1990, 7}, {1991, 3});   // 9 months
  mark({2001, 4}, {2001, 11});  // 8 months
  mark({2008, 1}, {2009, 6});   // 18 months
  mark({2020, 3}, {2020, 7});   // 5 months
  return label;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out_path = argc > 1 ? argv[1] : "fixtures/synthetic_macro.csv";

  const std::vector<Column> columns = {
      {"spx_return", 0, -2.2, 0.6, 0.1, 3.5},
      {"ukx_return", 0, -1.8, 0.4, 0.1, 3.2},
      {"industrial_production_yoy", 0, -6.0, 2.0, 0.85, 0.8},
      {"nonfarm_payroll_yoy", 0, -3.5, 1.6, 0.9, 0.35},
      {"consumer_sentiment_yoy", 0, -14.0, 2.0, 0.7, 4.0},
      {"housing_starts_yoy", 0, -16.0, 3.0, 0.75, 6.0},
      {"new_home_supply_yoy", 0, 11.0, 0.0, 0.7, 5.0},
      {"muni_10y_ytw", 0, 0.9, 4.5, 0.95, 0.18},
      {"net_trade_yoy", 0, 7.0, -2.0, 0.8, 3.0},
      {"mexico_cpi_yoy", 0, 2.5, 9.0, 0.9, 1.4},
      {"alcohol_price_yoy", 0, 0.4, 2.6, 0.8, 0.5},
      {"unemployment_rate", 0, 2.4, 5.8, 0.96, 0.14},
      {"cpi_yoy", 0, -0.8, 2.8, 0.9, 0.4},
      {"oil_return", 0, -3.0, 0.5, 0.1, 8.0},
      {"copper_return", 4, -2.0, 0.65, 0.15, 7.0},
      {"aluminum_return", 18, -1.5, 0.27, 0.15, 5.8},
      {"nickel_return", 13, -2.5, 1.12, 0.15, 11.5},
      {"msft_return", 3, -1.0, 2.27, 0.05, 9.6},
      {"tsy10", 0, 0.0, 5.0, 0.97, 0.22},
  };

  std::vector<int> label = recession_label();

  // One generator per column so adding columns never reshuffles others.
  std::vector<std::vector<double>> values(columns.size(), std::vector<double>(kRows));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const Column& col = columns[c];
    auto eng = rng::make_engine(rng::derive_seed(20260401, c));
    double state = 0.0;
    for (int i = 0; i < kRows; ++i) {
      state = col.ar * state + rng::next_normal(eng) * col.noise;
      values[c][i] = col.base + state + (label[i] ? col.recession_shift : 0.0);
    }
  }

  // A second long rate strongly correlated with tsy10, so correlation pruning
  // has genuine work in the end-to-end run.
  std::vector<double> tsy30(kRows);
  {
    auto eng = rng::make_engine(rng::derive_seed(20260401, 100));
    const auto& t10 = values.back();
    for (int i = 0; i < kRows; ++i)
      tsy30[i] = t10[i] + 0.5 + 0.05 * rng::next_normal(eng);
  }

  // Nonfarm payroll tracks industrial production closely (r ~ 0.9), giving
  // the pruning stage a confirmed pair above the 0.8 threshold.
  {
    auto eng = rng::make_engine(rng::derive_seed(20260401, 101));
    const auto& ip = values[2];
    double state = 0.0;
    for (int i = 0; i < kRows; ++i) {
      state = 0.6 * state + 0.5 * rng::next_normal(eng);
      values[3][i] = 1.5 + 0.55 * ip[i] + state;
    }
  }

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << "date";
  for (const auto& c : columns) out << ',' << c.name;
  out << ",tsy30,Recession\n";
  for (int i = 0; i < kRows; ++i) {
    out << MonthDate{1986, 1}.plus_months(i).to_string();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << ',';
      if (i >= columns[c].missing_head) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", values[c][i]);
        out << buf;
      }
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", tsy30[i]);
    out << ',' << buf << ',' << label[i] << '\n';
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}
