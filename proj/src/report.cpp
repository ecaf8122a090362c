#include "macrosig/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace macrosig::report {

std::string pct2(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

Json metrics_to_json(const eval::Metrics& m) {
  return Json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1}};
}

Json confusion_to_json(const eval::ConfusionMatrix& cm) {
  return Json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

std::string render_markdown(const Json& report) {
  std::ostringstream md;
  md << "# macrosig run report\n\n";
  md << "seed: " << report.at("seed").dump() << "\n\n";

  md << "## Out-of-sample performance\n\n";
  md << "| Metric |";
  for (const auto& m : report.at("models")) md << ' ' << m.at("display").get<std::string>() << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < report.at("models").size(); ++i) md << "---|";
  md << "\n| Accuracy |";
  for (const auto& m : report.at("models"))
    md << ' ' << pct2(m.at("metrics").at("accuracy").get<double>()) << "% |";
  md << "\n| F1 Score |";
  for (const auto& m : report.at("models"))
    md << ' ' << pct2(m.at("metrics").at("f1").get<double>()) << "% |";
  md << "\n\n";

  md << "## Confusion matrices (test set)\n\n";
  for (const auto& m : report.at("models")) {
    const auto& cm = m.at("confusion");
    md << "- " << m.at("display").get<std::string>() << ": tp=" << cm.at("tp")
       << " fp=" << cm.at("fp") << " fn=" << cm.at("fn") << " tn=" << cm.at("tn") << "\n";
  }
  md << "\n## Selected features\n\n";
  for (const auto& f : report.at("selection").at("selected"))
    md << "- " << f.get<std::string>() << "\n";
  return md.str();
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_importance(const std::string& title,
                           const std::vector<std::pair<std::string, double>>& items) {
  const int bar_h = 18, gap = 6, label_w = 260, chart_w = 420, margin = 10;
  const int height = margin * 2 + 30 + static_cast<int>(items.size()) * (bar_h + gap);
  double max_w = 0;
  for (const auto& [name, w] : items) max_w = std::max(max_w, w);
  if (max_w <= 0) max_w = 1.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << label_w + chart_w + 2 * margin << "\" height=\"" << height << "\">\n"
      << "<text x=\"" << margin << "\" y=\"" << margin + 14
      << "\" font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\">"
      << xml_escape(title) << "</text>\n";
  int y = margin + 30;
  for (const auto& [name, w] : items) {
    double frac = w / max_w;
    svg << "<text x=\"" << label_w - 6 << "\" y=\"" << y + bar_h - 5
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << xml_escape(name) << "</text>\n"
        << "<rect x=\"" << label_w << "\" y=\"" << y << "\" width=\""
        << fmt(frac * chart_w) << "\" height=\"" << bar_h
        << "\" fill=\"#4878a8\"/>\n"
        << "<text x=\"" << label_w + 4 << "\" y=\"" << y + bar_h - 5
        << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#222\">"
        << fmt(w) << "</text>\n";
    y += bar_h + gap;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string svg_correlation(const std::vector<std::string>& names,
                            const Eigen::MatrixXd& values) {
  const int cell = 26, label = 180, margin = 10;
  const int p = static_cast<int>(names.size());
  const int size = label + p * cell + margin;

  auto color = [](double r) {
    // -1 -> blue, 0 -> white, +1 -> red
    int red = static_cast<int>(std::lround(255 * (r >= 0 ? 1.0 : 1.0 + r)));
    int blue = static_cast<int>(std::lround(255 * (r <= 0 ? 1.0 : 1.0 - r)));
    int green = static_cast<int>(std::lround(255 * (1.0 - std::fabs(r))));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", red, green, blue);
    return std::string(buf);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\">\n";
  for (int i = 0; i < p; ++i) {
    svg << "<text x=\"" << label - 6 << "\" y=\"" << label + i * cell + cell - 8
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
        << xml_escape(names[i]) << "</text>\n";
    svg << "<text x=\"" << label + i * cell + cell / 2 << "\" y=\"" << label - 6
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"start\""
        << " transform=\"rotate(-60 " << label + i * cell + cell / 2 << ' '
        << label - 6 << ")\">" << xml_escape(names[i]) << "</text>\n";
    for (int j = 0; j < p; ++j) {
      double r = values(i, j);
      svg << "<rect x=\"" << label + j * cell << "\" y=\"" << label + i * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << color(r) << "\" stroke=\"#ccc\"/>\n"
          << "<text x=\"" << label + j * cell + cell / 2 << "\" y=\""
          << label + i * cell + cell - 8
          << "\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"middle\">"
          << fmt(r) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace macrosig::report
