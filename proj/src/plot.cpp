#include "cqc/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "cqc/errors.hpp"

namespace cqc {

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "phase") return PlotKind::kPhase;
  if (name == "accuracy-bars") return PlotKind::kAccuracyBars;
  if (name == "training-curve") return PlotKind::kTrainingCurve;
  throw Error("unknown plot kind '" + std::string(name) + "'");
}

std::string_view plot_schema(PlotKind kind) {
  return kind == PlotKind::kPhase ? "ratio,n1,n2,positives,samples,frequency"
                                  : "dataset,step,accuracy,loss,n";
}

namespace {

std::vector<std::string> split_commas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double number(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row) + ": '" + s + "' is not a number");
  }
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

class Frame {
 public:
  Frame(double xmin, double xmax, double ymin, double ymax)
      : xmin_(xmin), xmax_(xmax == xmin ? xmin + 1 : xmax), ymin_(ymin),
        ymax_(ymax == ymin ? ymin + 1 : ymax) {}

  double x(double v) const {
    return kLeft + (v - xmin_) / (xmax_ - xmin_) * (kWidth - kLeft - kRight);
  }
  double y(double v) const {
    return kHeight - kBottom - (v - ymin_) / (ymax_ - ymin_) * (kHeight - kTop - kBottom);
  }

  void axes(std::ostream& os, std::string_view xlabel, std::string_view ylabel,
            bool x_ticks = true) const {
    os << "<line class=\"axis\" x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y(ymin_))
       << "\" x2=\"" << fmt(kWidth - kRight) << "\" y2=\"" << fmt(y(ymin_))
       << "\" stroke=\"black\"/>\n";
    os << "<line class=\"axis\" x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop)
       << "\" x2=\"" << fmt(kLeft) << "\" y2=\"" << fmt(y(ymin_))
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double yv = ymin_ + (ymax_ - ymin_) * i / 4.0;
      os << "<text class=\"tick\" x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y(yv) + 4)
         << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(yv) << "</text>\n";
      if (!x_ticks) continue;
      const double xv = xmin_ + (xmax_ - xmin_) * i / 4.0;
      os << "<text class=\"tick\" x=\"" << fmt(x(xv)) << "\" y=\"" << fmt(y(ymin_) + 18)
         << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xv) << "</text>\n";
    }
    os << "<text x=\"" << fmt((kLeft + kWidth - kRight) / 2) << "\" y=\""
       << fmt(kHeight - 15) << "\" text-anchor=\"middle\" font-size=\"13\">"
       << escape(xlabel) << "</text>\n";
    os << "<text x=\"18\" y=\"" << fmt((kTop + kHeight - kBottom) / 2)
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << fmt((kTop + kHeight - kBottom) / 2) << ")\">" << escape(ylabel) << "</text>\n";
  }

 private:
  double xmin_, xmax_, ymin_, ymax_;
};

void open_svg(std::ostream& os, std::string_view title) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
     << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" "
     << "font-size=\"15\">" << escape(title) << "</text>\n";
}

std::string phase_svg(const CsvTable& t) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    xs.push_back(number(t.rows[i][0], i + 1));
    ys.push_back(number(t.rows[i][5], i + 1));
  }
  const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  Frame f(*xmin, *xmax, 0.0, 1.0);
  std::ostringstream os;
  open_svg(os, "Containment probability vs constraintness ratio");
  f.axes(os, "alpha2 / alpha1", "Pr[p contained in q]");
  os << "<line class=\"half\" x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(f.y(0.5))
     << "\" x2=\"" << fmt(kWidth - kRight) << "\" y2=\"" << fmt(f.y(0.5))
     << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  os << "<polyline class=\"curve\" fill=\"none\" stroke=\"" << kPalette[0] << "\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << (i ? " " : "") << fmt(f.x(xs[i])) << ',' << fmt(f.y(ys[i]));
  os << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << "<circle class=\"marker\" cx=\"" << fmt(f.x(xs[i])) << "\" cy=\""
       << fmt(f.y(ys[i])) << "\" r=\"3.5\" fill=\"" << kPalette[0] << "\" data-x=\""
       << escape(t.rows[i][0]) << "\" data-y=\"" << escape(t.rows[i][5])
       << "\" data-n1=\"" << escape(t.rows[i][1]) << "\" data-n2=\""
       << escape(t.rows[i][2]) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

struct MetricRow {
  std::string dataset;
  double step, accuracy;
  std::size_t row;
};

std::vector<MetricRow> metric_rows(const CsvTable& t) {
  std::vector<MetricRow> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    out.push_back({t.rows[i][0], number(t.rows[i][1], i + 1),
                   number(t.rows[i][2], i + 1), i});
  return out;
}

std::string bars_svg(const CsvTable& t) {
  // Final (largest step) row per dataset, in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, MetricRow> last;
  for (const MetricRow& r : metric_rows(t)) {
    auto it = last.find(r.dataset);
    if (it == last.end()) {
      order.push_back(r.dataset);
      last.emplace(r.dataset, r);
    } else if (r.step >= it->second.step) {
      it->second = r;
    }
  }
  Frame f(0, static_cast<double>(order.size()), 0.0, 1.0);
  std::ostringstream os;
  open_svg(os, "Final accuracy per test set");
  f.axes(os, "test set", "accuracy", false);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const MetricRow& r = last.at(order[i]);
    const double x0 = kLeft + slot * static_cast<double>(i) + slot * 0.2;
    const double top = f.y(std::clamp(r.accuracy, 0.0, 1.0));
    os << "<rect class=\"bar\" x=\"" << fmt(x0) << "\" y=\"" << fmt(top) << "\" width=\""
       << fmt(slot * 0.6) << "\" height=\"" << fmt(f.y(0.0) - top) << "\" fill=\""
       << kPalette[i % 8] << "\" data-dataset=\"" << escape(r.dataset)
       << "\" data-value=\"" << escape(t.rows[r.row][2]) << "\" data-step=\""
       << escape(t.rows[r.row][1]) << "\"/>\n";
    os << "<text class=\"value\" x=\"" << fmt(x0 + slot * 0.3) << "\" y=\"" << fmt(top - 5)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(t.rows[r.row][2])
       << "</text>\n";
    os << "<text class=\"name\" x=\"" << fmt(x0 + slot * 0.3) << "\" y=\""
       << fmt(f.y(0.0) + 18) << "\" text-anchor=\"middle\" font-size=\"12\">"
       << escape(r.dataset) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string curve_svg(const CsvTable& t) {
  const auto rows = metric_rows(t);
  std::vector<std::string> order;
  std::map<std::string, std::vector<MetricRow>> series;
  double smin = rows.front().step, smax = rows.front().step;
  for (const MetricRow& r : rows) {
    if (!series.count(r.dataset)) order.push_back(r.dataset);
    series[r.dataset].push_back(r);
    smin = std::min(smin, r.step);
    smax = std::max(smax, r.step);
  }
  Frame f(smin, smax, 0.0, 1.0);
  std::ostringstream os;
  open_svg(os, "Accuracy during training");
  f.axes(os, "step", "accuracy");
  for (std::size_t s = 0; s < order.size(); ++s) {
    auto& pts = series[order[s]];
    std::stable_sort(pts.begin(), pts.end(),
                     [](const MetricRow& a, const MetricRow& b) { return a.step < b.step; });
    const char* color = kPalette[s % 8];
    os << "<polyline class=\"series\" data-dataset=\"" << escape(order[s])
       << "\" fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      os << (i ? " " : "") << fmt(f.x(pts[i].step)) << ','
         << fmt(f.y(std::clamp(pts[i].accuracy, 0.0, 1.0)));
    os << "\"/>\n";
    for (const MetricRow& p : pts)
      os << "<circle class=\"marker\" cx=\"" << fmt(f.x(p.step)) << "\" cy=\""
         << fmt(f.y(std::clamp(p.accuracy, 0.0, 1.0))) << "\" r=\"2.5\" fill=\"" << color
         << "\" data-dataset=\"" << escape(p.dataset) << "\" data-x=\""
         << escape(t.rows[p.row][1]) << "\" data-y=\"" << escape(t.rows[p.row][2])
         << "\"/>\n";
    os << "<text class=\"legend\" x=\"" << fmt(kWidth - kRight - 150) << "\" y=\""
       << fmt(kTop + 16 * static_cast<double>(s) + 10) << "\" font-size=\"12\" fill=\""
       << color << "\">" << escape(order[s]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_commas(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(t.header.size()) + " columns");
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw DataError("empty CSV");
  return t;
}

std::string render_svg(PlotKind kind, const CsvTable& table) {
  std::string header;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    header += (i ? "," : "") + table.header[i];
  if (header != plot_schema(kind))
    throw DataError("CSV header '" + header + "' does not match schema '" +
                    std::string(plot_schema(kind)) + "'");
  if (table.rows.empty()) throw DataError("CSV has no data rows");
  switch (kind) {
    case PlotKind::kPhase: return phase_svg(table);
    case PlotKind::kAccuracyBars: return bars_svg(table);
    case PlotKind::kTrainingCurve: return curve_svg(table);
  }
  throw Error("unknown plot kind");
}

}  // namespace cqc
