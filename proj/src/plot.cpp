#include "sbandit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace sbandit {

PlotSeries regret_series(const AggregateResult& result, const std::string& label) {
  PlotSeries s;
  s.label = label.empty() ? result.policy : label;
  s.rounds = result.checkpoints;
  s.mean = result.regret_mean;
  s.std_dev = result.regret_std;
  return s;
}

namespace {

constexpr double kWidth = 860, kHeight = 540;
constexpr double kLeft = 90, kRight = 30, kTop = 50, kBottom = 70;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Axis {
  double lo = 0.0, hi = 1.0;
  double scale(double v, double px_lo, double px_hi) const {
    if (hi <= lo) return px_lo;
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int want = 6) {
  if (hi <= lo) return {lo};
  double raw = (hi - lo) / want;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9; v += step)
    ticks.push_back(v);
  return ticks;
}

std::string fmt_tick(double v) {
  char buf[32];
  if (std::abs(v) >= 10000 || (v != 0 && std::abs(v) < 0.01))
    std::snprintf(buf, sizeof(buf), "%.1e", v);
  else
    std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void write_regret_svg(const std::vector<PlotSeries>& series, const std::string& title,
                      const std::string& path) {
  Axis x, y;
  x.lo = 1e300;
  x.hi = -1e300;
  y.lo = 0.0;
  y.hi = 0.0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.rounds.size(); ++i) {
      x.lo = std::min(x.lo, static_cast<double>(s.rounds[i]));
      x.hi = std::max(x.hi, static_cast<double>(s.rounds[i]));
      y.hi = std::max(y.hi, s.mean[i] + s.std_dev[i]);
    }
  }
  if (x.lo > x.hi) {
    x.lo = 0;
    x.hi = 1;
  }
  if (y.hi <= 0) y.hi = 1;

  auto px = [&](double v) { return x.scale(v, kLeft, kWidth - kRight); };
  auto py = [&](double v) { return y.scale(v, kHeight - kBottom, kTop); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
         "font-family=\"sans-serif\">" << title << "</text>\n";

  for (double tx : nice_ticks(x.lo, x.hi)) {
    double X = px(tx);
    out << "<line x1=\"" << X << "\" y1=\"" << kTop << "\" x2=\"" << X << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << X << "\" y=\"" << kHeight - kBottom + 22
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << fmt_tick(tx) << "</text>\n";
  }
  for (double ty : nice_ticks(y.lo, y.hi)) {
    double Y = py(ty);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << Y << "\" x2=\"" << kWidth - kRight
        << "\" y2=\"" << Y << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << Y + 4
        << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" << fmt_tick(ty)
        << "</text>\n";
  }
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 18
      << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">round</text>\n";
  out << "<text x=\"22\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 22 " << kHeight / 2 << ")\">cumulative regret</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % 6];
    if (s.rounds.empty()) continue;
    out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < s.rounds.size(); ++i)
      out << px(static_cast<double>(s.rounds[i])) << ',' << py(s.mean[i] + s.std_dev[i]) << ' ';
    for (std::size_t i = s.rounds.size(); i-- > 0;)
      out << px(static_cast<double>(s.rounds[i])) << ','
          << py(std::max(0.0, s.mean[i] - s.std_dev[i])) << ' ';
    out << "\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.rounds.size(); ++i)
      out << px(static_cast<double>(s.rounds[i])) << ',' << py(s.mean[i]) << ' ';
    out << "\"/>\n";
    double ly = kTop + 18 + 20 * static_cast<double>(k);
    out << "<line x1=\"" << kLeft + 12 << "\" y1=\"" << ly << "\" x2=\"" << kLeft + 44
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    out << "<text x=\"" << kLeft + 52 << "\" y=\"" << ly + 4
        << "\" font-size=\"13\" font-family=\"sans-serif\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
}

void write_tidy_csv(const std::vector<PlotSeries>& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "policy,round,mean_regret,std_regret\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.rounds.size(); ++i)
      out << s.label << ',' << s.rounds[i] << ',' << format_double(s.mean[i]) << ','
          << format_double(s.std_dev[i]) << "\n";
}

}  // namespace sbandit
