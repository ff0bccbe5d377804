#include "kolmo_cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace kolmo::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ",";
      text += format_number(row[i]);
    }
    text += "\n";
  }
  write_text(path, text);
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 50.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string header(const std::string& title) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  return os.str();
}

}  // namespace

void write_line_svg(const std::filesystem::path& path, const std::string& title,
                    const std::vector<Series>& series, bool log_x, bool log_y) {
  auto tx = [log_x](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [log_y](double v) { return log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0) && (!log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x1 > x0)) { x0 -= 1; x1 += 1; }
  if (!(y1 > y0)) { y0 -= 1; y1 += 1; }
  std::ostringstream os;
  os << header(title);
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 20 << "\" font-size=\"11\">"
     << (log_x ? "log10 x: " : "x: ") << format_number(x0) << " .. " << format_number(x1) << "</text>\n";
  os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 20
     << "\" text-anchor=\"end\" font-size=\"11\">" << (log_y ? "log10 y: " : "y: ")
     << format_number(y0) << " .. " << format_number(y1) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    os << "<polyline fill=\"none\" stroke=\"" << kColors[k % 6] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      const double px = kMargin + (tx(s.x[i]) - x0) / (x1 - x0) * (kWidth - 2 * kMargin);
      const double py = kHeight - kMargin - (ty(s.y[i]) - y0) / (y1 - y0) * (kHeight - 2 * kMargin);
      os << format_number(std::round(px * 100) / 100) << "," << format_number(std::round(py * 100) / 100) << " ";
    }
    os << "\"/>\n<text x=\"" << kWidth - kMargin - 5 << "\" y=\"" << kMargin + 15 + 14 * k
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << kColors[k % 6] << "\">" << s.label
       << "</text>\n";
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

void write_heat_svg(const std::filesystem::path& path, const std::string& title, int n,
                    const std::vector<double>& values) {
  const int m = std::min(n, 64);
  const int stride = n / m;
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, v);
  const double cell = (kHeight - 2 * kMargin) / m;
  std::ostringstream os;
  os << header(title);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double v = values[static_cast<std::size_t>(j * stride) * n + i * stride];
      const int shade = vmax > 0 ? static_cast<int>(255.0 * (1.0 - v / vmax)) : 255;
      os << "<rect x=\"" << format_number(kMargin + i * cell) << "\" y=\""
         << format_number(kHeight - kMargin - (j + 1) * cell) << "\" width=\"" << format_number(cell)
         << "\" height=\"" << format_number(cell) << "\" fill=\"rgb(255," << shade << "," << shade
         << ")\"/>\n";
    }
  }
  os << "</svg>\n";
  write_text(path, os.str());
}

}  // namespace kolmo::cli
