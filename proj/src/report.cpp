#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mpmab/harness.hpp"

namespace mpmab {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Escapes the handful of characters that matter inside SVG text nodes.
std::string xml(const std::string& s) {
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

double nice_step(double span, int ticks) {
  const double raw = span / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string format_csv(const std::vector<RunResult>& runs, int stride) {
  std::string out = "run,t,cum_regret,cum_attack_cost\n";
  for (const auto& r : runs) {
    const auto n = r.trace.rounds();
    for (std::size_t t = static_cast<std::size_t>(stride); t <= n; t += static_cast<std::size_t>(stride)) {
      out += std::to_string(r.run);
      out += ',';
      out += std::to_string(t);
      out += ',';
      out += num(r.trace.cum_regret[t - 1]);
      out += ',';
      out += std::to_string(r.trace.cum_attack_cost[t - 1]);
      out += '\n';
    }
  }
  return out;
}

void emit_csv(const std::vector<RunResult>& runs, int stride, const std::filesystem::path& path) {
  write_file(path, format_csv(runs, stride));
}

std::string format_svg(const std::vector<SvgSeries>& series, const std::string& title, int stride) {
  constexpr double W = 800, H = 480, left = 80, right = 160, top = 40, bottom = 60;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::size_t rounds = 0;
  double ymax = 0.0;
  for (const auto& s : series) {
    rounds = std::max(rounds, s.trace->mean.size());
    for (std::size_t i = 0; i < s.trace->mean.size(); ++i)
      ymax = std::max(ymax, s.trace->mean[i] + s.trace->stddev[i]);
  }
  if (ymax <= 0.0) ymax = 1.0;
  const double xmax = std::max<double>(static_cast<double>(rounds), 1.0);
  const double ystep = nice_step(ymax, 5);
  ymax = std::ceil(ymax / ystep) * ystep;
  const double xstep = nice_step(xmax, 5);

  auto X = [&](double t) { return left + pw * t / xmax; };
  auto Y = [&](double v) { return top + ph * (1.0 - v / ymax); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << px(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml(title)
    << "</text>\n";

  for (double v = 0; v <= ymax + 1e-9; v += ystep) {
    o << "<line x1=\"" << px(left) << "\" x2=\"" << px(left + pw) << "\" y1=\"" << px(Y(v)) << "\" y2=\"" << px(Y(v))
      << "\" stroke=\"#e5e5e5\"/>\n";
    o << "<text x=\"" << px(left - 6) << "\" y=\"" << px(Y(v) + 4) << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
  }
  for (double t = 0; t <= xmax + 1e-9; t += xstep)
    o << "<text x=\"" << px(X(t)) << "\" y=\"" << px(top + ph + 18) << "\" text-anchor=\"middle\">" << num(t)
      << "</text>\n";
  o << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(pw) << "\" height=\"" << px(ph)
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  o << "<text x=\"" << px(left + pw / 2) << "\" y=\"" << px(H - 14) << "\" text-anchor=\"middle\">round t</text>\n";
  o << "<text x=\"18\" y=\"" << px(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << px(top + ph / 2) << ")\">cumulative regret</text>\n";

  const auto step = static_cast<std::size_t>(std::max(stride, 1));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& tr = *series[k].trace;
    const char* color = colors[k % std::size(colors)];
    std::vector<std::size_t> idx;
    for (std::size_t t = step; t <= tr.mean.size(); t += step) idx.push_back(t);
    if (idx.empty() && !tr.mean.empty()) idx.push_back(tr.mean.size());

    if (!idx.empty()) {
      o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (std::size_t t : idx) o << px(X(static_cast<double>(t))) << ',' << px(Y(tr.mean[t - 1] + tr.stddev[t - 1])) << ' ';
      for (auto it = idx.rbegin(); it != idx.rend(); ++it)
        o << px(X(static_cast<double>(*it))) << ',' << px(Y(std::max(0.0, tr.mean[*it - 1] - tr.stddev[*it - 1]))) << ' ';
      o << "\"/>\n";
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
      for (std::size_t t : idx) o << px(X(static_cast<double>(t))) << ',' << px(Y(tr.mean[t - 1])) << ' ';
      o << "\"/>\n";
    }
    const double ly = top + 16 + 20.0 * static_cast<double>(k);
    o << "<line x1=\"" << px(left + pw + 12) << "\" x2=\"" << px(left + pw + 36) << "\" y1=\"" << px(ly) << "\" y2=\""
      << px(ly) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    o << "<text x=\"" << px(left + pw + 42) << "\" y=\"" << px(ly + 4) << "\">" << xml(series[k].label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void emit_svg(const std::vector<SvgSeries>& series, const std::string& title, int stride,
              const std::filesystem::path& path) {
  write_file(path, format_svg(series, title, stride));
}

}  // namespace mpmab
