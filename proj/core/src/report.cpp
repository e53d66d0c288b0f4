#include "alselect/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace alselect {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_curve_csv(std::span<const ExperimentResult> runs, std::ostream& out) {
  out << "strategy,seed,round,labeled,accuracy\n";
  for (const auto& run : runs) {
    for (const auto& r : run.rounds) {
      out << run.strategy << ',' << run.seed << ',' << r.round << ',' << r.labeled << ','
          << format_double(r.accuracy) << '\n';
    }
  }
}

void write_curve_svg(std::span<const StrategyCurve> curves, std::ostream& out) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 160, kTop = 20, kBottom = 50;
  constexpr std::array<const char*, 8> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  std::size_t max_round = 1;
  double lo = 1.0, hi = 0.0;
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      max_round = std::max(max_round, p.round);
      lo = std::min(lo, p.mean);
      hi = std::max(hi, p.mean);
    }
  }
  if (lo > hi) {
    lo = 0.0;
    hi = 1.0;
  }
  lo = std::max(0.0, std::floor(lo * 20.0) / 20.0);
  hi = std::min(1.0, std::ceil(hi * 20.0) / 20.0);
  if (hi <= lo) hi = std::min(1.0, lo + 0.05), lo = hi - 0.05;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](double round) {
    return kLeft + (max_round == 1 ? 0.5 : (round - 1.0) / static_cast<double>(max_round - 1)) * plot_w;
  };
  auto y_of = [&](double acc) { return kTop + (1.0 - (acc - lo) / (hi - lo)) * plot_h; };
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(2);
    s << std::fixed << v;
    return s.str();
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double acc = lo + (hi - lo) * t / 4.0;
    const double y = y_of(acc);
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kLeft << "\" y2=\""
        << fmt(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
        << fmt(acc) << "</text>\n";
  }
  const std::size_t step = std::max<std::size_t>(1, max_round / 10);
  for (std::size_t r = 1; r <= max_round; r += step) {
    const double x = x_of(static_cast<double>(r));
    out << "<text x=\"" << fmt(x) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << r << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">round</text>\n";
  out << "<text x=\"14\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << kTop + plot_h / 2 << ")\">accuracy</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kColors[i % kColors.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < curves[i].points.size(); ++j) {
      const auto& p = curves[i].points[j];
      out << (j ? " " : "") << fmt(x_of(static_cast<double>(p.round))) << ',' << fmt(y_of(p.mean));
    }
    out << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(i + 1);
    out << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 36 << "\" y=\"" << ly << "\">" << curves[i].strategy
        << "</text>\n";
  }
  out << "</svg>\n";
}

std::string summary_json(const Comparison& comparison, const std::string& config_digest) {
  nlohmann::json j;
  j["config_digest"] = config_digest;
  j["strategies"] = nlohmann::json::array();
  for (const auto& c : comparison.curves) {
    nlohmann::json curve;
    curve["strategy"] = c.strategy;
    curve["final_mean"] = c.final_mean;
    curve["final_stdev"] = c.final_stdev;
    curve["rounds"] = nlohmann::json::array();
    for (const auto& p : c.points) {
      curve["rounds"].push_back(
          {{"round", p.round}, {"labeled", p.labeled}, {"mean", p.mean}, {"stdev", p.stdev}});
    }
    j["strategies"].push_back(std::move(curve));
  }
  j["runs"] = nlohmann::json::array();
  for (const auto& r : comparison.runs) {
    j["runs"].push_back({{"strategy", r.strategy},
                         {"seed", r.seed},
                         {"final_accuracy", r.final_accuracy},
                         {"pool_exhausted", r.pool_exhausted},
                         {"rounds", r.rounds.size()}});
  }
  return j.dump(2) + "\n";
}

}  // namespace alselect
