#pragma once

#include <string>
#include <vector>

namespace sse::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

/// Minimal line plot. Non-finite points (and non-positive ones on a log
/// axis) break the polyline. `note` goes into an XML comment.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series,
                       const std::string& note);

}  // namespace sse::cli
