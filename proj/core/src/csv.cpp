#include "sse/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sse::csv {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) x = 0.0;  // folds -0 to 0
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf, static_cast<std::size_t>(n));
}

void header(std::ostream& out, std::string_view h) { out << h << '\n'; }

void row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << num(v);
    first = false;
  }
  out << '\n';
}

}  // namespace sse::csv
