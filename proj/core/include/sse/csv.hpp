#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>

namespace sse::csv {

/// Shortest-independent fixed rendering with 17 significant digits.
std::string num(double x);

/// Writes `header` followed by a newline.
void header(std::ostream& out, std::string_view header);

/// Writes the values comma-separated with 17 significant digits.
void row(std::ostream& out, std::initializer_list<double> values);

}  // namespace sse::csv
