#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wowy::csv {

/// Splits one CSV line on commas. Fields are plain identifiers or numbers;
/// quoting is not part of the file formats, so none is interpreted. A
/// trailing CR (CRLF input) is stripped first. Empty fields are kept.
std::vector<std::string> split(std::string_view line);

std::string join(const std::vector<std::string>& fields);

/// Fixed-precision decimal formatting for file output; NaN prints as "nan".
/// All exported floating-point values go through this so identical inputs
/// produce byte-identical files.
std::string format_double(double v, int precision);

}  // namespace wowy::csv
