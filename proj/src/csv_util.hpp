#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace loewner::detail {

// Decimal, `.` separator, `digits` significant digits. Independent of locale.
std::string format_number(double v, int digits = 12);

std::vector<std::string_view> split_csv_line(std::string_view line);
double parse_double(std::string_view field);

std::ofstream open_for_write(const std::string& path);

}  // namespace loewner::detail
