#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Field splitting and exact number formatting shared by the file formats.
namespace raterid::text {

enum class Delimiter { kTab, kComma, kSpace };

// Picks the delimiter of a data line: tab if present, else comma, else runs
// of blanks.
Delimiter detect_delimiter(std::string_view line);

// Splits on the delimiter. Surrounding blanks are trimmed from each field;
// for kSpace, consecutive blanks count as one separator.
std::vector<std::string_view> split_fields(std::string_view line,
                                           Delimiter delimiter);

std::string_view trim(std::string_view s);

// True for lines that are empty after trimming or start with '#'.
bool is_blank_or_comment(std::string_view line);

std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

// Shortest representation that parses back to the identical double.
std::string format_exact(double value);

// Fixed-point with the given number of decimals ("NA" for NaN).
std::string format_fixed(double value, int decimals);

}  // namespace raterid::text
