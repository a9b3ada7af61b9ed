#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace geoprov {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// RFC 4180 subset: comma separator, double-quote quoting, LF or CRLF rows.
// When `expected_header` is non-empty the first row must match it exactly and
// every row must have the same number of fields; DataFormatError otherwise.
CsvTable parse_csv(std::string_view text, const std::vector<std::string>& expected_header = {});
CsvTable read_csv_file(const std::string& path, const std::vector<std::string>& expected_header = {});

std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);

std::string read_file(const std::string& path);
// Writes via a temporary sibling file and rename, so readers never observe a
// partially written file.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace geoprov
