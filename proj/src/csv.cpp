#include "geoprov/csv.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov {

CsvTable parse_csv(std::string_view text, const std::vector<std::string>& expected_header) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;

  auto end_record = [&]() {
    if (field_started || !record.empty()) {
      record.push_back(std::move(field));
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw DataFormatError("unterminated quoted field at line " + std::to_string(line));
  end_record();

  CsvTable table;
  if (records.empty()) {
    if (!expected_header.empty()) throw DataFormatError("missing CSV header");
    return table;
  }
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1), std::make_move_iterator(records.end()));
  if (!expected_header.empty()) {
    if (table.header != expected_header) {
      throw DataFormatError("unexpected CSV header '" + join(table.header, ",") + "', expected '" +
                            join(expected_header, ",") + "'");
    }
    for (size_t r = 0; r < table.rows.size(); ++r) {
      if (table.rows[r].size() != expected_header.size()) {
        throw DataFormatError("CSV row " + std::to_string(r + 2) + " has " +
                              std::to_string(table.rows[r].size()) + " fields");
      }
    }
  }
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable read_csv_file(const std::string& path, const std::vector<std::string>& expected_header) {
  try {
    return parse_csv(read_file(path), expected_header);
  } catch (const DataFormatError& e) {
    throw DataFormatError(path + ": " + e.what());
  }
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += '\n';
  return out;
}

void write_file_atomic(const std::string& path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ostringstream tmp_name;
  tmp_name << path << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
           << counter++;
  {
    std::ofstream out(tmp_name.str(), std::ios::binary | std::ios::trunc);
    if (!out) throw DataFormatError("cannot write " + tmp_name.str());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataFormatError("short write to " + tmp_name.str());
  }
  fs::rename(tmp_name.str(), target);
}

}  // namespace geoprov
