#include "geoprov/dataset.hpp"

#include "geoprov/csv.hpp"
#include "geoprov/error.hpp"
#include "geoprov/strings.hpp"

namespace geoprov {

std::string training_csv(const std::vector<LabeledExample>& examples) {
  std::string out = csv_row(training_csv_header());
  for (const auto& ex : examples) {
    out += csv_row({ex.host, ex.features.ip_country.code(), ex.features.tld_country.code(), ex.features.page_language,
                    ex.label.code(), ex.source_edition});
  }
  return out;
}

void write_training_csv(const std::string& path, const std::vector<LabeledExample>& examples) {
  write_file_atomic(path, training_csv(examples));
}

static std::vector<LabeledExample> from_table(const CsvTable& table) {
  std::vector<LabeledExample> out;
  out.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    try {
      LabeledExample ex;
      ex.host = row[0];
      ex.features.ip_country = CountryLabel::parse(row[1]);
      ex.features.tld_country = CountryLabel::parse(row[2]);
      ex.features.page_language = row[3];
      if (!features::is_language_label(ex.features.page_language)) {
        throw DataFormatError("invalid language '" + row[3] + "'");
      }
      ex.label = CountryLabel::parse(row[4]);
      if (ex.label.is_unknown()) throw DataFormatError("label must not be UNKNOWN");
      ex.source_edition = row[5];
      out.push_back(std::move(ex));
    } catch (const DataFormatError& e) {
      throw DataFormatError("training CSV row " + std::to_string(r + 2) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LabeledExample> parse_training_csv(std::string_view text) {
  return from_table(parse_csv(text, training_csv_header()));
}

std::vector<LabeledExample> read_training_csv(const std::string& path) {
  return from_table(read_csv_file(path, training_csv_header()));
}

}  // namespace geoprov
