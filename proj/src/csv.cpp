#include "collapse/csv.hpp"

#include <cstdio>

#include "collapse/errors.hpp"

namespace collapse {

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_number(std::uint64_t value) { return std::to_string(value); }

std::string format_number(const bench::BigInt& value) { return value.str(); }

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error("cannot open " + path.string() + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw Error("csv row has the wrong number of fields");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw Error("csv write failed");
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw Error("csv close failed");
}

}  // namespace collapse
