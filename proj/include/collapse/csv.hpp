#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "collapse/bench.hpp"

namespace collapse {

/// Shortest form that round-trips a double: printf("%.17g").
std::string format_number(double value);
std::string format_number(std::uint64_t value);
std::string format_number(const bench::BigInt& value);

/// Writes comma-separated rows with LF endings. Fields are emitted verbatim
/// (all fields produced by this project are numeric or bare identifiers).
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<std::string>& fields);
  void close();

 private:
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace collapse
