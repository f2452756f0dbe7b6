#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cogspeech {

// Minimal delimited-text table. Fields containing the delimiter, quotes or
// newlines are quoted on write and unquoted on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 if absent
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path &path);

std::string format_csv(const CsvTable &table);
void write_csv(const std::filesystem::path &path, const CsvTable &table);

// Shortest text that round-trips the value exactly (17 significant digits).
std::string format_double(double v);

double parse_double(const std::string &field, const std::string &context);
long parse_long(const std::string &field, const std::string &context);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

}  // namespace cogspeech
