#include "cogspeech/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cogspeech/error.hpp"

namespace cogspeech {

int CsvTable::column(std::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

static bool needs_quoting(const std::string &field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

static void append_field(std::string &out, const std::string &field) {
  if (!needs_quoting(field)) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string format_csv(const CsvTable &table) {
  std::string out;
  auto write_row = [&out](const std::vector<std::string> &row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_field(out, row[i]);
    }
    out += '\n';
  };
  write_row(table.header);
  for (const auto &row : table.rows) write_row(row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_data = false;
  bool header_done = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    if (!header_done) {
      table.header = std::move(row);
      header_done = true;
    } else {
      table.rows.push_back(std::move(row));
    }
    row.clear();
    row_has_data = false;
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
        field += c;
      }
      row_has_data = true;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_data = true;
        break;
      case ',':
        end_field();
        row_has_data = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_data || !row.empty() || !field.empty()) end_row();
        break;
      default:
        field += c;
        row_has_data = true;
        break;
    }
  }
  if (in_quotes) throw ParseError("csv: unterminated quoted field");
  if (row_has_data || !row.empty() || !field.empty()) end_row();

  for (size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.header.size())
      throw ParseError("csv: row " + std::to_string(r + 1) + " has " +
                       std::to_string(table.rows[r].size()) + " fields, header has " +
                       std::to_string(table.header.size()));
  }
  return table;
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("short write: " + path.string());
}

CsvTable read_csv(const std::filesystem::path &path) {
  return parse_csv(read_text_file(path));
}

void write_csv(const std::filesystem::path &path, const CsvTable &table) {
  write_text_file(path, format_csv(table));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string &field, const std::string &context) {
  const char *begin = field.c_str();
  char *end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(context + ": not a number: '" + field + "'");
  return v;
}

long parse_long(const std::string &field, const std::string &context) {
  const char *begin = field.c_str();
  char *end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ParseError(context + ": not an integer: '" + field + "'");
  return v;
}

}  // namespace cogspeech
