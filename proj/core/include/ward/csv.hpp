#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ward::csv {

// First line of every CSV this library writes.
std::string schema_comment(std::string_view kind);

struct Table {
  std::vector<std::string> header;
  struct Row {
    std::size_t line = 0;  // 1-based source line
    std::vector<std::string> cells;
  };
  std::vector<Row> rows;

  // Index of a header column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

std::vector<std::string> split_line(std::string_view line);

// Reads a header + rows file. Lines starting with '#' and blank lines are
// skipped. Throws Io when the file cannot be opened.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

std::string format_number(double v, int decimals = 6);
std::string escape(std::string_view field);

class Writer {
 public:
  // `notes` become extra '#' lines between the schema comment and the header.
  Writer(std::ostream& out, std::string_view kind, const std::vector<std::string>& header,
         const std::vector<std::string>& notes = {});
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t width_;
};

}  // namespace ward::csv
