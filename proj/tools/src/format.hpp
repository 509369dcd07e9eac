#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace ccge::cli {

/// Result numbers: 15 significant digits, "inf"/"-inf"/"nan" for non-finite values.
std::string num(double v);

/// Line-oriented CSV writer; throws IoError when the file cannot be written.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ccge::cli
