#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace gyrospec::cli
{

// %.17g, with "nan"/"inf"/"-inf" for non-finite values.
std::string format_number(double x);

class CsvTable
{
public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path &path, const std::string &content);

}  // namespace gyrospec::cli
