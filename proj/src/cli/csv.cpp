#include "gyrospec/cli/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gyrospec/errors.hpp"

namespace gyrospec::cli
{

std::string format_number(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row)
{
  if (row.size() != header_.size())
    throw ShapeError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                     std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const
{
  std::string out;
  const auto line = [&](const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i)
      out += (i ? "," : "") + fields[i];
    out += '\n';
  };
  line(header_);
  for (const auto &r : rows_)
    line(r);
  return out;
}

void write_atomic(const std::filesystem::path &path, const std::string &content)
{
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f)
      throw Error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.close();
    if (!f)
      throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace gyrospec::cli
