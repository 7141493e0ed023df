#pragma once

/**
 * Tabular curve output. CSV layout: one header row of unique column names,
 * then numeric rows written with 17 significant digits and '.' as decimal
 * separator regardless of locale, LF line endings, then `# key=value`
 * metadata lines (seed, scenario hash, tool version, ...).
 */

#include <charconv>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "risfbl/error.hpp"

namespace risfbl {

struct CurveOutput {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void validate() const {
    std::set<std::string> unique(columns.begin(), columns.end());
    if (columns.empty() || unique.size() != columns.size())
      throw DomainError("CurveOutput: column names must be non-empty and unique");
    for (const auto &r : rows)
      if (r.size() != columns.size())
        throw DomainError("CurveOutput: every row needs one value per column");
  }

  std::size_t column_index(const std::string &name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name)
        return i;
    throw DomainError("CurveOutput: no column '" + name + "'");
  }

  std::string metadata_value(const std::string &key) const {
    for (const auto &[k, v] : metadata)
      if (k == key)
        return v;
    throw DomainError("CurveOutput: no metadata '" + key + "'");
  }
};

inline std::string format_g17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream &out, const CurveOutput &c) {
  c.validate();
  std::string text;
  for (std::size_t i = 0; i < c.columns.size(); ++i) {
    if (i)
      text += ',';
    text += c.columns[i];
  }
  text += '\n';
  for (const auto &row : c.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i)
        text += ',';
      text += format_g17(row[i]);
    }
    text += '\n';
  }
  for (const auto &[k, v] : c.metadata)
    text += "# " + k + "=" + v + "\n";
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

inline std::string to_csv(const CurveOutput &c) {
  std::ostringstream o;
  write_csv(o, c);
  return o.str();
}

inline void write_csv_file(const std::string &path, const CurveOutput &c) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot open output file '" + path + "'", 0, "--out");
  write_csv(out, c);
  if (!out)
    throw ConfigError("failed writing '" + path + "'", 0, "--out");
}

} // namespace risfbl
