#pragma once

// Result tables as CSV. A comment block ("# key: value") leads the file and
// records at least the config hash and the precision level; cells are text,
// numbers are written in scientific notation with a fixed digit count.

#include "tcd/errors.hpp"
#include "tcd/numerics/scalar.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tcd::io {

/// Scientific notation with `digits` significant digits (0: enough digits to
/// round-trip T exactly).
template <Real T> std::string sci(const T &x, int digits = 0) {
  if (digits <= 0)
    digits = std::numeric_limits<T>::max_digits10;
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits - 1) << x;
  return os.str();
}

class ResultTable {
public:
  ResultTable() = default;
  explicit ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void set_meta(const std::string &key, const std::string &value) {
    for (auto &[k, v] : meta_)
      if (k == key) {
        v = value;
        return;
      }
    meta_.emplace_back(key, value);
  }
  /// Like set_meta, but a new key goes to the top of the header.
  void set_meta_front(const std::string &key, const std::string &value) {
    for (auto &[k, v] : meta_)
      if (k == key) {
        v = value;
        return;
      }
    meta_.emplace(meta_.begin(), key, value);
  }
  std::string meta(const std::string &key) const {
    for (const auto &[k, v] : meta_)
      if (k == key)
        return v;
    return {};
  }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size())
      throw std::invalid_argument("result table: row has " + std::to_string(cells.size()) +
                                  " cells, expected " + std::to_string(columns_.size()));
    for (auto &c : cells)
      for (auto &ch : c)
        if (ch == ',' || ch == '\n')
          ch = ';';
    rows_.push_back(std::move(cells));
  }

  const std::vector<std::string> &columns() const { return columns_; }
  const std::vector<std::vector<std::string>> &rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  std::size_t column(const std::string &name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
      if (columns_[i] == name)
        return i;
    throw InvalidSetup("result table has no column \"" + name + "\"");
  }
  const std::string &cell(std::size_t row, const std::string &name) const {
    return rows_.at(row)[column(name)];
  }
  template <Real T> T number(std::size_t row, const std::string &name) const {
    return parse<T>(cell(row, name));
  }

  void write(std::ostream &os) const {
    for (const auto &[k, v] : meta_)
      os << "# " << k << ": " << v << "\n";
    write_row(os, columns_);
    for (const auto &r : rows_)
      write_row(os, r);
  }

  void save(const std::string &path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os)
      throw InvalidSetup("cannot write " + path);
    write(os);
  }

  static ResultTable read(std::istream &in) {
    ResultTable t;
    bool header = false;
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r')
        line.pop_back();
      if (line.empty())
        continue;
      if (line[0] == '#') {
        const auto colon = line.find(": ");
        if (colon != std::string::npos && line.size() > 2)
          t.meta_.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
        continue;
      }
      auto cells = split(line);
      if (!header) {
        t.columns_ = std::move(cells);
        header = true;
      } else {
        t.add_row(std::move(cells));
      }
    }
    if (!header)
      throw InvalidSetup("result table: no header line");
    return t;
  }

  static ResultTable load(const std::string &path) {
    std::ifstream in(path);
    if (!in)
      throw InvalidSetup("cannot open " + path);
    return read(in);
  }

private:
  static void write_row(std::ostream &os, const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << (i ? "," : "") << cells[i];
    os << "\n";
  }
  static std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

} // namespace tcd::io
