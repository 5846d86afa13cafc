#ifndef BNN_CSV_HPP
#define BNN_CSV_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bnn/types.hpp"

namespace bnn {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace csv {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Table {
  std::vector<std::string> header;
  Matrix values;
};

// Numeric CSV with a mandatory header row.
inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Table t;
  t.header = split_line(line);
  if (t.header.empty()) throw DataError(path + ": missing header");

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != t.header.size())
      throw DataError(path + ": row " + std::to_string(lineno) + " has " +
                      std::to_string(cells.size()) + " columns, expected " +
                      std::to_string(t.header.size()));
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      try {
        std::size_t pos = 0;
        row[j] = std::stod(cells[j], &pos);
        if (pos != cells[j].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError(path + ": row " + std::to_string(lineno) +
                        ", column " + std::to_string(j + 1) +
                        ": not a number: '" + cells[j] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");

  t.values = Matrix(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return t;
}

inline void write_table(const std::string& path,
                        const std::vector<std::string>& header,
                        const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out.precision(17);
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << values(i, j);
    out << '\n';
  }
  if (!out) throw DataError("write failed for " + path);
}

// Dataset schema: header row, first column the response, remaining columns
// covariates.
inline Dataset read_dataset(const std::string& path) {
  const Table t = read_table(path);
  if (t.header.size() < 2)
    throw DataError(path + ": need a response column plus covariates");
  Dataset d;
  d.y = t.values.col(0);
  d.X = t.values.rightCols(t.values.cols() - 1);
  d.validate();
  return d;
}

inline void write_dataset(const std::string& path, const Dataset& d) {
  std::vector<std::string> header;
  header.reserve(static_cast<std::size_t>(d.K()) + 1);
  header.emplace_back("y");
  for (Eigen::Index j = 0; j < d.K(); ++j)
    header.push_back("x" + std::to_string(j + 1));
  Matrix values(d.T(), d.K() + 1);
  values.col(0) = d.y;
  values.rightCols(d.K()) = d.X;
  write_table(path, header, values);
}

} // namespace csv
} // namespace bnn

#endif // BNN_CSV_HPP
