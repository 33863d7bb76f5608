#include "vspyct/dataset.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vspyct {

void Dataset::validate() const {
  if (features.rows() == 0 || features.cols() == 0) {
    throw InvalidInput("dataset '" + name + "' is empty");
  }
  if (target.size() != features.rows()) {
    throw InvalidInput("dataset '" + name + "': target length " +
                       std::to_string(target.size()) + " != row count " +
                       std::to_string(features.rows()));
  }
  if (!features.allFinite() || !target.allFinite()) {
    throw InvalidInput("dataset '" + name + "' contains non-finite values");
  }
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.name = name;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.target.resize(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(indices[i]);
    out.target(static_cast<Eigen::Index>(i)) = target(indices[i]);
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& field, const std::string& context) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InvalidInput("cannot parse numeric value '" + field + "' at " + context);
  }
  if (!std::isfinite(value)) {
    throw InvalidInput("non-finite value '" + field + "' at " + context);
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open CSV file '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInput("CSV file '" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2) {
    throw InvalidInput("CSV file '" + path + "' needs at least one feature and a target column");
  }

  int target_idx = static_cast<int>(header.size()) - 1;
  if (!target_column.empty()) {
    target_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == target_column) {
        target_idx = static_cast<int>(i);
        break;
      }
    }
    if (target_idx < 0) {
      throw InvalidInput("target column '" + target_column + "' not found in '" + path + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != header.size()) {
      throw InvalidInput("row " + std::to_string(line_no) + " of '" + path + "' has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row.push_back(parse_number(fields[i], "row " + std::to_string(line_no) +
                                                ", column '" + header[i] + "'"));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InvalidInput("CSV file '" + path + "' has a header but no data rows");
  }

  Dataset out;
  out.name = path;
  const int d = static_cast<int>(header.size()) - 1;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), d);
  out.target.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (static_cast<int>(i) != target_idx) out.feature_names.push_back(header[i]);
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    int c = 0;
    for (std::size_t i = 0; i < rows[r].size(); ++i) {
      if (static_cast<int>(i) == target_idx) {
        out.target(static_cast<Eigen::Index>(r)) = rows[r][i];
      } else {
        out.features(static_cast<Eigen::Index>(r), c++) = rows[r][i];
      }
    }
  }
  out.validate();
  return out;
}

FeatureTable load_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open CSV file '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInput("CSV file '" + path + "' is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  FeatureTable table;
  table.names = split_line(line);
  if (table.names.empty()) {
    throw InvalidInput("CSV file '" + path + "' has an empty header");
  }

  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != table.names.size()) {
      throw InvalidInput("row " + std::to_string(line_no) + " of '" + path +
                         "' has " + std::to_string(fields.size()) +
                         " fields, expected " + std::to_string(table.names.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row.push_back(parse_number(fields[i], "row " + std::to_string(line_no) +
                                                ", column '" + table.names[i] + "'"));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw InvalidInput("CSV file '" + path + "' has a header but no data rows");
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return table;
}

void save_csv(const Dataset& dataset, const std::string& path,
              const std::string& target_name) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInput("cannot write CSV file '" + path + "'");
  }
  for (const auto& n : dataset.feature_names) out << n << ',';
  out << target_name << '\n';
  for (int r = 0; r < dataset.rows(); ++r) {
    for (int c = 0; c < dataset.cols(); ++c) {
      out << format_double(dataset.features(r, c)) << ',';
    }
    out << format_double(dataset.target(r)) << '\n';
  }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  Standardizer s;
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  s.mean = x.colwise().mean();
  s.std.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double diff = x(i, j) - s.mean(j);
      ss += diff * diff;
    }
    const double sd = n > 0 ? std::sqrt(ss / static_cast<double>(n)) : 0.0;
    s.std(j) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) {
    throw InvalidInput("standardizer: expected " + std::to_string(mean.size()) +
                       " features, got " + std::to_string(x.size()));
  }
  return (x - mean).cwiseQuotient(std);
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    throw InvalidInput("standardizer: expected " + std::to_string(mean.size()) +
                       " features, got " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= std.transpose().array();
  return out;
}

}  // namespace vspyct
