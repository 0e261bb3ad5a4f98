#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsdr/error.hpp"
#include "tsdr/linalg.hpp"
#include "tsdr/method.hpp"
#include "tsdr/simulate.hpp"

namespace tsdr {

/// Raised for malformed CSV input. `row` counts data rows from 1 (the header
/// is row 0); `column` is 1-based, 0 when the whole row is at fault.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t row, std::size_t column, const std::string& what)
      : Error(code, "row " + std::to_string(row) + (column ? ", column " + std::to_string(column) : "") + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

struct DataSet {
  Matrix X;
  Vector y;
  std::vector<std::string> predictor_names;
  std::string response_name;

  Eigen::Index n() const noexcept { return X.rows(); }
  Eigen::Index p() const noexcept { return X.cols(); }
};

/// Header plus numeric rows; every other column becomes a predictor. An
/// empty `response` selects the last column.
DataSet load_csv(const std::filesystem::path& path, const std::string& response = "");
DataSet parse_csv(std::istream& in, const std::string& response = "");
/// Predictors first, response last, 17 significant digits.
void write_csv(const DataSet& data, const std::filesystem::path& path);

/// Splits one CSV record, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

struct ExperimentConfig {
  std::vector<Scenario> scenarios;
  std::optional<std::filesystem::path> dataset;
  std::string response;
  std::vector<Method> methods{Method::SIR, Method::TSIR};
  int n = 400;
  int replications = 50;
  double rho = 0.0;
  int df = 5;
  std::uint64_t seed = 1;
  /// Empty means: TSDR_OUT_DIR if set, otherwise "results".
  std::filesystem::path output_dir;
  int threads = 1;

  // [sir]
  int slices = 10;
  double alpha = 0.05;
  /// "log" for log(n), otherwise a positive number.
  std::string kappa = "log";

  // [mave]
  double lambda = 1e-3;
  double bandwidth_scale = 1.0;
  double pilot_bandwidth_scale = 1.0;
  std::optional<double> bandwidth;
  int basis_size = 6;
  int max_iterations = 50;
  bool select_dimension = true;
  int k_max = 4;

  double kappa_value(int sample_size) const;
  void validate() const;
};

/// INI text with sections [experiment], [sir] and [mave]; unknown sections
/// or keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct SelectionCounts {
  int under = 0;
  int exact = 0;
  int over = 0;

  int total() const noexcept { return under + exact + over; }
  void record(int estimate, int truth);
};

struct ResultRow {
  std::string scenario;
  std::string method;
  int n = 0;
  int replications = 0;
  double vcc_mean = 0.0;
  double vcc_sd = 0.0;
  double tcc_mean = 0.0;
  double tcc_sd = 0.0;
  std::optional<SelectionCounts> test;
  std::optional<SelectionCounts> bic;
  std::optional<SelectionCounts> rss;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

const std::vector<std::string>& result_columns();
void write_results(const ResultTable& table, std::ostream& out);
void write_results(const ResultTable& table, const std::filesystem::path& path);
ResultTable read_results(std::istream& in);
ResultTable read_results(const std::filesystem::path& path);

/// "0.5000"-style fixed four-decimal rendering used by the result tables.
std::string format_fixed4(double value);

}  // namespace tsdr
