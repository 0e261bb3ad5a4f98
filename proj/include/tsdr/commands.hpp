#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsdr/io.hpp"
#include "tsdr/method.hpp"

namespace tsdr {

inline constexpr const char* kOutDirEnv = "TSDR_OUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Outcome of fitting one method to a data set.
struct Analysis {
  Method method = Method::TSIR;
  int n = 0;
  int p = 0;
  int d_hat = 0;
  std::optional<int> test_d;
  std::optional<int> bic_d;
  std::optional<int> rss_d;
  std::vector<double> eigenvalues;     // SIR family
  std::vector<double> rss_criterion;   // MAVE family, one entry per k
  Matrix directions;                   // p x d_hat
  Matrix extracted;                    // n x d_hat
};

/// SIR family: d_hat follows the BIC-type criterion (the sequential test is
/// reported alongside). MAVE family: d_hat minimizes the RSS criterion.
Analysis analyze_dataset(const DataSet& data, Method method, const ExperimentConfig& config);

/// Writes extracted.csv and analysis.json into `dir`.
void write_analysis(const Analysis& analysis, const DataSet& data, const std::filesystem::path& dir);

/// Reads an analyze output directory and writes plot_direction<k>.csv files
/// with columns x, y, curve_x, curve_y. Returns the written paths.
std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir, int grid_size = 200);

/// Resolution order: explicit flag, config value, TSDR_OUT_DIR, "results".
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag,
                                         const std::filesystem::path& configured);

/// Entry point behind the `tsdr` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsdr
