#include "tsdr/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "tsdr/experiment.hpp"
#include "tsdr/mave.hpp"
#include "tsdr/sir.hpp"
#include "tsdr/smoother.hpp"

namespace tsdr {

namespace {

using nlohmann::json;

std::vector<std::string> split_names(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json counts_json(const std::optional<SelectionCounts>& c) {
  if (!c) return nullptr;
  return {{"under", c->under}, {"exact", c->exact}, {"over", c->over}};
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

void print_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& names) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << "  " << std::setw(10) << std::left << names[static_cast<std::size_t>(i)] << std::right;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ' ' << std::setw(10) << format_fixed4(m(i, j));
    out << '\n';
  }
}

// Flags shared by every subcommand that fits something.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> scenario;
  std::optional<std::string> method;
  std::optional<int> n;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> slices;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<double> rho;
  std::optional<int> df;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> data;
  std::optional<std::string> response;

  ExperimentConfig apply() const {
    ExperimentConfig config = this->config ? load_config(*this->config) : ExperimentConfig{};
    if (scenario) {
      config.scenarios.clear();
      for (const auto& name : split_names(*scenario)) config.scenarios.push_back(parse_scenario(name));
    }
    if (method) {
      config.methods.clear();
      for (const auto& name : split_names(*method)) config.methods.push_back(parse_method(name));
    }
    if (n) config.n = *n;
    if (reps) config.replications = *reps;
    if (seed) config.seed = *seed;
    if (slices) config.slices = *slices;
    if (alpha) config.alpha = *alpha;
    if (lambda) config.lambda = *lambda;
    if (rho) config.rho = *rho;
    if (df) config.df = *df;
    if (threads) config.threads = *threads;
    if (data) config.dataset = *data;
    if (response) config.response = *response;
    config.validate();
    return config;
  }
};

void add_fit_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "INI experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--method", o.method, "Method name(s), comma separated; analyze defaults to T-SIR");
  cmd->add_option("--slices", o.slices, "Number of SIR slices");
  cmd->add_option("--alpha", o.alpha, "Level of the sequential test");
  cmd->add_option("--lambda", o.lambda, "Transform roughness penalty");
  cmd->add_option("--out", o.out, "Output directory");
}

int cmd_simulate(const Overrides& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig config = o.apply();
  if (config.scenarios.empty()) throw Error(ErrorCode::ConfigError, "no scenario given");
  const auto dir = resolve_output_dir(o.out, config.output_dir);
  std::filesystem::create_directories(dir);

  ResultTable all;
  for (Scenario scenario : config.scenarios) {
    ScenarioSpec spec{scenario, config.n, config.rho, config.df, config.seed};
    validate(spec);
    for (Method method : config.methods) {
      if (method == Method::FSIR && !is_sir_scenario(scenario) && scenario != Scenario::Example1) {
        err << "note: F-SIR on " << to_string(scenario) << " uses the generating transforms\n";
      }
      const std::string label = std::string(to_string(scenario)) + "/" + std::string(to_string(method));
      const ResultRow row = run_cell(scenario, method, config, [&](int done, int total) {
        err << '\r' << label << ": " << done << '/' << total << std::flush;
        if (done == total) err << '\n';
      });
      write_results(ResultTable{{row}}, dir / std::string(to_string(scenario)) / (std::string(to_string(method)) + ".csv"));
      out << label << "  VCC " << format_fixed4(row.vcc_mean) << " (" << format_fixed4(row.vcc_sd) << ")  TCC "
          << format_fixed4(row.tcc_mean) << " (" << format_fixed4(row.tcc_sd) << ")\n";
      all.rows.push_back(row);
    }
  }

  json rows = json::array();
  for (const auto& row : all.rows) {
    rows.push_back({{"scenario", row.scenario},
                    {"method", row.method},
                    {"n", row.n},
                    {"replications", row.replications},
                    {"vcc_mean", row.vcc_mean},
                    {"vcc_sd", row.vcc_sd},
                    {"tcc_mean", row.tcc_mean},
                    {"tcc_sd", row.tcc_sd},
                    {"sequential_test", counts_json(row.test)},
                    {"bic", counts_json(row.bic)},
                    {"rss", counts_json(row.rss)}});
  }
  json summary = {{"seed", config.seed},     {"n", config.n},         {"replications", config.replications},
                  {"slices", config.slices}, {"alpha", config.alpha}, {"kappa", config.kappa},
                  {"lambda", config.lambda}, {"rho", config.rho},     {"results", rows}};
  write_json(summary, dir / "summary.json");
  out << "results written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_analyze(const Overrides& o, std::ostream& out) {
  ExperimentConfig config = o.apply();
  if (!o.method && !o.config) config.methods = {Method::TSIR};
  if (!config.dataset) throw Error(ErrorCode::ConfigError, "analyze needs --data or a dataset in the config");
  if (config.methods.size() != 1) throw Error(ErrorCode::ConfigError, "analyze takes exactly one method");
  const DataSet data = load_csv(*config.dataset, config.response);
  const Method method = config.methods.front();
  const Analysis analysis = analyze_dataset(data, method, config);
  const auto dir = resolve_output_dir(o.out, config.output_dir);
  write_analysis(analysis, data, dir);

  out << to_string(method) << " on " << config.dataset->string() << " (n = " << analysis.n
      << ", p = " << analysis.p << ", response " << data.response_name << ")\n";
  if (analysis.test_d) out << "  sequential test (alpha = " << config.alpha << "): d = " << *analysis.test_d << '\n';
  if (analysis.bic_d) out << "  BIC-type criterion: d = " << *analysis.bic_d << '\n';
  if (analysis.rss_d) out << "  RSS criterion: d = " << *analysis.rss_d << '\n';
  out << "  leading directions:\n";
  print_matrix(out, analysis.directions, data.predictor_names);
  out << "extracted predictors written to " << (dir / "extracted.csv").string() << '\n';
  return kExitOk;
}

int cmd_plotdata(const std::optional<std::string>& flag, std::ostream& out) {
  const auto dir = resolve_output_dir(flag, {});
  for (const auto& path : write_plot_data(dir)) out << path.string() << '\n';
  return kExitOk;
}

}  // namespace

Analysis analyze_dataset(const DataSet& data, Method method, const ExperimentConfig& config) {
  Analysis a;
  a.method = method;
  a.n = static_cast<int>(data.n());
  a.p = static_cast<int>(data.p());
  if (method == Method::FSIR) throw Error(ErrorCode::InvalidArgument, "F-SIR needs known transforms");

  if (is_sir_family(method)) {
    const Matrix z = sir_predictors(method, data.X);
    const SirFit fit = sir_fit(z, data.y, config.slices);
    a.test_d = sequential_test(fit, config.alpha);
    a.bic_d = bic_dimension(fit, config.kappa_value(a.n));
    a.d_hat = *a.bic_d;
    a.eigenvalues.assign(fit.eigenvalues().data(), fit.eigenvalues().data() + fit.eigenvalues().size());
    a.directions = fit.leading_directions(a.d_hat);
    a.extracted = fit.project(z, a.d_hat);
    return a;
  }

  const TmaveOptions options = tmave_options(config);
  const int k_max = std::min(config.k_max, a.p);
  RssDimensionResult selection = rss_dimension(
      data.X, data.y, method == Method::MAVE ? MaveVariant::Classical : MaveVariant::Transformed, options, k_max);
  a.rss_d = selection.k_hat;
  a.d_hat = selection.k_hat;
  a.rss_criterion = selection.criterion;
  const MaveFit& fit = *selection.fits[static_cast<std::size_t>(a.d_hat - 1)];
  a.directions = method == Method::MAVE ? fit.raw_directions() : fit.B;
  a.extracted = fit.f_values * fit.B;
  return a;
}

void write_analysis(const Analysis& analysis, const DataSet& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / "extracted.csv", std::ios::trunc);
    if (!csv) throw Error(ErrorCode::IoError, "cannot write " + (dir / "extracted.csv").string());
    for (int k = 0; k < analysis.d_hat; ++k) csv << (k ? "," : "") << "direction" << k + 1;
    csv << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < analysis.extracted.rows(); ++i) {
      for (Eigen::Index k = 0; k < analysis.extracted.cols(); ++k) csv << (k ? "," : "") << analysis.extracted(i, k);
      csv << '\n';
    }
  }
  auto optional_int = [](const std::optional<int>& v) -> json { return v ? json(*v) : json(nullptr); };
  json criterion = json::array();
  for (double v : analysis.rss_criterion) criterion.push_back(std::isfinite(v) ? json(v) : json(nullptr));
  const json doc = {{"method", std::string(to_string(analysis.method))},
                    {"n", analysis.n},
                    {"p", analysis.p},
                    {"d_hat", analysis.d_hat},
                    {"sequential_test_d", optional_int(analysis.test_d)},
                    {"bic_d", optional_int(analysis.bic_d)},
                    {"rss_d", optional_int(analysis.rss_d)},
                    {"eigenvalues", analysis.eigenvalues},
                    {"rss_criterion", criterion},
                    {"predictors", data.predictor_names},
                    {"response_name", data.response_name},
                    {"directions", matrix_json(analysis.directions)},
                    {"response", std::vector<double>(data.y.data(), data.y.data() + data.y.size())}};
  write_json(doc, dir / "analysis.json");
}

std::vector<std::filesystem::path> write_plot_data(const std::filesystem::path& dir, int grid_size) {
  const auto meta_path = dir / "analysis.json";
  const auto extracted_path = dir / "extracted.csv";
  if (!std::filesystem::exists(meta_path) || !std::filesystem::exists(extracted_path)) {
    throw Error(ErrorCode::MissingArtifacts, "no analyze output in " + dir.string());
  }
  json meta;
  {
    std::ifstream in(meta_path);
    try {
      in >> meta;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::MissingArtifacts, "unreadable " + meta_path.string() + ": " + e.what());
    }
  }
  const std::vector<double> response = meta.at("response").get<std::vector<double>>();

  std::ifstream in(extracted_path);
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  std::vector<std::vector<double>> columns(header.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw ParseError(ErrorCode::ParseError, row, 0, "ragged extracted.csv");
    for (std::size_t k = 0; k < cells.size(); ++k) columns[k].push_back(std::stod(cells[k]));
  }
  if (row != response.size()) throw Error(ErrorCode::MissingArtifacts, "extracted.csv and analysis.json disagree");

  std::vector<std::filesystem::path> written;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto& x = columns[k];
    const SmoothingSpline curve = fit_smoothing_spline(x, response);
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    const auto path = dir / ("plot_direction" + std::to_string(k + 1) + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "x,y,curve_x,curve_y\n" << std::setprecision(17);
    const std::size_t rows = std::max<std::size_t>(x.size(), static_cast<std::size_t>(grid_size));
    for (std::size_t i = 0; i < rows; ++i) {
      if (i < x.size()) out << x[i] << ',' << response[i];
      else out << ',';
      if (static_cast<int>(i) < grid_size) {
        const double t = *lo + (*hi - *lo) * static_cast<double>(i) / (grid_size - 1);
        out << ',' << t << ',' << curve(t);
      } else {
        out << ",,";
      }
      out << '\n';
    }
    written.push_back(path);
  }
  return written;
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag,
                                         const std::filesystem::path& configured) {
  if (flag) return *flag;
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "results";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transformed sufficient dimension reduction"};
  app.require_subcommand(1);
  app.footer(std::string("Output directory defaults to $") + kOutDirEnv + ", then ./results.");

  Overrides sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments on the built-in scenarios");
  add_fit_flags(simulate, sim);
  simulate->add_option("--scenario", sim.scenario, "Scenario name(s), comma separated");
  simulate->add_option("--n", sim.n, "Sample size");
  simulate->add_option("--reps", sim.reps, "Replications");
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--rho", sim.rho, "Predictor correlation (Examples)");
  simulate->add_option("--df", sim.df, "Degrees of freedom (Case7)");
  simulate->add_option("--threads", sim.threads, "Worker threads over replications");

  Overrides ana;
  auto* analyze = app.add_subcommand("analyze", "Estimate the structural dimension and directions for a CSV");
  add_fit_flags(analyze, ana);
  analyze->add_option("--data", ana.data, "CSV file with a header row");
  analyze->add_option("--response", ana.response, "Response column (default: last)");

  std::optional<std::string> plot_out;
  auto* plotdata = app.add_subcommand("plotdata", "Scatter and smoothing-curve data from an analyze run");
  plotdata->add_option("--out", plot_out, "Directory holding the analyze output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*analyze) return cmd_analyze(ana, out);
    return cmd_plotdata(plot_out, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::UnknownScenario:
      case ErrorCode::ConfigError:
      case ErrorCode::InvalidArgument:
        return kExitUsage;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace tsdr
