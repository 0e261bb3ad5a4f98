#include "tsdr/io.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace tsdr {

namespace {

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  const std::string cell = trim(text);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T config_number(const std::string& section, const std::string& key, const std::string& value) {
  const auto parsed = parse_double(value);
  if (!parsed) throw Error(ErrorCode::ConfigError, section + "." + key + ": not a number: '" + value + "'");
  if constexpr (std::is_integral_v<T>) {
    if (*parsed != std::floor(*parsed)) {
      throw Error(ErrorCode::ConfigError, section + "." + key + ": expected an integer, got '" + value + "'");
    }
  }
  return static_cast<T>(*parsed);
}

bool config_bool(const std::string& section, const std::string& key, const std::string& value) {
  const std::string v = lowercase(trim(value));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw Error(ErrorCode::ConfigError, section + "." + key + ": expected a boolean, got '" + value + "'");
}

std::string render_counts(const std::optional<SelectionCounts>& counts, int which) {
  if (!counts) return "NA";
  return std::to_string(which == 0 ? counts->under : which == 1 ? counts->exact : counts->over);
}

std::optional<int> parse_count(const std::string& cell, std::size_t row) {
  if (cell == "NA") return std::nullopt;
  const auto value = parse_double(cell);
  if (!value) throw ParseError(ErrorCode::NonNumericCell, row, 0, "bad count '" + cell + "'");
  return static_cast<int>(*value);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

DataSet parse_csv(std::istream& in, const std::string& response) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ErrorCode::ParseError, 0, 0, "missing header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& name : header) name = trim(name);
  if (header.size() < 2) throw ParseError(ErrorCode::ParseError, 0, 0, "need at least two columns");

  std::size_t response_col = header.size() - 1;
  if (!response.empty()) {
    const auto it = std::find(header.begin(), header.end(), response);
    if (it == header.end()) throw ParseError(ErrorCode::ParseError, 0, 0, "no column named '" + response + "'");
    response_col = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<double>> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(ErrorCode::ParseError, row, 0,
                       "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_double(fields[c]);
      if (!value) {
        const std::string what = trim(fields[c]).empty() ? "missing value" : "non-numeric cell '" + fields[c] + "'";
        throw ParseError(ErrorCode::NonNumericCell, row, c + 1, what + " in column '" + header[c] + "'");
      }
      values[c] = *value;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(ErrorCode::ParseError, 0, 0, "no data rows");

  DataSet data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(header.size() - 1);
  data.X.resize(n, p);
  data.y.resize(n);
  data.response_name = header[response_col];
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != response_col) data.predictor_names.push_back(header[c]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& values = rows[static_cast<std::size_t>(i)];
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < values.size(); ++c) {
      if (c == response_col) {
        data.y(i) = values[c];
      } else {
        data.X(i, j++) = values[c];
      }
    }
  }
  return data;
}

DataSet load_csv(const std::filesystem::path& path, const std::string& response) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return parse_csv(in, response);
}

void write_csv(const DataSet& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    out << (idx < data.predictor_names.size() ? data.predictor_names[idx] : "x" + std::to_string(j + 1)) << ',';
  }
  out << (data.response_name.empty() ? "y" : data.response_name) << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << data.X(i, j) << ',';
    out << data.y(i) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

double ExperimentConfig::kappa_value(int sample_size) const {
  if (lowercase(kappa) == "log") return std::log(static_cast<double>(sample_size));
  const auto value = parse_double(kappa);
  if (!value || *value <= 0.0) throw Error(ErrorCode::ConfigError, "kappa must be 'log' or a positive number");
  return *value;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigError, what); };
  if (methods.empty()) fail("at least one method is required");
  if (replications < 1) fail("replications must be at least 1");
  if (n < 10) fail("n must be at least 10");
  if (slices < 2) fail("slices must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (!(lambda >= 0.0)) fail("lambda must be non-negative");
  if (!(bandwidth_scale > 0.0) || !(pilot_bandwidth_scale > 0.0)) fail("bandwidth scales must be positive");
  if (bandwidth && !(*bandwidth > 0.0)) fail("bandwidth must be positive");
  if (basis_size < 0) fail("basis_size must be non-negative");
  if (max_iterations < 1) fail("max_iterations must be at least 1");
  if (k_max < 1) fail("k_max must be at least 1");
  if (threads < 1) fail("threads must be at least 1");
  kappa_value(n);
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, e.message() + " at line " + std::to_string(e.line()));
  }

  ExperimentConfig config;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, std::map<std::string, Setter>> schema = {
      {"experiment",
       {
           {"scenario",
            [&](const std::string& v) {
              config.scenarios.clear();
              for (const auto& name : split_list(v)) config.scenarios.push_back(parse_scenario(name));
            }},
           {"dataset", [&](const std::string& v) { config.dataset = trim(v); }},
           {"response", [&](const std::string& v) { config.response = trim(v); }},
           {"methods",
            [&](const std::string& v) {
              config.methods.clear();
              for (const auto& name : split_list(v)) config.methods.push_back(parse_method(name));
            }},
           {"n", [&](const std::string& v) { config.n = config_number<int>("experiment", "n", v); }},
           {"replications",
            [&](const std::string& v) { config.replications = config_number<int>("experiment", "replications", v); }},
           {"rho", [&](const std::string& v) { config.rho = config_number<double>("experiment", "rho", v); }},
           {"df", [&](const std::string& v) { config.df = config_number<int>("experiment", "df", v); }},
           {"seed", [&](const std::string& v) { config.seed = config_number<std::uint64_t>("experiment", "seed", v); }},
           {"output", [&](const std::string& v) { config.output_dir = trim(v); }},
           {"threads", [&](const std::string& v) { config.threads = config_number<int>("experiment", "threads", v); }},
       }},
      {"sir",
       {
           {"slices", [&](const std::string& v) { config.slices = config_number<int>("sir", "slices", v); }},
           {"alpha", [&](const std::string& v) { config.alpha = config_number<double>("sir", "alpha", v); }},
           {"kappa", [&](const std::string& v) { config.kappa = trim(v); }},
       }},
      {"mave",
       {
           {"lambda", [&](const std::string& v) { config.lambda = config_number<double>("mave", "lambda", v); }},
           {"bandwidth_scale",
            [&](const std::string& v) { config.bandwidth_scale = config_number<double>("mave", "bandwidth_scale", v); }},
           {"pilot_bandwidth_scale",
            [&](const std::string& v) {
              config.pilot_bandwidth_scale = config_number<double>("mave", "pilot_bandwidth_scale", v);
            }},
           {"bandwidth", [&](const std::string& v) { config.bandwidth = config_number<double>("mave", "bandwidth", v); }},
           {"basis_size", [&](const std::string& v) { config.basis_size = config_number<int>("mave", "basis_size", v); }},
           {"max_iterations",
            [&](const std::string& v) { config.max_iterations = config_number<int>("mave", "max_iterations", v); }},
           {"select_dimension",
            [&](const std::string& v) { config.select_dimension = config_bool("mave", "select_dimension", v); }},
           {"k_max", [&](const std::string& v) { config.k_max = config_number<int>("mave", "k_max", v); }},
       }},
  };

  for (const auto& [section, body] : tree) {
    const auto known = schema.find(section);
    if (known == schema.end()) {
      if (body.empty()) throw Error(ErrorCode::ConfigError, "key outside any section: '" + section + "'");
      throw Error(ErrorCode::ConfigError, "unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto setter = known->second.find(key);
      if (setter == known->second.end()) {
        throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in [" + section + "]");
      }
      setter->second(value.data());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  return parse_config(in);
}

void SelectionCounts::record(int estimate, int truth) {
  if (estimate < truth) {
    ++under;
  } else if (estimate == truth) {
    ++exact;
  } else {
    ++over;
  }
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = {
      "scenario", "method",  "n",      "reps",   "vcc_mean", "vcc_sd", "tcc_mean", "tcc_sd",
      "test_lt",  "test_eq", "test_gt", "bic_lt", "bic_eq",   "bic_gt", "rss_lt",   "rss_eq", "rss_gt"};
  return columns;
}

std::string format_fixed4(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << value;
  std::string s = out.str();
  if (s == "-0.0000") s = "0.0000";
  return s;
}

void write_results(const ResultTable& table, std::ostream& out) {
  const auto& columns = result_columns();
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.scenario << ',' << row.method << ',' << row.n << ',' << row.replications << ','
        << format_fixed4(row.vcc_mean) << ',' << format_fixed4(row.vcc_sd) << ',' << format_fixed4(row.tcc_mean)
        << ',' << format_fixed4(row.tcc_sd);
    for (const auto* counts : {&row.test, &row.bic, &row.rss}) {
      for (int which = 0; which < 3; ++which) out << ',' << render_counts(*counts, which);
    }
    out << '\n';
  }
}

void write_results(const ResultTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_results(table, out);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

ResultTable read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != result_columns()) {
    throw ParseError(ErrorCode::ParseError, 0, 0, "unexpected result table header");
  }
  ResultTable table;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != result_columns().size()) {
      throw ParseError(ErrorCode::ParseError, row, 0, "wrong number of fields");
    }
    auto number = [&](std::size_t c) {
      const auto value = parse_double(cells[c]);
      if (!value) throw ParseError(ErrorCode::NonNumericCell, row, c + 1, "non-numeric cell '" + cells[c] + "'");
      return *value;
    };
    ResultRow r;
    r.scenario = cells[0];
    r.method = cells[1];
    r.n = static_cast<int>(number(2));
    r.replications = static_cast<int>(number(3));
    r.vcc_mean = number(4);
    r.vcc_sd = number(5);
    r.tcc_mean = number(6);
    r.tcc_sd = number(7);
    std::optional<SelectionCounts>* targets[] = {&r.test, &r.bic, &r.rss};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto lt = parse_count(cells[8 + 3 * k], row);
      const auto eq = parse_count(cells[9 + 3 * k], row);
      const auto gt = parse_count(cells[10 + 3 * k], row);
      if (lt && eq && gt) *targets[k] = SelectionCounts{*lt, *eq, *gt};
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

ResultTable read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_results(in);
}

}  // namespace tsdr
