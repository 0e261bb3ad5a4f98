#include "tsdr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "tsdr/error.hpp"
#include "tsdr/metrics.hpp"
#include "tsdr/sir.hpp"
#include "tsdr/transforms.hpp"

namespace tsdr {

namespace {

struct MethodName {
  Method method;
  std::string_view name;
};

constexpr MethodName kMethods[] = {
    {Method::SIR, "SIR"},   {Method::FSIR, "F-SIR"}, {Method::TSIR, "T-SIR"},
    {Method::YJSIR, "YJ-SIR"}, {Method::MAVE, "MAVE"},   {Method::TMAVE, "T-MAVE"},
};

std::string squash(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (c != '-' && c != '_') out += static_cast<char>(std::toupper(c));
  }
  return out;
}

std::pair<double, double> mean_sd(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  for (const auto& entry : kMethods) {
    if (entry.method == m) return entry.name;
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  const std::string key = squash(name);
  for (const auto& entry : kMethods) {
    if (squash(entry.name) == key) return entry.method;
  }
  std::string valid;
  for (const auto& entry : kMethods) valid += (valid.empty() ? "" : ", ") + std::string(entry.name);
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'; valid: " + valid);
}

std::vector<std::string> method_names() {
  std::vector<std::string> out;
  for (const auto& entry : kMethods) out.emplace_back(entry.name);
  return out;
}

TmaveOptions tmave_options(const ExperimentConfig& config) {
  TmaveOptions options;
  options.lambda = config.lambda;
  options.basis_size = config.basis_size;
  options.mave.bandwidth_scale = config.bandwidth_scale;
  options.mave.pilot_bandwidth_scale = config.pilot_bandwidth_scale;
  options.mave.bandwidth = config.bandwidth;
  options.mave.max_iterations = config.max_iterations;
  return options;
}

Matrix sir_predictors(Method method, const Matrix& x, const GeneratedData* truth) {
  switch (method) {
    case Method::SIR: return x;
    case Method::TSIR: return normal_scores(x);
    case Method::YJSIR: return yeo_johnson_columns(x);
    case Method::FSIR:
      if (!truth) throw Error(ErrorCode::InvalidArgument, "F-SIR needs the true transforms");
      return truth->f;
    default: throw Error(ErrorCode::InvalidArgument, "not a SIR-family method");
  }
}

ReplicationOutcome run_replication(const GeneratedData& data, Method method, const ExperimentConfig& config) {
  ReplicationOutcome out;
  const bool raw = method == Method::SIR || method == Method::MAVE;
  const Matrix& truth = raw ? data.raw_basis : data.true_basis;
  const int d = raw ? data.raw_d : data.true_d;
  const int n = static_cast<int>(data.X.rows());
  out.d = d;

  if (is_sir_family(method)) {
    const SirFit fit = sir_fit(sir_predictors(method, data.X, &data), data.y, config.slices);
    const Matrix directions = fit.leading_directions(d);
    out.vcc = vcc(directions, truth);
    out.tcc = tcc(directions, truth);
    out.test_d = sequential_test(fit, config.alpha);
    out.bic_d = bic_dimension(fit, config.kappa_value(n));
    return out;
  }

  const TmaveOptions options = tmave_options(config);
  const MaveVariant variant = method == Method::MAVE ? MaveVariant::Classical : MaveVariant::Transformed;
  std::optional<MaveFit> fit;
  if (config.select_dimension) {
    const int k_max = std::min(config.k_max, static_cast<int>(data.X.cols()));
    RssDimensionResult selection = rss_dimension(data.X, data.y, variant, options, k_max);
    out.rss_d = selection.k_hat;
    if (d <= k_max && selection.fits[static_cast<std::size_t>(d - 1)]) {
      fit = std::move(selection.fits[static_cast<std::size_t>(d - 1)]);
    }
  }
  if (!fit) fit = variant == MaveVariant::Classical ? mave_fit(data.X, data.y, d, options.mave)
                                                     : tmave_fit(data.X, data.y, d, options);
  const Matrix directions = variant == MaveVariant::Classical ? fit->raw_directions() : fit->B;
  out.vcc = vcc(directions, truth);
  out.tcc = tcc(directions, truth);
  return out;
}

std::vector<ReplicationOutcome> run_replications(Scenario scenario, Method method, const ExperimentConfig& config,
                                                 const ProgressCallback& progress) {
  const int reps = config.replications;
  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  std::atomic<int> done{0};
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (int r = next++; r < reps; r = next++) {
      try {
        ScenarioSpec spec{scenario, config.n, config.rho, config.df,
                          replication_seed(config.seed, static_cast<std::uint64_t>(r))};
        const GeneratedData data = generate(spec);
        outcomes[static_cast<std::size_t>(r)] = run_replication(data, method, config);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next = reps;
        return;
      }
      const int completed = ++done;
      if (progress) {
        std::lock_guard lock(mutex);
        progress(completed, reps);
      }
    }
  };

  const int threads = std::max(1, std::min(config.threads, reps));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

ResultRow aggregate(Scenario scenario, Method method, const ExperimentConfig& config,
                    const std::vector<ReplicationOutcome>& outcomes) {
  ResultRow row;
  row.scenario = std::string(to_string(scenario));
  row.method = std::string(to_string(method));
  row.n = config.n;
  row.replications = static_cast<int>(outcomes.size());
  if (outcomes.empty()) return row;

  std::vector<double> v;
  std::vector<double> t;
  SelectionCounts test;
  SelectionCounts bic;
  SelectionCounts rss;
  for (const auto& o : outcomes) {
    v.push_back(o.vcc);
    t.push_back(o.tcc);
    if (o.test_d) test.record(*o.test_d, o.d);
    if (o.bic_d) bic.record(*o.bic_d, o.d);
    if (o.rss_d) rss.record(*o.rss_d, o.d);
  }
  std::tie(row.vcc_mean, row.vcc_sd) = mean_sd(v);
  std::tie(row.tcc_mean, row.tcc_sd) = mean_sd(t);
  if (test.total() > 0) row.test = test;
  if (bic.total() > 0) row.bic = bic;
  if (rss.total() > 0) row.rss = rss;
  return row;
}

ResultRow run_cell(Scenario scenario, Method method, const ExperimentConfig& config,
                   const ProgressCallback& progress) {
  return aggregate(scenario, method, config, run_replications(scenario, method, config, progress));
}

}  // namespace tsdr
