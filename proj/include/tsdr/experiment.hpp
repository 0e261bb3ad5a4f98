#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tsdr/io.hpp"
#include "tsdr/mave.hpp"
#include "tsdr/method.hpp"
#include "tsdr/simulate.hpp"

namespace tsdr {

/// Accuracy and dimension estimates from one simulated data set.
struct ReplicationOutcome {
  double vcc = 0.0;
  double tcc = 0.0;
  int d = 0;  // dimension the estimates are scored against
  std::optional<int> test_d;
  std::optional<int> bic_d;
  std::optional<int> rss_d;
};

TmaveOptions tmave_options(const ExperimentConfig& config);

/// Predictors the SIR-family method works on.
Matrix sir_predictors(Method method, const Matrix& x, const GeneratedData* truth = nullptr);

/// Runs one method on one generated data set. SIR and MAVE are scored
/// against the central subspace of the raw predictors, the transformed
/// methods against the transformed central subspace.
ReplicationOutcome run_replication(const GeneratedData& data, Method method, const ExperimentConfig& config);

using ProgressCallback = std::function<void(int completed, int total)>;

/// All replications of one (scenario, method) cell, aggregated in
/// replication order regardless of the thread count.
ResultRow run_cell(Scenario scenario, Method method, const ExperimentConfig& config,
                   const ProgressCallback& progress = {});

std::vector<ReplicationOutcome> run_replications(Scenario scenario, Method method, const ExperimentConfig& config,
                                                 const ProgressCallback& progress = {});
ResultRow aggregate(Scenario scenario, Method method, const ExperimentConfig& config,
                    const std::vector<ReplicationOutcome>& outcomes);

}  // namespace tsdr
