#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "feat/config.hpp"
#include "feat/metrics.hpp"

namespace feat {

/// One CSV row: a sweep point evaluated for one strategy, aggregated over
/// the draws. NaN fields are written as empty CSV cells.
struct SweepRow {
  double axis = 0;
  Strategy strategy = Strategy::feat;
  double mean_welfare = 0;
  double se_welfare = 0;
  double mean_fairness = 0;
  double mean_ee = 0;
  double served = 0;
  double nocoord_prob = 0;
  double mean_robustness = 0;
  double mean_omega = 0;
  double mean_rounds = 0;
};

/// All strategies evaluated on one instance (paired comparison).
struct DrawMetrics {
  MetricsReport<double> report[4];  // indexed by Strategy
  double rounds[4] = {};            // read only for evaluated strategies
  bool present[4] = {false, false, false, false};
};

/// Metrics of every requested strategy on one concrete instance.
DrawMetrics evaluate_draw(const Instance<double>& inst, const SweepConfig& cfg);

/// Runs the Monte-Carlo sweep. Instances are generated from seeds derived
/// per (axis value, draw), so output is independent of worker count and
/// evaluation order; rows come out sorted by (axis value, strategy).
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

}  // namespace feat
