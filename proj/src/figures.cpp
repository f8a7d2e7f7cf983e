#include "feat/figures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "feat/sweep.hpp"
#include "feat/trace_io.hpp"

namespace feat {

namespace {

std::vector<double> seq(double from, double to, double step) {
  std::vector<double> v;
  for (double x = from; x <= to + 1e-9; x += step) v.push_back(x);
  return v;
}

SweepConfig base(SweepAxis axis, std::vector<double> values, int n, int k, double snr,
                 std::vector<Strategy> strategies) {
  SweepConfig cfg;
  cfg.axis = axis;
  cfg.axis_values = std::move(values);
  cfg.n_users = n;
  cfg.n_carriers = k;
  cfg.snr_db = snr;
  cfg.strategies = std::move(strategies);
  cfg.draws = 500;
  cfg.seed = 1;
  return cfg;
}

const std::vector<Strategy> kAll{Strategy::feat, Strategy::nash, Strategy::optimal,
                                 Strategy::pooling};

/// id -> (sweep config, column used for the summary ordering)
struct Preset {
  SweepConfig cfg;
  double SweepRow::* headline;
};

std::map<std::string, Preset> make_presets() {
  std::map<std::string, Preset> p;
  p["welfare_vs_K_snrm10"] = {base(SweepAxis::K, seq(10, 100, 10), 20, 0, -10, kAll),
                              &SweepRow::mean_welfare};
  p["welfare_vs_K_snr10"] = {base(SweepAxis::K, seq(10, 100, 10), 20, 0, 10, kAll),
                             &SweepRow::mean_welfare};
  p["welfare_vs_N_K10"] = {base(SweepAxis::N, seq(5, 40, 5), 0, 10, 10, kAll),
                           &SweepRow::mean_welfare};
  p["welfare_vs_N_K40"] = {base(SweepAxis::N, seq(5, 40, 5), 0, 40, 10, kAll),
                           &SweepRow::mean_welfare};
  p["welfare_vs_SNR"] = {base(SweepAxis::SNR, seq(-10, 20, 5), 20, 40, 0, kAll),
                         &SweepRow::mean_welfare};
  p["ee_vs_N_K10"] = {base(SweepAxis::N, {5, 10, 20, 30, 40}, 0, 10, 10,
                           {Strategy::feat, Strategy::nash, Strategy::pooling}),
                      &SweepRow::mean_ee};
  p["ee_vs_N_K40"] = {base(SweepAxis::N, {5, 10, 20, 30, 40}, 0, 40, 10,
                           {Strategy::feat, Strategy::nash, Strategy::pooling}),
                      &SweepRow::mean_ee};
  p["fairness_vs_N_K40"] = {base(SweepAxis::N, {5, 10, 20, 30}, 0, 40, 10, kAll),
                            &SweepRow::mean_fairness};
  p["fairness_vs_K_N10"] = {base(SweepAxis::K, seq(5, 40, 5), 10, 0, 10, kAll),
                            &SweepRow::mean_fairness};
  p["served"] = {base(SweepAxis::N, {2, 4, 5, 8, 10, 16, 20, 32, 40}, 0, 10, 10,
                      {Strategy::feat}),
                 &SweepRow::served};
  p["nocoord"] = {base(SweepAxis::N, {2, 5, 10, 15, 20}, 0, 10, 10,
                       {Strategy::feat, Strategy::nash}),
                  &SweepRow::nocoord_prob};
  p["robust_vs_K"] = {base(SweepAxis::K, {5, 10, 20, 40}, 5, 0, 10, {Strategy::feat}),
                      &SweepRow::mean_robustness};
  return p;
}

const std::map<std::string, Preset>& presets() {
  static const auto p = make_presets();
  return p;
}

std::string ordering_at(const std::vector<SweepRow>& rows, double axis,
                        double SweepRow::* headline) {
  std::vector<const SweepRow*> at;
  for (const auto& r : rows)
    if (r.axis == axis) at.push_back(&r);
  std::stable_sort(at.begin(), at.end(), [&](const SweepRow* a, const SweepRow* b) {
    const double va = a->*headline, vb = b->*headline;
    if (std::isnan(va)) return false;
    if (std::isnan(vb)) return true;
    return va > vb;
  });
  std::string s;
  for (size_t i = 0; i < at.size(); ++i) {
    if (i) s += " > ";
    s += to_string(at[i]->strategy);
  }
  return s;
}

}  // namespace

std::vector<std::string> figure_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, preset] : presets()) ids.push_back(id);
  return ids;
}

SweepConfig figure_config(const std::string& id) {
  const auto it = presets().find(id);
  if (it == presets().end()) throw ConfigError("unknown figure preset '" + id + "'");
  return it->second.cfg;
}

FigureResult run_figure(const std::string& id, const std::string& out_dir,
                        const FigureOverrides& overrides) {
  const auto it = presets().find(id);
  if (it == presets().end()) throw ConfigError("unknown figure preset '" + id + "'");
  SweepConfig cfg = it->second.cfg;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.draws) cfg.draws = *overrides.draws;
  if (overrides.delta) cfg.feat_params.delta = *overrides.delta;
  if (overrides.beta) cfg.feat_params.beta = *overrides.beta;
  if (overrides.jobs) cfg.jobs = *overrides.jobs;

  const auto rows = run_sweep(cfg);

  std::filesystem::create_directories(out_dir);
  const auto path = (std::filesystem::path(out_dir) / (id + ".csv")).string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_sweep_csv(rows, os);
  os.flush();
  if (!os) throw std::runtime_error("failed while writing " + path);

  std::ostringstream summary;
  summary << id << ": " << to_string(cfg.axis) << "=" << format_number(cfg.axis_values.front())
          << " " << ordering_at(rows, cfg.axis_values.front(), it->second.headline) << " | "
          << to_string(cfg.axis) << "=" << format_number(cfg.axis_values.back()) << " "
          << ordering_at(rows, cfg.axis_values.back(), it->second.headline);

  FigureResult res;
  res.csv_path = path;
  res.summary = summary.str();
  return res;
}

}  // namespace feat
