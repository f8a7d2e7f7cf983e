#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "feat/config.hpp"
#include "feat/figures.hpp"
#include "feat/model.hpp"
#include "feat/sweep.hpp"
#include "feat/trace_io.hpp"

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("FEATSIM_OUT_DIR"); env && *env) return env;
  return "out";
}

std::vector<double> parse_number_list(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) continue;
    size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size()) throw feat::ConfigError("bad number '" + item + "'");
  }
  return out;
}

feat::Instance<double> parse_gains_instance(const std::string& gains_arg,
                                            const std::string& budgets_arg, double noise) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(gains_arg);
  std::string row;
  while (std::getline(ss, row, ';'))
    if (!row.empty()) rows.push_back(parse_number_list(row, ','));
  if (rows.empty()) throw feat::ConfigError("--gains: no rows given");
  for (const auto& r : rows)
    if (r.size() != rows.front().size())
      throw feat::ConfigError("--gains: rows must all have the same length");

  feat::Instance<double> inst;
  inst.gains.resize(feat::Index(rows.size()), feat::Index(rows.front().size()));
  for (size_t n = 0; n < rows.size(); ++n)
    for (size_t k = 0; k < rows[n].size(); ++k)
      inst.gains(feat::Index(n), feat::Index(k)) = rows[n][k];

  auto budgets = parse_number_list(budgets_arg, ',');
  if (budgets.size() == 1) budgets.assign(rows.size(), budgets.front());
  if (budgets.size() != rows.size())
    throw feat::ConfigError("--budgets: need one value, or one per user");
  inst.budgets = Eigen::Map<const feat::Vector<double>>(budgets.data(),
                                                        feat::Index(budgets.size()));
  inst.noise_power = noise;
  inst.validate();
  return inst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FEAT coordinated water-filling simulator"};
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  int jobs = 0;
  std::optional<std::uint64_t> seed;
  std::optional<int> draws;
  std::optional<double> delta, beta;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir, "Output directory (env FEATSIM_OUT_DIR)");
    sub->add_option("--seed", seed, "Master seed override");
    sub->add_option("--draws", draws, "Monte-Carlo draws per sweep point");
    sub->add_option("--delta", delta, "FEAT bisection tolerance");
    sub->add_option("--beta", beta, "FEAT under-service threshold");
    sub->add_option("--jobs", jobs, "Worker threads (0 = all hardware threads)");
  };

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the sweep described by a config file");
  std::string config_path;
  sweep_cmd->add_option("config", config_path, "Key-value config file")->required();
  add_common(sweep_cmd);

  auto* figure_cmd = app.add_subcommand("figure", "Run a named figure preset");
  std::string figure_id;
  bool list_figures = false;
  figure_cmd->add_option("id", figure_id, "Preset id");
  figure_cmd->add_flag("--list", list_figures, "List the available presets");
  add_common(figure_cmd);

  auto* trace_cmd = app.add_subcommand("trace", "Dump the FEAT round trace for one instance");
  std::string gains_arg, budgets_arg = "1";
  double noise = 1.0;
  int tr_users = 0, tr_carriers = 0;
  double tr_snr = 10.0;
  std::uint64_t tr_seed = 1;
  std::string trace_out;
  trace_cmd->add_option("--gains", gains_arg, "Explicit gains, rows ';', entries ','");
  trace_cmd->add_option("--budgets", budgets_arg, "Budgets, one value or one per user");
  trace_cmd->add_option("--noise", noise, "Noise power");
  trace_cmd->add_option("--n-users", tr_users, "Generate: user count");
  trace_cmd->add_option("--n-carriers", tr_carriers, "Generate: carrier count");
  trace_cmd->add_option("--snr-db", tr_snr, "Generate: SNR in dB");
  trace_cmd->add_option("--seed", tr_seed, "Generate: instance seed");
  trace_cmd->add_option("--out", trace_out, "Write the trace to a file instead of stdout");
  trace_cmd->add_option("--delta", delta, "FEAT bisection tolerance");
  trace_cmd->add_option("--beta", beta, "FEAT under-service threshold");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_cmd->parsed()) {
      feat::SweepConfig cfg = feat::load_sweep_config(config_path);
      if (seed) cfg.seed = *seed;
      if (draws) cfg.draws = *draws;
      if (delta) cfg.feat_params.delta = *delta;
      if (beta) cfg.feat_params.beta = *beta;
      if (jobs) cfg.jobs = jobs;
      cfg.validate();

      const auto rows = feat::run_sweep(cfg);
      std::filesystem::create_directories(out_dir);
      const auto path = (std::filesystem::path(out_dir) / "sweep.csv").string();
      std::ofstream os(path, std::ios::binary);
      if (!os) throw std::runtime_error("cannot write " + path);
      feat::write_sweep_csv(rows, os);
      os.flush();
      if (!os) throw std::runtime_error("failed while writing " + path);
      std::cout << path << "\n";
    } else if (figure_cmd->parsed()) {
      if (list_figures) {
        for (const auto& id : feat::figure_ids()) std::cout << id << "\n";
        return 0;
      }
      if (figure_id.empty()) throw feat::ConfigError("figure: missing preset id (try --list)");
      feat::FigureOverrides ov;
      ov.seed = seed;
      ov.draws = draws;
      ov.delta = delta;
      ov.beta = beta;
      if (jobs) ov.jobs = jobs;
      const auto res = feat::run_figure(figure_id, out_dir, ov);
      std::cout << res.summary << "\n";
    } else if (trace_cmd->parsed()) {
      feat::Instance<double> inst;
      if (!gains_arg.empty()) {
        inst = parse_gains_instance(gains_arg, budgets_arg, noise);
      } else if (tr_users > 0 && tr_carriers > 0) {
        inst = feat::generate_instance({tr_users, tr_carriers, tr_snr, tr_seed});
      } else {
        throw feat::ConfigError("trace: give --gains or both --n-users and --n-carriers");
      }
      feat::FeatParams<double> params;
      if (delta) params.delta = *delta;
      if (beta) params.beta = *beta;
      const auto out = feat::run_feat(inst, params);
      if (trace_out.empty()) {
        feat::write_trace(out, std::cout);
      } else {
        std::ofstream os(trace_out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + trace_out);
        feat::write_trace(out, os);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
