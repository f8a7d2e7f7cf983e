#include "feat/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "feat/rng.hpp"
#include "feat/trace_io.hpp"

namespace feat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double nan_mean(const Vector<double>& v) {
  double sum = 0;
  Index count = 0;
  for (Index i = 0; i < v.size(); ++i)
    if (!std::isnan(v[i])) {
      sum += v[i];
      ++count;
    }
  return count ? sum / double(count) : kNaN;
}

/// Accumulates a mean over the draws where the quantity is defined.
struct MeanAcc {
  double sum = 0;
  long count = 0;
  void add(double v) {
    if (!std::isnan(v)) {
      sum += v;
      ++count;
    }
  }
  double mean() const { return count ? sum / double(count) : kNaN; }
};

bool wants(const SweepConfig& cfg, Strategy s) {
  return std::find(cfg.strategies.begin(), cfg.strategies.end(), s) != cfg.strategies.end();
}

void resolve_point(const SweepConfig& cfg, double axis_value, int& n, int& k, double& snr) {
  n = cfg.n_users;
  k = cfg.n_carriers;
  snr = cfg.snr_db;
  switch (cfg.axis) {
    case SweepAxis::K: k = int(axis_value); break;
    case SweepAxis::N: n = int(axis_value); break;
    case SweepAxis::SNR: snr = axis_value; break;
  }
}

}  // namespace

DrawMetrics evaluate_draw(const Instance<double>& inst, const SweepConfig& cfg) {
  DrawMetrics dm;
  const bool need_nash = wants(cfg, Strategy::nash) || wants(cfg, Strategy::optimal);

  if (wants(cfg, Strategy::feat)) {
    const auto out = run_feat(inst, cfg.feat_params);
    auto& rep = dm.report[int(Strategy::feat)];
    const auto utilities = utilities_noise(inst, out.powers.powers);
    rep.welfare = utilities.sum();
    rep.fairness_ratio = fairness_ratio(utilities, out.assignment);
    rep.ee = energy_efficiency(inst, out.powers.powers, cfg.ee_rate_bps, cfg.ee_exponent);
    const auto stats = served_and_coordination(out.assignment);
    rep.served_fraction = stats.served_fraction;
    rep.no_coordination = stats.no_coordination;
    rep.robustness = robustness_ratio(inst, out).mean_ratio;
    const auto bounds = prop2_bounds(inst, out.alpha_star_1);
    rep.omega = bounds.defined ? bounds.omega : kNaN;
    rep.theta_max = bounds.theta_max;
    rep.theta_min = bounds.theta_min;
    rep.alpha_star_1 = out.alpha_star_1;
    dm.rounds[int(Strategy::feat)] = out.rounds;
    dm.present[int(Strategy::feat)] = true;
  }

  if (need_nash) {
    const auto nash = nash_iwf(inst, cfg.nash_cfg);
    const auto assignment = support_assignment(nash.alloc.powers);
    const auto stats = served_and_coordination(assignment);
    const auto ee = energy_efficiency(inst, nash.alloc.powers, cfg.ee_rate_bps, cfg.ee_exponent);

    if (wants(cfg, Strategy::nash)) {
      auto& rep = dm.report[int(Strategy::nash)];
      const auto utilities = utilities_noise(inst, nash.alloc.powers);
      rep.welfare = utilities.sum();
      rep.fairness_ratio = fairness_ratio(utilities, assignment);
      rep.ee = ee;
      rep.served_fraction = stats.served_fraction;
      rep.no_coordination = stats.no_coordination;
      dm.rounds[int(Strategy::nash)] = nash.rounds;
      dm.present[int(Strategy::nash)] = true;
    }
    if (wants(cfg, Strategy::optimal)) {
      auto& rep = dm.report[int(Strategy::optimal)];
      const auto utilities = optimal_utilities(inst, nash.alloc);
      rep.welfare = utilities.sum();
      rep.fairness_ratio = fairness_ratio(utilities, assignment);
      rep.ee = ee;
      rep.served_fraction = stats.served_fraction;
      rep.no_coordination = stats.no_coordination;
      dm.rounds[int(Strategy::optimal)] = nash.rounds;
      dm.present[int(Strategy::optimal)] = true;
    }
  }

  if (wants(cfg, Strategy::pooling)) {
    const auto pool = spectrum_pooling(inst);
    auto& rep = dm.report[int(Strategy::pooling)];
    const auto utilities = utilities_noise(inst, pool.alloc.powers);
    rep.welfare = utilities.sum();
    rep.fairness_ratio = fairness_ratio(utilities, pool.assignment);
    rep.ee = energy_efficiency(inst, pool.alloc.powers, cfg.ee_rate_bps, cfg.ee_exponent);
    const auto stats = served_and_coordination(pool.assignment);
    rep.served_fraction = stats.served_fraction;
    rep.no_coordination = stats.no_coordination;
    dm.rounds[int(Strategy::pooling)] = kNaN;
    dm.present[int(Strategy::pooling)] = true;
  }
  return dm;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<SweepRow> rows;

  const int workers =
      cfg.jobs > 0 ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());

  for (const double axis_value : cfg.axis_values) {
    int n_users, n_carriers;
    double snr;
    resolve_point(cfg, axis_value, n_users, n_carriers, snr);

    std::vector<DrawMetrics> draws(cfg.draws);
    auto eval_one = [&](int d) {
      const InstanceGenConfig gen{n_users, n_carriers, snr,
                                  rng::derive_seed(cfg.seed, axis_value, std::uint64_t(d))};
      draws[d] = evaluate_draw(generate_instance(gen), cfg);
    };
    if (workers == 1 || cfg.draws == 1) {
      for (int d = 0; d < cfg.draws; ++d) eval_one(d);
    } else {
      std::atomic<int> next{0};
      std::vector<std::thread> pool;
      for (int w = 0; w < std::min(workers, cfg.draws); ++w)
        pool.emplace_back([&] {
          for (int d = next.fetch_add(1); d < cfg.draws; d = next.fetch_add(1)) eval_one(d);
        });
      for (auto& t : pool) t.join();
    }

    // Reduce in draw order so worker count never changes the output.
    for (const Strategy s :
         {Strategy::feat, Strategy::nash, Strategy::optimal, Strategy::pooling}) {
      if (!wants(cfg, s)) continue;
      SweepRow row;
      row.axis = axis_value;
      row.strategy = s;

      double welfare_sum = 0, welfare_sq = 0;
      MeanAcc fairness, ee, served, robustness, omega, rounds;
      long nocoord = 0;
      for (const auto& dm : draws) {
        const auto& rep = dm.report[int(s)];
        welfare_sum += rep.welfare;
        welfare_sq += rep.welfare * rep.welfare;
        fairness.add(rep.fairness_ratio);
        ee.add(nan_mean(rep.ee));
        served.add(rep.served_fraction);
        nocoord += rep.no_coordination ? 1 : 0;
        robustness.add(rep.robustness);
        omega.add(rep.omega);
        rounds.add(dm.rounds[int(s)]);
      }
      const double d = double(cfg.draws);
      row.mean_welfare = welfare_sum / d;
      const double var =
          cfg.draws > 1
              ? std::max(0.0, (welfare_sq - welfare_sum * welfare_sum / d) / (d - 1))
              : 0.0;
      row.se_welfare = std::sqrt(var / d);
      row.mean_fairness = fairness.mean();
      row.mean_ee = ee.mean();
      row.served = served.mean();
      row.nocoord_prob = double(nocoord) / d;
      row.mean_robustness = robustness.mean();
      row.mean_omega = omega.mean();
      row.mean_rounds = rounds.mean();
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string csv_field(double v) { return std::isnan(v) ? std::string() : format_number(v); }

// RFC-4180: quote fields containing separators or quotes, double the quotes.
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "axis,strategy,mean_welfare,se_welfare,mean_fairness,mean_ee,served,"
        "nocoord_prob,mean_robustness,mean_omega,mean_rounds\n";
  for (const auto& r : rows) {
    os << csv_field(r.axis) << ',' << csv_escape(to_string(r.strategy)) << ','
       << csv_field(r.mean_welfare)
       << ',' << csv_field(r.se_welfare) << ',' << csv_field(r.mean_fairness) << ','
       << csv_field(r.mean_ee) << ',' << csv_field(r.served) << ',' << csv_field(r.nocoord_prob)
       << ',' << csv_field(r.mean_robustness) << ',' << csv_field(r.mean_omega) << ','
       << csv_field(r.mean_rounds) << '\n';
  }
}

}  // namespace feat
