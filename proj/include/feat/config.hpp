#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "feat/baselines.hpp"
#include "feat/feat.hpp"

namespace feat {

enum class Strategy { feat, nash, optimal, pooling };
enum class SweepAxis { K, N, SNR };

std::string to_string(Strategy s);
std::string to_string(SweepAxis a);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One Monte-Carlo experiment: sweep one axis, hold the other two fixed,
/// evaluate the selected strategies on the same instances per point.
struct SweepConfig {
  SweepAxis axis = SweepAxis::K;
  std::vector<double> axis_values;  // nonempty, strictly increasing
  int n_users = 0;                  // fixed unless axis == N
  int n_carriers = 0;               // fixed unless axis == K
  double snr_db = 0;                // fixed unless axis == SNR
  int draws = 500;
  std::uint64_t seed = 0;
  std::vector<Strategy> strategies{Strategy::feat, Strategy::nash, Strategy::optimal,
                                   Strategy::pooling};
  FeatParams<double> feat_params{};
  NashConfig nash_cfg{};
  double ee_rate_bps = 1e6;
  double ee_exponent = 80;
  int jobs = 0;  // 0 = one worker per hardware thread

  void validate() const;  // throws ConfigError
};

/// Parses the flat key-value format (`key = value`, `#` comments).
/// Unknown keys, bad values and broken invariants raise ConfigError with
/// `name:line:` prefixes where a line is attributable.
SweepConfig parse_sweep_config(std::istream& in, const std::string& name);

SweepConfig load_sweep_config(const std::string& path);

}  // namespace feat
