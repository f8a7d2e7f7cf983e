#include "feat/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace feat {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::feat: return "feat";
    case Strategy::nash: return "nash";
    case Strategy::optimal: return "optimal";
    case Strategy::pooling: return "pooling";
  }
  return "?";
}

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::K: return "K";
    case SweepAxis::N: return "N";
    case SweepAxis::SNR: return "SNR";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

struct Location {
  const std::string& name;
  int line;
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const std::string& v, const Location& loc) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) loc.fail("trailing characters after number '" + v + "'");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    loc.fail("expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, const Location& loc) {
  try {
    size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) loc.fail("trailing characters after integer '" + v + "'");
    return i;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    loc.fail("expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const Location& loc) {
  try {
    size_t pos = 0;
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) loc.fail("trailing characters after integer '" + v + "'");
    return i;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    loc.fail("expected an unsigned integer, got '" + v + "'");
  }
}

Strategy parse_strategy(const std::string& v, const Location& loc) {
  if (v == "feat") return Strategy::feat;
  if (v == "nash") return Strategy::nash;
  if (v == "optimal") return Strategy::optimal;
  if (v == "pooling") return Strategy::pooling;
  loc.fail("unknown strategy '" + v + "' (expected feat, nash, optimal or pooling)");
}

SweepAxis parse_axis(const std::string& v, const Location& loc) {
  if (v == "K") return SweepAxis::K;
  if (v == "N") return SweepAxis::N;
  if (v == "SNR") return SweepAxis::SNR;
  loc.fail("unknown sweep_axis '" + v + "' (expected K, N or SNR)");
}

}  // namespace

void SweepConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (axis_values.empty()) fail("axis_values must not be empty");
  for (size_t i = 0; i + 1 < axis_values.size(); ++i)
    if (!(axis_values[i] < axis_values[i + 1]))
      fail("axis_values must be strictly increasing");
  if (axis == SweepAxis::K || axis == SweepAxis::N)
    for (double v : axis_values)
      if (v < 1 || v != std::floor(v)) fail("axis_values for K or N must be positive integers");
  if (axis != SweepAxis::N && n_users < 1) fail("n_users must be >= 1");
  if (axis != SweepAxis::K && n_carriers < 1) fail("n_carriers must be >= 1");
  if (axis != SweepAxis::SNR && !std::isfinite(snr_db)) fail("snr_db must be finite");
  if (draws < 1) fail("draws must be >= 1");
  if (strategies.empty()) fail("strategies must not be empty");
  if (jobs < 0) fail("jobs must be >= 0");
  if (!(ee_rate_bps > 0)) fail("ee_rate_bps must be > 0");
  if (!(ee_exponent > 0)) fail("ee_exponent must be > 0");
  feat_params.validate();
  nash_cfg.validate();
}

SweepConfig parse_sweep_config(std::istream& in, const std::string& name) {
  SweepConfig cfg;
  std::map<std::string, int> seen;
  bool have_axis = false, have_values = false;
  bool have_users = false, have_carriers = false, have_snr = false;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const Location loc{name, line_no};
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) loc.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) loc.fail("missing key before '='");
    if (value.empty()) loc.fail("missing value for key '" + key + "'");
    if (auto [it, inserted] = seen.emplace(key, line_no); !inserted)
      loc.fail("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");

    if (key == "sweep_axis") {
      cfg.axis = parse_axis(value, loc);
      have_axis = true;
    } else if (key == "axis_values") {
      cfg.axis_values.clear();
      for (const auto& item : split_list(value)) cfg.axis_values.push_back(parse_double(item, loc));
      if (cfg.axis_values.empty()) loc.fail("axis_values must not be empty");
      have_values = true;
    } else if (key == "n_users") {
      cfg.n_users = int(parse_int(value, loc));
      have_users = true;
    } else if (key == "n_carriers") {
      cfg.n_carriers = int(parse_int(value, loc));
      have_carriers = true;
    } else if (key == "snr_db") {
      cfg.snr_db = parse_double(value, loc);
      have_snr = true;
    } else if (key == "draws") {
      cfg.draws = int(parse_int(value, loc));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, loc);
    } else if (key == "strategies") {
      cfg.strategies.clear();
      for (const auto& item : split_list(value)) {
        const Strategy s = parse_strategy(item, loc);
        if (std::find(cfg.strategies.begin(), cfg.strategies.end(), s) == cfg.strategies.end())
          cfg.strategies.push_back(s);
      }
    } else if (key == "delta") {
      cfg.feat_params.delta = parse_double(value, loc);
    } else if (key == "beta") {
      cfg.feat_params.beta = parse_double(value, loc);
    } else if (key == "nash_tolerance") {
      cfg.nash_cfg.tolerance = parse_double(value, loc);
    } else if (key == "nash_max_rounds") {
      cfg.nash_cfg.max_rounds = int(parse_int(value, loc));
    } else if (key == "ee_rate_bps") {
      cfg.ee_rate_bps = parse_double(value, loc);
    } else if (key == "ee_exponent") {
      cfg.ee_exponent = parse_double(value, loc);
    } else if (key == "jobs") {
      cfg.jobs = int(parse_int(value, loc));
    } else {
      loc.fail("unknown key '" + key + "'");
    }
  }

  if (!have_axis) throw ConfigError(name + ": missing required key 'sweep_axis'");
  if (!have_values) throw ConfigError(name + ": missing required key 'axis_values'");
  if (cfg.axis != SweepAxis::N && !have_users)
    throw ConfigError(name + ": missing required key 'n_users'");
  if (cfg.axis != SweepAxis::K && !have_carriers)
    throw ConfigError(name + ": missing required key 'n_carriers'");
  if (cfg.axis != SweepAxis::SNR && !have_snr)
    throw ConfigError(name + ": missing required key 'snr_db'");

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  }
  return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_sweep_config(in, path);
}

}  // namespace feat
