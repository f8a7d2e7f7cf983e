#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "feat/baselines.hpp"
#include "feat/feat.hpp"
#include "feat/model.hpp"
#include "feat/types.hpp"

namespace feat {

template <typename Scalar = double>
struct Prop2Bounds {
  Scalar omega{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar theta_max{0};
  Scalar theta_min{0};
  Scalar fairness_bound{std::numeric_limits<Scalar>::quiet_NaN()};
  bool defined = false;  // false when alpha_star_1 == 0 (bounds blow up)
};

/// Worst-case bound constants built from the budgets, the best gains and
/// the round-1 bisection value. Natural logarithms throughout:
///   Omega = Tmax / (s^2 a ln(1 + Tmax/s^2)) + (1 - a) / (a^2 ln(1 + Tmin/s^2))
/// and the utility-spread bound Tmax / (s^2 ln(1 + a Tmin/s^2)).
template <typename Scalar>
Prop2Bounds<Scalar> prop2_bounds(const Instance<Scalar>& inst, Scalar alpha_star_1) {
  if (alpha_star_1 < Scalar(0) || alpha_star_1 > Scalar(1))
    throw std::invalid_argument("prop2_bounds: alpha_star_1 outside [0, 1]");
  Prop2Bounds<Scalar> b;
  b.theta_max = -std::numeric_limits<Scalar>::infinity();
  b.theta_min = std::numeric_limits<Scalar>::infinity();
  for (Index n = 0; n < inst.users(); ++n) {
    const Scalar best = inst.budgets[n] * inst.gains.row(n).maxCoeff();
    b.theta_max = std::max(b.theta_max, best);
    b.theta_min = std::min(b.theta_min, best);
  }
  if (!(alpha_star_1 > Scalar(0))) return b;  // undefined bounds, reported not thrown

  const Scalar s2 = inst.noise_power;
  const Scalar a = alpha_star_1;
  b.omega = b.theta_max / (s2 * a * Scalar(std::log1p(double(b.theta_max / s2)))) +
            (Scalar(1) - a) / (a * a * Scalar(std::log1p(double(b.theta_min / s2))));
  b.fairness_bound = b.theta_max / (s2 * Scalar(std::log1p(double(a * b.theta_min / s2))));
  b.defined = true;
  return b;
}

/// Per-user energy efficiency in bits per joule,
///   EE_n = rate * sum_k f(sinr_n^k) / sum_k p_n^k,
/// with the packet-success curve f(x) = (1 - e^-x)^exponent. Users that
/// spend no power get NaN (undefined, not zero).
template <typename Scalar, typename Derived>
Vector<Scalar> energy_efficiency(const Instance<Scalar>& inst,
                                 const Eigen::MatrixBase<Derived>& powers, Scalar rate_bps,
                                 Scalar exponent = Scalar(80)) {
  detail::check_dims(inst, powers);
  if (!(rate_bps > Scalar(0)))
    throw std::invalid_argument("energy_efficiency: rate must be positive");
  Vector<Scalar> ee(inst.users());
  for (Index n = 0; n < inst.users(); ++n) {
    const Scalar spent = powers.row(n).sum();
    if (!(spent > Scalar(0))) {
      ee[n] = std::numeric_limits<Scalar>::quiet_NaN();
      continue;
    }
    Scalar success(0);
    for (Index k = 0; k < inst.carriers(); ++k) {
      const Scalar own = inst.gains(n, k) * powers(n, k);
      if (!(own > Scalar(0))) continue;
      const Scalar received = inst.gains.col(k).dot(powers.col(k));
      const Scalar sinr = own / (inst.noise_power + (received - own));
      success += Scalar(std::pow(-std::expm1(-double(sinr)), double(exponent)));
    }
    ee[n] = rate_bps * success / spent;
  }
  return ee;
}

template <typename Scalar = double>
struct RobustnessReport {
  Scalar mean_ratio{std::numeric_limits<Scalar>::quiet_NaN()};  // over served users
  Index served = 0;
  Index unserved = 0;  // would jump from zero utility; kept out of the mean
};

/// Incentive to deviate: each served user compares sticking to his FEAT
/// allocation against water-filling over all K carriers with everyone else
/// frozen. The deviation is a best response, so every ratio is <= 1.
template <typename Scalar>
RobustnessReport<Scalar> robustness_ratio(const Instance<Scalar>& inst,
                                          const FeatOutput<Scalar>& out) {
  RobustnessReport<Scalar> rep;
  Scalar sum(0);
  for (Index n = 0; n < inst.users(); ++n) {
    if (out.assignment.lists[n].empty()) {
      ++rep.unserved;
      continue;
    }
    const Scalar stick = utility_noise(inst, out.powers.powers, n);
    Matrix<Scalar> deviated = out.powers.powers;
    deviated.row(n) = best_response(inst, out.powers.powers, n).transpose();
    const Scalar deviate = utility_noise(inst, deviated, n);
    sum += stick / deviate;
    ++rep.served;
  }
  if (rep.served == 0) throw std::invalid_argument("robustness_ratio: nobody is served");
  rep.mean_ratio = sum / Scalar(rep.served);
  return rep;
}

struct ServiceStats {
  double served_fraction = 0;   // users with a nonempty carrier list
  bool no_coordination = false; // true when some carrier is used by >= 2 users
};

inline ServiceStats served_and_coordination(const CarrierAssignment& assignment) {
  ServiceStats s;
  if (!assignment.lists.empty())
    s.served_fraction = double(assignment.served_count()) / double(assignment.lists.size());
  s.no_coordination = !assignment.disjoint();
  return s;
}

/// Everything the experiment runner reports for one strategy on one
/// instance. NaN marks quantities a strategy does not define.
template <typename Scalar = double>
struct MetricsReport {
  Scalar welfare{0};
  Scalar fairness_ratio{std::numeric_limits<Scalar>::quiet_NaN()};  // worst/best among served
  Vector<Scalar> ee;
  Scalar served_fraction{0};
  bool no_coordination = false;
  Scalar robustness{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar omega{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar theta_max{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar theta_min{std::numeric_limits<Scalar>::quiet_NaN()};
  Scalar alpha_star_1{std::numeric_limits<Scalar>::quiet_NaN()};
};

/// min/max utility over users considered served (positive utility mass).
template <typename Scalar>
Scalar fairness_ratio(const Vector<Scalar>& utilities, const CarrierAssignment& assignment) {
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  bool any = false;
  for (Index n = 0; n < utilities.size(); ++n) {
    if (assignment.lists[n].empty()) continue;
    lo = std::min(lo, utilities[n]);
    hi = std::max(hi, utilities[n]);
    any = true;
  }
  if (!any || !(hi > Scalar(0))) return std::numeric_limits<Scalar>::quiet_NaN();
  return lo / hi;
}

}  // namespace feat
