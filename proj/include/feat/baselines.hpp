#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "feat/model.hpp"
#include "feat/types.hpp"
#include "feat/waterfill.hpp"

namespace feat {

struct NashConfig {
  double tolerance = 1e-8;  // per-round max power change, relative to the budget
  int max_rounds = 1000;

  void validate() const {
    if (!(tolerance > 0)) throw std::invalid_argument("nash config: tolerance must be > 0");
    if (max_rounds < 1) throw std::invalid_argument("nash config: max_rounds must be >= 1");
  }
};

/// Water-filling best response of one user against everyone else's current
/// powers, spread over all K carriers.
template <typename Scalar>
Vector<Scalar> best_response(const Instance<Scalar>& inst, const Matrix<Scalar>& powers,
                             Index user) {
  const auto ch = interference_channel(inst, powers, user);
  const auto wf = waterfill(ch);
  Vector<Scalar> row = Vector<Scalar>::Zero(inst.carriers());
  for (Index i = 0; i < Index(ch.carrier_ids.size()); ++i)
    row[ch.carrier_ids[i]] = wf.powers[i];
  return row;
}

template <typename Scalar = double>
struct NashResult {
  PowerAllocation<Scalar> alloc;
  bool converged = false;
  int rounds = 0;
};

/// Iterative water-filling: round-robin best responses from an
/// interference-free start until a full round moves no power coordinate by
/// tolerance * budget, or the round cap is hit (reported, never thrown).
template <typename Scalar>
NashResult<Scalar> nash_iwf(const Instance<Scalar>& inst, const NashConfig& cfg = {}) {
  inst.validate();
  cfg.validate();

  NashResult<Scalar> res;
  res.alloc.powers = Matrix<Scalar>::Zero(inst.users(), inst.carriers());
  for (Index n = 0; n < inst.users(); ++n)
    res.alloc.powers.row(n) = best_response(inst, res.alloc.powers, n).transpose();

  for (res.rounds = 1; res.rounds <= cfg.max_rounds; ++res.rounds) {
    Scalar worst(0);
    for (Index n = 0; n < inst.users(); ++n) {
      const Vector<Scalar> next = best_response(inst, res.alloc.powers, n);
      const Scalar change =
          (next.transpose() - res.alloc.powers.row(n)).cwiseAbs().maxCoeff() / inst.budgets[n];
      worst = std::max(worst, change);
      res.alloc.powers.row(n) = next.transpose();
    }
    if (worst < Scalar(cfg.tolerance)) {
      res.converged = true;
      return res;
    }
  }
  res.rounds = cfg.max_rounds;
  return res;
}

/// Per-user rates of the "optimal" receiver: successive interference
/// cancellation at the given profile, decoded so that user 1 ends up
/// interference-free. Sums to sum_capacity for any profile.
template <typename Scalar>
Vector<Scalar> optimal_utilities(const Instance<Scalar>& inst, const PowerAllocation<Scalar>& alloc) {
  const auto order = identity_order(inst.users());
  return utilities_sic(inst, alloc.powers, order);
}

template <typename Scalar = double>
struct PoolingResult {
  CarrierAssignment assignment;
  PowerAllocation<Scalar> alloc;
};

/// Spectrum pooling: users queue in index order, each water-fills over the
/// carriers nobody claimed yet and takes exclusive ownership of those that
/// get positive power. Latecomers may find the pool empty.
template <typename Scalar>
PoolingResult<Scalar> spectrum_pooling(const Instance<Scalar>& inst) {
  inst.validate();
  PoolingResult<Scalar> res;
  res.assignment.lists.resize(inst.users());
  res.alloc.powers = Matrix<Scalar>::Zero(inst.users(), inst.carriers());

  std::vector<Index> pool;
  for (Index k = 0; k < inst.carriers(); ++k) pool.push_back(k);

  for (Index n = 0; n < inst.users(); ++n) {
    const auto ch = noise_only_channel<Scalar>(inst, n, pool);
    if (ch.carrier_ids.empty()) continue;  // nothing left (or no usable gain)
    const auto wf = waterfill(ch);
    for (Index i = 0; i < Index(ch.carrier_ids.size()); ++i) {
      if (wf.powers[i] > Scalar(0)) {
        const Index k = ch.carrier_ids[i];
        res.assignment.lists[n].push_back(k);
        res.alloc.powers(n, k) = wf.powers[i];
        pool.erase(std::find(pool.begin(), pool.end(), k));
      }
    }
  }
  res.assignment.unassigned = pool;
  return res;
}

}  // namespace feat
