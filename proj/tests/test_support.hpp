#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "feat/model.hpp"
#include "feat/rng.hpp"
#include "feat/types.hpp"

namespace feat::test {

inline Instance<double> random_instance(std::mt19937_64& eng, int n_users, int n_carriers,
                                        double snr_db) {
  return generate_instance({n_users, n_carriers, snr_db, eng()});
}

/// Budget-respecting allocation with exponential-proportional shares.
inline Matrix<double> random_feasible_allocation(std::mt19937_64& eng,
                                                 const Instance<double>& inst) {
  Matrix<double> p(inst.users(), inst.carriers());
  for (Index n = 0; n < inst.users(); ++n) {
    double total = 0;
    for (Index k = 0; k < inst.carriers(); ++k) {
      p(n, k) = rng::unit_exponential(eng) + 1e-12;
      total += p(n, k);
    }
    p.row(n) *= inst.budgets[n] / total;
  }
  return p;
}

/// Exhaustive oracle for the slot game: can every candidate be placed on a
/// distinct slot no deeper than the deepest position of its sorted
/// disutility row whose value still reaches `alpha`?
inline bool slots_feasible(const Matrix<double>& disutility, const std::vector<Index>& candidates,
                           double alpha) {
  const Index n_carriers = disutility.cols();
  std::vector<Index> deadline;  // qualifying-entry count per candidate
  for (Index u : candidates) {
    std::vector<double> row(n_carriers);
    for (Index k = 0; k < n_carriers; ++k) row[k] = disutility(u, k);
    std::sort(row.begin(), row.end(), std::greater<double>());
    Index q = 0;
    while (q < n_carriers && row[q] >= alpha) ++q;
    deadline.push_back(q);
  }
  // Backtracking over all injective slot assignments.
  std::vector<bool> used(n_carriers, false);
  std::function<bool(size_t)> place = [&](size_t i) -> bool {
    if (i == deadline.size()) return true;
    for (Index s = 0; s < deadline[i]; ++s) {
      if (used[s]) continue;
      used[s] = true;
      if (place(i + 1)) return true;
      used[s] = false;
    }
    return false;
  };
  return place(0);
}

/// Simulates the Phase-A bisection with feasibility decided by the
/// exhaustive oracle; returns the last feasible lower bound.
inline double bisection_oracle(const Matrix<double>& disutility,
                               const std::vector<Index>& candidates, double delta) {
  double lower = 0, upper = 1, best = 0;
  while (upper - lower >= delta) {
    const double trial = (upper + lower) / 2;
    if (slots_feasible(disutility, candidates, trial)) {
      lower = trial;
      best = trial;
    } else {
      upper = trial;
    }
  }
  return best;
}

}  // namespace feat::test
