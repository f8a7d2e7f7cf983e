#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace feat {

using Index = Eigen::Index;

template <typename Scalar = double>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar = double>
using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

/// One channel realization of the K-carrier, N-user Gaussian multiple
/// access channel: linear power gains, receiver noise power and per-user
/// transmit power budgets.
template <typename Scalar = double>
struct Instance {
  Matrix<Scalar> gains;     // N x K, g[n][k] >= 0
  Scalar noise_power{1};    // sigma^2 > 0, common to all carriers
  Vector<Scalar> budgets;   // length N, all > 0

  Index users() const { return gains.rows(); }
  Index carriers() const { return gains.cols(); }

  void validate() const {
    if (gains.rows() < 1 || gains.cols() < 1)
      throw std::invalid_argument("instance: gains matrix must be at least 1x1");
    if (budgets.size() != gains.rows())
      throw std::invalid_argument("instance: budgets length must equal user count");
    if (!(noise_power > Scalar(0)) || !std::isfinite(double(noise_power)))
      throw std::invalid_argument("instance: noise power must be positive and finite");
    for (Index n = 0; n < budgets.size(); ++n)
      if (!(budgets[n] > Scalar(0)) || !std::isfinite(double(budgets[n])))
        throw std::invalid_argument("instance: every budget must be positive and finite");
    for (Index n = 0; n < gains.rows(); ++n) {
      bool any_positive = false;
      for (Index k = 0; k < gains.cols(); ++k) {
        const Scalar g = gains(n, k);
        if (!std::isfinite(double(g)) || g < Scalar(0))
          throw std::invalid_argument("instance: gains must be finite and nonnegative");
        any_positive = any_positive || g > Scalar(0);
      }
      if (!any_positive)
        throw std::invalid_argument("instance: every user needs at least one positive gain");
    }
  }
};

/// N x K transmit power matrix. Feasibility (nonnegativity, budget
/// exhaustion for transmitting users) is checked by is_feasible_allocation.
template <typename Scalar = double>
struct PowerAllocation {
  Matrix<Scalar> powers;  // N x K, p[n][k] >= 0
};

/// Per-user carrier lists plus the set nobody claimed. For FEAT and
/// pooling outputs the lists are pairwise disjoint; support sets of an
/// unrestricted allocation (Nash) may overlap.
struct CarrierAssignment {
  std::vector<std::vector<Index>> lists;  // L_n, carrier indices per user
  std::vector<Index> unassigned;          // L_0

  Index served_count() const {
    Index c = 0;
    for (const auto& l : lists) c += !l.empty();
    return c;
  }

  bool disjoint() const {
    std::vector<Index> seen;
    for (const auto& l : lists) seen.insert(seen.end(), l.begin(), l.end());
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
  }
};

/// Carrier support sets of an arbitrary allocation: user n claims carrier k
/// iff p[n][k] > 0.
template <typename Scalar>
CarrierAssignment support_assignment(const Matrix<Scalar>& powers) {
  CarrierAssignment a;
  a.lists.resize(powers.rows());
  std::vector<bool> used(powers.cols(), false);
  for (Index n = 0; n < powers.rows(); ++n)
    for (Index k = 0; k < powers.cols(); ++k)
      if (powers(n, k) > Scalar(0)) {
        a.lists[n].push_back(k);
        used[k] = true;
      }
  for (Index k = 0; k < powers.cols(); ++k)
    if (!used[k]) a.unassigned.push_back(k);
  return a;
}

}  // namespace feat
