#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "feat/rng.hpp"
#include "feat/types.hpp"

namespace feat {

namespace detail {

/// log2(1 + x), accurate for small x.
template <typename Scalar>
Scalar log2_1p(Scalar x) {
  return Scalar(std::log1p(double(x)) / std::numbers::ln2);
}

template <typename Scalar, typename Derived>
void check_dims(const Instance<Scalar>& inst, const Eigen::MatrixBase<Derived>& powers) {
  static_assert(std::is_same_v<typename Derived::Scalar, Scalar>,
                "power matrix scalar must match the instance scalar");
  if (powers.rows() != inst.users() || powers.cols() != inst.carriers())
    throw std::invalid_argument("power matrix dimensions do not match instance");
}

}  // namespace detail

struct InstanceGenConfig {
  int n_users = 1;
  int n_carriers = 1;
  double snr_db = 0.0;     // 10*log10(budget / noise_power)
  std::uint64_t seed = 0;

  void validate() const {
    if (n_users < 1 || n_carriers < 1)
      throw std::invalid_argument("instance config: n_users and n_carriers must be >= 1");
    if (!std::isfinite(snr_db))
      throw std::invalid_argument("instance config: snr_db must be finite");
  }
};

/// Draws one channel realization: gains i.i.d. unit-mean exponential,
/// noise power 1, equal budgets 10^(snr_db/10). Pure function of the
/// config; the same seed reproduces the instance bit for bit.
inline Instance<double> generate_instance(const InstanceGenConfig& cfg) {
  cfg.validate();
  std::mt19937_64 eng(cfg.seed);
  Instance<double> inst;
  inst.gains.resize(cfg.n_users, cfg.n_carriers);
  for (Index n = 0; n < cfg.n_users; ++n)
    for (Index k = 0; k < cfg.n_carriers; ++k)
      inst.gains(n, k) = rng::unit_exponential(eng);
  inst.noise_power = 1.0;
  inst.budgets = Vector<double>::Constant(cfg.n_users, std::pow(10.0, cfg.snr_db / 10.0));
  return inst;
}

/// Spectral efficiency of user n in bits/s/Hz when the receiver treats all
/// other users' signals as noise.
template <typename Scalar, typename Derived>
Scalar utility_noise(const Instance<Scalar>& inst, const Eigen::MatrixBase<Derived>& powers,
                     Index n) {
  detail::check_dims(inst, powers);
  if (n < 0 || n >= inst.users()) throw std::out_of_range("utility_noise: user index");
  Scalar total(0);
  for (Index k = 0; k < inst.carriers(); ++k) {
    const Scalar own = inst.gains(n, k) * powers(n, k);
    if (!(own > Scalar(0))) continue;
    const Scalar received = inst.gains.col(k).dot(powers.col(k));
    total += detail::log2_1p(own / (inst.noise_power + (received - own)));
  }
  return total;
}

/// All users' treat-interference-as-noise rates in one pass.
template <typename Scalar, typename Derived>
Vector<Scalar> utilities_noise(const Instance<Scalar>& inst,
                               const Eigen::MatrixBase<Derived>& powers) {
  detail::check_dims(inst, powers);
  Vector<Scalar> out = Vector<Scalar>::Zero(inst.users());
  for (Index k = 0; k < inst.carriers(); ++k) {
    Scalar received(0);
    for (Index n = 0; n < inst.users(); ++n) received += inst.gains(n, k) * powers(n, k);
    for (Index n = 0; n < inst.users(); ++n) {
      const Scalar own = inst.gains(n, k) * powers(n, k);
      if (own > Scalar(0))
        out[n] += detail::log2_1p(own / (inst.noise_power + (received - own)));
    }
  }
  return out;
}

namespace detail {
inline void check_permutation(std::span<const Index> order, Index n_users) {
  if (Index(order.size()) != n_users)
    throw std::invalid_argument("decoding order must list every user exactly once");
  std::vector<bool> seen(n_users, false);
  for (Index u : order) {
    if (u < 0 || u >= n_users || seen[u])
      throw std::invalid_argument("decoding order is not a permutation of the users");
    seen[u] = true;
  }
}
}  // namespace detail

/// Per-user rates under successive interference cancellation: the user at
/// position i of `order` sees only the users at positions < i as
/// interference (they are decoded after him and not yet cancelled).
template <typename Scalar, typename Derived>
Vector<Scalar> utilities_sic(const Instance<Scalar>& inst,
                             const Eigen::MatrixBase<Derived>& powers,
                             std::span<const Index> order) {
  detail::check_dims(inst, powers);
  detail::check_permutation(order, inst.users());
  Vector<Scalar> out = Vector<Scalar>::Zero(inst.users());
  for (Index k = 0; k < inst.carriers(); ++k) {
    Scalar predecessors(0);
    for (Index u : order) {
      const Scalar own = inst.gains(u, k) * powers(u, k);
      if (own > Scalar(0))
        out[u] += detail::log2_1p(own / (inst.noise_power + predecessors));
      predecessors += own;
    }
  }
  return out;
}

template <typename Scalar, typename Derived>
Scalar utility_sic(const Instance<Scalar>& inst, const Eigen::MatrixBase<Derived>& powers,
                   Index n, std::span<const Index> order) {
  if (n < 0 || n >= inst.users()) throw std::out_of_range("utility_sic: user index");
  return utilities_sic(inst, powers, order)[n];
}

/// The natural decoding order 1..N (user 1 interference-free).
inline std::vector<Index> identity_order(Index n_users) {
  std::vector<Index> order(n_users);
  for (Index i = 0; i < n_users; ++i) order[i] = i;
  return order;
}

/// Sum information rate of the multiple access channel at this allocation.
template <typename Scalar, typename Derived>
Scalar sum_capacity(const Instance<Scalar>& inst, const Eigen::MatrixBase<Derived>& powers) {
  detail::check_dims(inst, powers);
  Scalar total(0);
  for (Index k = 0; k < inst.carriers(); ++k) {
    Scalar received(0);
    for (Index n = 0; n < inst.users(); ++n) received += inst.gains(n, k) * powers(n, k);
    total += detail::log2_1p(received / inst.noise_power);
  }
  return total;
}

/// Nonnegative powers; every user either stays silent or spends his whole
/// budget (within rel_tol).
template <typename Scalar, typename Derived>
bool is_feasible_allocation(const Instance<Scalar>& inst,
                            const Eigen::MatrixBase<Derived>& powers,
                            Scalar rel_tol = Scalar(1e-9)) {
  if (powers.rows() != inst.users() || powers.cols() != inst.carriers()) return false;
  for (Index n = 0; n < inst.users(); ++n) {
    Scalar total(0);
    for (Index k = 0; k < inst.carriers(); ++k) {
      if (powers(n, k) < Scalar(0)) return false;
      total += powers(n, k);
    }
    if (total > Scalar(0) &&
        std::abs(double(total - inst.budgets[n])) > double(rel_tol * inst.budgets[n]))
      return false;
  }
  return true;
}

}  // namespace feat
