#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "feat/types.hpp"

namespace feat {

/// A single-user water-filling sub-problem: per-carrier noise floors
/// (sigma^2 + interference)/gain over the allowed carriers. Carriers with
/// zero gain have an infinite floor and must be excluded before
/// construction.
template <typename Scalar = double>
struct EffectiveChannel {
  Vector<Scalar> effective_noise;   // floors, all finite and > 0
  std::vector<Index> carrier_ids;   // distinct, aligned with the floors
  Scalar budget{1};
};

template <typename Scalar = double>
struct WaterfillResult {
  Vector<Scalar> powers;  // aligned with EffectiveChannel::carrier_ids
  Scalar water_level{0};
};

/// Exact water-filling: powers[k] = (level - floor[k])^+, sum = budget.
/// The active set comes from one cumulative scan over the floors sorted
/// ascending (ties broken by carrier index), no iteration involved.
template <typename Scalar>
WaterfillResult<Scalar> waterfill(const EffectiveChannel<Scalar>& ch) {
  const Index n = ch.effective_noise.size();
  if (n == 0) throw std::invalid_argument("waterfill: empty carrier set");
  for (Index i = 0; i < n; ++i)
    if (!(ch.effective_noise[i] > Scalar(0)) || !std::isfinite(double(ch.effective_noise[i])))
      throw std::invalid_argument("waterfill: floors must be positive and finite");

  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index(0));
  std::sort(idx.begin(), idx.end(), [&](Index a, Index b) {
    if (ch.effective_noise[a] != ch.effective_noise[b])
      return ch.effective_noise[a] < ch.effective_noise[b];
    const Index ca = ch.carrier_ids.empty() ? a : ch.carrier_ids[a];
    const Index cb = ch.carrier_ids.empty() ? b : ch.carrier_ids[b];
    return ca < cb;
  });

  // Largest prefix of sorted floors whose common level stays above the
  // last floor; once the test fails it fails for every longer prefix.
  Scalar level(0);
  Scalar floor_sum(0);
  for (Index c = 0; c < n; ++c) {
    floor_sum += ch.effective_noise[idx[c]];
    const Scalar trial = (ch.budget + floor_sum) / Scalar(c + 1);
    if (trial > ch.effective_noise[idx[c]])
      level = trial;
    else
      break;
  }

  WaterfillResult<Scalar> res;
  res.water_level = level;
  res.powers = (level - ch.effective_noise.array()).cwiseMax(Scalar(0)).matrix();
  return res;
}

/// Interference-free floors sigma^2/g over an allowed carrier set;
/// zero-gain carriers are dropped (infinitely noisy).
template <typename Scalar>
EffectiveChannel<Scalar> noise_only_channel(const Instance<Scalar>& inst, Index user,
                                            std::span<const Index> allowed) {
  EffectiveChannel<Scalar> ch;
  ch.budget = inst.budgets[user];
  std::vector<Scalar> floors;
  for (Index k : allowed) {
    const Scalar g = inst.gains(user, k);
    if (g > Scalar(0)) {
      floors.push_back(inst.noise_power / g);
      ch.carrier_ids.push_back(k);
    }
  }
  ch.effective_noise = Eigen::Map<const Vector<Scalar>>(floors.data(), Index(floors.size()));
  return ch;
}

/// Floors over all K carriers against a fixed interference pattern: the
/// sub-problem one user faces when best-responding to everyone else.
template <typename Scalar>
EffectiveChannel<Scalar> interference_channel(const Instance<Scalar>& inst,
                                              const Matrix<Scalar>& powers, Index user) {
  EffectiveChannel<Scalar> ch;
  ch.budget = inst.budgets[user];
  std::vector<Scalar> floors;
  for (Index k = 0; k < inst.carriers(); ++k) {
    const Scalar g = inst.gains(user, k);
    if (!(g > Scalar(0))) continue;
    Scalar interference(0);
    for (Index m = 0; m < inst.users(); ++m)
      if (m != user) interference += inst.gains(m, k) * powers(m, k);
    floors.push_back((inst.noise_power + interference) / g);
    ch.carrier_ids.push_back(k);
  }
  ch.effective_noise = Eigen::Map<const Vector<Scalar>>(floors.data(), Index(floors.size()));
  return ch;
}

/// Admission test of the assignment loop: the candidate carrier clears the
/// water level computed as if every carrier already in the list were
/// active,
///   sum_{l in L} 1/g_l > |L|/g_new - budget/noise.
/// An empty list admits anything (0 > -budget/noise).
template <typename Scalar>
bool admission_test(std::span<const Scalar> list_gains, Scalar gain_new, Scalar budget,
                    Scalar noise) {
  if (!(gain_new > Scalar(0)))
    throw std::invalid_argument("admission_test: candidate gain must be positive");
  Scalar inv_sum(0);
  for (Scalar g : list_gains) inv_sum += Scalar(1) / g;
  return inv_sum > Scalar(list_gains.size()) / gain_new - budget / noise;
}

/// Closed-form water-filling utility over a list, taken with every listed
/// carrier active:
///   sum_{k in L} log2[ (g_k/|L|) (budget/noise + sum_{l in L} 1/g_l) ].
template <typename Scalar>
Scalar closed_form_q(std::span<const Scalar> list_gains, Scalar budget, Scalar noise) {
  if (list_gains.empty()) throw std::invalid_argument("closed_form_q: empty carrier list");
  Scalar inv_sum(0);
  for (Scalar g : list_gains) inv_sum += Scalar(1) / g;
  const Scalar common = (budget / noise + inv_sum) / Scalar(list_gains.size());
  Scalar q(0);
  for (Scalar g : list_gains) q += Scalar(std::log2(double(g * common)));
  return q;
}

/// Rate achieved by a water-filling result at zero interference.
template <typename Scalar>
Scalar waterfill_utility(const EffectiveChannel<Scalar>& ch, const WaterfillResult<Scalar>& wf) {
  Scalar total(0);
  for (Index i = 0; i < ch.effective_noise.size(); ++i)
    total += Scalar(std::log1p(double(wf.powers[i] / ch.effective_noise[i])) / std::numbers::ln2);
  return total;
}

}  // namespace feat
