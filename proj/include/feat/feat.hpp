#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "feat/model.hpp"
#include "feat/types.hpp"
#include "feat/waterfill.hpp"

namespace feat {

template <typename Scalar = double>
struct FeatParams {
  Scalar delta{1e-3};  // bisection tolerance on alpha
  Scalar beta{0.9};    // under-service threshold fraction

  void validate() const {
    if (!(delta > Scalar(0)) || !(delta < Scalar(1)))
      throw std::invalid_argument("feat params: delta must lie in (0, 1)");
    if (!(beta > Scalar(0)) || !(beta < Scalar(1)))
      throw std::invalid_argument("feat params: beta must lie in (0, 1)");
  }
};

/// One main-loop round as recorded for diagnostics and golden-trace tests.
template <typename Scalar = double>
struct RoundRecord {
  int round = 0;
  Scalar alpha_star{0};                            // bisection result of the round
  std::vector<Index> ordering;                     // user order produced by the bisection
  std::vector<std::pair<Index, Index>> admissions; // (user, carrier) pairs
  std::vector<Index> removals;                     // users dropped from the eligible list
  std::vector<std::pair<Index, Scalar>> q_values;  // per eligible user, in eligible order
  std::vector<Index> q_divergent;  // users whose Q strays >1% from the true water-filling rate
};

/// Mutable loop state of the assignment algorithm.
template <typename Scalar = double>
struct FeatState {
  Index remaining = 0;                    // unassigned carrier count M
  std::vector<Index> ordering;            // pi*
  std::vector<Index> eligible;            // pi0
  Matrix<Scalar> disutility;              // rho[n][k] = g[n][k]/max_l g[n][l], zeroed as carriers go
  std::vector<std::vector<Index>> lists;  // per-user carrier lists L_n
  Index assigned_this_round = 0;          // m0

  static FeatState init(const Instance<Scalar>& inst) {
    FeatState st;
    st.remaining = inst.carriers();
    st.ordering.resize(inst.users());
    for (Index n = 0; n < inst.users(); ++n) st.ordering[n] = n;
    st.eligible = st.ordering;
    st.disutility = inst.gains;
    for (Index n = 0; n < inst.users(); ++n) {
      const Scalar best = inst.gains.row(n).maxCoeff();
      st.disutility.row(n) /= best;
    }
    st.lists.resize(inst.users());
    return st;
  }
};

template <typename Scalar = double>
struct PhaseAResult {
  Scalar alpha_star{0};
  std::vector<Index> ordering;
};

namespace detail {

constexpr Index kFreeSlot = -1;

/// One bisection trial: place every candidate, in order, at the deepest
/// free slot at or below the deepest position of its sorted disutility row
/// still worth at least `trial`. Returns the slot-ordered user sequence on
/// success.
template <typename Scalar>
std::optional<std::vector<Index>> try_place(
    const std::vector<std::vector<Scalar>>& sorted_rows, std::span<const Index> ordering,
    Scalar trial, std::vector<Index>& slots) {
  std::fill(slots.begin(), slots.end(), kFreeSlot);
  for (Index u : ordering) {
    const auto& row = sorted_rows[u];
    const Index qualifying =
        std::upper_bound(row.begin(), row.end(), trial, std::greater<Scalar>()) - row.begin();
    if (qualifying == 0) return std::nullopt;  // no entry reaches the trial level
    Index slot = qualifying - 1;
    while (slot >= 0 && slots[slot] != kFreeSlot) --slot;
    if (slot < 0) return std::nullopt;  // every slot at or below l* is taken
    slots[slot] = u;
  }
  std::vector<Index> placed;
  placed.reserve(ordering.size());
  for (Index s : slots)
    if (s != kFreeSlot) placed.push_back(s);
  return placed;
}

}  // namespace detail

/// Phase A: bisection over alpha in [0, 1]. Each successful trial reorders
/// the candidates by the slots they were placed in and raises the lower
/// bound; a failed trial lowers the upper bound. Stops when the bracket is
/// narrower than delta and returns the last successful lower bound with
/// its ordering (the incoming order if no trial ever succeeded).
template <typename Scalar>
PhaseAResult<Scalar> phase_a(const Matrix<Scalar>& disutility, std::span<const Index> candidates,
                             Scalar delta) {
  if (candidates.empty()) throw std::invalid_argument("phase_a: no candidates");
  const Index n_carriers = disutility.cols();

  std::vector<std::vector<Scalar>> sorted_rows(disutility.rows());
  for (Index u : candidates) {
    auto& row = sorted_rows[u];
    row.resize(n_carriers);
    for (Index k = 0; k < n_carriers; ++k) row[k] = disutility(u, k);
    std::sort(row.begin(), row.end(), std::greater<Scalar>());
  }

  PhaseAResult<Scalar> res;
  res.alpha_star = Scalar(0);
  res.ordering.assign(candidates.begin(), candidates.end());

  Scalar lower(0), upper(1);
  std::vector<Index> slots(n_carriers, detail::kFreeSlot);
  while (upper - lower >= delta) {
    const Scalar trial = (upper + lower) / Scalar(2);
    auto placed = detail::try_place<Scalar>(sorted_rows, res.ordering, trial, slots);
    if (placed) {
      res.ordering = std::move(*placed);
      lower = trial;
      res.alpha_star = trial;
    } else {
      upper = trial;
    }
  }
  return res;
}

/// Phase B: ordered greedy admission. Each ordered user picks his best
/// remaining carrier; if the admission test passes the carrier joins his
/// list and its column is zeroed for everyone, otherwise (or when nothing
/// remains in his row) he leaves the eligible list.
template <typename Scalar>
void phase_b(FeatState<Scalar>& st, const Instance<Scalar>& inst,
             RoundRecord<Scalar>* rec = nullptr) {
  st.assigned_this_round = 0;
  for (Index u : st.ordering) {
    Index best_k = -1;
    Scalar best(0);
    for (Index k = 0; k < inst.carriers(); ++k)
      if (st.disutility(u, k) > best) {  // strict: ties go to the lowest carrier index
        best = st.disutility(u, k);
        best_k = k;
      }

    bool admitted = false;
    if (best_k >= 0) {
      std::vector<Scalar> list_gains;
      list_gains.reserve(st.lists[u].size());
      for (Index k : st.lists[u]) list_gains.push_back(inst.gains(u, k));
      admitted = admission_test<Scalar>(list_gains, inst.gains(u, best_k), inst.budgets[u],
                                        inst.noise_power);
    }

    if (admitted) {
      st.lists[u].push_back(best_k);
      ++st.assigned_this_round;
      st.disutility.col(best_k).setZero();
      if (rec) rec->admissions.emplace_back(u, best_k);
    } else {
      st.eligible.erase(std::find(st.eligible.begin(), st.eligible.end(), u));
      if (rec) rec->removals.push_back(u);
    }
  }
}

template <typename Scalar = double>
struct PhaseCResult {
  std::vector<Index> next_candidates;
  bool stop = false;
};

/// Phase C: book-keeping and re-admission. Updates the unassigned count,
/// then picks the next round's candidates among the eligible users sorted
/// by their closed-form utility Q ascending: the whole low-utility prefix
/// (Q <= beta * Qmax) when one exists and something was assigned this
/// round, otherwise simply the first min(M, |eligible|) users.
template <typename Scalar>
PhaseCResult<Scalar> phase_c(FeatState<Scalar>& st, const Instance<Scalar>& inst, Scalar beta,
                             RoundRecord<Scalar>* rec = nullptr) {
  st.remaining -= st.assigned_this_round;
  if (st.eligible.empty() || st.remaining == 0) return {.next_candidates = {}, .stop = true};

  std::vector<std::pair<Index, Scalar>> q;  // (user, Q) in eligible order
  q.reserve(st.eligible.size());
  for (Index u : st.eligible) {
    if (st.lists[u].empty())
      throw std::logic_error("phase_c: eligible user with empty carrier list");
    std::vector<Scalar> list_gains;
    list_gains.reserve(st.lists[u].size());
    for (Index k : st.lists[u]) list_gains.push_back(inst.gains(u, k));
    q.emplace_back(u, closed_form_q<Scalar>(list_gains, inst.budgets[u], inst.noise_power));
  }

  if (rec) {
    rec->q_values = q;
    for (Index i = 0; i < Index(st.eligible.size()); ++i) {
      const Index u = st.eligible[i];
      const auto ch = noise_only_channel(inst, u, st.lists[u]);
      const Scalar truth = waterfill_utility(ch, waterfill(ch));
      if (std::abs(double(q[i].second - truth)) > 0.01 * std::abs(double(truth)))
        rec->q_divergent.push_back(u);
    }
  }

  Scalar q_max = q.front().second;
  for (const auto& [u, v] : q) q_max = std::max(q_max, v);

  std::stable_sort(q.begin(), q.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });

  const Index cap = std::min<Index>(st.remaining, Index(q.size()));
  Index take = cap;
  if (q.front().second <= beta * q_max && st.assigned_this_round > 0) {
    take = 0;
    while (take < cap && q[take].second <= beta * q_max) ++take;
  }

  PhaseCResult<Scalar> res;
  res.next_candidates.reserve(take);
  for (Index i = 0; i < take; ++i) res.next_candidates.push_back(q[i].first);
  return res;
}

template <typename Scalar = double>
struct FeatOutput {
  CarrierAssignment assignment;
  PowerAllocation<Scalar> powers;   // per-user water-filling over his list
  Scalar alpha_star_1{0};           // Phase-A value at the end of round 1
  int rounds = 0;
  std::vector<RoundRecord<Scalar>> trace;
};

/// The full assignment loop: Phase A -> B -> C until every carrier is
/// assigned or nobody is eligible for more. Ends with one water-filling
/// per served user over his own list; the lists are pairwise disjoint so
/// nobody sees interference.
template <typename Scalar>
FeatOutput<Scalar> run_feat(const Instance<Scalar>& inst, const FeatParams<Scalar>& params = {}) {
  inst.validate();
  params.validate();

  auto st = FeatState<Scalar>::init(inst);
  FeatOutput<Scalar> out;
  const int round_limit = int(inst.users() + inst.carriers());

  while (st.remaining > 0) {
    ++out.rounds;
    if (out.rounds > round_limit)
      throw std::logic_error("run_feat: round bound N + K exceeded");

    RoundRecord<Scalar> rec;
    rec.round = out.rounds;

    auto pa = phase_a(st.disutility, st.ordering, params.delta);
    st.ordering = pa.ordering;
    rec.alpha_star = pa.alpha_star;
    rec.ordering = pa.ordering;
    if (out.rounds == 1) out.alpha_star_1 = pa.alpha_star;

    phase_b(st, inst, &rec);
    auto pc = phase_c(st, inst, params.beta, &rec);
    out.trace.push_back(std::move(rec));
    if (pc.stop) break;
    st.ordering = std::move(pc.next_candidates);
  }

  out.assignment.lists = st.lists;
  std::vector<bool> taken(inst.carriers(), false);
  for (const auto& l : st.lists)
    for (Index k : l) taken[k] = true;
  for (Index k = 0; k < inst.carriers(); ++k)
    if (!taken[k]) out.assignment.unassigned.push_back(k);

  out.powers.powers = Matrix<Scalar>::Zero(inst.users(), inst.carriers());
  for (Index n = 0; n < inst.users(); ++n) {
    if (st.lists[n].empty()) continue;
    const auto ch = noise_only_channel(inst, n, st.lists[n]);
    const auto wf = waterfill(ch);
    for (Index i = 0; i < Index(ch.carrier_ids.size()); ++i)
      out.powers.powers(n, ch.carrier_ids[i]) = wf.powers[i];
  }
  return out;
}

}  // namespace feat
