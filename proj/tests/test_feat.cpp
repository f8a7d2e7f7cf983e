#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "feat/feat.hpp"
#include "feat/metrics.hpp"
#include "test_support.hpp"

using namespace feat;

namespace {

Instance<double> make_instance(Index n, Index k, std::vector<double> gains, double budget = 1.0,
                               double noise = 1.0) {
  Instance<double> inst;
  inst.gains.resize(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) inst.gains(i, j) = gains[size_t(i * k + j)];
  inst.noise_power = noise;
  inst.budgets = Vector<double>::Constant(n, budget);
  return inst;
}

}  // namespace

TEST_CASE("phase_a: single fresh candidate converges to the top") {
  Matrix<double> rho(1, 3);
  rho << 1.0, 0.5, 0.2;
  const std::vector<Index> cand{0};
  const auto res = phase_a(rho, cand, 1e-3);
  CHECK(res.alpha_star >= 1.0 - 1e-3);
  CHECK(res.ordering == cand);
}

TEST_CASE("phase_a: two users with mirrored rows share the 0.3 bottleneck") {
  // Only sorted row values matter to the bisection, so mirrored rows and
  // identical rows give the same trial sequence: feasible iff alpha <= 0.3,
  // final bracket [0.2998046875, 0.30078125].
  Matrix<double> mirrored(2, 2);
  mirrored << 1.0, 0.3, 0.3, 1.0;
  const std::vector<Index> cand{0, 1};
  const auto res = phase_a(mirrored, cand, 1e-3);
  CHECK(res.alpha_star == 0.2998046875);
  CHECK(res.alpha_star == doctest::Approx(test::bisection_oracle(mirrored, cand, 1e-3)));
  CHECK(res.ordering.size() == 2);

  Matrix<double> identical(2, 2);
  identical << 1.0, 0.3, 1.0, 0.3;
  const auto same = phase_a(identical, cand, 1e-3);
  CHECK(same.alpha_star == 0.2998046875);
  CHECK(same.ordering == res.ordering);
}

TEST_CASE("phase_a matches the exhaustive placement oracle") {
  std::mt19937_64 eng(31337);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + int(eng() % 4);
    const int k = std::max(n, 1 + int(eng() % 5));
    const auto inst = test::random_instance(eng, n, k, 0.0);
    auto st = FeatState<double>::init(inst);
    // Randomly knock out columns to mimic later rounds.
    for (Index c = 0; c < k; ++c)
      if (rng::uniform01(eng) < 0.25) st.disutility.col(c).setZero();

    std::vector<Index> cand;
    for (Index u = 0; u < n; ++u)
      if (rng::uniform01(eng) < 0.8 || cand.empty()) cand.push_back(u);

    const auto res = phase_a(st.disutility, cand, 1e-3);
    CHECK(res.alpha_star == test::bisection_oracle(st.disutility, cand, 1e-3));
    // Whatever happened, the ordering is a permutation of a subset of cand.
    for (Index u : res.ordering)
      CHECK(std::count(cand.begin(), cand.end(), u) == 1);
  }
}

TEST_CASE("phase_b: fresh rows with distinct favourites all admit") {
  const auto inst = make_instance(2, 3, {9.0, 1.0, 0.5, 1.0, 8.0, 0.5});
  auto st = FeatState<double>::init(inst);
  RoundRecord<double> rec;
  phase_b(st, inst, &rec);
  CHECK(st.assigned_this_round == 2);
  CHECK(st.lists[0] == std::vector<Index>{0});
  CHECK(st.lists[1] == std::vector<Index>{1});
  CHECK(st.eligible.size() == 2);
  CHECK(rec.admissions.size() == 2);
  CHECK((st.disutility.col(0).array() == 0).all());
  CHECK((st.disutility.col(1).array() == 0).all());
}

TEST_CASE("phase_b: failed admission drops the user from the eligible list") {
  const auto inst = make_instance(1, 2, {1.0, 0.4});
  FeatState<double> st;
  st.remaining = 1;
  st.ordering = {0};
  st.eligible = {0};
  st.disutility.resize(1, 2);
  st.disutility << 0.0, 0.4;  // carrier 1 already taken by user 0
  st.lists = {{0}};
  RoundRecord<double> rec;
  phase_b(st, inst, &rec);
  CHECK(st.assigned_this_round == 0);
  CHECK(st.lists[0] == std::vector<Index>{0});
  CHECK(st.eligible.empty());
  CHECK(rec.removals == std::vector<Index>{0});
}

TEST_CASE("phase_b: users beyond the carrier supply go unserved") {
  const auto inst = make_instance(3, 2, {5.0, 1.0, 1.0, 4.0, 2.0, 2.0});
  auto st = FeatState<double>::init(inst);
  phase_b(st, inst);
  CHECK(st.assigned_this_round == 2);
  CHECK(st.lists[2].empty());
  CHECK(st.eligible == std::vector<Index>{0, 1});
}

TEST_CASE("phase_c: single eligible user is re-selected via the else branch") {
  const auto inst = make_instance(1, 3, {2.0, 1.0, 0.5});
  FeatState<double> st;
  st.remaining = 3;
  st.ordering = {0};
  st.eligible = {0};
  st.disutility = Matrix<double>::Zero(1, 3);
  st.lists = {{0}};
  st.assigned_this_round = 1;
  const auto res = phase_c(st, inst, 0.9);
  CHECK_FALSE(res.stop);
  CHECK(res.next_candidates == std::vector<Index>{0});
  CHECK(st.remaining == 2);
}

TEST_CASE("phase_c: low-utility prefix is preferred when something was assigned") {
  // Q(user0) = log2(1*(1+1)) = 1, Q(user1) = log2(1023*(1+1/1023)) = 10.
  const auto inst = make_instance(2, 4, {1.0, 0.1, 0.1, 0.1, 0.1, 1023.0, 0.1, 0.1});
  FeatState<double> st;
  st.remaining = 2 + 1;  // pretend one extra assignment happened elsewhere
  st.ordering = {0, 1};
  st.eligible = {0, 1};
  st.disutility = Matrix<double>::Zero(2, 4);
  st.lists = {{0}, {1}};
  st.assigned_this_round = 1;

  SUBCASE("m0 > 0 takes only the under-served prefix") {
    const auto res = phase_c(st, inst, 0.5);
    CHECK_FALSE(res.stop);
    CHECK(res.next_candidates == std::vector<Index>{0});
  }
  SUBCASE("m0 == 0 falls back to the first min(M, eligible) users") {
    st.assigned_this_round = 0;
    const auto res = phase_c(st, inst, 0.5);
    CHECK_FALSE(res.stop);
    CHECK(res.next_candidates == std::vector<Index>{0, 1});
  }
}

TEST_CASE("phase_c stops when nothing remains or nobody is eligible") {
  const auto inst = make_instance(1, 1, {1.0});
  FeatState<double> st;
  st.remaining = 1;
  st.ordering = {0};
  st.eligible = {0};
  st.disutility = Matrix<double>::Zero(1, 1);
  st.lists = {{0}};
  st.assigned_this_round = 1;
  CHECK(phase_c(st, inst, 0.9).stop);  // M drops to zero

  st.remaining = 5;
  st.eligible.clear();
  st.assigned_this_round = 0;
  CHECK(phase_c(st, inst, 0.9).stop);
}

TEST_CASE("run_feat hand-traced single user, two carriers") {
  const auto inst = make_instance(1, 2, {4.0, 1.0});
  const auto out = run_feat(inst);

  CHECK(out.assignment.lists[0] == std::vector<Index>{0, 1});
  CHECK(out.assignment.unassigned.empty());
  CHECK(out.rounds == 2);
  CHECK(out.alpha_star_1 == 0.9990234375);  // 1 - 2^-10 after ten clean halvings
  CHECK(out.powers.powers(0, 0) == doctest::Approx(0.875).epsilon(1e-12));
  CHECK(out.powers.powers(0, 1) == doctest::Approx(0.125).epsilon(1e-12));
  const double utility = utility_noise(inst, out.powers.powers, 0);
  CHECK(utility == doctest::Approx(std::log2(4.5) + std::log2(1.125)).epsilon(1e-12));
  CHECK(utility == doctest::Approx(2.3399).epsilon(1e-4));

  REQUIRE(out.trace.size() == 2);
  CHECK(out.trace[0].admissions == std::vector<std::pair<Index, Index>>{{0, 0}});
  CHECK(out.trace[1].admissions == std::vector<std::pair<Index, Index>>{{0, 1}});
  CHECK(out.trace[1].alpha_star == 0.25);
  REQUIRE(out.trace[0].q_values.size() == 1);
  CHECK(out.trace[0].q_values[0].second == doctest::Approx(std::log2(5.0)).epsilon(1e-12));
  CHECK(out.trace[0].q_divergent.empty());
}

TEST_CASE("run_feat serves exactly one user when there is one carrier") {
  const auto inst = make_instance(2, 1, {2.0, 1.0});
  const auto out = run_feat(inst);
  CHECK(out.assignment.served_count() == 1);
  CHECK(out.assignment.disjoint());
}

TEST_CASE("run_feat gives both users their strong carrier") {
  const auto inst = make_instance(2, 2, {9.0, 1.0, 1.0, 9.0});
  const auto out = run_feat(inst);
  CHECK(out.assignment.lists[0] == std::vector<Index>{0});
  CHECK(out.assignment.lists[1] == std::vector<Index>{1});

  // Oracle: of the four one-carrier-per-user assignments, FEAT's maximizes
  // the worst normalized gain.
  double best_min_ratio = 0;
  for (Index k0 = 0; k0 < 2; ++k0)
    for (Index k1 = 0; k1 < 2; ++k1) {
      if (k0 == k1) continue;
      const double r0 = inst.gains(0, k0) / inst.gains.row(0).maxCoeff();
      const double r1 = inst.gains(1, k1) / inst.gains.row(1).maxCoeff();
      best_min_ratio = std::max(best_min_ratio, std::min(r0, r1));
    }
  const double feat_min_ratio =
      std::min(inst.gains(0, out.assignment.lists[0][0]) / inst.gains.row(0).maxCoeff(),
               inst.gains(1, out.assignment.lists[1][0]) / inst.gains.row(1).maxCoeff());
  CHECK(feat_min_ratio == doctest::Approx(best_min_ratio));
}

TEST_CASE("run_feat structural properties on random instances") {
  std::mt19937_64 eng(555);
  for (int rep = 0; rep < 60; ++rep) {
    const int n = 1 + int(eng() % 6);
    const int k = 1 + int(eng() % 10);
    const auto inst = test::random_instance(eng, n, k, double(int(eng() % 21)) - 10.0);
    const auto out = run_feat(inst);

    CHECK(out.assignment.disjoint());
    CHECK(out.rounds <= n + k);
    CHECK(is_feasible_allocation(inst, out.powers.powers));
    for (Index u = 0; u < n; ++u) {
      const double total = out.powers.powers.row(u).sum();
      if (out.assignment.lists[u].empty()) {
        CHECK(total == 0.0);
      } else {
        CHECK(std::abs(total - inst.budgets[u]) <= 1e-9 * inst.budgets[u]);
        for (Index c = 0; c < k; ++c) {
          const bool in_list = std::count(out.assignment.lists[u].begin(),
                                          out.assignment.lists[u].end(), c) > 0;
          if (!in_list) CHECK(out.powers.powers(u, c) == 0.0);
        }
      }
    }
  }
}

TEST_CASE("zero-gain carriers are infinitely noisy, never an error") {
  // User 0 cannot hear carrier 1 at all; it must neither be assigned to
  // him nor receive any of his power.
  const auto inst = make_instance(2, 3, {4.0, 0.0, 1.0, 0.5, 2.0, 0.5});
  const auto out = run_feat(inst);
  CHECK(out.assignment.disjoint());
  for (Index k : out.assignment.lists[0]) CHECK(inst.gains(0, k) > 0.0);
  CHECK(out.powers.powers(0, 1) == 0.0);
  CHECK(std::isfinite(utilities_noise(inst, out.powers.powers).sum()));
}

TEST_CASE("served count is exactly min(N, K)") {
  std::mt19937_64 eng(808);
  for (int n = 4; n <= 12; ++n)
    for (int k = 1; k < n; ++k) {
      const auto inst = test::random_instance(eng, n, k, 10.0);
      const auto out = run_feat(inst);
      CHECK(out.assignment.served_count() == k);
    }
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 1 + int(eng() % 8);
    const int k = n + int(eng() % 8);
    const auto inst = test::random_instance(eng, n, k, 0.0);
    CHECK(run_feat(inst).assignment.served_count() == n);
  }
}

TEST_CASE("no user profits from stretching into the leftover carriers") {
  std::mt19937_64 eng(2718);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + int(eng() % 5);
    const int k = n + int(eng() % 6);
    const auto inst = test::random_instance(eng, n, k, double(int(eng() % 21)) - 10.0);
    const auto out = run_feat(inst);

    for (Index u = 0; u < n; ++u) {
      if (out.assignment.lists[u].empty()) continue;
      std::vector<Index> extended = out.assignment.lists[u];
      extended.insert(extended.end(), out.assignment.unassigned.begin(),
                      out.assignment.unassigned.end());
      const auto ch = noise_only_channel(inst, u, extended);
      const double best = waterfill_utility(ch, waterfill(ch));
      const double stick = utility_noise(inst, out.powers.powers, u);
      CHECK(best <= stick * (1.0 + 1e-6));
      // Leftovers stay dry even in the extended problem.
      const auto wf = waterfill(ch);
      for (Index i = 0; i < Index(ch.carrier_ids.size()); ++i) {
        const bool leftover = std::count(out.assignment.unassigned.begin(),
                                         out.assignment.unassigned.end(), ch.carrier_ids[i]) > 0;
        if (leftover) CHECK(wf.powers[i] < 1e-6 * inst.budgets[u]);
      }
    }
  }
}

TEST_CASE("scaling one user's gain row leaves the bisection untouched") {
  // The normalized rows, and with them alpha and the ordering, ignore
  // per-user scale; admissions intentionally do not (they see the SNR).
  std::mt19937_64 eng(99);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + int(eng() % 4);
    const int k = n + int(eng() % 5);
    const auto inst = test::random_instance(eng, n, k, 0.0);
    const auto rho = FeatState<double>::init(inst).disutility;
    const auto all = identity_order(n);
    const auto base = phase_a(rho, all, 1e-3);

    auto scaled = inst;
    const Index u = Index(eng() % n);
    scaled.gains.row(u) *= 4.0;  // power of two: normalized row is bit-identical
    const auto rho4 = FeatState<double>::init(scaled).disutility;
    CHECK(rho4 == rho);
    const auto res4 = phase_a(rho4, all, 1e-3);
    CHECK(res4.alpha_star == base.alpha_star);
    CHECK(res4.ordering == base.ordering);
    CHECK(run_feat(scaled).alpha_star_1 == run_feat(inst).alpha_star_1);

    auto stretched = inst;
    stretched.gains.row(u) *= 3.7;
    const auto res37 = phase_a(FeatState<double>::init(stretched).disutility, all, 1e-3);
    CHECK(res37.alpha_star == base.alpha_star);
    CHECK(res37.ordering == base.ordering);
  }
}

TEST_CASE("deviation gain, welfare gap and utility spread obey the bounds") {
  std::mt19937_64 eng(31415);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + int(eng() % 4);
    const int k = n + int(eng() % 6);
    const auto inst = test::random_instance(eng, n, k, double(int(eng() % 21)) - 10.0);
    const auto out = run_feat(inst);
    const auto bounds = prop2_bounds(inst, out.alpha_star_1);
    if (!bounds.defined) continue;
    CHECK(bounds.omega > 1.0);

    const auto utilities = utilities_noise(inst, out.powers.powers);
    for (Index u = 0; u < n; ++u) {
      Matrix<double> deviated = out.powers.powers;
      deviated.row(u) = best_response(inst, out.powers.powers, u).transpose();
      const double gain = utility_noise(inst, deviated, u);
      CHECK(gain <= bounds.omega * utilities[u] * (1.0 + 1e-9));
    }

    const auto nash = nash_iwf(inst);
    const double optimal = optimal_utilities(inst, nash.alloc).sum();
    CHECK(optimal <= bounds.omega * utilities.sum() * (1.0 + 1e-9));

    const double spread = utilities.maxCoeff() / utilities.minCoeff();
    CHECK(spread <= bounds.fairness_bound * (1.0 + 1e-9));
  }
}
