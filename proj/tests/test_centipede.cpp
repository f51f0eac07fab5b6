#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ez/centipede.hpp"
#include "ez/solver.hpp"
#include "oracles.hpp"

using namespace ez;
using namespace ez::centipede;

TEST_CASE("terminal payoffs") {
  const auto t = terminal_payoffs({4, 1, 1});
  CHECK(t.z[0] == Payoff{0, 0});
  CHECK(t.z[1] == Payoff{-1, 2});
  CHECK(t.z[2] == Payoff{1, 1});
  CHECK(t.z[3] == Payoff{0, 3});
  CHECK(t.z_end == Payoff{2, 2});
  const auto t6 = terminal_payoffs({6, 2.5, 0.5});
  CHECK(t6.z_end[0] == doctest::Approx(7.5));
  for (int k = 1; k <= 6; ++k)
    if (k % 2 == 0) CHECK(t6.z[k - 1][0] + t6.z[k - 1][1] == doctest::Approx((k - 1) * 2.5));
  CHECK_THROWS_AS(validate({5, 1, 1}), ValidationError);
  CHECK_THROWS_AS(validate({2, 1, 1}), ValidationError);
  CHECK_THROWS_AS(validate({6, 0, 1}), ValidationError);
}

TEST_CASE("analogy conjecture matches a numeric minimizer") {
  for (int K = 4; K <= 40; K += 2) {
    const double x = static_cast<double>(
        oracle::golden_section_min([&](long double v) { return oracle::analogy_loss(K, v); }, 1e-12L, 1 - 1e-12L));
    CHECK(std::abs(analogy_conjecture(K) - x) < 1e-9);
    CHECK(analogy_conjecture(K) == doctest::Approx(2.0 / K));
  }
  CHECK(analogy_conjecture(4) == 0.5);
  CHECK(analogy_conjecture(10) == doctest::Approx(0.2));
}

TEST_CASE("maximal continuation profile") {
  const auto b = maximal_continuation_profile({4, 1, 1});
  CHECK(b.at(Group::A, Group::B) == Strategy{0, 0, 1, 1});
  CHECK(b.at(Group::A, Group::A) == Strategy{1, 1, 1, 1});
  CHECK(maximal_continuation_profile({6, 1, 1}).at(Group::B, Group::B) == Strategy{0, 0, 0, 0, 0, 1});
  CHECK(b.at(Group::B, Group::A) == Strategy{0, 0, 0, 1});
}

TEST_CASE("analogy MLE under maximal continuation data") {
  for (int K : {4, 6, 8}) {
    const Spec s{K, 1, 1};
    const auto t = terminal_payoffs(s);
    const auto b = maximal_continuation_profile(s);
    const auto x = best_analogy_conjecture(t, b.at(Group::B, Group::A), b.at(Group::A, Group::B));
    CHECK(x[0] == doctest::Approx(2.0 / K));
    CHECK(x[1] == doctest::Approx(2.0 / K));
    // KL at the MLE is no larger than at nearby parity strategies.
    const double k0 =
        conjecture_kl(t, b.at(Group::B, Group::A), b.at(Group::A, Group::B), parity_strategy(K, x[0], x[1]));
    for (double d : {-0.05, 0.05})
      CHECK(k0 <= conjecture_kl(t, b.at(Group::B, Group::A), b.at(Group::A, Group::B),
                                parity_strategy(K, x[0] + d, x[1] + d)) +
                      1e-12);
  }
}

TEST_CASE("terminal distribution sums to one") {
  const auto t = terminal_payoffs({6, 1, 1});
  const Strategy a{0.1, 0.3, 0.2, 0.9, 0.5, 0.4}, b{0.7, 0.2, 0.6, 0.1, 0.3, 0.8};
  double s = 0;
  for (double v : terminal_distribution(t, a, b)) s += v;
  CHECK(s == doctest::Approx(1.0));
  CHECK(reach_probabilities(t, a, b)[0] == 1.0);
  CHECK(reach_probabilities(t, a, b)[1] == doctest::Approx(0.9));
}

TEST_CASE("maximal continuation is an EZ-SU") {
  for (double pa : {1.0, 0.5, 0.1})
    for (double lambda : {0.0, 0.4, 1.0}) {
      const Shares sh{pa, 1 - pa};
      CHECK(verify_maximal_ezsu({6, 1, 1}, sh, lambda).ok);
      CHECK(verify_maximal_ezsu({8, 0.5, 1}, sh, lambda).ok);
      CHECK(verify_maximal_ezsu_dollar(6, sh, lambda).ok);
    }
  const auto v = verify_maximal_ezsu({4, 0.5, 1}, {1, 0}, 0);
  CHECK_FALSE(v.ok);
  CHECK(v.violation.find("node") != std::string::npos);
}

TEST_CASE("centipede fitness and stable share") {
  for (const Spec s : {Spec{6, 1, 1}, Spec{8, 2, 0.5}, Spec{10, 0.5, 1}, Spec{4, 3, 1}}) {
    for (int i = 0; i <= 100; ++i) {
      const double p = i / 100.0;
      const auto f = centipede_fitness(s, p);
      CHECK(std::abs((f.rational - f.analogy) - (0.5 * s.l - p * s.g * (s.K - 2) / 2)) < 1e-12);
    }
    const double ps = stable_share_centipede(s);
    // The share is that of analogy adherents.
    const auto f = centipede_fitness(s, 1 - ps);
    CHECK(f.analogy == doctest::Approx(f.rational));
  }
  CHECK(stable_share_centipede({6, 1, 1}) == 0.75);
}

TEST_CASE("tree fitness agrees with the closed form") {
  const Spec s{6, 1, 1};
  const auto t = terminal_payoffs(s);
  const auto b = maximal_continuation_profile(s);
  for (double p : {0.2, 0.6}) {
    const auto tf = tree_fitness(t, b, {p, 1 - p}, 0.0);
    const auto cf = centipede_fitness(s, p);
    CHECK(tf[0] == doctest::Approx(cf.rational));
    CHECK(tf[1] == doctest::Approx(cf.analogy));
  }
}

TEST_CASE("dollar game: rational dominates analogy") {
  for (int K : {4, 6, 10})
    for (int i = 0; i <= 100; ++i) {
      const auto f = dollar_fitness(K, i / 100.0);
      CHECK(f.rational > f.analogy);
    }
  const auto f = dollar_fitness(6, 1.0);
  CHECK(f.rational == doctest::Approx(0.5));
}

TEST_CASE("finite strategic form") {
  const auto t = terminal_payoffs({4, 1, 1});
  const StageGame g = finite_game(t);
  CHECK(g.n_actions() == 16);
  CHECK(validate_game(g).ok());
  CHECK(pure_index("DAAA") == 8);
  CHECK(g.strategies[pure_index("ADAD")] == "ADAD");
  // Both always drop: P1 drops at node 1, so utility is 0 in either role.
  const auto u = reduce(g).payoff[0];
  CHECK(u(pure_index("DDDD"), pure_index("DDDD")) == doctest::Approx(0.0));
  // Never drop against never drop: z_end.
  CHECK(u(pure_index("AAAA"), pure_index("AAAA")) == doctest::Approx(2.0));
  // Objective best replies on the strategic form agree with the tree.
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b) {
      Strategy sa(4), sb(4);
      for (int k = 0; k < 4; ++k) {
        sa[k] = g.strategies[a][k] == 'D';
        sb[k] = g.strategies[b][k] == 'D';
      }
      CHECK(u(a, b) == doctest::Approx(symmetric_payoff(t, sa, sb)));
    }
}

TEST_CASE("payoff recurrence and growth") {
  for (const Spec s : {Spec{6, 1, 1}, Spec{8, 0.7, 2}}) {
    const auto t = terminal_payoffs(s);
    for (int k = 2; k <= s.K; ++k) {
      const int other = k % 2 == 0 ? 0 : 1;  // the player not moving at node k
      CHECK(t.z[k - 1][other] == doctest::Approx(t.z[k - 2][other] - s.l));
      CHECK(t.z[k - 1][0] + t.z[k - 1][1] == doctest::Approx(t.z[k - 2][0] + t.z[k - 2][1] + s.g));
    }
  }
}

TEST_CASE("stable share values and monotonicity") {
  CHECK(stable_share_centipede({4, 1.1, 1}) == doctest::Approx(1 - 1 / 2.2));
  for (int K : {4, 6, 8})
    for (double g : {1.5, 2.0, 3.0})
      for (double l : {0.25, 0.5, 0.7}) {
        const Spec s{K, g, l};
        REQUIRE(continuation_condition(s));
        const double v = stable_share_centipede(s);
        CHECK(v > 0.5);
        CHECK(v < 1);
        CHECK(stable_share_centipede({K + 2, g, l}) > v);
        CHECK(stable_share_centipede({K, g * 1.1, l}) > v);
        CHECK(stable_share_centipede({K, g, l * 1.1}) < v);
      }
}

TEST_CASE("dollar fitness values") {
  const auto f = dollar_fitness(6, 0.5);
  CHECK(f.rational == doctest::Approx(3.0));
  CHECK(f.analogy == doctest::Approx(1.5));
  CHECK(dollar_fitness(6, 1.0).analogy == 0.0);
}

TEST_CASE("all-Drop is a trivial EZ-SU for rational agents") {
  const auto t = terminal_payoffs({6, 1, 1});
  const auto v = verify_tree_ezsu(t, all_drop_profile(6), {0.5, 0.5}, 0.3, TreeTheory::Rational, TreeTheory::Rational);
  CHECK(v.ok);
}

TEST_CASE("maximal continuation data returns the same conjecture") {
  for (int K : {4, 6, 10}) {
    const Spec s{K, 2, 1};
    REQUIRE(verify_maximal_ezsu(s, {0.5, 0.5}, 0.0).ok);
    const auto t = terminal_payoffs(s);
    const auto b = maximal_continuation_profile(s);
    // Drop frequency at each parity, read off the realized terminal distribution.
    const auto dist = terminal_distribution(t, b.at(Group::B, Group::A), b.at(Group::A, Group::B));
    const auto reach = reach_probabilities(t, b.at(Group::B, Group::A), b.at(Group::A, Group::B));
    double drops = 0, reached = 0;
    for (int k = 2; k <= K; k += 2) {
      drops += dist[k - 1];
      reached += reach[k - 1];
    }
    const double x = best_analogy_conjecture(t, b.at(Group::B, Group::A), b.at(Group::A, Group::B))[1];
    CHECK(x == doctest::Approx(analogy_conjecture(K)));
    CHECK(drops / reached == doctest::Approx(x));
  }
}
